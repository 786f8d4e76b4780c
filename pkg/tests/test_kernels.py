import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from hgauge import _rk4_py, kernels

try:
    from hgauge import _rk4
except ImportError:  # extension not built
    _rk4 = None


def problem(K, d, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((K + 1, d, d)), rng.standard_normal((K, d, d)), np.eye(d), 1.0 / K


@pytest.mark.skipif(_rk4 is None, reason="compiled kernel not built")
@given(seed=st.integers(0, 2**31 - 1), K=st.integers(1, 64), d=st.integers(1, 4))
def test_backends_agree(seed, K, d):
    Mn, Mm, g0, h = problem(K, d, seed)
    a = _rk4_py.rk4_linear(Mn, Mm, g0, h)
    b = _rk4.rk4_linear(Mn, Mm, g0, h)
    assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())


def test_fallback_is_fourth_order():
    A = np.array([[0.0, -1.3], [1.3, 0.2]])
    exact = scipy.linalg.expm(-A)
    errs = []
    for K in (16, 32, 64):
        Mn, Mm = np.repeat(A[None], K + 1, 0), np.repeat(A[None], K, 0)
        errs.append(np.abs(_rk4_py.rk4_linear(Mn, Mm, np.eye(2), 1.0 / K)[-1] - exact).max())
    order = np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2])
    assert all(3.8 < o < 4.2 for o in order)


def test_selected_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    if _rk4 is not None:
        assert kernels.BACKEND == "cython"


def test_environment_forces_fallback():
    env = dict(os.environ, HGAUGE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from hgauge import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
