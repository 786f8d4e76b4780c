"""Select the compiled RK4 kernel when available, else the numpy fallback.

Set ``HGAUGE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _rk4_py

if os.environ.get("HGAUGE_PURE_PYTHON") == "1":
    rk4_linear = _rk4_py.rk4_linear
    BACKEND = "python"
else:
    try:
        from ._rk4 import rk4_linear  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        rk4_linear = _rk4_py.rk4_linear
        BACKEND = "python"

__all__ = ["rk4_linear", "BACKEND"]
