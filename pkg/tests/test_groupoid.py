import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgauge import groupoid as gp

seeds = st.integers(0, 2**31 - 1)
BASES = [("pair", 2), ("pair", 3), ("discrete", 2), ("action:SO2", 2)]


@pytest.mark.parametrize("kind,n", BASES)
def test_axioms(kind, n):
    res = gp.check_axioms(gp.builtin(kind, n), 100, seed=0)
    assert max(res.values()) < 1e-12


@pytest.mark.parametrize("kind,n", BASES)
@given(seed=seeds)
def test_arrow_from_and_fiber_coords_are_inverse(kind, n, seed):
    X = gp.builtin(kind, n)
    rng = np.random.default_rng(seed)
    x = X.sample_obj(rng)
    w = X.sample_fiber(rng)
    g = X.arrow_from(x, w)
    assert np.allclose(X.source(g), x)
    assert np.allclose(gp.fiber_coords(X, g), w)


def test_pair_groupoid_structure():
    X = gp.pair_groupoid(2)
    g = np.array([1.0, 2.0, 0.0, 0.5])
    assert np.allclose(X.target(g), [1.0, 2.0])
    assert np.allclose(X.source(g), [0.0, 0.5])
    assert np.allclose(X.inverse(g), [0.0, 0.5, 1.0, 2.0])


def test_action_groupoid_targets_rotate():
    X = gp.builtin("action:SO2")
    x = np.array([1.0, 0.0])
    g = X.arrow_from(x, [np.pi / 2])
    assert np.allclose(X.target(g), [0.0, 1.0], atol=1e-12)


def test_discrete_inclusion_is_functor(rng):
    X = gp.pair_groupoid(2)
    F = gp.discrete_inclusion(X)
    y = F.src.sample_obj(rng)
    u = F.src.unit(y)
    assert np.allclose(F.F1(u), X.unit(F.F0(y)))


def test_tangent_eval_of_target():
    X = gp.pair_groupoid(2)
    g = np.array([0.1, 0.2, 0.3, 0.4])
    v = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(gp.tangent_eval(X, X.target, g, v), [1.0, 0.0])


def test_unknown_groupoid():
    with pytest.raises(KeyError):
        gp.builtin("torus")
