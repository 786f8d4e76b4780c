import numpy as np
import pytest
from conftest import B3

from hgauge import bundle2 as b2
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import matlie
from hgauge.errors import HypothesisFailure, SpanViolation


def test_gauge_connection_validates(cm1_setup):
    b, _, omega = cm1_setup
    res = cn.validate_strict(omega, 15, seed=2)
    assert max(res.values()) < 1e-6
    assert cn.hypothesis_residual(b, omega, 15) < 1e-7


def test_scaled_connection_fails_vertical_normalization(cm1_setup):
    _, _, omega = cm1_setup
    res = cn.validate_strict(cn.ScaledConnection(omega, 1.5), 5, seed=2)
    assert res["vertical0"] > 0.1


def test_gauge_potential_is_pure_gauge():
    G = matlie.SO3
    phi, _ = cn.gauge_phi(G, B3)
    A = cn.gauge_potential(G, B3)
    x, v = np.array([0.3, -0.7]), np.array([0.4, 1.1])
    h = 1e-6
    dphi = (phi(x + h * v) - phi(x - h * v)) / (2 * h)
    assert np.allclose(A(x, v), -dphi @ G.inverse(phi(x)), atol=1e-8)


def test_constant_potential_is_linear_in_v():
    A = cn.constant_potential(matlie.SO3, [[1, 0, 0], [0, 0, 2]])
    assert np.allclose(A(None, [2.0, 0.5]), matlie.so3_hat([2, 0, 1]))


def test_hypothesis_rejects_curved_potential_over_pair_groupoid():
    cm = xm.builtin("CM1")
    pg = b2.PrincipalGBundleOverGroupoid(gp.pair_groupoid(2), cm.G, lambda m: cm.G.identity)
    with pytest.raises(HypothesisFailure):
        cn.decorated_connection(pg, cm, cn.area_potential(cm.G, [0, 0, 1]))


def test_potential_outside_algebra_rejected():
    cm = xm.builtin("CM1")
    pg = b2.PrincipalGBundleOverGroupoid(gp.pair_groupoid(2), cm.G, lambda m: cm.G.identity)
    b, _ = b2.decorate(pg, cm)
    with pytest.raises(SpanViolation):
        cn.trivial_connection(b, lambda x, v: np.eye(3))


def test_semidirect_adjoint_respects_source(rng):
    cm = xm.builtin("CM1:SO3")
    a = xm.random_arrow(cm, rng)
    v = cn.LieValue(cm.H.random_algebra(rng), cm.G.random_algebra(rng))
    w = cn.semidirect_adjoint(cm, a, v)
    assert np.allclose(cn.lie_source(w), a.g @ v.X @ cm.G.inverse(a.g))
