import numpy as np
import pytest
import scipy.linalg
from conftest import B3, gauge_bundle

from hgauge import bundle2 as b2
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import hpath
from hgauge import transport as tr
from hgauge.errors import FiberMismatch

K = 64


def discrete_constant(coeffs):
    cm = xm.builtin("DISC:SO3")
    pg = b2.PrincipalGBundleOverGroupoid(gp.discrete_groupoid(2), cm.G, lambda m: cm.G.identity)
    return cn.decorated_connection(pg, cm, cn.constant_potential(cm.G, coeffs))


def sample_path(b, seed=0, order=2):
    rng = np.random.default_rng(seed)
    return tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), order, K)


def test_cartesian_transport_is_torsor_map(cm4_setup):
    b, C, _ = cm4_setup
    gamma = b.base.sample_arrow(np.random.default_rng(0))
    T = tr.cartesian_transport(b, C, gamma)
    assert max(tr.check_torsor_map(T, b, b, 30).values()) < 1e-10


def test_path_transport_is_torsor_map(cm1_setup):
    b, _, omega = cm1_setup
    T = tr.path_transport(omega, hpath.line_path(np.zeros(2), np.array([0.6, -0.4]), K))
    assert max(tr.check_torsor_map(T, b, b, 20).values()) < 1e-8


def test_constant_potential_matches_matrix_exponential():
    b, C, omega = discrete_constant([[0.3, -0.2, 0.5], [0.1, 0.4, 0.0]])
    x0, x1 = np.array([0.1, -0.2]), np.array([0.9, 0.6])
    G = hpath.make_lazy_path(b.base, [b.base.unit(x0), b.base.unit(x1)], [hpath.line_path(x0, x1, 128)])
    g = tr.lazy_transport(b, C, omega, G)(b2.Point(x0, b.G.identity)).g
    exact = scipy.linalg.expm(-omega.potential(x0, x1 - x0))
    assert np.linalg.norm(g - exact) / np.linalg.norm(exact) < 1e-6


def test_lemma_identities(cm1_setup):
    _, _, omega = cm1_setup
    assert max(tr.lemma_identities(omega, 5, seed=1, K=K).values()) < 1e-7


def test_unit_lift_of_point_path(cm1_setup):
    # Tr^{u o alpha}(1_p) = 1_{Tr^alpha p}
    _, _, omega = cm1_setup
    assert tr.lemma_identities(omega, 3, seed=4, K=K)["unit"] < 1e-10


@pytest.mark.parametrize("kind", tr.TRANSFORM_KINDS)
def test_invariance_under_equivalence(disc_so3_setup, kind):
    b, C, omega = disc_so3_setup
    G = sample_path(b)
    G2, desc = tr.standard_transform(G, kind, np.random.default_rng(1))
    r = tr.invariance_suite(b, C, omega, G2, desc)
    assert r["quotient_equal"] and r["divider_distance"] < 1e-6


@pytest.mark.parametrize("kind", ["thin_deform", "conjugate", "remove_identity"])
def test_invariance_for_quasi_connection(cm4_setup, kind):
    b, C, omega = cm4_setup
    G2, desc = tr.standard_transform(sample_path(b, 3), kind, np.random.default_rng(2))
    assert tr.invariance_suite(b, C, omega, G2, desc)["quotient_equal"]


def test_functor_laws(cm4_setup):
    b, C, omega = cm4_setup
    rng = np.random.default_rng(5)
    G1 = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 2, K)
    G2 = tr.random_lazy_path(b.base, rng, G1.target, 1, K)
    r = tr.functor_suite(b, C, omega, G1, G2)
    assert r["pass"], r


def test_left_twist_classifies_by_tau_image(cm4_setup):
    b, C, omega = cm4_setup
    F = tr.lazy_transport(b, C, omega, sample_path(b, 7, 1))
    inside = b.cm.tau(b.H.random(np.random.default_rng(0)))
    assert tr.quotient_equal(b, F, tr.left_twist(F, inside))[0]
    off = np.eye(3)
    off[1, 2] = 1e-3
    eq, wit = tr.quotient_equal(b, F, tr.left_twist(F, off))
    assert not eq
    assert wit.distance == pytest.approx(1e-3, rel=1e-6)


def test_fiber_mismatch_is_raised(cm1_setup):
    b, C, _ = cm1_setup
    gamma = b.base.arrow_from(np.zeros(2), [0.5, 0.5])
    T = tr.cartesian_transport(b, C, gamma)
    with pytest.raises(FiberMismatch):
        T(b2.Point(np.array([7.0, 7.0]), b.G.identity))


def test_naturality_of_theta(cm4_setup):
    b, C, omega = cm4_setup
    _, bq, Cq, theta = b2.grothendieck_roundtrip(b, C, 10)
    omq = cn.pullback_connection(theta, omega, bq)
    res = tr.naturality_suite(theta, bq, Cq, omq, b, C, omega, 3, K=K)
    assert max(res.values()) < 1e-7


def test_pullback_along_discrete_inclusion():
    b, C, omega = gauge_bundle("CM1", B3)
    F = gp.discrete_inclusion(b.base)
    Y = F.src
    rng = np.random.default_rng(0)
    paths = [tr.random_lazy_path(Y, rng, Y.sample_obj(rng), 1, K)]
    res = tr.pullback_suite(b, C, omega, F, paths, 3)
    assert res.pop("lazy_equal")
    assert max(res.values()) < 1e-7


def test_smoothness_second_derivative_for_constant_potential():
    b, C, omega = discrete_constant([[0.2, 0.0, 0.4], [0.0, -0.3, 0.1]])
    x0, x1 = np.array([0.1, 0.2]), np.array([1.0, -0.4])
    G = hpath.make_lazy_path(b.base, [b.base.unit(x0), b.base.unit(x1)], [hpath.line_path(x0, x1, 128)])
    r = tr.smoothness_probe(lambda u: (b, C, cn.ScaledConnection(omega, u), G), [0.699, 0.7, 0.701])
    M = omega.potential(x0, x1 - x0)
    exact = M @ M @ scipy.linalg.expm(-0.7 * M)
    assert np.abs(r["second"][0] - exact).max() < 1e-5
