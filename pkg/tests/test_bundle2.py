import numpy as np
import pytest
from conftest import B3, B4, gauge_bundle
from hypothesis import given
from hypothesis import strategies as st

from hgauge import bundle2 as b2
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import matlie
from hgauge.errors import EquivarianceFailure, GroupMismatch, IncoherentData

seeds = st.integers(0, 2**31 - 1)


def quasi_cm4(h):
    b, C, _ = gauge_bundle("CM4", B4)
    return b, b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([h])))


def test_decorated_axioms(cm1_setup):
    b, _, _ = cm1_setup
    assert max(b.check_axioms(100, seed=3).values()) < 1e-10


@given(seed=seeds)
def test_structure_maps_formulas(cm1_setup, seed):
    b, _, _ = cm1_setup
    cm = b.cm
    rng = np.random.default_rng(seed)
    d1, d2 = b.sample_composable(rng, 2)
    # t(gamma, p, h) = mu(gamma, p) tau(h^-1)
    q = b.mu(d1.gamma, d1.p)
    assert np.allclose(b.target(d1).g, q.g @ cm.tau(cm.H.inverse(d1.h)))
    # decorated composition multiplies the H parts
    d = b.compose(d2, d1)
    assert np.allclose(d.h, d2.h @ d1.h)
    assert b2.point_distance(d.p, d1.p) == 0.0
    # unit (1, p, e)
    u = b.unit(d1.p)
    assert np.allclose(u.h, cm.H.identity)
    assert b2.arrow_distance(b.compose(d1, b.unit(d1.p)), d1) < 1e-12


@given(seed=seeds)
def test_inverse_is_two_sided(cm1_setup, seed):
    b, _, _ = cm1_setup
    d = b.sample_arrow(np.random.default_rng(seed))
    assert b2.arrow_distance(b.compose(b.inverse(d), d), b.unit(d.p)) < 1e-10
    assert b2.arrow_distance(b.compose(d, b.inverse(d)), b.unit(b.target(d))) < 1e-10


@given(seed=seeds)
def test_divide1_inverts_action(cm1_setup, seed):
    b, _, _ = cm1_setup
    rng = np.random.default_rng(seed)
    d = b.sample_arrow(rng)
    a = xm.random_arrow(b.cm, rng)
    back = b.divide1(d, b.act1(d, a))
    assert xm.arrow_distance(back, a) < 1e-10


def test_decorated_connection_is_categorical(cm1_setup):
    b, C, _ = cm1_setup
    cls, res = b2.classify_connection(b, C)
    assert cls == "categorical"
    assert res["section"] == 0.0


def test_Ch_is_quasi_with_predicted_unit_deviation():
    b, C = quasi_cm4(0.7)
    assert C.classification == "quasi"
    p = b.sample_point(np.random.default_rng(0))
    assert np.allclose(b2.unit_deviation(b, C, p), matlie.translation([0.7]))


def test_trivial_G_module_with_constant_H_is_quasi():
    cm = xm.builtin("CM2")
    X = gp.pair_groupoid(2)
    pg = b2.PrincipalGBundleOverGroupoid(X, cm.G, lambda m: cm.G.identity)
    b, C = b2.decorate(pg, cm)
    Ch = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([1.0])))
    assert Ch.classification == "quasi"


def test_Ch_rejects_non_equivariant_map(cm1_setup):
    b, C, _ = cm1_setup
    H = b.H

    def Hmap(gamma, p):
        # depends on g, so alpha-equivariance fails
        return matlie.exp(H, H.hat(np.array([p.g[0, 1], 0.2, 0.0])))

    with pytest.raises(EquivarianceFailure):
        b2.make_Ch(b, C, Hmap)


def test_decorate_rejects_group_mismatch():
    cm = xm.builtin("CM1")
    pg = b2.PrincipalGBundleOverGroupoid(gp.pair_groupoid(2), matlie.SO2, lambda m: np.eye(2))
    with pytest.raises(GroupMismatch):
        b2.decorate(pg, cm)


def test_coboundary_data_is_coherent_and_extracted_back():
    cm = xm.builtin("CM4")
    X = gp.pair_groupoid(2)
    a0 = cn.gauge_cocycle(cm.G, B4, 2)

    def f(m):
        return matlie.translation([0.3 * (m[0] - m[2]) ** 2 + 0.1 * m[1] - 0.2 * m[3]])

    pb = b2.PseudoPrincipalBundle(X, cm, *b2.coboundary_data(X, cm, a0, f))
    assert max(b2.check_coherence(pb, 50).values()) < 1e-9
    b, C = b2.quasi_decorate(pb)
    assert C.classification == "quasi"
    dist = b2.pseudo_distance(pb, b2.extract_pseudo(b, C), 50)
    assert max(dist.values()) < 1e-9


def test_associator_defect_fails_coherence_with_label():
    cm = xm.builtin("CM4")
    X = gp.pair_groupoid(2)
    e = cm.H.identity

    def Hm(g2, g1):
        return matlie.translation([0.5 * g2[0] * g1[1]])

    pb = b2.PseudoPrincipalBundle(X, cm, cn.gauge_cocycle(cm.G, B4, 2), lambda p: e, Hm)
    with pytest.raises(IncoherentData) as ei:
        b2.quasi_decorate(pb)
    assert ei.value.label in b2.COHERENCE_LABELS


def test_theta_E_is_identity_on_objects(cm4_setup):
    b, C, _ = cm4_setup
    th = b2.theta_E(b, C)
    p = b.sample_point(np.random.default_rng(1))
    assert b2.point_distance(th.F0(p), p) == 0.0


@pytest.mark.parametrize("name,B", [("CM1", B3), ("CM4", B4)])
def test_grothendieck_roundtrip(name, B):
    b, C, _ = gauge_bundle(name, B)
    if name == "CM4":
        C = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([0.4])))
    rep, _, _, _ = b2.grothendieck_roundtrip(b, C, 30)
    assert max(rep.values()) < 1e-9
