import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgauge import groupoid as gp
from hgauge import hpath
from hgauge.errors import EndpointMismatch, NotConstant

X = gp.pair_groupoid(2)


def seg(x0, x1, K=64):
    return hpath.line_path(np.array(x0, float), np.array(x1, float), K)


def two_piece():
    a0 = X.arrow_from(np.zeros(2), [0.2, 0.1])
    x1 = X.target(a0)
    alpha = seg(x1, [0.5, -0.3])
    a1 = X.arrow_from(alpha.end(), [0.1, 0.4])
    return hpath.make_lazy_path(X, [a0, a1], [alpha])


@given(u=st.floats(0.0, 1.0))
def test_smooth_step_is_monotone_step(u):
    s = hpath.smooth_step(np.array([u, min(1.0, u + 1e-3)]))
    assert 0.0 <= s[0] <= s[1] <= 1.0


def test_smooth_step_is_flat_at_the_ends():
    t = np.array([0.0, 1e-3, 1.0 - 1e-3, 1.0])
    s = hpath.smooth_step(t)
    assert s[0] == 0.0 and s[-1] == 1.0
    assert s[1] < 1e-100 and 1.0 - s[2] < 1e-100


def test_paths_have_sitting_instants():
    alpha = seg([0, 0], [1, 1])
    assert alpha.sitting_residual() < 1e-12
    assert np.allclose(alpha(0.5), [0.5, 0.5])


def test_concat_and_reverse():
    a = seg([0, 0], [1, 0])
    b = seg([1, 0], [1, 1])
    ab = hpath.concat(b, a)
    assert np.allclose(ab.start(), [0, 0]) and np.allclose(ab.end(), [1, 1])
    assert np.allclose(ab.reverse().start(), [1, 1])
    with pytest.raises(Exception):
        hpath.concat(a, a)


def test_endpoint_mismatch_is_reported_with_index():
    a0 = X.unit(np.zeros(2))
    with pytest.raises(EndpointMismatch) as ei:
        hpath.make_lazy_path(X, [a0, a0], [seg([0.1, 0.0], [0.0, 0.0])])
    assert ei.value.index == 1


def test_unit_lazy_path():
    x = np.array([0.3, 0.2])
    U = hpath.groupoid_unit(X, x)
    assert U.order == 1
    assert np.allclose(U.arrows[0], X.unit(x)) and np.allclose(U.arrows[1], X.unit(x))
    assert U.paths[0].is_constant()


def test_remove_and_add_constant_roundtrip():
    G = two_piece()
    G2 = hpath.move_add_constant(G, 0)
    assert G2.order == 2
    G3 = hpath.move_remove_constant(G2, 0)
    assert np.allclose(G3.arrows[0], G.arrows[0])
    with pytest.raises(NotConstant):
        hpath.move_remove_constant(G, 0)


def test_groupoid_inverse_reverses_endpoints():
    G = two_piece()
    Gi = hpath.groupoid_invert(G)
    assert np.allclose(Gi.source, G.target) and np.allclose(Gi.target, G.source)
    GG = hpath.groupoid_compose(Gi, G)
    assert np.allclose(GG.source, G.source) and np.allclose(GG.target, G.source)


def test_rank1_certificate_separates_thin_from_full_rank():
    s = np.linspace(0, 1, 41)
    st_ = np.outer(s, s)
    thin = np.stack([np.cos(st_), np.sin(st_)], axis=-1)  # factors through a curve
    still = np.stack([np.cos(3 * s), s**2], axis=-1)[None].repeat(41, axis=0)  # independent of s
    full = np.stack([np.outer(np.sin(s), np.ones(41)), np.outer(np.ones(41), s)], axis=-1)
    assert hpath.rank1_certificate(still) < 1e-10
    assert hpath.rank1_certificate(thin) < 1e-8
    assert hpath.rank1_certificate(full) > 0.5


def test_reparametrization_homotopy_is_thin_and_square_sweep_is_not():
    t = np.linspace(0, 1, 201)
    s = np.linspace(0, 1, 201)

    def alpha(u):
        return np.stack([np.cos(2 * u), np.sin(3 * u)], axis=-1)

    # phi_s(t) = t + 0.1 s sin(pi t) is an endpoint-fixing reparametrization for each s
    phis = t[None, :] + 0.1 * s[:, None] * np.sin(np.pi * t[None, :])
    assert hpath.rank1_certificate(alpha(phis)) < 1e-8
    sweep = np.stack(np.meshgrid(s, t, indexing="ij"), axis=-1)
    assert hpath.rank1_certificate(sweep) > 0.1


def test_thin_deform_with_constant_zetas_is_identity():
    G = two_piece()
    G2 = hpath.thin_deform(G, hpath.constant_zetas(G))
    assert all(np.allclose(a, b) for a, b in zip(G.arrows, G2.arrows))
    assert np.allclose(G2.paths[0].start(), G.paths[0].start())
    assert np.allclose(G2.paths[0].end(), G.paths[0].end())


def test_thin_deform_reversal_recovers_endpoints():
    G = two_piece()
    rng = np.random.default_rng(0)
    from hgauge import transport as tr

    G2, desc = tr.standard_transform(G, "thin_deform", rng)
    back = hpath.thin_deform(tr.apply_transform(G2, desc), hpath.reverse_zetas(desc["zetas"]))
    assert all(np.allclose(a, b, atol=1e-10) for a, b in zip(back.arrows, G2.arrows))


def test_invert_twice_and_order_bookkeeping():
    G = two_piece()
    Gii = hpath.groupoid_invert(hpath.groupoid_invert(G))
    assert hpath.lazy_path_distance(G, Gii) < 1e-14
    assert hpath.groupoid_compose(G, hpath.groupoid_unit(X, G.source)).order == G.order + 1


def test_conjugation_in_action_groupoid_rotates_path():
    Xa = gp.builtin("action:SO2")
    alpha = hpath.line_path(np.array([1.0, 0.0]), np.array([1.0, 1.0]), 64)
    theta = hpath.constant_path(np.array([0.4]), 64).samples[:, 0]
    zeta = hpath.SampledPath(np.array([Xa.arrow_from(x, [th]) for x, th in zip(alpha.samples, theta)]),
                             alpha.plateau)
    G = hpath.make_lazy_path(Xa, [Xa.unit(alpha.start()), Xa.unit(alpha.end())], [alpha])
    G2 = hpath.move_conjugate(G, 1, zeta)
    R = np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]])
    assert np.allclose(G2.paths[0].samples, alpha.samples @ R.T)
