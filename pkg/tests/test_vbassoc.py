import numpy as np
import pytest
from conftest import B3, B4, gauge_bundle

from hgauge import bundle2 as b2
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import hpath, matlie
from hgauge import transport as tr
from hgauge import vbassoc as vb
from hgauge.errors import ActionInvalid


@pytest.mark.parametrize("structure,n", [("pair", 3), ("discrete", 2)])
def test_two_vector_space_axioms(structure, n):
    V = vb.make_space(structure, xm.builtin("CM1"), n)
    assert max(V.check_axioms().values()) < 1e-12


def test_lie2_space_dimensions_and_axioms():
    cm = xm.builtin("CM1")
    V = vb.lie2_space(cm)
    assert (V.W_dim, V.V0_dim) == (cm.H.algebra_dim, cm.G.algebra_dim)
    assert max(V.check_axioms().values()) < 1e-12


@pytest.mark.parametrize(
    "cm_name,action,structure",
    [("CM1", "adjoint", "lie2"), ("CM4", "adjoint", "lie2"), ("CM1", "defining", "pair"),
     ("CM4", "defining", "pair"), ("DISC:SO3", "defining", "discrete"), ("CM1", "trivial", "pair")],
)
def test_builtin_actions_are_functorial(cm_name, action, structure):
    cm = xm.builtin(cm_name)
    V = vb.make_space(structure, cm, None if structure == "lie2" else cm.G.dim)
    act = vb.builtin_action(action, cm, V)
    assert max(vb.check_action(act).values()) < 1e-9


def test_defining_action_on_discrete_needs_tau_in_kernel():
    b, _, _ = gauge_bundle("CM1", B3)
    V = vb.discrete_space(3)
    with pytest.raises(ActionInvalid):
        vb.associate(b, vb.defining_action(b.cm, V))


def test_adjoint_needs_lie2_structure():
    with pytest.raises(ActionInvalid):
        vb.adjoint_action(xm.builtin("CM1"), vb.pair_space(3))


def test_interchange_on_hundred_squares(cm1_setup):
    b, _, _ = cm1_setup
    A = vb.associate(b, vb.adjoint_action(b.cm))
    assert vb.interchange_residual(A, 100) < 1e-10
    assert max(vb.check_vb(A, 30).values()) < 1e-10


def test_trivial_action_transport_is_identity(cm1_setup):
    b, C, omega = cm1_setup
    A = vb.associate(b, vb.trivial_action(b.cm, vb.pair_space(2)))
    rng = np.random.default_rng(0)
    G = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 1, 64)
    T = vb.vb_transport(b, C, omega, A, G)
    assert np.allclose(T.obj, np.eye(2)) and np.allclose(T.mor, np.eye(4))


def test_transport_is_linear_and_intertwines(cm1_setup):
    b, C, omega = cm1_setup
    A = vb.associate(b, vb.adjoint_action(b.cm))
    rng = np.random.default_rng(3)
    G = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 2, 64)
    T = vb.vb_transport(b, C, omega, A, G)
    u, w = rng.standard_normal(3), rng.standard_normal(3)
    assert np.allclose(T(2.0 * u - w), 2.0 * T(u) - T(w))
    assert max(vb.vb_transport_report(A, T).values()) < 1e-9


def test_categorical_cleavage_is_flat(cm1_setup):
    b, C, _ = cm1_setup
    A = vb.associate(b, vb.adjoint_action(b.cm))
    rep = vb.cleavage_report(b, C, A, 20)
    assert rep["flatness"] < 1e-10 and rep["unitality"] < 1e-10


def test_quasi_cleavage_defect_matches_prediction():
    b, C, _ = gauge_bundle("CM1:SO2", [[0.3], [0.5]])
    Ch = b2.make_Ch(b, C, b2.constant_Hmap(matlie.rot2(0.3)))
    A = vb.associate(b, vb.defining_action(b.cm, vb.pair_space(2)))
    rep = vb.cleavage_report(b, Ch, A, 20)
    assert rep["flatness"] > 0.1
    assert rep["defect_mismatch"] < 1e-10


def test_so2_loop_holonomy_is_exp_of_enclosed_area():
    cm = xm.builtin("CM1:SO2")
    X = gp.discrete_groupoid(2)
    pg = b2.PrincipalGBundleOverGroupoid(X, cm.G, lambda m: cm.G.identity)
    b, C, omega = cn.decorated_connection(pg, cm, cn.area_potential(cm.G, [1.0]))
    corners = [np.array(c, float) for c in ([0, 0], [0.6, 0], [0.6, 0.6], [0, 0.6], [0, 0])]
    loop = hpath.line_path(corners[0], corners[1], 128)
    for a, c in zip(corners[1:-1], corners[2:]):
        loop = hpath.concat(hpath.line_path(a, c, 128), loop)
    G = hpath.make_lazy_path(X, [X.unit(corners[0]), X.unit(corners[0])], [loop])
    A = vb.associate(b, vb.defining_action(cm, vb.pair_space(2)))
    T = vb.vb_transport(b, C, omega, A, G)
    expected = matlie.exp(cm.G, -0.36 * cm.G.hat([1.0]))
    assert np.abs(T.holonomy - expected).max() < 1e-8
    assert vb.vb_transport_report(A, T)["holonomy_identity"] == 0.0


def test_quasi_vb_over_cm4():
    b, C, omega = gauge_bundle("CM4", B4)
    Ch = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([0.7])))
    A = vb.associate(b, vb.defining_action(b.cm, vb.pair_space(3)))
    rng = np.random.default_rng(1)
    G = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 1, 64)
    assert max(vb.vb_transport_report(A, vb.vb_transport(b, Ch, omega, A, G)).values()) < 1e-9
