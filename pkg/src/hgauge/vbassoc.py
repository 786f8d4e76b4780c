"""Associated VB-groupoids from a linear 2-group action on a 2-vector space.

A 2-vector space is stored as a two-term complex ``d: W -> V0`` with
``V1 = W + V0``: the arrow ``(w, v)`` runs from ``v`` to ``d w + v`` and
composition adds the ``W`` parts. Classes ``[p, v]`` and ``[delta, xi]`` are
kept as canonical representatives over the identity section ``(x, e)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import crossed_module as xm
from .bundle2 import Arrow, Point, Principal2Bundle, QuasiConnection, compose_deviation
from .connection import Connection, LieValue, semidirect_adjoint
from .crossed_module import CrossedModule, TwoGroupArrow
from .errors import ActionInvalid
from .hpath import LazyPath
from .transport import lazy_transport

ACTION_TOL = 1e-9
VB_TOL = 1e-10


# ------------------------------------------------------------ 2-vector spaces


@dataclass(frozen=True, eq=False)
class TwoVectorSpace:
    """Category internal to Vect, presented by a boundary matrix ``d: W -> V0``."""

    boundary: np.ndarray
    structure: str = "complex"

    @property
    def V0_dim(self) -> int:
        return self.boundary.shape[0]

    @property
    def W_dim(self) -> int:
        return self.boundary.shape[1]

    @property
    def V1_dim(self) -> int:
        return self.W_dim + self.V0_dim

    @property
    def S(self) -> np.ndarray:
        return np.hstack([np.zeros((self.V0_dim, self.W_dim)), np.eye(self.V0_dim)])

    @property
    def T(self) -> np.ndarray:
        return np.hstack([self.boundary, np.eye(self.V0_dim)])

    @property
    def U(self) -> np.ndarray:
        return np.vstack([np.zeros((self.W_dim, self.V0_dim)), np.eye(self.V0_dim)])

    @property
    def M(self) -> np.ndarray:
        """Composition V1 x_{V0} V1 -> V1 on stacked (xi2, xi1)."""
        nw, n0 = self.W_dim, self.V0_dim
        Iw = np.eye(nw)
        top = np.hstack([Iw, np.zeros((nw, n0)), Iw, np.zeros((nw, n0))])
        bot = np.hstack([np.zeros((n0, nw + n0 + nw)), np.eye(n0)])
        return np.vstack([top, bot])

    def compose(self, xi2, xi1) -> np.ndarray:
        return self.M @ np.concatenate([xi2, xi1])

    def check_axioms(self, n_samples: int = 20, seed: int = 0) -> dict:
        """Groupoid axioms of [V1 => V0] as matrix identities plus sampled associativity."""
        rng = np.random.default_rng(seed)
        S, T, U = self.S, self.T, self.U
        res = {
            "source_unit": float(np.abs(S @ U - np.eye(self.V0_dim)).max()),
            "target_unit": float(np.abs(T @ U - np.eye(self.V0_dim)).max()),
            "associativity": 0.0,
            "left_unit": 0.0,
            "right_unit": 0.0,
        }
        for _ in range(n_samples):
            x1 = rng.standard_normal(self.V1_dim)
            x2 = self.arrow_from(rng.standard_normal(self.W_dim), T @ x1)
            x3 = self.arrow_from(rng.standard_normal(self.W_dim), T @ x2)
            lhs = self.compose(self.compose(x3, x2), x1)
            rhs = self.compose(x3, self.compose(x2, x1))
            res["associativity"] = max(res["associativity"], float(np.abs(lhs - rhs).max()))
            res["left_unit"] = max(res["left_unit"], float(np.abs(self.compose(U @ (T @ x1), x1) - x1).max()))
            res["right_unit"] = max(res["right_unit"], float(np.abs(self.compose(x1, U @ (S @ x1)) - x1).max()))
        return res

    def arrow_from(self, w, v) -> np.ndarray:
        return np.concatenate([np.asarray(w, dtype=float), np.asarray(v, dtype=float)])


def pair_space(n: int) -> TwoVectorSpace:
    return TwoVectorSpace(np.eye(n), "pair")


def discrete_space(n: int) -> TwoVectorSpace:
    return TwoVectorSpace(np.zeros((n, 0)), "discrete")


def lie2_space(cm: CrossedModule) -> TwoVectorSpace:
    """L(H) -> L(G) via the differential of tau, in hat coordinates."""
    G, H = cm.G, cm.H
    cols = [G.vee(cm.d_tau(H.hat(e))) for e in np.eye(H.algebra_dim)]
    d = np.array(cols).T if cols else np.zeros((G.algebra_dim, 0))
    return TwoVectorSpace(d.reshape(G.algebra_dim, H.algebra_dim), "lie2")


STRUCTURES = ("pair", "discrete", "lie2")


def make_space(structure: str, cm: CrossedModule, V0_dim: Optional[int] = None,
               V1_dim: Optional[int] = None) -> TwoVectorSpace:
    if structure == "lie2":
        V = lie2_space(cm)
    elif structure in ("pair", "discrete"):
        if V0_dim is None:
            raise ActionInvalid(f"structure {structure!r} needs V0_dim")
        V = pair_space(V0_dim) if structure == "pair" else discrete_space(V0_dim)
    else:
        raise ActionInvalid(f"unknown 2-vector space structure {structure!r}")
    if V0_dim is not None and V0_dim != V.V0_dim:
        raise ActionInvalid(f"V0_dim {V0_dim} does not match structure ({V.V0_dim})")
    if V1_dim is not None and V1_dim != V.V1_dim:
        raise ActionInvalid(f"V1_dim {V1_dim} does not match structure ({V.V1_dim})")
    return V


# ------------------------------------------------------------------ actions


@dataclass(frozen=True, eq=False)
class TwoGroupLinearAction:
    name: str
    cm: CrossedModule
    V: TwoVectorSpace
    rho0: Callable[[np.ndarray], np.ndarray]
    rho1: Callable[[TwoGroupArrow], np.ndarray]


def _complex_rho1(cm: CrossedModule, V: TwoVectorSpace, rho0):
    """Extend rho0 to arrows when d is the identity or zero."""
    if V.structure == "pair":
        n = V.V0_dim

        def rho1(a):
            A, g = rho0(cm.tau(a.h) @ a.g), rho0(a.g)
            return np.block([[A, A - g], [np.zeros((n, n)), g]])

        return rho1
    if V.structure == "discrete":
        return lambda a: rho0(a.g)
    raise ActionInvalid(f"no canonical extension of rho0 to structure {V.structure!r}")


def trivial_action(cm: CrossedModule, V: TwoVectorSpace) -> TwoGroupLinearAction:
    n0, n1 = V.V0_dim, V.V1_dim
    return TwoGroupLinearAction("trivial", cm, V, lambda g: np.eye(n0), lambda a: np.eye(n1))


def defining_action(cm: CrossedModule, V: TwoVectorSpace) -> TwoGroupLinearAction:
    """G acting on R^n by its matrices; arrows act through the pair or discrete structure."""
    if V.V0_dim != cm.G.dim:
        raise ActionInvalid(f"defining representation needs V0_dim = {cm.G.dim}, got {V.V0_dim}")
    rho0 = lambda g: np.asarray(g, dtype=float)
    return TwoGroupLinearAction("defining", cm, V, rho0, _complex_rho1(cm, V, rho0))


def adjoint_action(cm: CrossedModule, V: Optional[TwoVectorSpace] = None) -> TwoGroupLinearAction:
    """Adjoint action of [H x| G => G] on its Lie 2-algebra, in hat coordinates."""
    V = lie2_space(cm) if V is None else V
    if V.structure != "lie2":
        raise ActionInvalid("adjoint action lives on the lie2 structure")
    G, H = cm.G, cm.H
    nG, nH = G.algebra_dim, H.algebra_dim
    zG, zH = np.zeros((G.dim, G.dim)), np.zeros((H.dim, H.dim))

    def rho0(g):
        gi = G.inverse(g)
        return np.array([G.vee(g @ G.hat(e) @ gi) for e in np.eye(nG)]).T.reshape(nG, nG)

    def rho1(a):
        cols = []
        for e in np.eye(nH):
            v = semidirect_adjoint(cm, a, LieValue(H.hat(e), zG))
            cols.append(np.concatenate([H.vee(v.Y), G.vee(v.X)]))
        for e in np.eye(nG):
            v = semidirect_adjoint(cm, a, LieValue(zH, G.hat(e)))
            cols.append(np.concatenate([H.vee(v.Y), G.vee(v.X)]))
        return np.array(cols).T.reshape(nH + nG, nH + nG)

    return TwoGroupLinearAction("adjoint", cm, V, rho0, rho1)


ACTIONS = {"trivial": trivial_action, "defining": defining_action, "adjoint": adjoint_action}


def builtin_action(name: str, cm: CrossedModule, V: TwoVectorSpace) -> TwoGroupLinearAction:
    try:
        return ACTIONS[name](cm, V)
    except KeyError:
        raise KeyError(f"unknown action {name!r}") from None


def check_action(act: TwoGroupLinearAction, n_samples: int = 30, seed: int = 0) -> dict:
    """Homomorphism and functoriality residuals of (rho0, rho1) on samples."""
    cm, V = act.cm, act.V
    rng = np.random.default_rng(seed)
    keys = ["rho0_hom", "rho1_hom", "source", "target", "unit", "compose"]
    res = dict.fromkeys(keys, 0.0)

    def bump(k, a, b):
        res[k] = max(res[k], float(np.abs(np.asarray(a) - np.asarray(b)).max()))

    for _ in range(n_samples):
        a1, a2 = xm.random_arrow(cm, rng), xm.random_arrow(cm, rng)
        bump("rho0_hom", act.rho0(a2.g @ a1.g), act.rho0(a2.g) @ act.rho0(a1.g))
        bump("rho1_hom", act.rho1(xm.arrow_tensor(cm, a2, a1)), act.rho1(a2) @ act.rho1(a1))
        R = act.rho1(a1)
        bump("source", V.S @ R, act.rho0(a1.g) @ V.S)
        bump("target", V.T @ R, act.rho0(xm.target(cm, a1)) @ V.T)
        bump("unit", act.rho1(xm.unit_arrow(cm, a1.g)) @ V.U, V.U @ act.rho0(a1.g))
        # composable pair in the 2-group and in V
        b2 = TwoGroupArrow(cm.H.random(rng), xm.target(cm, a1))
        xi1 = rng.standard_normal(V.V1_dim)
        xi2 = V.arrow_from(rng.standard_normal(V.W_dim), V.T @ xi1)
        lhs = act.rho1(xm.arrow_compose(cm, b2, a1)) @ V.compose(xi2, xi1)
        rhs = V.compose(act.rho1(b2) @ xi2, R @ xi1)
        bump("compose", lhs, rhs)
    return res


# ------------------------------------------------------- associated VB-groupoid


@dataclass(frozen=True, eq=False)
class AssociatedVB:
    """(E_i x V_i)/G_i in canonical representatives over the section (x, e)."""

    bundle: Principal2Bundle
    action: TwoGroupLinearAction

    @property
    def V(self) -> TwoVectorSpace:
        return self.action.V

    def base_point(self, x) -> Point:
        return Point(np.asarray(x, dtype=float), self.bundle.G.identity)

    def canon0(self, p: Point, v) -> np.ndarray:
        """[p, v] -> v' with [p, v] = [(x, e), v']."""
        return self.action.rho0(p.g) @ np.asarray(v, dtype=float)

    def canon1(self, d: Arrow, xi) -> np.ndarray:
        """[d, xi] -> xi' with [d, xi] = [(gamma, (x, e), e), xi']."""
        a = xm.tensor_inverse(self.bundle.cm, TwoGroupArrow(d.h, self.bundle.G.inverse(d.p.g)))
        return self.action.rho1(a) @ np.asarray(xi, dtype=float)

    def base_arrow(self, gamma) -> Arrow:
        b = self.bundle
        x = b.base.source(gamma)
        return Arrow(np.asarray(gamma, dtype=float), self.base_point(x), b.H.identity)

    # structure maps in canonical form
    def source(self, gamma, xi) -> np.ndarray:
        return self.V.S @ xi

    def target(self, gamma, xi) -> np.ndarray:
        d = self.base_arrow(gamma)
        return self.canon0(self.bundle.target(d), self.V.T @ xi)

    def unit(self, x, v) -> np.ndarray:
        return self.canon1(self.bundle.unit(self.base_point(x)), self.V.U @ v)

    def compose(self, gamma2, xi2, gamma1, xi1) -> np.ndarray:
        b, cm = self.bundle, self.bundle.cm
        d1 = self.base_arrow(gamma1)
        q = b.target(d1)
        # move the second representative so that it starts at t(d1)
        c = xm.unit_arrow(cm, q.g)
        d2 = b.act1(self.base_arrow(gamma2), c)
        xi2c = self.action.rho1(xm.tensor_inverse(cm, c)) @ xi2
        return self.canon1(b.compose(d2, d1), self.V.compose(xi2c, xi1))

    def sample_arrow(self, rng, gamma):
        return rng.standard_normal(self.V.V1_dim)

    def sample_over(self, rng, gamma, src_v):
        """Random canonical arrow over gamma with prescribed source."""
        return self.V.arrow_from(rng.standard_normal(self.V.W_dim), src_v)


def associate(b: Principal2Bundle, act: TwoGroupLinearAction, V: Optional[TwoVectorSpace] = None,
              n_check: int = 30, seed: int = 0, tol: float = ACTION_TOL) -> AssociatedVB:
    """Associated VB-groupoid; raises ActionInvalid if the action fails on samples."""
    if V is not None and V is not act.V:
        if V.boundary.shape != act.V.boundary.shape or np.abs(V.boundary - act.V.boundary).max() > 0:
            raise ActionInvalid("action is defined on a different 2-vector space")
    if act.cm is not b.cm and act.cm.name != b.cm.name:
        raise ActionInvalid(f"action is for {act.cm.name}, bundle uses {b.cm.name}")
    if act.V.V0_dim == 0:
        raise ActionInvalid("empty 2-vector space")
    report = check_action(act, n_check, seed)
    bad = {k: v for k, v in report.items() if not v < tol}
    if bad:
        k = max(bad, key=bad.get)
        raise ActionInvalid(f"action {act.name!r} fails {k} (residual {bad[k]:.3e})")
    return AssociatedVB(b, act)


def interchange_residual(vb: AssociatedVB, n_samples: int = 100, seed: int = 0) -> float:
    """Max of |(g3 o g1) + (g4 o g2) - (g3 + g4) o (g1 + g2)| on sampled squares."""
    b = vb.bundle
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = b.base.sample_obj(rng)
        gam1 = b.base.sample_arrow(rng, x)
        gam2 = b.base.sample_arrow(rng, b.base.target(gam1))
        xi1, xi2 = vb.sample_arrow(rng, gam1), vb.sample_arrow(rng, gam1)
        xi3 = vb.sample_over(rng, gam2, vb.target(gam1, xi1))
        xi4 = vb.sample_over(rng, gam2, vb.target(gam1, xi2))
        lhs = vb.compose(gam2, xi3, gam1, xi1) + vb.compose(gam2, xi4, gam1, xi2)
        rhs = vb.compose(gam2, xi3 + xi4, gam1, xi1 + xi2)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def check_vb(vb: AssociatedVB, n_samples: int = 50, seed: int = 0) -> dict:
    """Groupoid axioms of the associated VB-groupoid in canonical form."""
    b, V = vb.bundle, vb.V
    rng = np.random.default_rng(seed)
    res = {"source": 0.0, "target": 0.0, "left_unit": 0.0, "right_unit": 0.0, "associativity": 0.0}

    def bump(k, a, c):
        res[k] = max(res[k], float(np.abs(a - c).max()))

    for _ in range(n_samples):
        x = b.base.sample_obj(rng)
        g1 = b.base.sample_arrow(rng, x)
        g2 = b.base.sample_arrow(rng, b.base.target(g1))
        g3 = b.base.sample_arrow(rng, b.base.target(g2))
        y, z = b.base.target(g1), b.base.target(g2)
        xi1 = vb.sample_arrow(rng, g1)
        xi2 = vb.sample_over(rng, g2, vb.target(g1, xi1))
        xi3 = vb.sample_over(rng, g3, vb.target(g2, xi2))
        c21 = vb.compose(g2, xi2, g1, xi1)
        g21 = b.base.compose(g2, g1)
        bump("source", vb.source(g21, c21), vb.source(g1, xi1))
        bump("target", vb.target(g21, c21), vb.target(g2, xi2))
        lhs = vb.compose(g3, xi3, g21, c21)
        rhs = vb.compose(b.base.compose(g3, g2), vb.compose(g3, xi3, g2, xi2), g1, xi1)
        bump("associativity", lhs, rhs)
        u_y = vb.unit(y, vb.target(g1, xi1))
        bump("left_unit", vb.compose(b.base.unit(y), u_y, g1, xi1), xi1)
        u_x = vb.unit(x, vb.source(g1, xi1))
        bump("right_unit", vb.compose(g1, xi1, b.base.unit(x), u_x), xi1)
    return res


# ------------------------------------------------------------------ cleavage


def linear_cleavage(b: Principal2Bundle, C: QuasiConnection, vb: AssociatedVB):
    """C^V(gamma, [p, v]) = [C(gamma, p), 1_v] on canonical representatives."""
    V = vb.V

    def CV(gamma, v):
        x = b.base.source(gamma)
        return vb.canon1(C(gamma, vb.base_point(x)), V.U @ np.asarray(v, dtype=float))

    return CV


def cleavage_report(b: Principal2Bundle, C: QuasiConnection, vb: AssociatedVB, n_samples: int = 50,
                    seed: int = 0) -> dict:
    """Flatness and unitality of C^V, plus the flatness defect predicted from C's deviation."""
    CV = linear_cleavage(b, C, vb)
    V, rho1 = vb.V, vb.action.rho1
    rng = np.random.default_rng(seed)
    res = {"flatness": 0.0, "unitality": 0.0, "predicted_defect": 0.0, "defect_mismatch": 0.0}
    for _ in range(n_samples):
        x = b.base.sample_obj(rng)
        v = rng.standard_normal(V.V0_dim)
        g1 = b.base.sample_arrow(rng, x)
        g2 = b.base.sample_arrow(rng, b.base.target(g1))
        xi1 = CV(g1, v)
        xi2 = CV(g2, vb.target(g1, xi1))
        g21 = b.base.compose(g2, g1)
        lhs = vb.compose(g2, xi2, g1, xi1)
        direct = CV(g21, v)
        defect = lhs - direct
        # C(g2) o C(g1) = C(g2 g1)(h, e), so the classes differ by rho1((h, e)) - 1 on 1_v
        h = compose_deviation(b, C, g2, g1, vb.base_point(x))
        a = TwoGroupArrow(h, b.G.identity)
        pred = vb.canon1(C(g21, vb.base_point(x)), (rho1(a) - np.eye(V.V1_dim)) @ (V.U @ v))
        res["flatness"] = max(res["flatness"], float(np.abs(defect).max()))
        res["predicted_defect"] = max(res["predicted_defect"], float(np.abs(pred).max()))
        res["defect_mismatch"] = max(res["defect_mismatch"], float(np.abs(defect - pred).max()))
        res["unitality"] = max(res["unitality"], float(np.abs(CV(b.base.unit(x), v) - vb.unit(x, v)).max()))
    return res


# ------------------------------------------------------------------ transport


@dataclass(frozen=True)
class VBTransport:
    """Matrices of [p, v] -> [T(p), v] on the object and morphism fibers."""

    obj: np.ndarray
    mor: np.ndarray
    holonomy: np.ndarray
    src_x: np.ndarray
    dst_x: np.ndarray

    def __call__(self, v) -> np.ndarray:
        return self.obj @ np.asarray(v, dtype=float)


def vb_transport(b: Principal2Bundle, C: QuasiConnection, omega: Connection, vb: AssociatedVB,
                 Gamma: LazyPath) -> VBTransport:
    F = lazy_transport(b, C, omega, Gamma)
    V = vb.V
    x, y = Gamma.source, Gamma.target
    p0 = vb.base_point(x)
    q = F(p0)
    obj = vb.action.rho0(q.g)
    # fiber morphisms over 1_x are represented by the arrow (1_x, (x, e), e)
    d0 = Arrow(b.base.unit(x), p0, b.H.identity)
    d1 = F.mor_map(d0)
    mor = np.column_stack([vb.canon1(d1, e) for e in np.eye(V.V1_dim)]) if V.V1_dim else np.zeros((0, 0))
    return VBTransport(obj, mor, q.g, np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def fiber_structure(vb: AssociatedVB, x):
    """Source and target matrices of the fiber 2-vector space over x."""
    b, V = vb.bundle, vb.V
    u = b.base.unit(x)
    S = V.S
    T = np.column_stack([vb.target(u, e) for e in np.eye(V.V1_dim)]) if V.V1_dim else np.zeros((V.V0_dim, 0))
    return S, T


def vb_transport_report(vb: AssociatedVB, Tv: VBTransport) -> dict:
    """Intertwining of the fiber structure maps and the holonomy identity."""
    Sx, Tx = fiber_structure(vb, Tv.src_x)
    Sy, Ty = fiber_structure(vb, Tv.dst_x)
    return {
        "intertwine_source": float(np.abs(Sy @ Tv.mor - Tv.obj @ Sx).max()),
        "intertwine_target": float(np.abs(Ty @ Tv.mor - Tv.obj @ Tx).max()),
        "holonomy_identity": float(np.abs(Tv.obj - vb.action.rho0(Tv.holonomy)).max()),
    }
