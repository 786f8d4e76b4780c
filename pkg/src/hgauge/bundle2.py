"""Principal 2-bundles over Lie groupoids in decorated coordinates.

All bundles are globally trivialized.  An object of E0 is a pair ``(x, g)`` and
a morphism of E1 is a triple ``(gamma, p, h)`` with ``p`` over ``s(gamma)``.
The structure maps are those of the quasi-decorated construction; decorated
bundles are the special case ``Hu = Hm = e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import crossed_module as xm
from .crossed_module import CrossedModule, TwoGroupArrow
from .errors import DivisionFailure, EquivarianceFailure, GroupMismatch, IncoherentData, NotASection
from .groupoid import GroupoidPresentation
from .matlie import MatrixGroup

CLASSIFY_TOL = 1e-8
COHERENCE_TOL = 1e-9
TOL_MATCH = 1e-8
COHERENCE_LABELS = tuple("abcdefghijk")


class Point(NamedTuple):
    """Object (x, g) of E0 = X0 x G."""

    x: np.ndarray
    g: np.ndarray


class Arrow(NamedTuple):
    """Morphism (gamma, p, h) of E1 = s*E0 x H."""

    gamma: np.ndarray
    p: Point
    h: np.ndarray


def point_distance(p: Point, q: Point) -> float:
    return max(float(np.linalg.norm(p.x - q.x)), float(np.linalg.norm(p.g - q.g)))


def arrow_distance(a: Arrow, b: Arrow) -> float:
    return max(
        float(np.linalg.norm(a.gamma - b.gamma)),
        point_distance(a.p, b.p),
        float(np.linalg.norm(a.h - b.h)),
    )


# ------------------------------------------------------------- G-bundles


@dataclass(frozen=True, eq=False)
class PrincipalGBundleOverGroupoid:
    """E_G = X0 x G with groupoid action mu(gamma, (x, g)) = (t(gamma), a(gamma) g)."""

    base: GroupoidPresentation
    G: MatrixGroup
    cocycle: Callable[[np.ndarray], np.ndarray]

    def mu(self, gamma, p: Point) -> Point:
        return Point(self.base.target(gamma), self.cocycle(gamma) @ p.g)

    def check_axioms(self, n_samples: int = 50, seed: int = 0) -> dict:
        rng = np.random.default_rng(seed)
        X = self.base
        res = {"unit": 0.0, "multiplicative": 0.0, "equivariance": 0.0}
        for _ in range(n_samples):
            g1 = X.sample_arrow(rng)
            g2 = X.sample_arrow(rng, X.target(g1))
            p = Point(X.source(g1), self.G.random(rng))
            k = self.G.random(rng)
            res["unit"] = max(res["unit"], point_distance(self.mu(X.unit(p.x), p), p))
            lhs = self.mu(X.compose(g2, g1), p)
            rhs = self.mu(g2, self.mu(g1, p))
            res["multiplicative"] = max(res["multiplicative"], point_distance(lhs, rhs))
            lhs = Point(self.mu(g1, p).x, self.mu(g1, p).g @ k)
            res["equivariance"] = max(res["equivariance"], point_distance(lhs, self.mu(g1, Point(p.x, p.g @ k))))
        return res


@dataclass(frozen=True, eq=False)
class PseudoPrincipalBundle:
    """Pseudo-principal (G, H, tau, alpha)-bundle: a cocycle up to Hu and Hm."""

    base: GroupoidPresentation
    cm: CrossedModule
    cocycle: Callable[[np.ndarray], np.ndarray]
    Hu: Callable[[Point], np.ndarray]
    Hm: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def mu(self, gamma, p: Point) -> Point:
        return Point(self.base.target(gamma), self.cocycle(gamma) @ p.g)


def trivial_Hu(cm: CrossedModule):
    e = cm.H.identity
    return lambda p: e


def trivial_Hm(cm: CrossedModule):
    e = cm.H.identity
    return lambda g2, g1: e


def coboundary_data(base: GroupoidPresentation, cm: CrossedModule, a0, f):
    """Coherent pseudo data built from a genuine cocycle a0 and any f: X1 -> H.

    Requires H abelian with trivial alpha and tau(H) central in G.  Returns
    ``(a, Hu, Hm)`` with ``a = a0 tau(f)``, ``Hm(g2, g1) = f(g2) f(g1) f(g2 g1)^{-1}``
    and ``Hu(x, g) = f(1_x)``.
    """
    Hinv = cm.H.inverse

    def a(gamma):
        return a0(gamma) @ cm.tau(f(gamma))

    def Hm(g2, g1):
        return f(g2) @ f(g1) @ Hinv(f(base.compose(g2, g1)))

    def Hu(p):
        return f(base.unit(p.x))

    return a, Hu, Hm


# ------------------------------------------------------------- 2-bundles


@dataclass(frozen=True, eq=False)
class Principal2Bundle:
    """Quasi-decorated principal [H x| G => G]-bundle over ``base``."""

    cm: CrossedModule
    base: GroupoidPresentation
    cocycle: Callable[[np.ndarray], np.ndarray]
    Hu: Callable[[Point], np.ndarray]
    Hm: Callable[[np.ndarray, np.ndarray], np.ndarray]
    decorated: bool = False

    @property
    def G(self) -> MatrixGroup:
        return self.cm.G

    @property
    def H(self) -> MatrixGroup:
        return self.cm.H

    # E0 --------------------------------------------------------------
    def mu(self, gamma, p: Point) -> Point:
        return Point(self.base.target(gamma), self.cocycle(gamma) @ p.g)

    def act0(self, p: Point, g) -> Point:
        return Point(p.x, p.g @ g)

    def proj0(self, p: Point) -> np.ndarray:
        return p.x

    # E1 --------------------------------------------------------------
    def source(self, d: Arrow) -> Point:
        return d.p

    def target(self, d: Arrow) -> Point:
        q = self.mu(d.gamma, d.p)
        return Point(q.x, q.g @ self.cm.tau(self.H.inverse(d.h)))

    def compose(self, d2: Arrow, d1: Arrow) -> Arrow:
        h = d2.h @ d1.h @ self.H.inverse(self.Hm(d2.gamma, d1.gamma))
        return Arrow(self.base.compose(d2.gamma, d1.gamma), d1.p, h)

    def compose_checked(self, d2: Arrow, d1: Arrow, tol: float = TOL_MATCH) -> Arrow:
        gap = point_distance(self.source(d2), self.target(d1))
        if gap > tol:
            raise xm.NotComposable(f"arrows not composable (gap {gap:.3e})")
        return self.compose(d2, d1)

    def unit(self, p: Point) -> Arrow:
        return Arrow(self.base.unit(p.x), p, self.Hu(p))

    def inverse(self, d: Arrow) -> Arrow:
        Hinv = self.H.inverse
        ginv = self.base.inverse(d.gamma)
        h = self.Hu(d.p) @ self.Hm(ginv, d.gamma) @ Hinv(d.h)
        return Arrow(ginv, self.target(d), h)

    def act1(self, d: Arrow, a: TwoGroupArrow) -> Arrow:
        ginv = self.G.inverse(a.g)
        return Arrow(d.gamma, self.act0(d.p, a.g), self.cm.alpha(ginv, self.H.inverse(a.h) @ d.h))

    def proj1(self, d: Arrow) -> np.ndarray:
        return d.gamma

    # torsor division -------------------------------------------------
    def divide0(self, p: Point, q: Point, tol: float = TOL_MATCH) -> np.ndarray:
        """The unique g with p g = q."""
        if float(np.linalg.norm(p.x - q.x)) > tol:
            raise DivisionFailure("points lie in different fibers")
        return self.G.inverse(p.g) @ q.g

    def divide1(self, d: Arrow, e: Arrow, tol: float = TOL_MATCH) -> TwoGroupArrow:
        """The unique (h, g) with d (h, g) = e."""
        if float(np.linalg.norm(d.gamma - e.gamma)) > tol:
            raise DivisionFailure("arrows lie in different fibers")
        g = self.divide0(d.p, e.p, tol)
        h = d.h @ self.H.inverse(self.cm.alpha(g, e.h))
        return TwoGroupArrow(h, g)

    # sampling --------------------------------------------------------
    def sample_point(self, rng, x=None) -> Point:
        if x is None:
            x = self.base.sample_obj(rng)
        return Point(np.asarray(x, dtype=float), self.G.random(rng))

    def sample_arrow(self, rng, p: Optional[Point] = None, gamma=None) -> Arrow:
        if p is None:
            p = self.sample_point(rng)
        if gamma is None:
            gamma = self.base.sample_arrow(rng, p.x)
        return Arrow(np.asarray(gamma, dtype=float), p, self.H.random(rng))

    def sample_composable(self, rng, n: int = 2):
        """Composable arrows d1, ..., dn (d_{i+1} starts where d_i ends)."""
        out = [self.sample_arrow(rng)]
        for _ in range(n - 1):
            q = self.target(out[-1])
            out.append(self.sample_arrow(rng, q))
        return out

    def pseudo(self) -> PseudoPrincipalBundle:
        return PseudoPrincipalBundle(self.base, self.cm, self.cocycle, self.Hu, self.Hm)

    def check_axioms(self, n_samples: int = 200, seed: int = 0) -> dict:
        """Groupoid, functoriality-of-projection and action residuals on E."""
        rng = np.random.default_rng(seed)
        keys = [
            "unit_source",
            "unit_target",
            "compose_source",
            "compose_target",
            "associativity",
            "left_unit",
            "right_unit",
            "left_inverse",
            "right_inverse",
            "projection_functor",
            "action_functor",
            "action_source_target",
        ]
        res = dict.fromkeys(keys, 0.0)

        def bump(key, val):
            res[key] = max(res[key], float(val))

        X = self.base
        for _ in range(n_samples):
            d1, d2, d3 = self.sample_composable(rng, 3)
            p = d1.p
            bump("unit_source", point_distance(self.source(self.unit(p)), p))
            bump("unit_target", point_distance(self.target(self.unit(p)), p))
            d21 = self.compose(d2, d1)
            bump("compose_source", point_distance(self.source(d21), self.source(d1)))
            bump("compose_target", point_distance(self.target(d21), self.target(d2)))
            bump("associativity", arrow_distance(self.compose(d3, d21), self.compose(self.compose(d3, d2), d1)))
            bump("left_unit", arrow_distance(self.compose(self.unit(self.target(d1)), d1), d1))
            bump("right_unit", arrow_distance(self.compose(d1, self.unit(p)), d1))
            bump("left_inverse", arrow_distance(self.compose(self.inverse(d1), d1), self.unit(p)))
            bump("right_inverse", arrow_distance(self.compose(d1, self.inverse(d1)), self.unit(self.target(d1))))
            bump("projection_functor", np.linalg.norm(self.proj1(d21) - X.compose(d2.gamma, d1.gamma)))
            # the action is a functor (E x G)_1 -> E_1
            a1 = xm.random_arrow(self.cm, rng)
            a2 = xm.TwoGroupArrow(self.H.random(rng), xm.target(self.cm, a1))
            lhs = self.act1(d21, xm.arrow_compose(self.cm, a2, a1))
            rhs = self.compose(self.act1(d2, a2), self.act1(d1, a1))
            bump("action_functor", arrow_distance(lhs, rhs))
            da = self.act1(d1, a1)
            bump("action_source_target", point_distance(self.source(da), self.act0(self.source(d1), a1.g)))
            bump(
                "action_source_target",
                point_distance(self.target(da), self.act0(self.target(d1), xm.target(self.cm, a1))),
            )
        return res


@dataclass(frozen=True, eq=False)
class QuasiConnection:
    owner: Principal2Bundle
    C: Callable[[np.ndarray, Point], Arrow]
    classification: str = "quasi"

    def __call__(self, gamma, p: Point) -> Arrow:
        return self.C(gamma, p)

    def mu(self, gamma, p: Point) -> Point:
        """Underlying quasi action t o C."""
        return self.owner.target(self.C(gamma, p))


# ---------------------------------------------------------- constructions


def _same_group(a: MatrixGroup, b: MatrixGroup) -> bool:
    return a is b or (a.name == b.name and a.dim == b.dim)


def decorate(pg: PrincipalGBundleOverGroupoid, cm: CrossedModule):
    """Decorated 2-bundle and its categorical connection (gamma, p) -> (gamma, p, e)."""
    if not _same_group(pg.G, cm.G):
        raise GroupMismatch(f"bundle group {pg.G.name} differs from crossed-module G {cm.G.name}")
    b = Principal2Bundle(cm, pg.base, pg.cocycle, trivial_Hu(cm), trivial_Hm(cm), decorated=True)
    e = cm.H.identity
    return b, QuasiConnection(b, lambda gamma, p: Arrow(np.asarray(gamma, dtype=float), p, e), "categorical")


def check_coherence(pb: PseudoPrincipalBundle, n_samples: int = 100, seed: int = 0) -> dict:
    """Residuals of coherence properties (a)-(k) on composable samples."""
    rng = np.random.default_rng(seed)
    cm, X = pb.cm, pb.base
    G, H = cm.G, cm.H
    Hinv = H.inverse
    res = dict.fromkeys(COHERENCE_LABELS, 0.0)

    def bump(key, a, b):
        res[key] = max(res[key], float(np.linalg.norm(np.asarray(a) - np.asarray(b))))

    for _ in range(n_samples):
        x = X.sample_obj(rng)
        p = Point(x, G.random(rng))
        g1 = X.sample_arrow(rng, x)
        g2 = X.sample_arrow(rng, X.target(g1))
        g3 = X.sample_arrow(rng, X.target(g2))
        k = G.random(rng)
        hk = H.random(rng)
        hu = pb.Hu(p)
        q = pb.mu(g1, p)
        bump("a", pb.mu(X.unit(x), p).g, p.g @ cm.tau(hu))
        bump("b", pb.mu(g2, q).g, pb.mu(X.compose(g2, g1), p).g @ cm.tau(pb.Hm(g2, g1)))
        bump("c", pb.Hm(g1, X.unit(x)), hu)
        bump("d", pb.Hm(X.unit(q.x), g1), pb.Hu(q))
        bump("e", pb.Hu(Point(p.x, p.g @ k)), hu)
        bump("f", cm.alpha(G.inverse(k), hu), hu)
        bump("g", hu @ hk, hk @ hu)
        m_inv = Hinv(pb.Hm(g2, g1))
        bump("h", cm.alpha(G.inverse(k), m_inv), m_inv)
        bump("i", pb.Hm(g2, g1) @ hk, hk @ pb.Hm(g2, g1))
        lhs = Hinv(pb.Hm(g3, g2)) @ Hinv(pb.Hm(X.compose(g3, g2), g1))
        rhs = Hinv(pb.Hm(g2, g1)) @ Hinv(pb.Hm(g3, X.compose(g2, g1)))
        bump("j", lhs, rhs)
        ginv = X.inverse(g1)
        lhs = pb.Hm(ginv, g1) @ Hinv(pb.Hm(g1, ginv))
        rhs = Hinv(hu) @ pb.Hu(q)
        bump("k", lhs, rhs)
    return res


def first_failure(report: dict, tol: float = COHERENCE_TOL):
    for label in COHERENCE_LABELS:
        if report[label] >= tol:
            return label
    return None


def quasi_decorate(pb: PseudoPrincipalBundle, n_samples: int = 50, seed: int = 0, tol: float = COHERENCE_TOL):
    """Quasi-decorated 2-bundle and its quasi connection (gamma, p) -> (gamma, p, e)."""
    report = check_coherence(pb, n_samples, seed)
    label = first_failure(report, tol)
    if label is not None:
        raise IncoherentData(label, report[label])
    b = Principal2Bundle(pb.cm, pb.base, pb.cocycle, pb.Hu, pb.Hm)
    e = pb.cm.H.identity
    # classification by sampling: categorical iff Hu and Hm vanish
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(n_samples):
        g1, g2 = b.sample_composable(rng, 2)
        dev = max(dev, float(np.linalg.norm(pb.Hu(g1.p) - e)), float(np.linalg.norm(pb.Hm(g2.gamma, g1.gamma) - e)))
    cls = "categorical" if dev < CLASSIFY_TOL else "quasi"
    return b, QuasiConnection(b, lambda gamma, p: Arrow(np.asarray(gamma, dtype=float), p, e), cls)


def section_residual(b: Principal2Bundle, C: QuasiConnection, n_samples: int = 50, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    r = 0.0
    for _ in range(n_samples):
        p = b.sample_point(rng)
        gamma = b.base.sample_arrow(rng, p.x)
        d = C(gamma, p)
        r = max(r, float(np.linalg.norm(d.gamma - gamma)), point_distance(b.source(d), p))
    return r


def unit_deviation(b: Principal2Bundle, C: QuasiConnection, p: Point) -> np.ndarray:
    """h_p with C(1, p) = 1_p (h_p, e)."""
    a = b.divide1(b.unit(p), C(b.base.unit(p.x), p))
    if float(np.linalg.norm(a.g - b.G.identity)) > TOL_MATCH:
        raise DivisionFailure("C(1, p) is not in the H-orbit of 1_p")
    return a.h


def compose_deviation(b: Principal2Bundle, C: QuasiConnection, g2, g1, p: Point) -> np.ndarray:
    """h with C(g2, mu_C(g1, p)) o C(g1, p) = C(g2 g1, p) (h, e)."""
    d1 = C(g1, p)
    lhs = b.compose(C(g2, b.target(d1)), d1)
    a = b.divide1(C(b.base.compose(g2, g1), p), lhs)
    if float(np.linalg.norm(a.g - b.G.identity)) > TOL_MATCH:
        raise DivisionFailure("composite is not in the H-orbit of C(g2 g1, p)")
    return a.h


def extract_pseudo(b: Principal2Bundle, C: QuasiConnection, n_check: int = 20, seed: int = 0) -> PseudoPrincipalBundle:
    """Underlying pseudo-principal bundle (mu_C, Hu_C, Hm_C) of a quasi connection.

    ``Hm_C`` is evaluated at the canonical point ``(s(g1), e)``.
    """
    r = section_residual(b, C, n_check, seed)
    if r > TOL_MATCH:
        raise DivisionFailure(f"C is not a section (residual {r:.3e})")
    X = b.base
    eG = b.G.identity

    def cocycle(gamma):
        return C.mu(gamma, Point(X.source(gamma), eG)).g

    def Hu(p):
        return unit_deviation(b, C, p)

    def Hm(g2, g1):
        return compose_deviation(b, C, g2, g1, Point(X.source(g1), eG))

    return PseudoPrincipalBundle(X, b.cm, cocycle, Hu, Hm)


def classify_connection(b: Principal2Bundle, C: QuasiConnection, n_samples: int = 50, seed: int = 0, tol=CLASSIFY_TOL):
    """('quasi' | 'unital' | 'categorical', residuals)."""
    r = section_residual(b, C, n_samples, seed)
    if r > tol:
        raise NotASection(f"C fails the section property (residual {r:.3e})")
    rng = np.random.default_rng(seed)
    res = {"section": r, "equivariance": 0.0, "unital": 0.0, "multiplicative": 0.0}
    X = b.base
    for _ in range(n_samples):
        p = b.sample_point(rng)
        g1 = X.sample_arrow(rng, p.x)
        g2 = X.sample_arrow(rng, X.target(g1))
        k = b.G.random(rng)
        lhs = C(g1, b.act0(p, k))
        rhs = b.act1(C(g1, p), xm.unit_arrow(b.cm, k))
        res["equivariance"] = max(res["equivariance"], arrow_distance(lhs, rhs))
        res["unital"] = max(res["unital"], arrow_distance(C(X.unit(p.x), p), b.unit(p)))
        d1 = C(g1, p)
        comp = b.compose(C(g2, b.target(d1)), d1)
        res["multiplicative"] = max(res["multiplicative"], arrow_distance(comp, C(X.compose(g2, g1), p)))
    if res["equivariance"] > tol:
        raise NotASection(f"C is not equivariant along the unit (residual {res['equivariance']:.3e})")
    if res["unital"] >= tol:
        return "quasi", res
    if res["multiplicative"] >= tol:
        return "unital", res
    return "categorical", res


def make_Ch(b: Principal2Bundle, C: QuasiConnection, Hmap, n_check: int = 20, seed: int = 0, tol=CLASSIFY_TOL):
    """C_H(gamma, p) = C(gamma, p) (H(gamma, p), e)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_check):
        p = b.sample_point(rng)
        gamma = b.base.sample_arrow(rng, p.x)
        k = b.G.random(rng)
        lhs = b.cm.alpha(k, Hmap(gamma, b.act0(p, k)))
        worst = max(worst, float(np.linalg.norm(lhs - Hmap(gamma, p))))
    if worst > tol:
        raise EquivarianceFailure(f"alpha_g(H(gamma, pg)) != H(gamma, p) (residual {worst:.3e})")
    eG = b.G.identity

    def CH(gamma, p):
        return b.act1(C(gamma, p), TwoGroupArrow(Hmap(gamma, p), eG))

    Cn = QuasiConnection(b, CH, "quasi")
    cls, _ = classify_connection(b, Cn, n_check, seed)
    return QuasiConnection(b, CH, cls)


def constant_Hmap(h):
    h = np.asarray(h, dtype=float)
    return lambda gamma, p: h


# ----------------------------------------------------- morphisms and theta_E


@dataclass(frozen=True, eq=False)
class BundleMorphism:
    """Pair of maps (F0, F1) between total groupoids over the same base."""

    F0: Callable[[Point], Point]
    F1: Callable[[Arrow], Arrow]


def identity_morphism() -> BundleMorphism:
    return BundleMorphism(lambda p: p, lambda d: d)


def bundle_morphism_check(F: BundleMorphism, b: Principal2Bundle, b2: Principal2Bundle, C, C2, n_samples=50, seed=0):
    """Residuals of F: (b, C) -> (b2, C2) being a morphism of quasi-principal bundles."""
    rng = np.random.default_rng(seed)
    keys = ["functor_source", "functor_target", "functor_unit", "functor_compose", "equivariance", "projection", "connection"]
    res = dict.fromkeys(keys, 0.0)

    def bump(key, val):
        res[key] = max(res[key], float(val))

    X = b.base
    for _ in range(n_samples):
        d1, d2 = b.sample_composable(rng, 2)
        Fd1, Fd2 = F.F1(d1), F.F1(d2)
        bump("functor_source", point_distance(b2.source(Fd1), F.F0(b.source(d1))))
        bump("functor_target", point_distance(b2.target(Fd1), F.F0(b.target(d1))))
        bump("functor_unit", arrow_distance(F.F1(b.unit(d1.p)), b2.unit(F.F0(d1.p))))
        bump("functor_compose", arrow_distance(F.F1(b.compose(d2, d1)), b2.compose(Fd2, Fd1)))
        a = xm.random_arrow(b.cm, rng)
        bump("equivariance", point_distance(F.F0(b.act0(d1.p, a.g)), b2.act0(F.F0(d1.p), a.g)))
        bump("equivariance", arrow_distance(F.F1(b.act1(d1, a)), b2.act1(Fd1, a)))
        bump("projection", np.linalg.norm(F.F0(d1.p).x - d1.p.x))
        bump("projection", np.linalg.norm(Fd1.gamma - d1.gamma))
        gamma = X.sample_arrow(rng, d1.p.x)
        bump("connection", arrow_distance(F.F1(C(gamma, d1.p)), C2(gamma, F.F0(d1.p))))
    return res


def theta_E(b: Principal2Bundle, C: QuasiConnection) -> BundleMorphism:
    """p -> p and (gamma, p, h) -> C(gamma, p) (h^{-1}, e)."""
    eG = b.G.identity
    Hinv = b.H.inverse
    return BundleMorphism(lambda p: p, lambda d: b.act1(C(d.gamma, d.p), TwoGroupArrow(Hinv(d.h), eG)))


def grothendieck_roundtrip(b: Principal2Bundle, C: QuasiConnection, n_samples: int = 50, seed: int = 0):
    """Rebuild (b, C) from its pseudo data and compare through theta_E.

    Returns ``(report, b_qdec, C_qdec, theta)`` where ``report`` holds the
    morphism-check residuals of theta and the pseudo-data reproduction
    residuals.
    """
    pb = extract_pseudo(b, C, seed=seed)
    bq, Cq = quasi_decorate(pb, n_samples=min(n_samples, 30), seed=seed)
    theta = theta_E(b, C)
    report = bundle_morphism_check(theta, bq, b, Cq, C, n_samples, seed)
    report["object_identity"] = 0.0
    rng = np.random.default_rng(seed + 1)
    for _ in range(n_samples):
        p = b.sample_point(rng)
        report["object_identity"] = max(report["object_identity"], point_distance(theta.F0(p), p))
    return report, bq, Cq, theta


def pseudo_distance(pa: PseudoPrincipalBundle, pb: PseudoPrincipalBundle, n_samples: int = 100, seed: int = 0) -> dict:
    """Pointwise distance between (mu, Hu, Hm) of two pseudo bundles."""
    rng = np.random.default_rng(seed)
    X, G = pa.base, pa.cm.G
    res = {"mu": 0.0, "Hu": 0.0, "Hm": 0.0}
    for _ in range(n_samples):
        p = Point(X.sample_obj(rng), G.random(rng))
        g1 = X.sample_arrow(rng, p.x)
        g2 = X.sample_arrow(rng, X.target(g1))
        res["mu"] = max(res["mu"], point_distance(pa.mu(g1, p), pb.mu(g1, p)))
        res["Hu"] = max(res["Hu"], float(np.linalg.norm(pa.Hu(p) - pb.Hu(p))))
        res["Hm"] = max(res["Hm"], float(np.linalg.norm(pa.Hm(g2, g1) - pb.Hm(g2, g1))))
    return res
