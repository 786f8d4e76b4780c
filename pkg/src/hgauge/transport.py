"""Parallel transport along lazy Haefliger paths.

Three kinds of fiber maps are composed:

* cartesian transport ``T_C(gamma)`` from the fiber over t(gamma) to the fiber
  over s(gamma), built from the quasi connection C;
* path transport ``T^alpha`` from horizontal lifts of a base path, solved in
  the trivialization as ``g' = -A(alpha, alpha') g`` with classic RK4;
* their composite ``T_Gamma`` along a lazy path.

Fiber maps are compared in the quotient by tau(H) through a torsor divider.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import groupoid, hpath
from .bundle2 import Arrow, BundleMorphism, Point, Principal2Bundle, QuasiConnection, arrow_distance, point_distance
from .connection import Connection, StrictConnection
from .crossed_module import CrossedModule, TwoGroupArrow
from .errors import FiberMismatch, NonFiniteState, NotComposable, OutOfChart, ProbeDisagreement
from .groupoid import GroupoidMorphism, GroupoidPresentation, tangent_eval
from .hpath import LazyPath, SampledPath
from .kernels import rk4_linear

FIBER_TOL = 1e-8
MEMBER_TOL = 1e-6
PROBE_TOL = 1e-6
N_PROBES = 3


# ---------------------------------------------------------------- torsor maps


@dataclass(frozen=True, eq=False)
class TorsorMap:
    """2-group equivariant map between the fibers over ``src_x`` and ``dst_x``."""

    src_x: np.ndarray
    dst_x: np.ndarray
    obj_map: Callable[[Point], Point]
    mor_map: Callable[[Arrow], Arrow]
    cm: CrossedModule
    label: str = ""

    def __call__(self, p: Point) -> Point:
        return self.obj_map(p)


def _check_over(x_expected, x, what: str, stage=None):
    gap = float(np.linalg.norm(np.asarray(x) - np.asarray(x_expected)))
    if gap >= FIBER_TOL:
        raise FiberMismatch(f"{what} lies {gap:.3e} away from the expected fiber", stage)


def identity_map(cm: CrossedModule, x) -> TorsorMap:
    x = np.asarray(x, dtype=float)
    return TorsorMap(x, x, lambda p: p, lambda d: d, cm, "id")


def compose_maps(second: TorsorMap, first: TorsorMap, stage=None) -> TorsorMap:
    _check_over(second.src_x, first.dst_x, "intermediate fiber", stage)
    return TorsorMap(
        first.src_x,
        second.dst_x,
        lambda p: second.obj_map(first.obj_map(p)),
        lambda d: second.mor_map(first.mor_map(d)),
        first.cm,
        f"{second.label}.{first.label}",
    )


def fiber_arrow(b: Principal2Bundle, p: Point, h) -> Arrow:
    """Morphism (1_x, p, h) of the fiber over x = p.x."""
    return Arrow(b.base.unit(p.x), p, np.asarray(h, dtype=float))


def check_torsor_map(F: TorsorMap, b_src: Principal2Bundle, b_dst: Principal2Bundle, n_samples: int = 100,
                     seed: int = 0) -> dict:
    """Equivariance and functoriality residuals of F on sampled fiber data."""
    rng = np.random.default_rng(seed)
    cm = F.cm
    res = dict.fromkeys(["equivariance0", "equivariance1", "source", "target", "compose"], 0.0)

    def bump(key, val):
        res[key] = max(res[key], float(val))

    for _ in range(n_samples):
        p = b_src.sample_point(rng, F.src_x)
        g = cm.G.random(rng)
        bump("equivariance0", point_distance(F(b_src.act0(p, g)), b_dst.act0(F(p), g)))
        d1 = fiber_arrow(b_src, p, cm.H.random(rng))
        d2 = fiber_arrow(b_src, b_src.target(d1), cm.H.random(rng))
        a = TwoGroupArrow(cm.H.random(rng), cm.G.random(rng))
        bump("equivariance1", arrow_distance(F.mor_map(b_src.act1(d1, a)), b_dst.act1(F.mor_map(d1), a)))
        m1 = F.mor_map(d1)
        bump("source", point_distance(b_dst.source(m1), F(b_src.source(d1))))
        bump("target", point_distance(b_dst.target(m1), F(b_src.target(d1))))
        bump("compose", arrow_distance(F.mor_map(b_src.compose(d2, d1)), b_dst.compose(F.mor_map(d2), m1)))
    return res


# ------------------------------------------------------- cartesian transport


def cartesian_transport(b: Principal2Bundle, C: QuasiConnection, gamma) -> TorsorMap:
    """T_C(gamma): p -> mu_C(gamma^-1, p), zeta -> C(gamma^-1, q) o zeta o C(gamma^-1, p)^-1."""
    X = b.base
    gamma = np.asarray(gamma, dtype=float)
    ginv = X.inverse(gamma)
    src_x, dst_x = X.target(gamma), X.source(gamma)

    def obj(p):
        _check_over(src_x, p.x, "point")
        return C.mu(ginv, p)

    def mor(d):
        p, q = b.source(d), b.target(d)
        _check_over(src_x, p.x, "arrow")
        return b.compose(C(ginv, q), b.compose(d, b.inverse(C(ginv, p))))

    return TorsorMap(src_x, dst_x, obj, mor, b.cm, "T_C")


def pseudofunctor_unitor(b: Principal2Bundle, C: QuasiConnection, x) -> Callable[[Point], Arrow]:
    """I_x: T_C(1_x) => id with component C(1_x, p)^-1."""
    u = b.base.unit(np.asarray(x, dtype=float))

    def comp(p):
        _check_over(x, p.x, "point")
        return b.inverse(C(u, p))

    return comp


def pseudofunctor_compositor(b: Principal2Bundle, C: QuasiConnection, g1, g2) -> Callable[[Point], Arrow]:
    """alpha_{g1,g2}: T_C(g1) T_C(g2) => T_C(g2 o g1) for s(g2) = t(g1)."""
    X = b.base
    if not X.composable(g2, g1):
        raise NotComposable("compositor needs s(g2) = t(g1)")
    i1, i2 = X.inverse(g1), X.inverse(g2)
    i12 = X.compose(i1, i2)
    tx = X.target(g2)

    def comp(p):
        _check_over(tx, p.x, "point")
        c2 = C(i2, p)
        c1 = C(i1, b.target(c2))
        return b.compose(C(i12, p), b.compose(b.inverse(c2), b.inverse(c1)))

    return comp


def coherence_report(b: Principal2Bundle, C: QuasiConnection, n_samples: int = 50, seed: int = 0) -> dict:
    """Unit and associativity coherence of (T_C, I, alpha), plus naturality of alpha."""
    rng = np.random.default_rng(seed)
    X = b.base
    res = dict.fromkeys(["unit_left", "unit_right", "associativity", "naturality"], 0.0)

    def bump(key, val):
        res[key] = max(res[key], float(val))

    for _ in range(n_samples):
        x = X.sample_obj(rng)
        g1 = X.sample_arrow(rng, x)
        g2 = X.sample_arrow(rng, X.target(g1))
        g3 = X.sample_arrow(rng, X.target(g2))
        y = X.target(g1)
        z = X.target(g2)
        # unit coherences for g: x -> y, evaluated at p over y
        p = b.sample_point(rng, y)
        Tg = cartesian_transport(b, C, g1)
        lhs = pseudofunctor_compositor(b, C, X.unit(x), g1)(p)
        rhs = pseudofunctor_unitor(b, C, x)(Tg(p))
        bump("unit_left", arrow_distance(lhs, rhs))
        lhs = pseudofunctor_compositor(b, C, g1, X.unit(y))(p)
        rhs = Tg.mor_map(pseudofunctor_unitor(b, C, y)(p))
        bump("unit_right", arrow_distance(lhs, rhs))
        # associativity at p over t(g3)
        # chain: apply T(g3), then T(g2), then T(g1)
        w = b.sample_point(rng, X.target(g3))
        T1 = cartesian_transport(b, C, g1)
        T2 = cartesian_transport(b, C, g2)
        T3 = cartesian_transport(b, C, g3)
        g32 = X.compose(g3, g2)
        g21 = X.compose(g2, g1)
        lhs = b.compose(
            pseudofunctor_compositor(b, C, g1, g32)(w),
            T1.mor_map(pseudofunctor_compositor(b, C, g2, g3)(w)),
        )
        rhs = b.compose(
            pseudofunctor_compositor(b, C, g21, g3)(w),
            pseudofunctor_compositor(b, C, g1, g2)(T3(w)),
        )
        bump("associativity", arrow_distance(lhs, rhs))
        # naturality of alpha_{g1,g2} along a fiber arrow over t(g2)
        q = b.sample_point(rng, z)
        d = fiber_arrow(b, q, b.H.random(rng))
        T21 = cartesian_transport(b, C, g21)
        comp = pseudofunctor_compositor(b, C, g1, g2)
        lhs = b.compose(comp(b.target(d)), T1.mor_map(T2.mor_map(d)))
        rhs = b.compose(T21.mor_map(d), comp(q))
        bump("naturality", arrow_distance(lhs, rhs))
    return res


# ---------------------------------------------------------- horizontal lifts


def _pad(F):
    return np.concatenate([F[:1], F[:1], F, F[-1:], F[-1:]])


def stencils(samples: np.ndarray, h: float):
    """Node values/derivatives and midpoint values/derivatives, all fourth order.

    Ends are padded by constant extension, which is exact on sitting instants.
    """
    P = _pad(np.asarray(samples, dtype=float))
    dn = (-P[4:] + 8 * P[3:-1] - 8 * P[1:-3] + P[:-4]) / (12 * h)
    xm = (-P[1:-4] + 9 * P[2:-3] + 9 * P[3:-2] - P[4:-1]) / 16
    dm = (P[1:-4] - 27 * P[2:-3] + 27 * P[3:-2] - P[4:-1]) / (24 * h)
    return P[2:-2], dn, xm, dm


@dataclass(frozen=True)
class Lift:
    path: SampledPath
    trajectory: np.ndarray  # (K + 1, d, d) group factors
    endpoint: Point


@dataclass(eq=False)
class PathTransport:
    """Fundamental solution U(t) of g' = -A(alpha, alpha') g along one path."""

    omega: Connection
    alpha: SampledPath
    _U: Optional[np.ndarray] = field(default=None, repr=False)
    _M: Optional[tuple] = field(default=None, repr=False)
    _X: Optional[tuple] = field(default=None, repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.alpha.K

    def U(self) -> np.ndarray:
        if self._U is None:
            b = self.omega.owner
            if not all(b.base.in_obj_chart(x) for x in self.alpha.samples):
                raise OutOfChart("path leaves the object chart")
            xn, dn, xm, dm = stencils(self.alpha.samples, self.h)
            Mn = np.array([self.omega.potential(x, v) for x, v in zip(xn, dn)])
            Mm = np.array([self.omega.potential(x, v) for x, v in zip(xm, dm)])
            self._M = (Mn, Mm)
            U = rk4_linear(Mn, Mm, b.G.identity, self.h)
            if not np.all(np.isfinite(U)):
                raise NonFiniteState("horizontal lift produced non-finite values")
            self._U = U
        return self._U

    def endpoint_matrix(self) -> np.ndarray:
        return self.omega.owner.G.project(self.U()[-1])

    def vertical_defect(self):
        """omega0 along the lift from the identity, at nodes and midpoints."""
        if self._X is None:
            U = self.U()
            n, d = U.shape[0], U.shape[1]
            Mn, Mm = self._M
            Un, dUn, Um, dUm = stencils(U.reshape(n, -1), self.h)
            out = []
            for M, u, du in ((Mn, Un, dUn), (Mm, Um, dUm)):
                u, du = u.reshape(-1, d, d), du.reshape(-1, d, d)
                ui = np.linalg.inv(u)
                out.append(ui @ M @ u + ui @ du)
            self._X = tuple(out)
        return self._X

    def lift_point(self, p0: Point) -> Lift:
        _check_over(self.alpha.start(), p0.x, "initial point")
        traj = self.U() @ p0.g
        end = Point(self.alpha.end(), self.omega.owner.G.project(traj[-1]))
        return Lift(self.alpha, traj, end)

    def lift_arrow_h(self, p0: Point, h0) -> np.ndarray:
        """H-component of the horizontal lift in E1 from (1, p0, h0).

        Horizontality forces h' = -alpha'(X)(h) with X = omega0 along the E0 lift,
        so h(t) = alpha(k(t), h0) with k' = -X k.
        """
        b = self.omega.owner
        cm = b.cm
        if cm.H.algebra_dim == 0:
            return np.asarray(h0, dtype=float)
        Xn, Xm = self.vertical_defect()
        gi = b.G.inverse(p0.g)
        Mn = np.array([gi @ x @ p0.g for x in Xn])
        Mm = np.array([gi @ x @ p0.g for x in Xm])
        k = rk4_linear(Mn, Mm, b.G.identity, self.h)[-1]
        return cm.H.project(cm.alpha(b.G.project(k), h0))


def horizontal_lift(omega: Connection, alpha: SampledPath, p0: Point) -> Lift:
    return PathTransport(omega, alpha).lift_point(p0)


def e1_lift(omega: Connection, zeta: SampledPath, d0: Arrow, pt: Optional[PathTransport] = None) -> Arrow:
    """Horizontal lift in E1 along a path zeta in X1, evaluated at the end.

    ``pt`` may carry a precomputed transport along s o zeta.
    """
    b = omega.owner
    X = b.base
    gap = float(np.linalg.norm(zeta.start() - d0.gamma))
    if gap >= FIBER_TOL:
        raise FiberMismatch(f"arrow lies {gap:.3e} away from zeta(0)")
    if pt is None:
        pt = PathTransport(omega, zeta.map(X.source))
    end = pt.lift_point(d0.p).endpoint
    return Arrow(zeta.end(), end, pt.lift_arrow_h(d0.p, d0.h))


def path_transport(omega: Connection, alpha: SampledPath) -> TorsorMap:
    """T^alpha from the fiber over alpha(0) to the fiber over alpha(1)."""
    b = omega.owner
    X = b.base
    pt = PathTransport(omega, alpha)
    x0, x1 = alpha.start(), alpha.end()
    u1 = X.unit(x1)

    def obj(p):
        _check_over(x0, p.x, "point")
        return Point(x1, b.G.project(pt.endpoint_matrix() @ p.g))

    def mor(d):
        _check_over(x0, d.p.x, "arrow")
        # lift along u o alpha; its source and target follow the E0 lifts
        p1 = obj(d.p)
        return Arrow(u1, p1, pt.lift_arrow_h(d.p, d.h))

    return TorsorMap(x0, x1, obj, mor, b.cm, "T_alpha")


def lemma_identities(omega: Connection, n_samples: int = 100, seed: int = 0, K: int = hpath.DEFAULT_GRID) -> dict:
    """Residuals of s(Tr^zeta d) = Tr^{s zeta}(s d), t(Tr^zeta d) = Tr^{t zeta}(t d), Tr^{u alpha}(u p) = u(Tr^alpha p)."""
    b = omega.owner
    X = b.base
    rng = np.random.default_rng(seed)
    res = dict.fromkeys(["source", "target", "unit"], 0.0)
    for _ in range(n_samples):
        x0 = X.sample_obj(rng)
        x1 = x0 + 0.5 * rng.standard_normal(X.obj_dim)
        w0, w1 = X.sample_fiber(rng), X.sample_fiber(rng)
        base_path = hpath.line_path(x0, x1, K)
        wpath = hpath.line_path(w0, w1, K) if X.fiber_dim else None

        def to_arrow(k, xs=base_path.samples):
            w = wpath.samples[k] if wpath is not None else np.zeros(0)
            return X.arrow_from(xs[k], w)

        zeta = SampledPath(np.array([to_arrow(k) for k in range(K + 1)]), base_path.plateau)
        d0 = b.sample_arrow(rng, b.sample_point(rng, x0), zeta.start())
        # s o zeta is base_path sample for sample, so one transport serves both
        s_path = zeta.map(X.source)
        pt_s = PathTransport(omega, s_path)
        pt_t = PathTransport(omega, zeta.map(X.target))
        lifted = e1_lift(omega, zeta, d0, pt_s)
        s_lift = pt_s.lift_point(b.source(d0)).endpoint
        t_lift = pt_t.lift_point(b.target(d0)).endpoint
        res["source"] = max(res["source"], point_distance(b.source(lifted), s_lift))
        res["target"] = max(res["target"], point_distance(b.target(lifted), t_lift))
        p = b.sample_point(rng, x0)
        u_lift = e1_lift(omega, s_path.map(X.unit), b.unit(p), pt_s)
        res["unit"] = max(res["unit"], arrow_distance(u_lift, b.unit(pt_s.lift_point(p).endpoint)))
    return res


# ----------------------------------------------------------- lazy transport


def lazy_transport(b: Principal2Bundle, C: QuasiConnection, omega: Connection, G: LazyPath) -> TorsorMap:
    """T_C(g_n^-1) o T^{a_n} o ... o T^{a_1} o T_C(g_0^-1)."""
    X = b.base
    T = cartesian_transport(b, C, X.inverse(G.arrows[0]))
    stage = 0
    for alpha, gamma in zip(G.paths, G.arrows[1:]):
        stage += 1
        T = compose_maps(path_transport(omega, alpha), T, stage)
        stage += 1
        T = compose_maps(cartesian_transport(b, C, X.inverse(gamma)), T, stage)
    return T


# -------------------------------------------------------- quotient compare


@dataclass(frozen=True)
class QuotientClassWitness:
    divider: np.ndarray
    distance: float
    probe_spread: float


def _probes(b: Principal2Bundle, x, n: int = N_PROBES):
    rng = np.random.default_rng(12345)
    return [Point(np.asarray(x, dtype=float), b.G.identity)] + [
        Point(np.asarray(x, dtype=float), b.G.random(rng)) for _ in range(n - 1)
    ]


def quotient_equal(b: Principal2Bundle, F: TorsorMap, F2: TorsorMap, tol: float = MEMBER_TOL,
                   probe_tol: float = PROBE_TOL):
    """Compare two torsor maps modulo tau(H); returns (equal, witness)."""
    _check_over(F.src_x, F2.src_x, "source fiber")
    _check_over(F.dst_x, F2.dst_x, "target fiber")
    G = b.G
    dividers = []
    for z in _probes(b, F.src_x):
        d = b.divide0(F(z), F2(z))
        # conjugate back so that equivariant maps give the same divider at every probe
        dividers.append(z.g @ d @ G.inverse(z.g))
    spread = max(float(np.linalg.norm(d - dividers[0])) for d in dividers)
    if spread > probe_tol:
        raise ProbeDisagreement(f"dividers disagree across probes by {spread:.3e}")
    divider = dividers[0]
    dist = float(b.cm.tauH_distance(divider))
    return dist < tol, QuotientClassWitness(divider, dist, spread)


def object_distance(b: Principal2Bundle, F: TorsorMap, F2: TorsorMap) -> float:
    return max(point_distance(F(z), F2(z)) for z in _probes(b, F.src_x))


def left_twist(F: TorsorMap, c) -> TorsorMap:
    """F followed by left multiplication with c in the target fiber; same class iff c in tau(H)."""
    c = np.asarray(c, dtype=float)

    def obj(p):
        q = F(p)
        return Point(q.x, c @ q.g)

    def mor(d):
        e = F.mor_map(d)
        return Arrow(e.gamma, Point(e.p.x, c @ e.p.g), e.h)

    return TorsorMap(F.src_x, F.dst_x, obj, mor, F.cm, "twist")


# ------------------------------------------------------------------ suites


def apply_transform(G: LazyPath, transform: dict) -> LazyPath:
    """Build an equivalent lazy path from a transform descriptor."""
    kind = transform["kind"]
    if kind == "remove_constant":
        return hpath.move_remove_constant(G, transform["i"])
    if kind == "add_constant":
        return hpath.move_add_constant(G, transform["i"], transform.get("first"))
    if kind == "remove_identity":
        return hpath.move_remove_identity(G, transform["i"])
    if kind == "conjugate":
        return hpath.move_conjugate(G, transform["i"], transform["zeta"])
    if kind == "thin_deform":
        return hpath.thin_deform(G, transform["zetas"])
    if kind == "reparametrize":
        psi = transform["psi"]
        paths = [p.reparametrize(psi) for p in G.paths]
        return hpath.make_lazy_path(G.base, G.arrows, paths)
    raise ValueError(f"unknown transform {kind!r}")


TRANSFORM_KINDS = ("add_constant", "remove_constant", "remove_identity", "conjugate", "thin_deform",
                   "reparametrize")


def _zeta_over(X: GroupoidPresentation, xs: np.ndarray, w0, w1, plateau: int) -> SampledPath:
    """Arrow path r -> arrow_from(xs(r), w(r)) with w sitting at both ends; s o zeta = xs."""
    K = len(xs) - 1
    ws = hpath.line_path(w0, w1, K, plateau).samples if len(w0) else np.zeros((K + 1, 0))
    return SampledPath(np.array([X.arrow_from(x, w) for x, w in zip(xs, ws)]), plateau)


def insert_identity(G: LazyPath, i: int, beta: SampledPath) -> LazyPath:
    """(.., a_i, g_i, ..) -> (.., a_i, 1, beta, g_i, ..) for a loop beta at the end of a_i."""
    X = G.base
    if not 1 <= i <= G.order:
        raise IndexError(f"path index {i} out of range")
    u = X.unit(G.paths[i - 1].end())
    arrows = G.arrows[:i] + (u,) + G.arrows[i:]
    paths = G.paths[:i] + (beta,) + G.paths[i:]
    return hpath.make_lazy_path(X, arrows, paths)


def standard_transform(G: LazyPath, kind: str, rng, scale: float = 0.3):
    """Seeded (path, descriptor) pair for ``kind``, valid over any builtin base.

    Returns the lazy path to transform, which differs from ``G`` only for the
    moves that need a particular shape (constant path or inner identity).
    """
    X = G.base
    K, plat = G.paths[0].K, G.paths[0].plateau
    nf = X.fiber_dim
    i = 1 + int(rng.integers(G.order))
    if kind == "add_constant":
        j = int(rng.integers(G.order + 1))
        first = X.arrow_from(X.source(G.arrows[j]), scale * rng.standard_normal(nf))
        return G, {"kind": kind, "i": j, "first": first}
    if kind == "remove_constant":
        j = int(rng.integers(G.order + 1))
        first = X.arrow_from(X.source(G.arrows[j]), scale * rng.standard_normal(nf))
        return hpath.move_add_constant(G, j, first, K), {"kind": kind, "i": j}
    if kind == "remove_identity":
        e = G.paths[i - 1].end()
        mid = e + scale * rng.standard_normal(X.obj_dim)
        beta = hpath.path_from_waypoints([e, mid, e], K, plat)
        return insert_identity(G, i, beta), {"kind": kind, "i": i}
    if kind == "conjugate":
        alpha = G.paths[i - 1]
        w0, w1 = scale * rng.standard_normal(nf), scale * rng.standard_normal(nf)
        return G, {"kind": kind, "i": i, "zeta": _zeta_over(X, alpha.samples, w0, w1, plat)}
    if kind == "thin_deform":
        zetas = []
        n = G.order
        for j, g in enumerate(G.arrows):
            # the outer endpoints of the lazy path stay fixed
            flip = j == n and j > 0
            g0 = X.inverse(g) if flip else g
            x0 = X.source(g0)
            if 0 < j < n:
                xs = hpath.line_path(x0, x0 + scale * rng.standard_normal(X.obj_dim), K, plat).samples
            else:
                xs = np.tile(x0, (K + 1, 1))
            w0 = groupoid.fiber_coords(X, g0)
            z = _zeta_over(X, xs, w0, w0 + scale * rng.standard_normal(nf), plat)
            zetas.append(z.map(X.inverse) if flip else z)
        return G, {"kind": kind, "zetas": zetas}
    if kind == "reparametrize":
        a = float(rng.uniform(0.1, 0.9)) / (2 * np.pi)
        return G, {"kind": kind, "psi": lambda t, a=a: t - a * np.sin(2 * np.pi * t)}
    raise ValueError(f"unknown transform {kind!r}")


def invariance_suite(b, C, omega, G: LazyPath, transform: dict) -> dict:
    G2 = apply_transform(G, transform)
    T1 = lazy_transport(b, C, omega, G)
    T2 = lazy_transport(b, C, omega, G2)
    eq, wit = quotient_equal(b, T1, T2)
    return {
        "kind": transform["kind"],
        "quotient_equal": bool(eq),
        "divider_distance": wit.distance,
        "object_distance": object_distance(b, T1, T2),
        "probe_spread": wit.probe_spread,
    }


def functor_suite(b, C, omega, G: LazyPath, G2: LazyPath) -> dict:
    """Composition, unit and inverse laws of Gamma -> [T_Gamma] in the quotient."""
    X = b.base
    K = G.paths[0].K if G.paths else hpath.DEFAULT_GRID
    T1 = lazy_transport(b, C, omega, G)
    T2 = lazy_transport(b, C, omega, G2)
    T21 = lazy_transport(b, C, omega, hpath.groupoid_compose(G2, G))
    comp_eq, comp_w = quotient_equal(b, T21, compose_maps(T2, T1))
    Tu = lazy_transport(b, C, omega, hpath.groupoid_unit(X, G.target, K))
    unit_eq, unit_w = quotient_equal(b, Tu, identity_map(b.cm, G.target))
    Tinv = lazy_transport(b, C, omega, hpath.groupoid_invert(G))
    inv_eq, inv_w = quotient_equal(b, compose_maps(Tinv, T1), identity_map(b.cm, G.source))
    Tcu = lazy_transport(b, C, omega, hpath.groupoid_compose(hpath.groupoid_unit(X, G.target, K), G))
    cu_eq, cu_w = quotient_equal(b, Tcu, T1)
    return {
        "composition": bool(comp_eq),
        "unit": bool(unit_eq),
        "inverse": bool(inv_eq),
        "unit_composite": bool(cu_eq),
        "distances": [comp_w.distance, unit_w.distance, inv_w.distance, cu_w.distance],
        "pass": bool(comp_eq and unit_eq and inv_eq and cu_eq),
    }


def naturality_suite(F: BundleMorphism, b, C, omega, b2, C2, omega2, n_samples: int = 10, seed: int = 0,
                     K: int = hpath.DEFAULT_GRID) -> dict:
    """Cartesian and classical transport squares for F: (b, C, omega) -> (b2, C2, omega2), omega = F*omega2."""
    X = b.base
    rng = np.random.default_rng(seed)
    res = dict.fromkeys(["cartesian_obj", "cartesian_mor", "classical_obj", "classical_mor"], 0.0)
    for _ in range(n_samples):
        gamma = X.sample_arrow(rng)
        y = X.target(gamma)
        p = b.sample_point(rng, y)
        d = fiber_arrow(b, p, b.H.random(rng))
        T, T2 = cartesian_transport(b, C, gamma), cartesian_transport(b2, C2, gamma)
        res["cartesian_obj"] = max(res["cartesian_obj"], point_distance(F.F0(T(p)), T2(F.F0(p))))
        res["cartesian_mor"] = max(res["cartesian_mor"], arrow_distance(F.F1(T.mor_map(d)), T2.mor_map(F.F1(d))))
        x0 = X.sample_obj(rng)
        alpha = hpath.line_path(x0, x0 + 0.5 * rng.standard_normal(X.obj_dim), K)
        P, P2 = path_transport(omega, alpha), path_transport(omega2, alpha)
        q = b.sample_point(rng, x0)
        e = fiber_arrow(b, q, b.H.random(rng))
        res["classical_obj"] = max(res["classical_obj"], point_distance(F.F0(P(q)), P2(F.F0(q))))
        res["classical_mor"] = max(res["classical_mor"], arrow_distance(F.F1(P.mor_map(e)), P2.mor_map(F.F1(e))))
    return res


# ----------------------------------------------------------------- pullback


@dataclass(frozen=True, eq=False)
class PulledBack:
    bundle: Principal2Bundle
    C: QuasiConnection
    omega: StrictConnection
    eta: BundleMorphism
    morphism: GroupoidMorphism


def pullback_bundle(b: Principal2Bundle, C: QuasiConnection, omega: Connection, F: GroupoidMorphism) -> PulledBack:
    """F*E over the source groupoid of F with the pulled-back C and omega.

    In the trivialization F*E0 = Y0 x G and F*E1 carries coordinates (gamma_Y, (y, g), h);
    eta is the canonical map to E.
    """
    Y = F.src

    def cocycle(gamma):
        return b.cocycle(F.F1(gamma))

    def Hu(p):
        return b.Hu(Point(F.F0(p.x), p.g))

    def Hm(g2, g1):
        return b.Hm(F.F1(g2), F.F1(g1))

    bY = Principal2Bundle(b.cm, Y, cocycle, Hu, Hm, b.decorated)

    def eta0(p):
        return Point(F.F0(p.x), p.g)

    def eta1(d):
        return Arrow(F.F1(d.gamma), eta0(d.p), d.h)

    def CY(gamma, p):
        return Arrow(np.asarray(gamma, dtype=float), p, C(F.F1(gamma), eta0(p)).h)

    def AY(y, v):
        dF = tangent_eval(Y, F.F0, y, v, space="obj") if np.any(v) else np.zeros(F.dst.obj_dim)
        return omega.potential(F.F0(y), dF)

    return PulledBack(bY, QuasiConnection(bY, CY, C.classification), StrictConnection(bY, AY, "pullback"),
                      BundleMorphism(eta0, eta1), F)


def map_lazy_path(F: GroupoidMorphism, G: LazyPath) -> LazyPath:
    arrows = [F.F1(a) for a in G.arrows]
    paths = [p.map(F.F0) for p in G.paths]
    return hpath.make_lazy_path(F.dst, arrows, paths)


def pullback_suite(b, C, omega, F: GroupoidMorphism, paths: Sequence[LazyPath], n_samples: int = 10,
                   seed: int = 0) -> dict:
    """eta intertwines cartesian transports (i) and path transports (ii); lazy classes agree."""
    pb = pullback_bundle(b, C, omega, F)
    Y = F.src
    rng = np.random.default_rng(seed)
    res = dict.fromkeys(["cartesian", "classical", "lazy_divider"], 0.0)
    eta = pb.eta
    for _ in range(n_samples):
        gamma = Y.sample_arrow(rng)
        p = pb.bundle.sample_point(rng, Y.target(gamma))
        lhs = eta.F0(cartesian_transport(pb.bundle, pb.C, gamma)(p))
        rhs = cartesian_transport(b, C, F.F1(gamma))(eta.F0(p))
        res["cartesian"] = max(res["cartesian"], point_distance(lhs, rhs))
    all_equal = True
    for G in paths:
        for alpha in G.paths:
            q = pb.bundle.sample_point(rng, alpha.start())
            lhs = eta.F0(path_transport(pb.omega, alpha)(q))
            rhs = path_transport(omega, alpha.map(F.F0))(eta.F0(q))
            res["classical"] = max(res["classical"], point_distance(lhs, rhs))
        TY = lazy_transport(pb.bundle, pb.C, pb.omega, G)
        TX = lazy_transport(b, C, omega, map_lazy_path(F, G))
        # compare eta o T_Y with T_X o eta through probes in the X fiber
        pushed = TorsorMap(F.F0(TY.src_x), F.F0(TY.dst_x),
                           lambda p, TY=TY: eta.F0(TY(Point(G.source, p.g))),
                           lambda d: d, b.cm, "eta T_Y")
        eq, wit = quotient_equal(b, pushed, TX)
        all_equal = all_equal and eq
        res["lazy_divider"] = max(res["lazy_divider"], wit.distance)
    res["lazy_equal"] = all_equal
    return res


# --------------------------------------------------------------- smoothness


def smoothness_probe(family: Callable[[float], tuple], us: Sequence[float], probe_g=None) -> dict:
    """Divided differences of u -> T_{Gamma(u)}(probe) over an equispaced grid of u.

    ``family(u)`` returns ``(b, C, omega, Gamma)``.
    """
    us = np.asarray(us, dtype=float)
    du = float(us[1] - us[0])
    if not np.allclose(np.diff(us), du):
        raise ValueError("u grid must be equispaced")
    vals = []
    for u in us:
        b, C, omega, G = family(u)
        g0 = b.G.identity if probe_g is None else probe_g
        vals.append(lazy_transport(b, C, omega, G)(Point(G.source, g0)).g)
    vals = np.array(vals)
    d1 = np.diff(vals, axis=0) / du
    d2 = np.diff(vals, n=2, axis=0) / du**2
    return {
        "values": vals,
        "first": d1,
        "second": d2,
        "max_first": float(np.abs(d1).max()),
        "max_second": float(np.abs(d2).max()) if len(d2) else 0.0,
    }


def random_lazy_path(base: GroupoidPresentation, rng, x0, order: int = 2, K: int = hpath.DEFAULT_GRID,
                     spread: float = 0.4, n_way: int = 3) -> LazyPath:
    """Seeded lazy path from x0 with ``order`` spline segments."""
    X = base
    x0 = np.asarray(x0, dtype=float)
    arrows, paths = [], []
    g = X.sample_arrow(rng, x0)
    arrows.append(g)
    x = X.target(g)
    for _ in range(order):
        way = [x]
        for _ in range(n_way - 1):
            way.append(way[-1] + spread * rng.standard_normal(X.obj_dim))
        alpha = hpath.path_from_waypoints(way, K)
        paths.append(alpha)
        g = X.sample_arrow(rng, alpha.end())
        arrows.append(g)
        x = X.target(g)
    return hpath.make_lazy_path(X, arrows, paths)


def transport_list(maps: List[TorsorMap]) -> TorsorMap:
    out = maps[0]
    for i, m in enumerate(maps[1:], start=1):
        out = compose_maps(m, out, i)
    return out
