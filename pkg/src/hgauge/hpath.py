"""Lazy Haefliger paths, their equivalence moves and thin deformations.

A base path is a :class:`SampledPath`: ``K + 1`` samples on the uniform grid
of [0, 1] that sit still for ``plateau`` steps at each end.  Concatenation
joins the sample arrays, so ``(b * a).K = a.K + b.K``; ``b * a`` runs ``a``
first.  Each path remembers the atomic pieces it was glued from, and a piece
followed by its own reverse cancels, which makes deformations reversible
sample by sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    BoundaryMismatch,
    EndpointMismatch,
    NotComposable,
    NotConstant,
    NotIdentity,
    OutOfChart,
    SourceMismatch,
)
from .groupoid import GroupoidPresentation

DEFAULT_GRID = 128
DETECT_TOL = 1e-8
TOL_MATCH = 1e-8
SIT_TOL = 1e-10


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, all derivatives vanish at both ends."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    out = np.zeros_like(u)
    inner = (u > 0.0) & (u < 1.0)
    with np.errstate(over="ignore", divide="ignore"):
        a = np.exp(-1.0 / u[inner])
        b = np.exp(-1.0 / (1.0 - u[inner]))
    out[inner] = a / (a + b)
    out[u >= 1.0] = 1.0
    return out


def sitting_reparam(frac: float):
    """phi with phi = 0 on [0, frac], phi = 1 on [1 - frac, 1], smooth between."""

    def phi(t):
        return smooth_step((np.asarray(t, dtype=float) - frac) / (1.0 - 2.0 * frac))

    return phi


def default_plateau(K: int) -> int:
    return max(2, K // 16)


@dataclass(frozen=True, eq=False)
class SampledPath:
    samples: np.ndarray
    plateau: int
    source: Optional[Callable] = field(default=None, repr=False)
    pieces: Tuple[np.ndarray, ...] = field(default=(), repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.plateau < 1:
            raise ValueError("plateau must be >= 1")
        if s.shape[0] < 2 * self.plateau + 2:
            raise ValueError("grid too small for the requested plateau")
        if not self.pieces:
            object.__setattr__(self, "pieces", (s,))

    @property
    def K(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def start(self) -> np.ndarray:
        return np.array(self.samples[0])

    def end(self) -> np.ndarray:
        return np.array(self.samples[-1])

    def __call__(self, t):
        """Value at parameter t: exact if a source is known, else a cubic spline."""
        if self.source is not None:
            return np.asarray(self.source(t), dtype=float)
        grid = np.linspace(0.0, 1.0, self.K + 1)
        return CubicSpline(grid, self.samples, axis=0)(t)

    def sitting_residual(self) -> float:
        p = self.plateau
        head = self.samples[: p + 1] - self.samples[0]
        tail = self.samples[-p - 1 :] - self.samples[-1]
        return float(max(np.abs(head).max(), np.abs(tail).max()))

    def deviation(self) -> float:
        """max distance of a sample from the start point."""
        return float(np.abs(self.samples - self.samples[0]).max())

    def is_constant(self, tol: float = DETECT_TOL) -> bool:
        return self.deviation() < tol

    def reverse(self) -> "SampledPath":
        src = None if self.source is None else (lambda t, f=self.source: f(1.0 - np.asarray(t, dtype=float)))
        pieces = tuple(p[::-1] for p in reversed(self.pieces))
        return SampledPath(self.samples[::-1], self.plateau, src, pieces)

    def map(self, f: Callable) -> "SampledPath":
        """Pointwise image f o path."""
        def apply(arr):
            return np.array([np.asarray(f(x), dtype=float) for x in arr])

        src = None
        if self.source is not None:
            g = self.source

            def src(t):
                t = np.asarray(t, dtype=float)
                vals = g(t)
                return apply(vals) if t.ndim else np.asarray(f(vals), dtype=float)

        pieces = tuple(apply(p) for p in self.pieces)
        return SampledPath(np.concatenate([pieces[0]] + [p[1:] for p in pieces[1:]]), self.plateau, src, pieces)

    def reparametrize(self, psi: Callable) -> "SampledPath":
        """alpha o psi for an endpoint-fixing psi that keeps the sitting instants."""
        t = np.linspace(0.0, 1.0, self.K + 1)
        u = np.asarray(psi(t), dtype=float)
        samples = self(u)
        src = None if self.source is None else (lambda s, f=self.source: f(psi(s)))
        return SampledPath(samples, self.plateau, src)

    def resample(self, K: int) -> "SampledPath":
        if self.source is None:
            raise ValueError("resampling needs an exact source")
        t = np.linspace(0.0, 1.0, K + 1)
        plateau = max(1, (self.plateau * K) // self.K)
        return SampledPath(self.source(t), plateau, self.source)


def _join(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.concatenate([a, b[1:]])


def concat(second: SampledPath, first: SampledPath, tol: float = TOL_MATCH) -> SampledPath:
    """second * first: run ``first`` then ``second``."""
    gap = float(np.linalg.norm(first.end() - second.start()))
    if gap >= tol:
        raise NotComposable(f"paths do not meet (gap {gap:.3e})")
    left, right = list(first.pieces), list(second.pieces)
    # cancel a piece against its own reverse at the junction
    while left and right and left[-1].shape == right[0].shape and np.array_equal(left[-1][::-1], right[0]):
        left.pop()
        right.pop(0)
    plateau = min(first.plateau, second.plateau)
    pieces = left + right
    if not pieces:
        x = first.start()
        return constant_path(x, first.K, first.plateau)
    samples = pieces[0]
    for p in pieces[1:]:
        samples = _join(samples, p)
    return SampledPath(samples, plateau, None, tuple(pieces))


def constant_path(x, K: int = DEFAULT_GRID, plateau: Optional[int] = None) -> SampledPath:
    x = np.asarray(x, dtype=float).reshape(-1)
    plateau = default_plateau(K) if plateau is None else plateau

    def src(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(x, t.shape + x.shape).copy()

    return SampledPath(np.tile(x, (K + 1, 1)), plateau, src)


def path_from_function(f: Callable, K: int = DEFAULT_GRID, plateau: Optional[int] = None) -> SampledPath:
    """Samples of f o phi, where phi makes the path sit for ``plateau`` steps at each end.

    ``f`` maps an array of parameters of shape (m,) to points of shape (m, n).
    """
    plateau = default_plateau(K) if plateau is None else plateau
    phi = sitting_reparam(plateau / K)

    def src(t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(f(np.atleast_1d(phi(t))), dtype=float)
        return out.reshape(t.shape + out.shape[-1:]) if t.ndim else out.reshape(-1)

    return SampledPath(src(np.linspace(0.0, 1.0, K + 1)), plateau, src)


def line_path(x0, x1, K: int = DEFAULT_GRID, plateau: Optional[int] = None) -> SampledPath:
    x0, x1 = np.asarray(x0, float), np.asarray(x1, float)
    return path_from_function(lambda u: x0 + np.outer(u, x1 - x0), K, plateau)


def path_from_waypoints(waypoints, K: int = DEFAULT_GRID, plateau: Optional[int] = None) -> SampledPath:
    """Cubic spline through the waypoints, then plateau enforcement."""
    w = np.asarray(waypoints, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    if len(w) < 2:
        return constant_path(w[0], K, plateau)
    spline = CubicSpline(np.linspace(0.0, 1.0, len(w)), w, axis=0)
    return path_from_function(lambda u: spline(u), K, plateau)


# --------------------------------------------------------------- lazy paths


@dataclass(frozen=True, eq=False)
class LazyPath:
    base: GroupoidPresentation
    arrows: Tuple[np.ndarray, ...]
    paths: Tuple[SampledPath, ...]

    @property
    def order(self) -> int:
        return len(self.paths)

    @property
    def source(self) -> np.ndarray:
        return self.base.source(self.arrows[0])

    @property
    def target(self) -> np.ndarray:
        return self.base.target(self.arrows[-1])


def make_lazy_path(base: GroupoidPresentation, arrows: Sequence, paths: Sequence[SampledPath],
                   tol: float = TOL_MATCH) -> LazyPath:
    arrows = tuple(np.asarray(a, dtype=float) for a in arrows)
    paths = tuple(paths)
    if len(arrows) != len(paths) + 1:
        raise ValueError(f"need n + 1 arrows for n paths, got {len(arrows)} and {len(paths)}")
    for a in arrows:
        if not base.in_mor_chart(a):
            raise OutOfChart("arrow outside the morphism chart")
    for i, alpha in enumerate(paths, start=1):
        if alpha.dim != base.obj_dim:
            raise ValueError(f"path {i} has dimension {alpha.dim}, expected {base.obj_dim}")
        if not all(base.in_obj_chart(x) for x in alpha.samples):
            raise OutOfChart(f"path {i} leaves the object chart")
        if alpha.sitting_residual() > SIT_TOL:
            raise ValueError(f"path {i} has no sitting instants")
        r0 = float(np.linalg.norm(base.target(arrows[i - 1]) - alpha.start()))
        if r0 >= tol:
            raise EndpointMismatch(i, r0)
        r1 = float(np.linalg.norm(base.source(arrows[i]) - alpha.end()))
        if r1 >= tol:
            raise EndpointMismatch(i, r1)
    return LazyPath(base, arrows, paths)


def lazy_path_distance(a: LazyPath, b: LazyPath) -> float:
    """Sample-wise distance; infinite if the shapes differ."""
    if a.order != b.order:
        return float("inf")
    d = 0.0
    for x, y in zip(a.arrows, b.arrows):
        d = max(d, float(np.abs(x - y).max()))
    for p, q in zip(a.paths, b.paths):
        if p.samples.shape != q.samples.shape:
            return float("inf")
        d = max(d, float(np.abs(p.samples - q.samples).max()))
    return d


def _rebuild(G: LazyPath, arrows, paths) -> LazyPath:
    return make_lazy_path(G.base, arrows, paths)


def move_remove_constant(G: LazyPath, i: int, tol: float = DETECT_TOL) -> LazyPath:
    """(..., g_i, c, g_{i+1}, ...) -> (..., g_{i+1} g_i, ...); ``c`` is path i + 1."""
    if not 0 <= i < G.order:
        raise IndexError(f"no path after arrow {i}")
    alpha = G.paths[i]
    if not alpha.is_constant(tol):
        raise NotConstant(f"path {i + 1} deviates by {alpha.deviation():.3e}")
    X = G.base
    merged = X.compose(G.arrows[i + 1], G.arrows[i])
    arrows = G.arrows[:i] + (merged,) + G.arrows[i + 2 :]
    return _rebuild(G, arrows, G.paths[:i] + G.paths[i + 1 :])


def move_add_constant(G: LazyPath, i: int, first=None, K: Optional[int] = None) -> LazyPath:
    """Split arrow i as g_i = second o first and insert a constant path between.

    ``first`` defaults to the unit at s(g_i).
    """
    X = G.base
    g = G.arrows[i]
    if first is None:
        first = X.unit(X.source(g))
    first = np.asarray(first, dtype=float)
    second = X.compose(g, X.inverse(first))
    if K is None:
        K = G.paths[0].K if G.paths else DEFAULT_GRID
    c = constant_path(X.target(first), K)
    arrows = G.arrows[:i] + (first, second) + G.arrows[i + 1 :]
    return _rebuild(G, arrows, G.paths[:i] + (c,) + G.paths[i:])


def _is_unit(X: GroupoidPresentation, g, tol: float) -> bool:
    return float(np.abs(X.unit(X.source(g)) - g).max()) < tol


def move_remove_identity(G: LazyPath, i: int, tol: float = DETECT_TOL) -> LazyPath:
    """(..., a_i, 1, a_{i+1}, ...) -> (..., a_{i+1} * a_i, ...) for an inner unit arrow i."""
    if not 0 < i < G.order:
        raise IndexError("only inner arrows sit between two paths")
    X = G.base
    if not _is_unit(X, G.arrows[i], tol):
        raise NotIdentity(f"arrow {i} is not a unit")
    joined = concat(G.paths[i], G.paths[i - 1])
    arrows = G.arrows[:i] + G.arrows[i + 1 :]
    paths = G.paths[: i - 1] + (joined,) + G.paths[i + 1 :]
    return _rebuild(G, arrows, paths)


def move_conjugate(G: LazyPath, i: int, zeta: SampledPath, tol: float = DETECT_TOL) -> LazyPath:
    """Replace (g_{i-1}, a_i, g_i) by (z(0) g_{i-1}, t o z, g_i z(1)^{-1}) where s o z = a_i."""
    if not 1 <= i <= G.order:
        raise IndexError(f"path index {i} out of range")
    X = G.base
    alpha = G.paths[i - 1]
    src = zeta.map(X.source)
    if src.samples.shape != alpha.samples.shape:
        raise SourceMismatch("zeta and the path have different grids")
    r = float(np.abs(src.samples - alpha.samples).max())
    if r >= tol:
        raise SourceMismatch(f"s o zeta misses the path by {r:.3e}")
    z0, z1 = zeta.start(), zeta.end()
    arrows = list(G.arrows)
    arrows[i - 1] = X.compose(z0, G.arrows[i - 1])
    arrows[i] = X.compose(G.arrows[i], X.inverse(z1))
    paths = list(G.paths)
    paths[i - 1] = zeta.map(X.target)
    return _rebuild(G, arrows, paths)


def thin_deform(G: LazyPath, zetas: Sequence[SampledPath], tol: float = DETECT_TOL) -> LazyPath:
    """Deform along paths zeta_i in X1 with zeta_i(0) = g_i.

    The new data are g'_i = zeta_i(1) and a'_i = (s o zeta_i) * a_i * (t o zeta_{i-1})^{-1}.
    """
    X = G.base
    n = G.order
    if len(zetas) != n + 1:
        raise BoundaryMismatch(f"need {n + 1} deformation paths, got {len(zetas)}")
    for i, z in enumerate(zetas):
        r = float(np.abs(z.start() - G.arrows[i]).max())
        if r >= tol:
            raise BoundaryMismatch(f"zeta_{i}(0) misses arrow {i} by {r:.3e}")
    if not zetas[0].map(X.source).is_constant(tol):
        raise BoundaryMismatch("s o zeta_0 is not constant")
    if not zetas[-1].map(X.target).is_constant(tol):
        raise BoundaryMismatch("t o zeta_n is not constant")
    arrows = tuple(z.end() for z in zetas)
    paths = []
    for i in range(1, n + 1):
        back = zetas[i - 1].map(X.target).reverse()
        fwd = zetas[i].map(X.source)
        paths.append(concat(fwd, concat(G.paths[i - 1], back)))
    return _rebuild(G, arrows, paths)


def constant_zetas(G: LazyPath, K: Optional[int] = None) -> List[SampledPath]:
    K = K or (G.paths[0].K if G.paths else DEFAULT_GRID)
    return [constant_path(a, K) for a in G.arrows]


def compose_zetas(second: Sequence[SampledPath], first: Sequence[SampledPath]) -> List[SampledPath]:
    """Deformation by ``first`` followed by ``second``."""
    return [concat(b, a) for a, b in zip(first, second)]


def reverse_zetas(zetas: Sequence[SampledPath]) -> List[SampledPath]:
    return [z.reverse() for z in zetas]


# ------------------------------------------------------ groupoid structure


def groupoid_unit(base: GroupoidPresentation, x, K: int = DEFAULT_GRID) -> LazyPath:
    """(1_x, c_x, 1_x)."""
    u = base.unit(np.asarray(x, dtype=float))
    return make_lazy_path(base, [u, u], [constant_path(x, K)])


def groupoid_compose(second: LazyPath, first: LazyPath, tol: float = TOL_MATCH) -> LazyPath:
    """second o first = (g_0, ..., a_m, g'_0 o g_m, a'_1, ..., g'_n)."""
    X = first.base
    gap = float(np.linalg.norm(first.target - second.source))
    if gap >= tol:
        raise NotComposable(f"t(first) and s(second) differ by {gap:.3e}")
    mid = X.compose(second.arrows[0], first.arrows[-1])
    arrows = first.arrows[:-1] + (mid,) + second.arrows[1:]
    return make_lazy_path(X, arrows, first.paths + second.paths)


def groupoid_invert(G: LazyPath) -> LazyPath:
    X = G.base
    arrows = [X.inverse(a) for a in reversed(G.arrows)]
    paths = [p.reverse() for p in reversed(G.paths)]
    return make_lazy_path(X, arrows, paths)


# --------------------------------------------------------- thin certificate


def _diff(F, axis: int, step: float):
    """Derivative along ``axis`` at interior nodes, 4th order when there are at least 5 nodes."""
    F = np.moveaxis(F, axis, 0)
    n = F.shape[0]
    D = np.full(F.shape, np.nan)
    if n >= 5:
        D[2:-2] = (-F[4:] + 8 * F[3:-1] - 8 * F[1:-3] + F[:-4]) / (12 * step)
        # off-centre stencils next to the edge
        D[1] = (-3 * F[0] - 10 * F[1] + 18 * F[2] - 6 * F[3] + F[4]) / (12 * step)
        D[-2] = (3 * F[-1] + 10 * F[-2] - 18 * F[-3] + 6 * F[-4] - F[-5]) / (12 * step)
    else:
        D[1] = (F[2] - F[0]) / (2 * step)
        D[-2] = (F[-1] - F[-3]) / (2 * step)
    return np.moveaxis(D, 0, axis)


def rank1_certificate(Hgrid, hs: Optional[float] = None, ht: Optional[float] = None,
                      in_chart: Optional[Callable] = None) -> float:
    """max over interior nodes of the second singular value of dH.

    ``Hgrid`` has shape (M + 1, K + 1, n) with H[i, j] = H(s_i, t_j).
    """
    H = np.asarray(Hgrid, dtype=float)
    if H.ndim == 2:
        H = H[:, :, None]
    M, K = H.shape[0] - 1, H.shape[1] - 1
    if M < 2 or K < 2:
        raise ValueError("need at least 3 nodes in each direction")
    if in_chart is not None and not all(in_chart(x) for x in H.reshape(-1, H.shape[2])):
        raise OutOfChart("homotopy leaves the chart")
    hs = 1.0 / M if hs is None else hs
    ht = 1.0 / K if ht is None else ht
    Ds = _diff(H, 0, hs)[1:-1, 1:-1]
    Dt = _diff(H, 1, ht)[1:-1, 1:-1]
    J = np.stack([Ds, Dt], axis=-1)
    if J.shape[-2] < 2:
        return 0.0
    sv = np.linalg.svd(J, compute_uv=False)
    return float(sv[..., 1].max())
