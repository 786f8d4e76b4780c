"""Lie crossed modules (G, H, tau, alpha) and the 2-group [H x| G => G]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import matlie
from .errors import NotComposable
from .matlie import MatrixGroup

TOL_MATCH = 1e-8
FD_STEP = 1e-5


class TwoGroupArrow(NamedTuple):
    """Arrow (h, g) of the 2-group, from g to tau(h) g."""

    h: np.ndarray
    g: np.ndarray


@dataclass(frozen=True, eq=False)
class CrossedModule:
    name: str
    G: MatrixGroup
    H: MatrixGroup
    tau: Callable[[np.ndarray], np.ndarray]
    alpha: Callable[[np.ndarray, np.ndarray], np.ndarray]
    tauH_membership: Callable[[np.ndarray], bool]
    tauH_distance: Callable[[np.ndarray], float]
    # optional closed forms of the differentials; finite differences otherwise
    dtau: Optional[Callable] = None
    dalpha_g: Optional[Callable] = None
    dalpha_X: Optional[Callable] = None

    def d_tau(self, Y):
        """Differential of tau at the identity."""
        if self.dtau is not None:
            return self.dtau(Y)
        ep = matlie.exp(self.H, FD_STEP * Y)
        em = matlie.exp(self.H, -FD_STEP * Y)
        return (self.tau(ep) - self.tau(em)) / (2 * FD_STEP)

    def d_alpha_g(self, g, Y):
        """Differential of alpha(g, .) at the identity of H."""
        if self.dalpha_g is not None:
            return self.dalpha_g(g, Y)
        ep = matlie.exp(self.H, FD_STEP * Y)
        em = matlie.exp(self.H, -FD_STEP * Y)
        return (self.alpha(g, ep) - self.alpha(g, em)) / (2 * FD_STEP)

    def d_alpha_X(self, X, k):
        """Tangent at k of t -> alpha(exp(tX), k) at t = 0."""
        if self.dalpha_X is not None:
            return self.dalpha_X(X, k)
        ep = matlie.exp(self.G, FD_STEP * X)
        em = matlie.exp(self.G, -FD_STEP * X)
        return (self.alpha(ep, k) - self.alpha(em, k)) / (2 * FD_STEP)

    def __repr__(self):
        return f"CrossedModule({self.name!r})"


# ------------------------------------------------------------ 2-group maps


def source(a: TwoGroupArrow) -> np.ndarray:
    return a.g


def target(cm: CrossedModule, a: TwoGroupArrow) -> np.ndarray:
    return cm.tau(a.h) @ a.g


def unit_arrow(cm: CrossedModule, g) -> TwoGroupArrow:
    return TwoGroupArrow(cm.H.identity, np.asarray(g, dtype=float))


def arrow_compose(cm: CrossedModule, a2: TwoGroupArrow, a1: TwoGroupArrow, tol: float = TOL_MATCH) -> TwoGroupArrow:
    gap = float(np.linalg.norm(a2.g - target(cm, a1)))
    if gap > tol:
        raise NotComposable(f"source of second arrow misses target of first by {gap:.3e}")
    return TwoGroupArrow(a2.h @ a1.h, a1.g)


def arrow_inverse(cm: CrossedModule, a: TwoGroupArrow) -> TwoGroupArrow:
    """Inverse for composition: (h^{-1}, tau(h) g)."""
    return TwoGroupArrow(cm.H.inverse(a.h), target(cm, a))


def arrow_tensor(cm: CrossedModule, a2: TwoGroupArrow, a1: TwoGroupArrow) -> TwoGroupArrow:
    """Group product in H x| G."""
    return TwoGroupArrow(a2.h @ cm.alpha(a2.g, a1.h), a2.g @ a1.g)


def tensor_inverse(cm: CrossedModule, a: TwoGroupArrow) -> TwoGroupArrow:
    ginv = cm.G.inverse(a.g)
    return TwoGroupArrow(cm.alpha(ginv, cm.H.inverse(a.h)), ginv)


def arrow_distance(a: TwoGroupArrow, b: TwoGroupArrow) -> float:
    return max(float(np.linalg.norm(a.h - b.h)), float(np.linalg.norm(a.g - b.g)))


def random_arrow(cm: CrossedModule, rng: np.random.Generator, scale: float = 1.0) -> TwoGroupArrow:
    return TwoGroupArrow(cm.H.random(rng, scale), cm.G.random(rng, scale))


def check_peiffer(cm: CrossedModule, n_samples: int = 100, seed: int = 0) -> dict:
    """Max Frobenius residual of each crossed-module axiom over seeded samples."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    G, H = cm.G, cm.H
    res = dict.fromkeys(
        ["tau_homomorphism", "peiffer_1", "peiffer_2", "alpha_homomorphism", "alpha_action", "tauH_membership"], 0.0
    )

    def bump(key, value):
        res[key] = max(res[key], float(value))

    for _ in range(n_samples):
        g1, g2 = G.random(rng), G.random(rng)
        h1, h2 = H.random(rng), H.random(rng)
        bump("tau_homomorphism", np.linalg.norm(cm.tau(h1 @ h2) - cm.tau(h1) @ cm.tau(h2)))
        bump("peiffer_1", np.linalg.norm(cm.tau(cm.alpha(g1, h1)) - g1 @ cm.tau(h1) @ G.inverse(g1)))
        bump("peiffer_2", np.linalg.norm(cm.alpha(cm.tau(h1), h2) - h1 @ h2 @ H.inverse(h1)))
        bump("alpha_homomorphism", np.linalg.norm(cm.alpha(g1, h1 @ h2) - cm.alpha(g1, h1) @ cm.alpha(g1, h2)))
        bump("alpha_action", np.linalg.norm(cm.alpha(g1 @ g2, h1) - cm.alpha(g1, cm.alpha(g2, h1))))
        t = cm.tau(h1)
        bump("tauH_membership", 0.0 if cm.tauH_membership(t) else max(cm.tauH_distance(t), 1.0))
    return res


# ---------------------------------------------------------------- builtins

MEMBER_TOL = 1e-6


def _always(_g):
    return True


def _zero(_g):
    return 0.0


def conjugation_module(G: MatrixGroup, name: Optional[str] = None) -> CrossedModule:
    """(G, G, id, conj)."""
    return CrossedModule(
        name or f"CM1:{G.name}",
        G,
        G,
        tau=lambda h: h,
        alpha=lambda g, h: g @ h @ G.inverse(g),
        tauH_membership=_always,
        tauH_distance=_zero,
        dtau=lambda Y: Y,
        dalpha_g=lambda g, Y: g @ Y @ G.inverse(g),
        dalpha_X=lambda X, k: X @ k - k @ X,
    )


def _identity_distance(G):
    return lambda g: float(np.linalg.norm(g - G.identity))


def cm2() -> CrossedModule:
    """({e}, R, trivial, id)."""
    G, H = matlie.TRIVIAL, matlie.R1
    dist = _identity_distance(G)
    return CrossedModule(
        "CM2",
        G,
        H,
        tau=lambda h: np.eye(1),
        alpha=lambda g, h: h,
        tauH_membership=lambda g: dist(g) < MEMBER_TOL,
        tauH_distance=dist,
        dtau=lambda Y: np.zeros((1, 1)),
        dalpha_g=lambda g, Y: Y,
        dalpha_X=lambda X, k: np.zeros_like(k),
    )


def cm3() -> CrossedModule:
    """(SO(2), R, x -> R(x), trivial)."""
    G, H = matlie.SO2, matlie.R1
    return CrossedModule(
        "CM3",
        G,
        H,
        tau=lambda h: matlie.rot2(h[0, 1]),
        alpha=lambda g, h: h,
        tauH_membership=_always,
        tauH_distance=_zero,
        dtau=lambda Y: Y[0, 1] * matlie.J2,
        dalpha_g=lambda g, Y: Y,
        dalpha_X=lambda X, k: np.zeros_like(k),
    )


def cm4() -> CrossedModule:
    """(R^2, R, x -> (x, 0), trivial)."""
    G, H = matlie.R2, matlie.R1

    def dist(g):
        return float(abs(g[1, 2]))

    def dtau(Y):
        out = np.zeros((3, 3))
        out[0, 2] = Y[0, 1]
        return out

    return CrossedModule(
        "CM4",
        G,
        H,
        tau=lambda h: matlie.translation([h[0, 1], 0.0]),
        alpha=lambda g, h: h,
        tauH_membership=lambda g: dist(g) < MEMBER_TOL,
        tauH_distance=dist,
        dtau=dtau,
        dalpha_g=lambda g, Y: Y,
        dalpha_X=lambda X, k: np.zeros_like(k),
    )


def discrete_module(G: MatrixGroup) -> CrossedModule:
    """(G, {e}): the discrete 2-group [G => G]."""
    H = matlie.TRIVIAL
    dist = _identity_distance(G)
    return CrossedModule(
        f"DISC:{G.name}",
        G,
        H,
        tau=lambda h: G.identity,
        alpha=lambda g, h: np.eye(1),
        tauH_membership=lambda g: dist(g) < MEMBER_TOL,
        tauH_distance=dist,
        dtau=lambda Y: np.zeros((G.dim, G.dim)),
        dalpha_g=lambda g, Y: np.zeros((1, 1)),
        dalpha_X=lambda X, k: np.zeros((1, 1)),
    )


def corrupted_module() -> CrossedModule:
    """Conjugation module on SO(3) with alpha(g, h) = h g, which breaks Peiffer 1."""
    G = matlie.SO3
    base = conjugation_module(G)
    return CrossedModule(
        "CORRUPT",
        G,
        G,
        tau=base.tau,
        alpha=lambda g, h: h @ g,
        tauH_membership=_always,
        tauH_distance=_zero,
    )


_BUILDERS = {
    "CM1": lambda: conjugation_module(matlie.SO3, "CM1"),
    "CM1:SO2": lambda: conjugation_module(matlie.SO2),
    "CM1:SO3": lambda: conjugation_module(matlie.SO3),
    "CM2": cm2,
    "CM3": cm3,
    "CM4": cm4,
    "DISC:SO2": lambda: discrete_module(matlie.SO2),
    "DISC:SO3": lambda: discrete_module(matlie.SO3),
    "CORRUPT": corrupted_module,
}


def builtin(name: str) -> CrossedModule:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown crossed module {name!r}") from None


def builtin_names():
    return list(_BUILDERS)
