"""Lie groupoids presented on a single chart by callable structure maps.

Objects are points of an open box in R^obj_dim and morphisms are points of an
open box in R^mor_dim.  Every builtin also exposes ``arrow_from(x, w)``, a
parametrization of the source fiber over ``x`` by ``fiber_dim`` free
coordinates, so composable data can be built directly rather than sampled by
rejection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import matlie
from .errors import NotAnAction, NotComposable, OutOfChart
from .matlie import MatrixGroup

TOL_MATCH = 1e-8
DEFAULT_BOX = (-10.0, 10.0)

Vec = np.ndarray


def _in_box(box):
    lo, hi = box

    def inside(p):
        p = np.asarray(p, dtype=float)
        return bool(np.all(np.isfinite(p)) and np.all(p > lo) and np.all(p < hi))

    return inside


@dataclass(frozen=True, eq=False)
class GroupoidPresentation:
    name: str
    obj_dim: int
    mor_dim: int
    fiber_dim: int
    source: Callable[[Vec], Vec]
    target: Callable[[Vec], Vec]
    compose: Callable[[Vec, Vec], Vec]
    unit: Callable[[Vec], Vec]
    inverse: Callable[[Vec], Vec]
    arrow_from: Callable[[Vec, Vec], Vec]
    in_obj_chart: Callable[[Vec], bool]
    in_mor_chart: Callable[[Vec], bool]
    obj_box: Tuple[float, float] = DEFAULT_BOX
    fiber_scale: float = 1.0

    def composable(self, g2, g1, tol: float = TOL_MATCH) -> bool:
        return float(np.linalg.norm(self.source(g2) - self.target(g1))) < tol

    def compose_checked(self, g2, g1, tol: float = TOL_MATCH) -> Vec:
        gap = float(np.linalg.norm(self.source(g2) - self.target(g1)))
        if gap >= tol:
            raise NotComposable(f"t(g1) and s(g2) differ by {gap:.3e}")
        return self.compose(g2, g1)

    def sample_obj(self, rng: np.random.Generator, spread: float = 0.3) -> Vec:
        lo, hi = self.obj_box
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return mid + spread * half * rng.uniform(-1.0, 1.0, self.obj_dim)

    def sample_fiber(self, rng: np.random.Generator) -> Vec:
        return self.fiber_scale * rng.uniform(-1.0, 1.0, self.fiber_dim)

    def sample_arrow(self, rng: np.random.Generator, x: Optional[Vec] = None) -> Vec:
        if x is None:
            x = self.sample_obj(rng)
        return self.arrow_from(x, self.sample_fiber(rng))

    def __repr__(self):
        return f"GroupoidPresentation({self.name!r})"


@dataclass(frozen=True, eq=False)
class GroupoidMorphism:
    src: GroupoidPresentation
    dst: GroupoidPresentation
    F0: Callable[[Vec], Vec]
    F1: Callable[[Vec], Vec]


def pair_groupoid(n: int, chart=DEFAULT_BOX) -> GroupoidPresentation:
    """Pair groupoid of a box in R^n; the morphism (y, x) goes from x to y."""
    if n < 1:
        raise ValueError("n must be >= 1")
    inside = _in_box(chart)
    return GroupoidPresentation(
        name="pair",
        obj_dim=n,
        mor_dim=2 * n,
        fiber_dim=n,
        source=lambda m: np.array(m[n:], dtype=float),
        target=lambda m: np.array(m[:n], dtype=float),
        compose=lambda m2, m1: np.concatenate([m2[:n], m1[n:]]),
        unit=lambda x: np.concatenate([x, x]).astype(float),
        inverse=lambda m: np.concatenate([m[n:], m[:n]]),
        arrow_from=lambda x, w: np.concatenate([np.asarray(w, float) + np.asarray(x, float), x]),
        in_obj_chart=inside,
        in_mor_chart=inside,
        obj_box=tuple(chart),
    )


def discrete_groupoid(n: int, chart=DEFAULT_BOX) -> GroupoidPresentation:
    """[M => M] with every morphism a unit."""
    inside = _in_box(chart)

    def ident(x):
        return np.array(x, dtype=float)

    return GroupoidPresentation(
        name="discrete",
        obj_dim=n,
        mor_dim=n,
        fiber_dim=0,
        source=ident,
        target=ident,
        compose=lambda m2, m1: np.array(m1, dtype=float),
        unit=ident,
        inverse=ident,
        arrow_from=lambda x, w: np.array(x, dtype=float),
        in_obj_chart=inside,
        in_mor_chart=inside,
        obj_box=tuple(chart),
    )


def action_groupoid(
    g: MatrixGroup,
    n: int,
    act: Callable[[np.ndarray, Vec], Vec],
    chart=DEFAULT_BOX,
    n_check: int = 20,
    seed: int = 0,
    tol: float = 1e-9,
) -> GroupoidPresentation:
    """Action groupoid G x R^n; the morphism (c, x) goes from x to act(exp(c), x).

    Group elements are written in exponential coordinates ``c``.  For abelian
    groups the coordinates add under composition, so angles never wrap.
    """
    k = g.algebra_dim
    rng = np.random.default_rng(seed)
    for _ in range(n_check):
        x = rng.uniform(-1.0, 1.0, n)
        a, b = g.random(rng), g.random(rng)
        r1 = np.linalg.norm(act(g.identity, x) - x)
        r2 = np.linalg.norm(act(a @ b, x) - act(a, act(b, x)))
        if max(r1, r2) > tol:
            raise NotAnAction(f"sampled action axioms fail (residual {max(r1, r2):.3e})")

    def elem(c):
        return matlie.exp(g, g.hat(c))

    if g.abelian:

        def cmul(c2, c1):
            return c2 + c1

    else:

        def cmul(c2, c1):
            return g.vee(matlie.log(g, elem(c2) @ elem(c1)))

    inside_obj = _in_box(chart)

    def inside_mor(m):
        return inside_obj(m[k:]) and bool(np.all(np.isfinite(m[:k])))

    return GroupoidPresentation(
        name=f"action:{g.name}",
        obj_dim=n,
        mor_dim=k + n,
        fiber_dim=k,
        source=lambda m: np.array(m[k:], dtype=float),
        target=lambda m: np.asarray(act(elem(m[:k]), m[k:]), dtype=float),
        compose=lambda m2, m1: np.concatenate([cmul(m2[:k], m1[:k]), m1[k:]]),
        unit=lambda x: np.concatenate([np.zeros(k), x]).astype(float),
        inverse=lambda m: np.concatenate([-m[:k], act(elem(m[:k]), m[k:])]),
        arrow_from=lambda x, w: np.concatenate([np.asarray(w, float), x]),
        in_obj_chart=inside_obj,
        in_mor_chart=inside_mor,
        obj_box=tuple(chart),
        fiber_scale=np.pi,
    )


def rotation_action_groupoid(chart=DEFAULT_BOX) -> GroupoidPresentation:
    return action_groupoid(matlie.SO2, 2, lambda r, x: r @ x, chart)


def discrete_inclusion(gp: GroupoidPresentation) -> GroupoidMorphism:
    """Inclusion of the discrete groupoid on the objects of ``gp``."""
    disc = discrete_groupoid(gp.obj_dim, gp.obj_box)
    return GroupoidMorphism(disc, gp, lambda x: np.array(x, dtype=float), gp.unit)


def fiber_coords(gp: GroupoidPresentation, gamma) -> Vec:
    """Inverse of ``arrow_from`` on builtin groupoids: w with arrow_from(s(gamma), w) = gamma."""
    gamma = np.asarray(gamma, dtype=float)
    if gp.fiber_dim == 0:
        return np.zeros(0)
    if gp.name == "pair":
        return gp.target(gamma) - gp.source(gamma)
    return np.array(gamma[: gp.fiber_dim])


def tangent_eval(gp: GroupoidPresentation, f, at, direction, h: float = 1e-5, space: Optional[str] = None):
    """Central difference (f(at + h d) - f(at - h d)) / 2h."""
    at = np.asarray(at, dtype=float)
    d = np.asarray(direction, dtype=float)
    if space is None:
        space = "obj" if at.size == gp.obj_dim else "mor"
    inside = gp.in_obj_chart if space == "obj" else gp.in_mor_chart
    plus, minus = at + h * d, at - h * d
    if not (inside(plus) and inside(minus)):
        raise OutOfChart("finite-difference stencil leaves the chart")
    return (np.asarray(f(plus)) - np.asarray(f(minus))) / (2.0 * h)


def check_axioms(gp: GroupoidPresentation, n_samples: int = 200, seed: int = 0) -> dict:
    """Max residuals of the groupoid axioms on composable triples."""
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
    ]
    res = dict.fromkeys(keys, 0.0)

    def bump(key, a, b):
        res[key] = max(res[key], float(np.linalg.norm(np.asarray(a) - np.asarray(b))))

    for _ in range(n_samples):
        g1 = gp.sample_arrow(rng)
        g2 = gp.sample_arrow(rng, gp.target(g1))
        g3 = gp.sample_arrow(rng, gp.target(g2))
        x = gp.source(g1)
        bump("unit_source", gp.source(gp.unit(x)), x)
        bump("unit_target", gp.target(gp.unit(x)), x)
        g21 = gp.compose(g2, g1)
        bump("compose_source", gp.source(g21), gp.source(g1))
        bump("compose_target", gp.target(g21), gp.target(g2))
        bump("associativity", gp.compose(g3, g21), gp.compose(gp.compose(g3, g2), g1))
        bump("left_unit", gp.compose(gp.unit(gp.target(g1)), g1), g1)
        bump("right_unit", gp.compose(g1, gp.unit(x)), g1)
        bump("left_inverse", gp.compose(gp.inverse(g1), g1), gp.unit(x))
        bump("right_inverse", gp.compose(g1, gp.inverse(g1)), gp.unit(gp.target(g1)))
    return res


def builtin(spec: str, n: int = 2, chart=DEFAULT_BOX) -> GroupoidPresentation:
    if spec == "pair":
        return pair_groupoid(n, chart)
    if spec == "discrete":
        return discrete_groupoid(n, chart)
    if spec == "action:SO2":
        if n != 2:
            raise ValueError("action:SO2 acts on R^2")
        return rotation_action_groupoid(chart)
    raise KeyError(f"unknown groupoid {spec!r}")


def builtin_names():
    return ["pair", "discrete", "action:SO2"]
