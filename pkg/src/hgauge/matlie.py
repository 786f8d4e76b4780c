"""Matrix Lie groups and their Lie algebras.

Group elements are plain ``numpy`` arrays of shape ``(dim, dim)``.  Lie algebra
elements are arrays of the same shape lying in the span of the group's
generators; :meth:`MatrixGroup.hat` and :meth:`MatrixGroup.vee` convert
between matrices and generator coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import NonConvergent, OutOfChart, SpanViolation

LOG_RADIUS = 0.9
ROUNDTRIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    name: str
    dim: int
    generators: tuple
    project: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray] = np.linalg.inv
    membership_tol: float = 1e-9
    abelian: bool = False
    closed_exp: Optional[Callable[[np.ndarray], np.ndarray]] = None
    _basis: np.ndarray = field(init=False, repr=False)
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gens = tuple(np.asarray(x, dtype=float) for x in self.generators)
        object.__setattr__(self, "generators", gens)
        if gens:
            basis = np.stack([x.ravel() for x in gens], axis=1)
            if np.linalg.matrix_rank(basis) != len(gens):
                raise ValueError(f"generators of {self.name} are linearly dependent")
            pinv = np.linalg.pinv(basis)
        else:
            basis = np.zeros((self.dim * self.dim, 0))
            pinv = np.zeros((0, self.dim * self.dim))
        object.__setattr__(self, "_basis", basis)
        object.__setattr__(self, "_pinv", pinv)

    @property
    def algebra_dim(self) -> int:
        return len(self.generators)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim)

    def hat(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=float).reshape(-1)
        if c.size != self.algebra_dim:
            raise ValueError(f"{self.name}: expected {self.algebra_dim} coordinates, got {c.size}")
        return (self._basis @ c).reshape(self.dim, self.dim)

    def vee(self, x) -> np.ndarray:
        return self._pinv @ np.asarray(x, dtype=float).ravel()

    def span_residual(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x.ravel() - self._basis @ (self._pinv @ x.ravel())))

    def member_residual(self, m) -> float:
        m = np.asarray(m, dtype=float)
        if m.shape != (self.dim, self.dim) or not np.all(np.isfinite(m)):
            return float("inf")
        return float(np.linalg.norm(self.project(m) - m))

    def is_member(self, m) -> bool:
        return self.member_residual(m) < self.membership_tol

    def random(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        if self.algebra_dim == 0:
            return self.identity
        return exp(self, self.hat(scale * rng.standard_normal(self.algebra_dim)))

    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        if self.algebra_dim == 0:
            return np.zeros((self.dim, self.dim))
        return self.hat(scale * rng.standard_normal(self.algebra_dim))

    def __repr__(self):
        return f"MatrixGroup({self.name!r})"


def _check_span(g: MatrixGroup, x, what: str):
    r = g.span_residual(x)
    if r > g.membership_tol * max(1.0, float(np.linalg.norm(x))):
        raise SpanViolation(f"{what} leaves the Lie algebra of {g.name} (residual {r:.3e})")


def exp(g: MatrixGroup, x) -> np.ndarray:
    """Matrix exponential projected onto ``g``; ``exp(0)`` is the identity exactly."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return np.eye(g.dim)
    _check_span(g, x, "exponent")
    if g.closed_exp is not None:
        return g.closed_exp(x)
    m = scipy.linalg.expm(x)
    if not np.all(np.isfinite(m)):
        raise NonConvergent(f"expm did not converge for {g.name}")
    return g.project(m)


def log(g: MatrixGroup, m, radius: float = LOG_RADIUS) -> np.ndarray:
    """Principal logarithm on the chart ``|m - I| < radius`` (spectral norm)."""
    m = np.asarray(m, dtype=float)
    dist = float(np.linalg.norm(m - np.eye(g.dim), 2))
    if dist >= radius:
        raise OutOfChart(f"|m - I| = {dist:.3f} exceeds log radius {radius}")
    if dist == 0.0:
        return np.zeros((g.dim, g.dim))
    x = scipy.linalg.logm(m)
    if np.iscomplexobj(x):
        x = x.real
    if not np.all(np.isfinite(x)):
        raise NonConvergent(f"logm did not converge for {g.name}")
    # snap to the algebra span
    return g.hat(g.vee(x))


def adjoint(g: MatrixGroup, a, x) -> np.ndarray:
    y = a @ x @ g.inverse(a)
    _check_span(g, y, "adjoint image")
    return y


def adjoint_matrix(g: MatrixGroup, a) -> np.ndarray:
    """Matrix of ``Ad_a`` in generator coordinates."""
    ainv = g.inverse(a)
    cols = [g.vee(a @ x @ ainv) for x in g.generators]
    if not cols:
        return np.zeros((0, 0))
    return np.stack(cols, axis=1)


def maurer_cartan(g: MatrixGroup, a, v) -> np.ndarray:
    """Left Maurer-Cartan form ``a^{-1} v``."""
    y = g.inverse(a) @ v
    _check_span(g, y, "Maurer-Cartan value")
    return y


def right_maurer_cartan(g: MatrixGroup, a, v) -> np.ndarray:
    """Right Maurer-Cartan form ``v a^{-1}``."""
    y = v @ g.inverse(a)
    _check_span(g, y, "Maurer-Cartan value")
    return y


def bracket(x, y) -> np.ndarray:
    return x @ y - y @ x


# ---------------------------------------------------------------- builtins

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def rot2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _project_so2(m):
    theta = np.arctan2(m[1, 0] - m[0, 1], m[0, 0] + m[1, 1])
    return rot2(theta)


def _project_son(m):
    u, _, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    if d == 0:
        d = 1.0
    return u @ np.diag([1.0] * (m.shape[0] - 1) + [d]) @ vt


def _transpose(m):
    return np.array(m.T)


def so3_hat(w) -> np.ndarray:
    w1, w2, w3 = w
    return np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])


def _affine_project(m):
    n = m.shape[0] - 1
    out = np.eye(n + 1)
    out[:n, n] = m[:n, n]
    return out


def _affine_inverse(m):
    out = np.array(m, dtype=float)
    n = m.shape[0] - 1
    out[:n, n] = -m[:n, n]
    return out


def translation(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    out = np.eye(v.size + 1)
    out[: v.size, v.size] = v
    return out


def _exp_so2(x):
    return rot2(0.5 * (x[1, 0] - x[0, 1]))


def _exp_so3(x):
    """Rodrigues formula."""
    w = np.array([x[2, 1] - x[1, 2], x[0, 2] - x[2, 0], x[1, 0] - x[0, 1]]) * 0.5
    th = float(np.linalg.norm(w))
    K = so3_hat(w)
    if th < 1e-4:
        a = 1.0 - th**2 / 6.0 + th**4 / 120.0
        b = 0.5 - th**2 / 24.0 + th**4 / 720.0
    else:
        a = np.sin(th) / th
        b = (1.0 - np.cos(th)) / th**2
    return np.eye(3) + a * K + b * (K @ K)


def _exp_affine(x):
    n = x.shape[0] - 1
    out = np.eye(n + 1)
    out[:n, n] = x[:n, n]
    return out


def make_so2() -> MatrixGroup:
    return MatrixGroup("SO2", 2, (J2,), _project_so2, _transpose, abelian=True, closed_exp=_exp_so2)


def make_so3() -> MatrixGroup:
    gens = tuple(so3_hat(e) for e in np.eye(3))
    return MatrixGroup("SO3", 3, gens, _project_son, _transpose, closed_exp=_exp_so3)


def make_rn(n: int) -> MatrixGroup:
    gens = []
    for i in range(n):
        e = np.zeros((n + 1, n + 1))
        e[i, n] = 1.0
        gens.append(e)
    return MatrixGroup(f"R^{n}", n + 1, tuple(gens), _affine_project, _affine_inverse, abelian=True,
                       closed_exp=_exp_affine)


def make_trivial() -> MatrixGroup:
    return MatrixGroup("trivial", 1, (), lambda m: np.eye(1), lambda m: np.eye(1), abelian=True)


SO2 = make_so2()
SO3 = make_so3()
R1 = make_rn(1)
R2 = make_rn(2)
TRIVIAL = make_trivial()

_GROUPS = {"SO2": SO2, "SO3": SO3, "R^1": R1, "R^2": R2, "trivial": TRIVIAL}


def group(name: str) -> MatrixGroup:
    if name in _GROUPS:
        return _GROUPS[name]
    if name.startswith("R^"):
        return make_rn(int(name[2:]))
    raise KeyError(f"unknown group {name!r}")


def builtin_group_names() -> Sequence[str]:
    return list(_GROUPS)
