"""Named building blocks and check suites used by scenario files."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy.linalg

from . import bundle2 as b2
from . import connection as cn
from . import crossed_module as xm
from . import groupoid as gp
from . import hpath
from . import matlie
from . import transport as tr
from . import vbassoc as vb
from .errors import BuildError, HGaugeError, IncoherentData

# ------------------------------------------------------------------ helpers


def _named(spec, default: str = "trivial"):
    """A named map is either a bare name or {"name": ..., "params": {...}}."""
    if spec is None:
        return default, {}
    if isinstance(spec, str):
        return spec, {}
    return spec["name"], dict(spec.get("params", {}))


def _lookup(table: dict, name: str, what: str):
    try:
        return table[name]
    except KeyError:
        raise BuildError(f"unknown {what} {name!r}; known: {', '.join(table)}") from None


def _h_elem(H, coords):
    return matlie.exp(H, H.hat(np.asarray(coords, dtype=float)))


# ------------------------------------------------------------------ cocycles


def _cocycle_trivial(base, G, params):
    e = G.identity
    return lambda m: e


def _cocycle_gauge(base, G, params):
    if base.name.split("(")[0] != "pair":
        raise BuildError("gauge cocycle needs the pair groupoid")
    return cn.gauge_cocycle(G, params["B"], base.obj_dim)


COCYCLES: Dict[str, Callable] = {"trivial": _cocycle_trivial, "gauge": _cocycle_gauge}


# ---------------------------------------------------------------- potentials


POTENTIALS: Dict[str, Callable] = {
    "zero": lambda G, p: cn.zero_potential(G),
    "constant": lambda G, p: cn.constant_potential(G, p["coeffs"]),
    "gauge": lambda G, p: cn.gauge_potential(G, p["B"]),
    "radial": lambda G, p: cn.radial_potential(G, p["b"], p.get("f", 1.0)),
    "area": lambda G, p: cn.area_potential(G, p["b"], p.get("c", 1.0)),
}


# ------------------------------------------------- unital / compositional data


def _coboundary_f(base, H, params):
    """f(gamma) = exp(hat(c0 + L gamma + Q gamma^2))."""
    n = H.algebra_dim
    c0 = np.asarray(params.get("c0", np.zeros(n)), dtype=float)
    L = np.asarray(params.get("L", np.zeros((n, base.mor_dim))), dtype=float).reshape(n, -1)
    Q = np.asarray(params.get("Q", np.zeros((n, base.mor_dim))), dtype=float).reshape(n, -1)
    return lambda m: matlie.exp(H, H.hat(c0 + L @ m + Q @ (m * m)))


def _associator_defect(base, cm, params):
    """Hm = c u2^2 u1^2 (u2 + u1) with u the first fiber coordinate; fails only (j)."""
    c = float(params.get("c", 1.0))
    H = cm.H
    if H.algebra_dim != 1 or base.fiber_dim == 0:
        raise BuildError("associator_defect needs a one-dimensional H and a base with nontrivial fibers")

    def Hm(g2, g1):
        u2, u1 = gp.fiber_coords(base, g2)[0], gp.fiber_coords(base, g1)[0]
        return matlie.exp(H, H.hat([c * u2**2 * u1**2 * (u2 + u1)]))

    return Hm


DEVIATIONS = ("trivial", "coboundary", "associator_defect")


def build_pseudo(base, cm, cocycle, Hu_spec, Hm_spec) -> b2.PseudoPrincipalBundle:
    hu_name, hu_p = _named(Hu_spec)
    hm_name, hm_p = _named(Hm_spec)
    for nm in (hu_name, hm_name):
        if nm not in DEVIATIONS:
            raise BuildError(f"unknown Hu/Hm map {nm!r}; known: {', '.join(DEVIATIONS)}")
    if "coboundary" in (hu_name, hm_name):
        if hu_name != hm_name:
            raise BuildError("coboundary data sets Hu and Hm together")
        f = _coboundary_f(base, cm.H, hu_p or hm_p)
        a, Hu, Hm = b2.coboundary_data(base, cm, cocycle, f)
        return b2.PseudoPrincipalBundle(base, cm, a, Hu, Hm)
    Hu = b2.trivial_Hu(cm)
    if hu_name == "associator_defect":
        raise BuildError("associator_defect is an Hm map")
    Hm = _associator_defect(base, cm, hm_p) if hm_name == "associator_defect" else b2.trivial_Hm(cm)
    return b2.PseudoPrincipalBundle(base, cm, cocycle, Hu, Hm)


# ---------------------------------------------------------------- lazy paths


def build_path(base, spec: dict, grid: int, rng) -> hpath.LazyPath:
    if "random" in spec:
        r = spec["random"]
        prng = np.random.default_rng(r.get("seed", int(rng.integers(2**31))))
        x0 = r.get("x0")
        x0 = base.sample_obj(prng) if x0 is None else np.asarray(x0, dtype=float)
        return tr.random_lazy_path(base, prng, x0, r.get("order", 2), grid, r.get("spread", 0.4))
    paths = []
    for p in spec["paths"]:
        K = p.get("grid", grid)
        paths.append(hpath.path_from_waypoints(p["waypoints"], K, p.get("plateau")))
    return hpath.make_lazy_path(base, [np.asarray(a, dtype=float) for a in spec["arrows"]], paths)


# ------------------------------------------------------------------ context


@dataclass
class Context:
    """Objects built from one scenario."""

    name: str
    seed: int
    grid: int
    tolerances: dict
    cm: xm.CrossedModule
    base: gp.GroupoidPresentation
    pseudo: Optional[b2.PseudoPrincipalBundle] = None
    bundle: Optional[b2.Principal2Bundle] = None
    C: Optional[b2.QuasiConnection] = None
    bundle_error: Optional[HGaugeError] = None
    omega: Optional[cn.Connection] = None
    A0_spec: Optional[dict] = None
    paths: List[hpath.LazyPath] = field(default_factory=list)
    expected_class: Optional[str] = None
    action: Optional[str] = None
    V_spec: Optional[dict] = None

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def need_bundle(self):
        if self.bundle_error is not None:
            raise self.bundle_error
        if self.bundle is None:
            raise BuildError("scenario declares no bundle")
        return self.bundle, self.C

    def need_connection(self):
        b, C = self.need_bundle()
        if self.omega is None:
            raise BuildError("scenario declares no connection")
        return b, C, self.omega


def build(sc: dict, seed: Optional[int] = None, grid: Optional[int] = None) -> Context:
    """Build all declared objects; registry and construction errors become BuildError."""
    try:
        return _build(sc, seed, grid)
    except BuildError:
        raise
    except IncoherentData:
        raise
    except (HGaugeError, KeyError, ValueError, TypeError) as e:
        raise BuildError(f"{type(e).__name__}: {e}") from e


def _build(sc, seed, grid) -> Context:
    for check in sc.get("checks", []):
        _lookup(SUITES, check["suite"], "suite")
    seed = sc.get("seed", 0) if seed is None else seed
    grid = sc.get("grid", hpath.DEFAULT_GRID) if grid is None else grid
    cm = _lookup({n: n for n in xm.builtin_names()}, sc["crossed_module"], "crossed module")
    cm = xm.builtin(cm)
    bspec = sc["base"]
    kind = _lookup({n: n for n in gp.builtin_names()}, bspec["kind"], "groupoid")
    base = gp.builtin(kind, bspec.get("dim", 2))
    ctx = Context(sc.get("name", "scenario"), seed, grid, dict(sc.get("tolerances", {})), cm, base)
    bundle = sc.get("bundle")
    if bundle is not None:
        cname, cparams = _named(bundle.get("cocycle"))
        cocycle = _lookup(COCYCLES, cname, "cocycle")(base, cm.G, cparams)
        mode = bundle.get("mode", "decorate")
        conn = sc.get("connection")
        A0 = None
        if conn is not None:
            aname, aparams = _named(conn.get("A0"), "zero")
            A0 = _lookup(POTENTIALS, aname, "potential")(cm.G, aparams)
            ctx.A0_spec = {"name": aname, "params": aparams}
        if mode == "decorate":
            if bundle.get("Hu") not in (None, "trivial") or bundle.get("Hm") not in (None, "trivial"):
                raise BuildError("decorate mode takes no Hu/Hm; use quasi_decorate")
            pg = b2.PrincipalGBundleOverGroupoid(base, cm.G, cocycle)
            if A0 is not None:
                b, C, omega = cn.decorated_connection(pg, cm, A0, seed=seed, name=ctx.A0_spec["name"])
                ctx.omega = omega
            else:
                b, C = b2.decorate(pg, cm)
            ctx.bundle, ctx.C = b, C
            ctx.pseudo = b.pseudo()
        elif mode == "quasi_decorate":
            pb = build_pseudo(base, cm, cocycle, bundle.get("Hu"), bundle.get("Hm"))
            ctx.pseudo = pb
            try:
                ctx.bundle, ctx.C = b2.quasi_decorate(pb, seed=seed)
            except IncoherentData as e:
                ctx.bundle_error = e
            if A0 is not None and ctx.bundle is not None:
                omega = cn.trivial_connection(ctx.bundle, A0, ctx.A0_spec["name"])
                r = cn.hypothesis_residual(ctx.bundle, omega, seed=seed)
                if r > cn.HYPOTHESIS_TOL:
                    raise BuildError(f"connection fails s*omega = t*omega (residual {r:.3e})")
                ctx.omega = omega
        else:
            raise BuildError(f"unknown bundle mode {mode!r}")
        if "Ch" in bundle:
            if ctx.bundle is None:
                raise BuildError("Ch needs a bundle")
            h = _h_elem(cm.H, bundle["Ch"]["h"])
            ctx.C = b2.make_Ch(ctx.bundle, ctx.C, b2.constant_Hmap(h), seed=seed)
        ctx.expected_class = bundle.get("connection_class_expected")
    rng = np.random.default_rng(seed)
    ctx.paths = [build_path(base, p, grid, rng) for p in sc.get("paths", [])]
    ctx.action = sc.get("action")
    ctx.V_spec = sc.get("V")
    return ctx


# -------------------------------------------------------------------- suites


@dataclass
class SuiteResult:
    name: str
    passed: bool
    residuals: dict
    details: dict


def _max(d: dict) -> float:
    vals = [float(v) for v in d.values() if isinstance(v, (int, float)) and not isinstance(v, bool)]
    return max(vals) if vals else 0.0


def _failed(d: dict, tol: float) -> List[str]:
    return [k for k, v in d.items() if isinstance(v, float) and not v < tol]


def suite_peiffer(ctx: Context, p: dict) -> SuiteResult:
    tol = ctx.tol("peiffer", 1e-12)
    res = xm.check_peiffer(ctx.cm, p.get("n_samples", 500), ctx.seed)
    bad = _failed(res, tol)
    return SuiteResult("peiffer", not bad, res, {"failed": bad, "tol": tol})


def suite_groupoid_axioms(ctx, p):
    tol = ctx.tol("groupoid_axioms", 1e-12)
    res = gp.check_axioms(ctx.base, p.get("n_samples", 200), ctx.seed)
    bad = _failed(res, tol)
    return SuiteResult("groupoid_axioms", not bad, res, {"failed": bad, "tol": tol})


def suite_decorated_axioms(ctx, p):
    b, _ = ctx.need_bundle()
    tol = ctx.tol("decorated_axioms", 1e-10)
    res = b.check_axioms(p.get("n_samples", 200), ctx.seed)
    bad = _failed(res, tol)
    return SuiteResult("decorated_axioms", not bad, res, {"failed": bad, "tol": tol})


def suite_coherence(ctx, p):
    if ctx.pseudo is None:
        raise BuildError("scenario declares no bundle")
    tol = ctx.tol("coherence", 1e-9)
    res = b2.check_coherence(ctx.pseudo, p.get("n_samples", 100), ctx.seed)
    label = b2.first_failure(res, tol)
    return SuiteResult("coherence", label is None, res, {"first_failure": label, "tol": tol})


def suite_classification(ctx, p):
    b, C = ctx.need_bundle()
    cls, res = b2.classify_connection(b, C, p.get("n_samples", 50), ctx.seed)
    expected = p.get("expected", ctx.expected_class)
    ok = expected is None or cls == expected
    # unital and multiplicative deviations decide the class; they are not errors
    deviations = {k: res.pop(k) for k in ("unital", "multiplicative")}
    return SuiteResult("classification", ok, res, {"class": cls, "expected": expected, "deviations": deviations})


def suite_grothendieck(ctx, p):
    b, C = ctx.need_bundle()
    tol = ctx.tol("grothendieck", 1e-9)
    n = p.get("n_samples", 50)
    rep, bq, Cq, _ = b2.grothendieck_roundtrip(b, C, n, ctx.seed)
    dist = b2.pseudo_distance(b2.extract_pseudo(b, C, seed=ctx.seed), bq.pseudo(), n, ctx.seed)
    res = dict(rep)
    res.update({f"pseudo_{k}": v for k, v in dist.items()})
    if ctx.pseudo is not None and p.get("against_declared", True):
        decl = b2.pseudo_distance(ctx.pseudo, b2.extract_pseudo(b, C, seed=ctx.seed), n, ctx.seed)
        details_decl = decl
    else:
        details_decl = None
    bad = _failed(res, tol)
    return SuiteResult("grothendieck", not bad, res, {"failed": bad, "declared_vs_extracted": details_decl,
                                                      "tol": tol})


def suite_pseudofunctor(ctx, p):
    b, C = ctx.need_bundle()
    tol = ctx.tol("pseudofunctor", 1e-9)
    res = tr.coherence_report(b, C, p.get("n_samples", 50), ctx.seed)
    bad = _failed(res, tol)
    return SuiteResult("pseudofunctor", not bad, res, {"failed": bad, "tol": tol})


def suite_strict_connection(ctx, p):
    b, C, omega = ctx.need_connection()
    tol = ctx.tol("strict_connection", 1e-6)
    res = cn.validate_strict(omega, p.get("n_samples", 30), ctx.seed)
    res["hypothesis"] = cn.hypothesis_residual(b, omega, p.get("n_samples", 30), ctx.seed)
    bad = _failed(res, tol)
    return SuiteResult("strict_connection", not bad, res, {"failed": bad, "tol": tol})


def suite_lemma_identities(ctx, p):
    _, _, omega = ctx.need_connection()
    tol = ctx.tol("lemma_identities", 1e-7)
    res = tr.lemma_identities(omega, p.get("n_samples", 100), ctx.seed, p.get("grid", ctx.grid))
    bad = _failed(res, tol)
    return SuiteResult("lemma_identities", not bad, res, {"failed": bad, "tol": tol})


def _constant_potential_matrix(omega, x0, x1):
    """A(dx) if A is constant along the segment, else None."""
    dx = np.asarray(x1, float) - np.asarray(x0, float)
    a, bm = omega.potential(x0, dx), omega.potential(x1, dx)
    return a if np.abs(a - bm).max() < 1e-14 else None


def _segment(base, x0, x1, K):
    x0, x1 = np.asarray(x0, float), np.asarray(x1, float)
    return hpath.make_lazy_path(base, [base.unit(x0), base.unit(x1)], [hpath.line_path(x0, x1, K)])


def classical_errors(b, C, omega, x0, x1, grids) -> List[float]:
    """Relative endpoint error of lazy transport along (1, line, 1) against exp(-A(dx))."""
    M = _constant_potential_matrix(omega, x0, x1)
    if M is None:
        raise BuildError("classical_reduction needs a constant potential")
    exact = scipy.linalg.expm(-M)
    p0 = b2.Point(np.asarray(x0, float), b.G.identity)
    errs = []
    for K in grids:
        g = tr.lazy_transport(b, C, omega, _segment(b.base, x0, x1, K))(p0).g
        errs.append(float(np.linalg.norm(g - exact) / np.linalg.norm(exact)))
    return errs


def suite_classical_reduction(ctx, p):
    b, C, omega = ctx.need_connection()
    x0 = p.get("x0", [0.1, -0.2])
    x1 = p.get("x1", [0.9, 0.6])
    grids = p.get("grids", [ctx.grid // 2, ctx.grid, 2 * ctx.grid, 4 * ctx.grid])
    errs = classical_errors(b, C, omega, x0, x1, grids)
    slope = float(-np.polyfit(np.log(grids), np.log(errs), 1)[0])
    rel_tol = ctx.tol("classical_reduction", 1e-6)
    lo, hi = p.get("order_window", [3.8, 4.2])
    at_grid = errs[grids.index(ctx.grid)] if ctx.grid in grids else errs[0]
    ok = at_grid < rel_tol and lo <= slope <= hi
    res = {"relative_error": at_grid}
    details = {"order": slope, "order_window": [lo, hi], "grids": grids, "errors": errs}
    return SuiteResult("classical_reduction", ok, res, details)


def _paths_or_random(ctx, p, n_default):
    if ctx.paths:
        return ctx.paths
    rng = np.random.default_rng(ctx.seed)
    return [tr.random_lazy_path(ctx.base, rng, ctx.base.sample_obj(rng), 2, ctx.grid)
            for _ in range(p.get("n_paths", n_default))]


def suite_invariance(ctx, p):
    b, C, omega = ctx.need_connection()
    tol = ctx.tol("invariance", 1e-6)
    kinds = p.get("kinds", list(tr.TRANSFORM_KINDS))
    rng = np.random.default_rng(ctx.seed)
    rows, worst, ok = [], 0.0, True
    for j, G in enumerate(_paths_or_random(ctx, p, 1)):
        for kind in kinds:
            G0, desc = tr.standard_transform(G, kind, rng)
            r = tr.invariance_suite(b, C, omega, G0, desc)
            good = r["quotient_equal"] and r["divider_distance"] < tol
            ok = ok and good
            worst = max(worst, r["divider_distance"])
            rows.append({"path": j, "kind": kind, "quotient_equal": r["quotient_equal"],
                         "divider_distance": r["divider_distance"], "object_distance": r["object_distance"]})
    return SuiteResult("invariance", ok, {"divider_distance": worst}, {"moves": rows, "tol": tol})


def suite_functor(ctx, p):
    b, C, omega = ctx.need_connection()
    X = ctx.base
    rows, worst, ok = [], 0.0, True
    for s in range(p.get("n_pairs", 10)):
        rng = np.random.default_rng(ctx.seed + s)
        G1 = tr.random_lazy_path(X, rng, X.sample_obj(rng), 2, ctx.grid)
        G2 = tr.random_lazy_path(X, rng, G1.target, 1, ctx.grid)
        r = tr.functor_suite(b, C, omega, G1, G2)
        ok = ok and r["pass"]
        worst = max(worst, max(r["distances"]))
        rows.append({k: r[k] for k in ("composition", "unit", "inverse", "unit_composite")})
    return SuiteResult("functor", ok, {"divider_distance": worst}, {"pairs": rows})


def suite_naturality(ctx, p):
    b, C, omega = ctx.need_connection()
    tol = ctx.tol("naturality", 1e-7)
    _, bq, Cq, theta = b2.grothendieck_roundtrip(b, C, 20, ctx.seed)
    omq = cn.pullback_connection(theta, omega, bq)
    res = tr.naturality_suite(theta, bq, Cq, omq, b, C, omega, p.get("n_samples", 10), ctx.seed,
                              p.get("grid", ctx.grid))
    bad = _failed(res, tol)
    return SuiteResult("naturality", not bad, res, {"morphism": "theta_E", "failed": bad, "tol": tol})


def suite_pullback(ctx, p):
    b, C, omega = ctx.need_connection()
    tol = ctx.tol("pullback", 1e-7)
    F = gp.discrete_inclusion(ctx.base)
    Y = F.src
    rng = np.random.default_rng(ctx.seed)
    paths = [tr.random_lazy_path(Y, rng, Y.sample_obj(rng), 2, ctx.grid) for _ in range(p.get("n_paths", 3))]
    res = tr.pullback_suite(b, C, omega, F, paths, p.get("n_samples", 10), ctx.seed)
    eq = bool(res.pop("lazy_equal"))
    bad = _failed(res, tol)
    return SuiteResult("pullback", eq and not bad, res, {"lazy_equal": eq, "failed": bad, "tol": tol})


def quotient_pairs(b, F, rng, n_true: int, n_false: int, gap: float = 1e-3):
    """Twists of F by tau(H) elements (same class) and by elements off tau(H)."""
    cm = b.cm
    out = []
    for _ in range(n_true):
        out.append((tr.left_twist(F, cm.tau(cm.H.random(rng))), True))
    tries = 0
    while sum(1 for _, t in out if not t) < n_false:
        tries += 1
        if tries > 1000:
            raise BuildError(f"tau(H) exhausts {cm.G.name}: no inequivalent twists")
        c = cm.G.random(rng)
        if cm.tauH_distance(c) > gap:
            out.append((tr.left_twist(F, c), False))
    return out


def suite_quotient(ctx, p):
    b, C, omega = ctx.need_connection()
    G = _paths_or_random(ctx, p, 1)[0]
    F = tr.lazy_transport(b, C, omega, G)
    rng = np.random.default_rng(ctx.seed)
    pairs = quotient_pairs(b, F, rng, p.get("n_true", 10), p.get("n_false", 10))
    correct, worst_true, best_false = 0, 0.0, np.inf
    for F2, expect in pairs:
        eq, wit = tr.quotient_equal(b, F, F2)
        correct += int(eq == expect)
        if expect:
            worst_true = max(worst_true, wit.distance)
        else:
            best_false = min(best_false, wit.distance)
    res = {"true_pairs_max_distance": worst_true}
    details = {"false_pairs_min_distance": float(best_false), "correct": correct, "total": len(pairs)}
    return SuiteResult("quotient", correct == len(pairs), res, details)


def build_vb(ctx):
    b, C = ctx.need_bundle()
    if ctx.action is None:
        raise BuildError("scenario declares no action")
    V = ctx.V_spec or {}
    space = vb.make_space(V.get("structure", "pair"), ctx.cm, V.get("V0_dim"), V.get("V1_dim"))
    act = _lookup(vb.ACTIONS, ctx.action, "action")(ctx.cm, space)
    return vb.associate(b, act, seed=ctx.seed)


def suite_vb(ctx, p):
    b, C = ctx.need_bundle()
    A = build_vb(ctx)
    tol = ctx.tol("vb", 1e-10)
    n = p.get("n_samples", 100)
    res = {"interchange": vb.interchange_residual(A, n, ctx.seed)}
    res.update({f"axiom_{k}": v for k, v in vb.check_vb(A, min(n, 50), ctx.seed).items()})
    cl = vb.cleavage_report(b, C, A, min(n, 50), ctx.seed)
    res["cleavage_defect_mismatch"] = cl["defect_mismatch"]
    if C.classification == "categorical":
        res["cleavage_flatness"] = cl["flatness"]
        res["cleavage_unitality"] = cl["unitality"]
    details = {"classification": C.classification, "cleavage": cl}
    ok = not _failed(res, tol)
    if ctx.omega is not None:
        ttol = ctx.tol("vb_transport", 1e-9)
        worst = dict.fromkeys(["intertwine_source", "intertwine_target", "holonomy_identity"], 0.0)
        for G in _paths_or_random(ctx, p, 1):
            rep = vb.vb_transport_report(A, vb.vb_transport(b, C, ctx.omega, A, G))
            worst = {k: max(worst[k], rep[k]) for k in worst}
        ok = ok and not _failed(worst, ttol)
        res.update({f"transport_{k}": v for k, v in worst.items()})
    return SuiteResult("vb", ok, res, details)


def suite_smoothness(ctx, p):
    b, C, omega = ctx.need_connection()
    x0, x1 = p.get("x0", [0.1, 0.2]), p.get("x1", [1.0, -0.4])
    u0, du = float(p.get("u0", 0.7)), float(p.get("du", 1e-3))
    G = _segment(b.base, x0, x1, p.get("grid", ctx.grid))

    def family(u):
        return b, C, cn.ScaledConnection(omega, u), G

    r = tr.smoothness_probe(family, [u0 - du, u0, u0 + du])
    res = {}
    details = {"u0": u0, "du": du, "max_first": r["max_first"], "max_second": r["max_second"]}
    ok = bool(np.isfinite(r["max_second"]))
    M = _constant_potential_matrix(omega, x0, x1)
    if M is not None:
        exact = M @ M @ scipy.linalg.expm(-u0 * M)
        res["second_derivative_error"] = float(np.abs(r["second"][0] - exact).max())
        ok = ok and res["second_derivative_error"] < ctx.tol("smoothness", 1e-5)
    return SuiteResult("smoothness", ok, res, details)


def suite_transport(ctx, p):
    b, C, omega = ctx.need_connection()
    rows = []
    ok = True
    for G in _paths_or_random(ctx, p, 1):
        q = tr.lazy_transport(b, C, omega, G)(b2.Point(G.source, b.G.identity))
        finite = bool(np.all(np.isfinite(q.g)))
        ok = ok and finite
        rows.append({"source": G.source.tolist(), "target": q.x.tolist(), "endpoint": q.g.tolist()})
    return SuiteResult("transport", ok, {"member_residual": max(b.G.member_residual(np.array(r["endpoint"]))
                                                                for r in rows)}, {"paths": rows})


SUITES: Dict[str, Callable[[Context, dict], SuiteResult]] = {
    "peiffer": suite_peiffer,
    "groupoid_axioms": suite_groupoid_axioms,
    "decorated_axioms": suite_decorated_axioms,
    "coherence": suite_coherence,
    "classification": suite_classification,
    "grothendieck": suite_grothendieck,
    "pseudofunctor": suite_pseudofunctor,
    "strict_connection": suite_strict_connection,
    "lemma_identities": suite_lemma_identities,
    "classical_reduction": suite_classical_reduction,
    "transport": suite_transport,
    "invariance": suite_invariance,
    "functor": suite_functor,
    "naturality": suite_naturality,
    "pullback": suite_pullback,
    "quotient": suite_quotient,
    "vb": suite_vb,
    "smoothness": suite_smoothness,
}


def run_suite(ctx: Context, name: str, params: dict) -> SuiteResult:
    """Run one suite; library errors during the run fail the suite with the error recorded."""
    fn = _lookup(SUITES, name, "suite")
    try:
        out = fn(ctx, params)
    except BuildError:
        raise
    except HGaugeError as e:
        details = {"error": type(e).__name__, "message": str(e)}
        if isinstance(e, IncoherentData):
            details["label"] = e.label
        out = SuiteResult(name, False, {}, details)
    out.details["seed"] = ctx.seed
    out.details["grid"] = ctx.grid
    return out


def builtin_listing() -> List[str]:
    """Stable text listing of every registry."""
    sections = [
        ("groups", list(matlie.builtin_group_names())),
        ("crossed modules", xm.builtin_names()),
        ("groupoids", gp.builtin_names()),
        ("cocycles", list(COCYCLES)),
        ("potentials", list(POTENTIALS)),
        ("Hu/Hm maps", list(DEVIATIONS)),
        ("actions", list(vb.ACTIONS)),
        ("2-vector space structures", list(vb.STRUCTURES)),
        ("transforms", list(tr.TRANSFORM_KINDS)),
        ("suites", list(SUITES)),
    ]
    lines = []
    for title, names in sections:
        lines.append(f"{title}:")
        lines.extend(f"  {n}" for n in names)
    return lines
