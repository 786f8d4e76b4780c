"""End-to-end acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are repeated
in the terminal summary.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import time

import numpy as np
import scipy.linalg
from conftest import B3, B4, gauge_bundle

from hgauge import bundle2 as b2
from hgauge import cli, registry
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import hpath, matlie
from hgauge import transport as tr
from hgauge import vbassoc as vb

RESULTS = []


class Criterion:
    """Times the body; records and prints a pass/fail line, then asserts both checks."""

    def __init__(self, number, budget, summary):
        self.number, self.budget, self.summary = number, budget, summary
        self.checks = []

    def check(self, label, ok):
        self.checks.append((label, bool(ok)))

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        in_time = dt < self.budget
        bad = [lab for lab, ok in self.checks if not ok]
        ok = exc_type is None and not bad and in_time
        why = "" if ok else f"  failing: {', '.join(bad) or (exc_type.__name__ if exc_type else 'time budget')}"
        line = f"criterion {self.number:>2}: {'PASS' if ok else 'FAIL'}  {self.summary}  ({dt:.2f} s of {self.budget} s){why}"
        print(line)
        RESULTS.append(line)
        if exc_type is None:
            assert not bad, line
            assert in_time, line
        return False


def cm2_bundle():
    cm = xm.builtin("CM2")
    X = gp.pair_groupoid(2)

    def f(m):
        return matlie.translation([0.2 * m[0] * m[3] - 0.1 * m[1] + 0.3 * m[2] ** 2])

    return b2.PseudoPrincipalBundle(X, cm, *b2.coboundary_data(X, cm, lambda m: cm.G.identity, f))


def cm4_coboundary():
    cm = xm.builtin("CM4")
    X = gp.pair_groupoid(2)

    def f(m):
        return matlie.translation([0.3 * (m[0] - m[2]) ** 2 + 0.1 * m[1] - 0.2 * m[3]])

    return b2.PseudoPrincipalBundle(X, cm, *b2.coboundary_data(X, cm, cn.gauge_cocycle(cm.G, B4, 2), f))


def cm1_trivial():
    cm = xm.builtin("CM1")
    X = gp.pair_groupoid(2)
    return b2.PseudoPrincipalBundle(X, cm, cn.gauge_cocycle(cm.G, B3, 2), b2.trivial_Hu(cm), b2.trivial_Hm(cm))


def discrete_constant(cm_name, coeffs):
    cm = xm.builtin(cm_name)
    pg = b2.PrincipalGBundleOverGroupoid(gp.discrete_groupoid(2), cm.G, lambda m: cm.G.identity)
    return cn.decorated_connection(pg, cm, cn.constant_potential(cm.G, coeffs))


def segment(X, x0, x1, K):
    x0, x1 = np.asarray(x0, float), np.asarray(x1, float)
    return hpath.make_lazy_path(X, [X.unit(x0), X.unit(x1)], [hpath.line_path(x0, x1, K)])


def test_criterion_01_crossed_module_axioms():
    with Criterion(1, 1.0, "Peiffer identities on CM1-CM4; corrupted action fails") as c:
        for name in ("CM1", "CM2", "CM3", "CM4"):
            c.check(name, max(xm.check_peiffer(xm.builtin(name), 500, seed=0).values()) < 1e-12)
        c.check("CORRUPT", max(xm.check_peiffer(xm.builtin("CORRUPT"), 500, seed=0).values()) > 0.1)


def test_criterion_02_decorated_groupoid_axioms():
    with Criterion(2, 2.0, "decorated CM1 bundle over the pair groupoid of R^2") as c:
        b, _, _ = gauge_bundle("CM1", B3)
        res = b.check_axioms(200, seed=0)
        c.check("axioms", max(res.values()) < 1e-10)


def test_criterion_03_coherence():
    with Criterion(3, 2.0, "coherence (a)-(k); associator counterexample fails at (j)") as c:
        for label, pb in (("trivial", cm1_trivial()), ("coboundary CM4", cm4_coboundary()),
                          ("coboundary CM2", cm2_bundle())):
            res = b2.check_coherence(pb, 100, seed=0)
            c.check(label, set(res) == set(b2.COHERENCE_LABELS) and max(res.values()) < 1e-9)
            b2.quasi_decorate(pb)
        ctx = registry.build(cli.load_scenario("cm2_associator.json"))
        r = registry.run_suite(ctx, "coherence", {})
        c.check("counterexample", not r.passed and r.details["first_failure"] == "j")


def test_criterion_04_grothendieck_round_trip():
    with Criterion(4, 5.0, "extract_pseudo o quasi_decorate and theta_E on CM1, CM2, CM4") as c:
        for label, pb in (("CM1", cm1_trivial()), ("CM2", cm2_bundle()), ("CM4", cm4_coboundary())):
            b, C = b2.quasi_decorate(pb)
            dist = b2.pseudo_distance(pb, b2.extract_pseudo(b, C), 100, seed=1)
            c.check(f"{label} reproduction", max(dist.values()) < 1e-9)
            rep, _, _, _ = b2.grothendieck_roundtrip(b, C, 50)
            c.check(f"{label} theta_E", max(rep.values()) < 1e-9)


def test_criterion_05_classical_reduction():
    with Criterion(5, 5.0, "constant A: relative error at K = 128 and RK4 order") as c:
        b, C, omega = discrete_constant("DISC:SO3", [[0.3, -0.2, 0.5], [0.1, 0.4, -0.3]])
        x0, x1 = [0.1, -0.2], [0.9, 0.6]
        # three refinements around K = 128; K = 1024 sits on the roundoff floor
        grids = [64, 128, 256, 512]
        errs = registry.classical_errors(b, C, omega, x0, x1, grids)
        slope = -np.polyfit(np.log(grids), np.log(errs), 1)[0]
        c.check("relative error", errs[1] < 1e-6)
        c.check("order", 3.8 <= slope <= 4.2)


def test_criterion_06_lemma_identities():
    with Criterion(6, 5.0, "source, target and unit lift identities on decorated CM1") as c:
        _, _, omega = gauge_bundle("CM1", B3)
        res = tr.lemma_identities(omega, 100, seed=0)
        c.check("identities", max(res.values()) < 1e-7)


def test_criterion_07_thin_homotopy_invariance():
    with Criterion(7, 20.0, "every move, thin deformation and reparametrization; flat and constant-A") as c:
        setups = {
            "flat gauge DISC:SO3": gauge_bundle("DISC:SO3", B3),
            "constant A DISC:SO3": discrete_constant("DISC:SO3", [[0.3, -0.2, 0.5], [0.1, 0.4, -0.3]]),
            "quasi C_h CM4": (lambda b, C, om: (b, b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([0.7]))),
                                                om))(*gauge_bundle("CM4", B4)),
        }
        for label, (b, C, omega) in setups.items():
            rng = np.random.default_rng(0)
            G = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 2, 128)
            for kind in tr.TRANSFORM_KINDS:
                G0, desc = tr.standard_transform(G, kind, rng)
                r = tr.invariance_suite(b, C, omega, G0, desc)
                c.check(f"{label} {kind}", r["quotient_equal"] and r["divider_distance"] < 1e-6)


def test_criterion_08_functoriality():
    with Criterion(8, 20.0, "composition, unit and inverse on 10 seeded path pairs") as c:
        b, C, omega = gauge_bundle("CM4", B4)
        C = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([0.7])))
        for s in range(10):
            rng = np.random.default_rng(s)
            G1 = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 2, 128)
            G2 = tr.random_lazy_path(b.base, rng, G1.target, 1, 128)
            c.check(f"pair {s}", tr.functor_suite(b, C, omega, G1, G2)["pass"])


def test_criterion_09_naturality_and_pullback():
    with Criterion(9, 10.0, "naturality along theta_E and pullback along a discrete inclusion") as c:
        b, C, omega = gauge_bundle("CM4", B4)
        C = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([0.7])))
        _, bq, Cq, theta = b2.grothendieck_roundtrip(b, C, 20)
        omq = cn.pullback_connection(theta, omega, bq)
        res = tr.naturality_suite(theta, bq, Cq, omq, b, C, omega, 10)
        c.check("naturality", max(res.values()) < 1e-7)
        F = gp.discrete_inclusion(b.base)
        rng = np.random.default_rng(0)
        paths = [tr.random_lazy_path(F.src, rng, F.src.sample_obj(rng), 2, 128) for _ in range(3)]
        pres = tr.pullback_suite(b, C, omega, F, paths, 10)
        c.check("pullback lazy classes", pres.pop("lazy_equal"))
        c.check("pullback", max(pres.values()) < 1e-7)


def test_criterion_10_quotient_group_law():
    b, C, omega = gauge_bundle("CM4", B4)
    rng = np.random.default_rng(0)
    G = tr.random_lazy_path(b.base, rng, b.base.sample_obj(rng), 2, 128)
    F = tr.lazy_transport(b, C, omega, G)
    with Criterion(10, 1.0, "CM4 x-axis coset test on 10 + 10 twisted maps") as c:
        pairs = registry.quotient_pairs(b, F, np.random.default_rng(1), 10, 10)
        for i, (F2, expect) in enumerate(pairs):
            c.check(f"pair {i}", tr.quotient_equal(b, F, F2)[0] == expect)
        c.check("counts", sum(e for _, e in pairs) == 10 and len(pairs) == 20)


def test_criterion_11_associated_vb_groupoid():
    with Criterion(11, 5.0, "interchange, flat categorical cleavage, SO(2) holonomy identity") as c:
        b, C, _ = gauge_bundle("CM1", B3)
        A = vb.associate(b, vb.adjoint_action(b.cm))
        c.check("interchange", vb.interchange_residual(A, 100) < 1e-10)
        rep = vb.cleavage_report(b, C, A, 50)
        c.check("flat cleavage", rep["flatness"] < 1e-10 and rep["unitality"] < 1e-10)
        ctx = registry.build(cli.load_scenario("so2_vb.json"))
        A2 = registry.build_vb(ctx)
        for G in ctx.paths:
            T = vb.vb_transport(ctx.bundle, ctx.C, ctx.omega, A2, G)
            c.check("holonomy identity", vb.vb_transport_report(A2, T)["holonomy_identity"] < 1e-9)
            c.check("intertwining", max(vb.vb_transport_report(A2, T).values()) < 1e-9)


def test_criterion_12_smoothness():
    with Criterion(12, 5.0, "second divided difference against u -> exp(-u c J)") as c:
        b, C, omega = discrete_constant("DISC:SO2", [[0.8], [-0.5]])
        x0, x1 = np.array([0.1, 0.2]), np.array([1.0, -0.4])
        G = segment(b.base, x0, x1, 128)
        u0, du = 0.7, 1e-3
        r = tr.smoothness_probe(lambda u: (b, C, cn.ScaledConnection(omega, u), G), [u0 - du, u0, u0 + du])
        cJ = omega.potential(x0, x1 - x0)
        exact = cJ @ cJ @ scipy.linalg.expm(-u0 * cJ)
        c.check("second derivative", np.abs(r["second"][0] - exact).max() < 1e-5)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
