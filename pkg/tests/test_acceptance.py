"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the bare report, or via
pytest, which repeats the lines in its terminal summary.
"""

import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402

from ergodic_lab import experiments as ex  # noqa: E402
from ergodic_lab.cli import main  # noqa: E402
from ergodic_lab.measure import INF, StepFunction, distribution, rearrangement  # noqa: E402
from ergodic_lab.operators import TranslationShift  # noqa: E402
from ergodic_lab.spaces import (L1PlusLinf, Lorentz, Lp, Marcinkiewicz, Orlicz,  # noqa: E402
                                OrliczPower, OrliczShiftedPower, PhiAffineJump, PhiBounded,
                                PhiLog, PhiPower, alpha_limit, beta_limit, fundamental_function,
                                limit_crosscheck, met_report, norm)

SEED = 20240601

# Per-n lower bounds sup_{m <= 10^6} (H_{n+m} - H_n) / log(1 + m), frozen from an
# independent brute force (running float sum over m, confirmed with mpmath digamma
# at m = 10^6 where the ratio peaks).
NONSEP_ALPHA = {4: 0.890983829145783, 16: 0.797076075199908, 64: 0.698410607279906}


def report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _quiet_main(argv):
    import contextlib
    import io
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_criterion_1_divergence_exact():
    ns = list(range(1, 65))
    t0 = time.perf_counter()
    c = ex.divergence_demo_continuous(ns)
    s = ex.divergence_demo_sequence(ns)
    elapsed = time.perf_counter() - t0
    vals = list(c.measured["l1_difference"].values()) + list(s.measured["l1_difference"].values())
    exact = all(isinstance(v, F) and v == 1 for v in vals)
    codes = [_quiet_main(["diverge", "--kind", k])[0] for k in ("continuous", "sequence")]
    ok = exact and c.passed and s.passed and codes == [0, 0] and elapsed < 1.0
    report(1, ok, f"||M_2n f - M_n f||_1 == 1 exactly for n=1..64 (both kinds); "
                  f"library time {elapsed:.3f}s < 1s; CLI exit codes {codes}")


def test_criterion_2_mean_ergodic_contrast():
    T, f = TranslationShift(1), StepFunction.indicator(0, 1)
    ns = list(range(1, 1025))
    mixed = ex.mean_ergodic_decay(T, f, L1PlusLinf(), ns)
    l1 = ex.mean_ergodic_decay(T, f, Lp(1), ns)
    exact = mixed.measured["table"] == [[n, F(1, n)] for n in ns]
    const = all(d == 1 for _, d in l1.measured["table"])
    ok = exact and const and mixed.passed and not l1.passed
    report(2, ok, f"L1+Linf d_n == 1/n for n<=1024 ({mixed.verdict}); "
                  f"L1 d_n == 1 ({l1.verdict}), same run")


def test_criterion_3_hopf():
    t0 = time.perf_counter()
    c = ex.hopf_batch(SEED, count=500, sizes=(2, 8), N=64)
    elapsed = time.perf_counter() - t0
    ok = c.passed and c.measured["failure_count"] == 0 and elapsed < 30
    report(3, ok, f"{c.measured['count']} random positive substochastic kernels, N=64: "
                  f"{c.measured['failure_count']} failures, {elapsed:.1f}s < 30s")


def test_criterion_4_maximal_inequality():
    lambdas = [F(k, 2) for k in range(1, 21)]
    c = ex.maxineq_batch(SEED + 1, count=200, N=64, lambdas=lambdas)
    pos = c.measured["positive_checked"]
    ok = c.passed and pos > 0
    report(4, ok, f"200 signed DS kernels x p in {{1,2}} x 20 thresholds: "
                  f"{c.measured['failure_count']} failures; ||f||_1/lambda bound on "
                  f"{pos} positive cases")


def test_criterion_5_submajorization():
    c = ex.submajorization_batch(SEED + 2, count=1000, max_n=32)
    report(5, c.passed, f"(M_n f)* << f* on 1000 kernel/shift triples, "
                        f"{c.measured['failure_count']} failures")


def _oracle_distribution(f: StepFunction, lam) -> F:
    if abs(f.tail) > lam:
        return INF
    return sum((b - a for a, b, v in f.pieces() if abs(v) > lam), F(0))


def _oracle_rearrangement_at(f: StepFunction, t) -> F:
    # f*(t) = inf{lam >= 0 : mu{|f| > lam} <= t}; the infimum is attained at a level
    levels = sorted({F(0), abs(f.tail)} | {abs(v) for _, _, v in f.pieces()})
    return next(l for l in levels if _oracle_distribution(f, l) <= t)


def test_criterion_6_rearrangement_oracle():
    rng = random.Random(SEED + 3)
    bad = 0
    for _ in range(1000):
        f = ex.random_step(rng, max_pieces=6)
        if rng.random() < 0.2:
            f = StepFunction(f.breaks, f.values, F(rng.randint(1, 4), 4))
        fs = rearrangement(f)
        knots = sorted({F(0)} | set(fs.breaks) | {_oracle_distribution(f, abs(v))
                                                    for _, _, v in f.pieces()} - {INF})
        probes = [(a + b) / 2 for a, b in zip(knots, knots[1:])] + [knots[-1] + 1]
        if any(fs(t) != _oracle_rearrangement_at(f, t) for t in probes):
            bad += 1
            continue
        top = max([abs(v) for _, _, v in f.pieces()] + [abs(f.tail)])
        lams = [top * F(k, 49) for k in range(50)]
        if any(distribution(f, l) != distribution(fs, l) for l in lams):
            bad += 1
    report(6, bad == 0, f"1000 random step functions: rearrangement == inversion oracle and "
                        f"50-threshold equimeasurability, {bad} mismatches")


def test_criterion_7_norm_identities():
    rng = random.Random(SEED + 4)
    worst = {"orlicz": 0.0, "l1+linf": 0.0, "lorentz": 0.0, "marcinkiewicz": 0.0}
    for i in range(200):
        f = ex.random_step(rng)
        while f.is_zero():
            f = ex.random_step(rng)
        p = [F(3, 2), F(2), F(3), F(4)][i % 4]
        a, b = float(norm(Orlicz(OrliczPower(p)), f)), float(norm(Lp(p), f))
        worst["orlicz"] = max(worst["orlicz"], abs(a - b) / b)
        # brute-force variational form: inf_c ||(|f| - c)_+||_1 + c over the levels
        levels = {F(0)} | {abs(v) for _, _, v in f.pieces()}
        brute = min(sum(((y - x) * max(abs(v) - c, 0) for x, y, v in f.pieces()), F(0)) + c
                    for c in levels)
        worst["l1+linf"] = max(worst["l1+linf"], abs(float(norm(L1PlusLinf(), f) - brute)))
        ja, jb = F(rng.randint(1, 5), rng.randint(1, 3)), F(rng.randint(0, 5), rng.randint(1, 3))
        lor = float(norm(Lorentz(PhiAffineJump(ja, jb)), f))
        closed = float(ja * f.sup_abs() + jb * f.l1_norm())
        worst["lorentz"] = max(worst["lorentz"], abs(lor - closed) / max(closed, 1e-300))
        mar = float(norm(Marcinkiewicz(PhiPower(1)), f))
        worst["marcinkiewicz"] = max(worst["marcinkiewicz"], abs(mar - float(f.sup_abs()))
                                     / float(f.sup_abs()))
    ok = (worst["orlicz"] <= 1e-10 and worst["l1+linf"] <= 1e-9 and worst["lorentz"] <= 1e-10
          and worst["marcinkiewicz"] <= 1e-10)
    report(7, ok, "200 random f; worst errors " +
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_8_fundamental_functions():
    grid = [F(k * k, 16) for k in range(1, 31)]
    worst = 0.0
    for phi in (PhiPower(F(1, 2)), PhiPower(F(2, 3)), PhiLog(), PhiBounded(3),
                PhiAffineJump(1, 2)):
        for t in grid:
            worst = max(worst, abs(float(fundamental_function(Lorentz(phi), t)) - phi(t)))
    spaces = [Lp(1), Lp(INF), Lp(F(3, 2)), Lp(2), Lp(4)]
    checks = [limit_crosscheck(X, tol=1e-6)["consistent"] for X in spaces]
    analytic = (alpha_limit(Lp(1)) == 1 and beta_limit(Lp(INF)) == 1
                and all(alpha_limit(Lp(p)) == 0 for p in (F(3, 2), 2, 4)))
    ok = worst <= 1e-10 and analytic and all(checks)
    report(8, ok, f"phi_Lorentz == phi on 30 points (max err {worst:.1e}); alpha(L1)=1, "
                  f"beta(Linf)=1, alpha(Lp)=0 for p in {{3/2,2,4}}; numeric cross-check at "
                  f"t=2^20 consistent: {all(checks)}")


def test_criterion_9_met_table():
    rows = {
        "L^3/2": (Lp(F(3, 2)), {True}), "L^2": (Lp(2), {True}), "L^4": (Lp(4), {True}),
        "L^1": (Lp(1), {False}), "L^inf": (Lp(INF), {False}),
        "Lorentz(t^1/2)": (Lorentz(PhiPower(F(1, 2))), {True}),
        "Orlicz(shifted)": (Orlicz(OrliczShiftedPower(1, 2)), {False, "unknown"}),
    }
    shown, ok = [], True
    for name, (X, allowed) in rows.items():
        r = met_report(X)
        good = r["met"] in allowed
        if name == "Orlicz(shifted)":
            good = good and r["contains_one"] is True
        if r["met"] is True:
            good = good and r["alpha"] == "0" and r["order_continuous"] is True
        if name == "L^1":
            good = good and r["alpha"] == "1"
        ok = ok and good
        shown.append(f"{name}={r['met']}(alpha={r['alpha']},oc={r['order_continuous']})")
    report(9, ok, "; ".join(shown))


def test_criterion_10_projection_identities():
    t0 = time.perf_counter()
    c = ex.projection_batch(SEED + 5, count=50, n=4, per_kernel=20)
    elapsed = time.perf_counter() - t0
    ok = c.passed and elapsed < 5
    report(10, ok, f"P^2=P, TP=P=PT exact on 50 block doubly stochastic kernels x 20 f, "
                   f"{c.measured['failure_count']} failures, {elapsed:.2f}s < 5s")


def test_criterion_11_nonseparable():
    ns = [4, 16, 64]
    c = ex.nonseparable_demo(PhiLog(), None, ns, alpha=NONSEP_ALPHA, tol=1e-3)
    coords = c.measured["coordinates"]
    first = all(coords[n][1] == F(1, n) for n in ns)
    dom = all(c.measured["dominates_tail"].values())
    norms = all(c.measured["tail_norm"][n] >= NONSEP_ALPHA[n] - 1e-3 for n in ns)
    ok = c.passed and first and dom and norms
    report(11, ok, "coordinate 1 == 1/n exactly; tail norms " +
           ", ".join(f"n={n}: {c.measured['tail_norm'][n]:.6f} >= {NONSEP_ALPHA[n]:.6f}-1e-3"
                     for n in ns) + f"; domination exact: {dom}")


if __name__ == "__main__":
    failed = 0
    tests = [(int(k.split("_")[2]), fn) for k, fn in globals().items()
             if k.startswith("test_criterion_")]
    for _, fn in sorted(tests, key=lambda t: t[0]):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
