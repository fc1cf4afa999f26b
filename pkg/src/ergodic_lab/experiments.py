"""Theorem checks and counterexample reproductions, each returning a Certificate."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .certificate import PASS, UNCONVERGED, Certificate, combine_verdicts, verdict_of
from .measure import (INF, DiscreteVector, Extended, Function, PreconditionError, StepFunction,
                      as_fraction, combine, distribution, in_R_mu, intervals_of, level_set,
                      submajorize, to_json)
from .operators import (DSOperator, Kernel, SequenceShift, TranslationShift,
                        cesaro_average, cesaro_averages, maximal_functions, projection,
                        verify_ds)
from .spaces import (L1PlusLinf, Marcinkiewicz, PhiLog, SymmetricSpace, met_predicate,
                     norm)


def doubling(N: int) -> list[int]:
    """``1, 2, 4, ...`` up to N, always ending at N."""
    out, n = [], 1
    while n < N:
        out.append(n)
        n *= 2
    out.append(N)
    return out


def _averages_at(T: DSOperator, f: Function, ns: Sequence[int]) -> dict[int, Function]:
    marks = set(ns)
    return {n: m for n, m in enumerate(cesaro_averages(T, f, max(marks)), start=1) if n in marks}


def _lp_power(f: Function, p: int) -> Extended:
    """``int |f|^p`` exactly for integer p."""
    g = f.to_step()
    if g.tail != 0:
        return INF
    return sum(((b - a) * abs(v) ** p for a, b, v in g.pieces()), Fraction(0))


# -- Hopf ----------------------------------------------------------------------

def hopf_check(T: DSOperator, f: Function, N: int = 64, seed: int | None = None) -> Certificate:
    """``int_{M*_N f > 0} f >= 0`` for every N in a doubling schedule.

    The maximal function here is the signed ``max_{n<=N} M_n f``: with an
    absolute value the statement fails already for the identity.
    """
    ds = verify_ds(T)
    if not ds.passed:
        raise PreconditionError(f"operator is not Dunford-Schwartz: {ds.measured}")
    if not T.positive:
        raise PreconditionError("Hopf's inequality needs a positive operator")
    g = f.to_step()
    integrals = {}
    for n, mx in maximal_functions(T, f, doubling(N), absolute=False).items():
        E = level_set(mx, 0)
        integrals[n] = combine(g, E, lambda a, b: a * b).integral()
    ok = all(v >= 0 for v in integrals.values())
    return Certificate("hopf", verdict_of(ok), {"operator": T.to_json(), "f": to_json(f), "N": N},
                       {"integral_by_N": integrals}, bound=">= 0", seed=seed)


# -- maximal inequality ----------------------------------------------------------

def maximal_inequality_check(T: DSOperator, f: Function, p: int, lambdas: Sequence,
                             N: int = 64, seed: int | None = None) -> Certificate:
    """``mu{M*_N |f| > lam} <= (2 ||f||_p / lam)^p``, plus ``||f||_1 / lam`` for positive T, p = 1."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    lambdas = [as_fraction(l) for l in lambdas]
    if any(l <= 0 for l in lambdas):
        raise ValueError("thresholds must be positive")
    fp = _lp_power(f, p)
    if fp == INF:
        raise PreconditionError(f"f is not in L^{p}")
    mstar = maximal_functions(T, f.abs(), [N])[N]
    l1 = _lp_power(f, 1)
    with_32 = T.positive and p == 1
    rows, ok = [], True
    for lam in lambdas:
        measured = distribution(mstar, lam)
        b31 = (2 / lam) ** p * fp
        row = {"lambda": lam, "measured": measured, "bound": b31}
        good = measured <= b31
        if with_32:
            row["bound_positive"] = l1 / lam
            good = good and measured <= l1 / lam
        row["ok"] = good
        ok = ok and good
        rows.append(row)
    return Certificate("maxineq", verdict_of(ok),
                       {"operator": T.to_json(), "f": to_json(f), "p": p, "N": N,
                        "lambdas": lambdas},
                       {"rows": rows, "positive_bound_checked": with_32},
                       bound="(2||f||_p/lambda)^p", seed=seed)


# -- Egorov ----------------------------------------------------------------------

@dataclass
class EgorovReport:
    eps: Fraction
    delta: list[Fraction]
    excluded_measure: Extended
    sup_deviation_by_n: list[tuple[int, Fraction]]
    exceptional_set: list
    verdict: str
    reference: str
    stages: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self):
        return {"eps": self.eps, "delta": self.delta, "excluded_measure": self.excluded_measure,
                "sup_deviation_by_n": [list(x) for x in self.sup_deviation_by_n],
                "exceptional_set": [list(x) if isinstance(x, tuple) else x
                                    for x in self.exceptional_set],
                "verdict": self.verdict, "reference": self.reference, "stages": self.stages}


def _support(ind: Function) -> list:
    if isinstance(ind, DiscreteVector):
        return [k for k, v in enumerate(ind.entries, start=1) if v]
    return intervals_of(ind)


def egorov_search(T: DSOperator, f: Function, eps, J: int = 10) -> EgorovReport:
    """Build an exceptional set of measure <= eps off which ``M_n f`` converges uniformly.

    Stage k uses ``delta_k = 2^-k`` with budget ``eps 2^-k``: it picks the least
    j0 with ``mu{sup_{j >= j0} r_{2^j} > delta_k} <= eps 2^-k`` and excludes that
    set, where ``r_n = |M_n f - f_hat|``.  Stages run for k = 1..J.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not in_R_mu(f):
        raise PreconditionError("egorov_search requires f in R_mu")
    est = projection(T, f)
    if not est.converged:
        return EgorovReport(eps, [], INF, [], [], UNCONVERGED, "unconverged projection")
    reference = "exact" if est.exact else "proxy-limit"
    ns = [1 << j for j in range(J + 1)]
    avgs = _averages_at(T, f, ns)
    r = [(avgs[n] - est.value).abs() for n in ns]
    # suffix maxima: tail[j] = max_{i >= j} r_i
    tail = list(r)
    for j in range(J - 1, -1, -1):
        tail[j] = tail[j].maximum(tail[j + 1])
    excluded = None
    deltas, stages = [], []
    verdict = PASS
    for k in range(1, J + 1):
        delta, budget = Fraction(1, 2 ** k), eps / 2 ** k
        deltas.append(delta)
        chosen = None
        for j0 in range(J + 1):
            bad = tail[j0].map(lambda v, d=delta: Fraction(1) if v > d else Fraction(0))
            m = bad.integral()
            if m <= budget:
                chosen = (j0, bad, m)
                break
        if chosen is None:
            stages.append({"k": k, "delta": delta, "budget": budget, "n0": None})
            verdict = UNCONVERGED
            break
        j0, bad, m = chosen
        stages.append({"k": k, "delta": delta, "budget": budget, "n0": ns[j0], "measure": m})
        excluded = bad if excluded is None else excluded.maximum(bad)
    if excluded is None:
        excluded = r[0].map(lambda v: Fraction(0))
    keep = excluded.to_step()
    sups = [(n, combine(rn.to_step(), keep, lambda a, b: a if b == 0 else Fraction(0)).sup_abs())
            for n, rn in zip(ns, r)]
    measure = excluded.integral()
    if verdict == PASS:
        mono = all(b[1] <= a[1] for a, b in zip(sups, sups[1:]))
        verdict = verdict_of(measure <= eps and mono)
    return EgorovReport(eps, deltas, measure, sups, _support(excluded), verdict, reference,
                        stages)


# -- divergence demos ----------------------------------------------------------------

def divergence_demo_continuous(ns: Sequence[int]) -> Certificate:
    """``||M_{2n} chi_(0,1] - M_n chi_(0,1]||_1 = 1`` under the unit translation."""
    T, f = TranslationShift(1), StepFunction.indicator(0, 1)
    avgs = _averages_at(T, f, [m for n in ns for m in (n, 2 * n)])
    diffs, mixed = {}, {}
    for n in ns:
        diffs[n] = (avgs[2 * n] - avgs[n]).l1_norm()
        mixed[n] = norm(L1PlusLinf(), avgs[n])
    ok = all(d == 1 and isinstance(d, Fraction) for d in diffs.values())
    return Certificate("diverge-continuous", verdict_of(ok),
                       {"operator": T.to_json(), "f": to_json(f), "n": list(ns)},
                       {"l1_difference": diffs, "l1_plus_linf_of_average": mixed}, bound="== 1")


def divergence_demo_sequence(ns: Sequence[int]) -> Certificate:
    """``||M_{2n} e_1 - M_n e_1||_1 = 1`` under the right shift on sequences."""
    T, e1 = SequenceShift(), DiscreteVector.unit(1)
    avgs = _averages_at(T, e1, [m for n in ns for m in (n, 2 * n)])
    diffs, sups = {}, {}
    for n in ns:
        d = avgs[2 * n] - avgs[n]
        diffs[n] = d.l1_norm()
        sups[n] = d.sup_abs()
    ok = all(d == 1 and isinstance(d, Fraction) for d in diffs.values())
    return Certificate("diverge-sequence", verdict_of(ok),
                       {"operator": T.to_json(), "f": to_json(e1), "n": list(ns)},
                       {"l1_difference": diffs, "linf_difference": sups}, bound="== 1")


# -- non-separable demo --------------------------------------------------------------

def harmonic(K: int) -> DiscreteVector:
    """``xi_k = 1/k`` for k <= K, zero afterwards."""
    return DiscreteVector(tuple(Fraction(1, k) for k in range(1, K + 1)))


def nonseparable_demo(phi=None, xi: DiscreteVector | None = None,
                      ns: Sequence[int] = (4, 16, 64), alpha=None, tol: float = 1e-3,
                      probes: Sequence[int] = (1, 2, 4)) -> Certificate:
    """Shift averages of a decreasing sequence stay far from 0 in a Marcinkiewicz norm.

    ``M_n xi`` dominates ``tail_n(xi) = (0, ..., 0, xi_{n+1}, ...)`` coordinatewise,
    so its norm stays above the tail norms, while each fixed coordinate is
    ``O(1/n)``.  ``alpha`` is the lower bound to certify (a number or a map
    n -> number); by default the smallest measured tail norm is used.
    Norms of the long sequences are computed in floating point; the
    domination and coordinate checks are exact.
    """
    phi = PhiLog() if phi is None else phi
    ns = sorted(ns)
    if xi is None:
        xi = harmonic(10 ** 6 + ns[-1])
    if xi.tail != 0 or xi.weights is not None:
        raise PreconditionError("xi must be a finitely supported equal-atom sequence")
    e = xi.entries
    if any(v < 0 for v in e) or any(b > a for a, b in zip(e, e[1:])):
        raise PreconditionError("xi must be non-negative and non-increasing")
    X = Marcinkiewicz(phi)
    w = float(xi.atom_weight)
    x = np.array([float(v) for v in e])
    c = np.concatenate(([0.0], np.cumsum(x)))
    tail_norms, avg_norms, coords, dominated = {}, {}, {}, {}
    for n in ns:
        tail_norms[n] = X.sequence_norm(x[n:], w)
        m = np.arange(1, x.size + n)
        window = (c[np.minimum(m, x.size)] - c[np.maximum(m - n, 0)]) / n
        avg_norms[n] = X.sequence_norm(window, w)
        # m <= n: the tail vanishes and averages of non-negative terms are >= 0;
        # m > n: every term of the window is >= xi_m by monotonicity.  Spot-check
        # the prefix exactly as well.
        pre = min(len(e), 4 * n)
        ok = True
        for mm in range(1, pre + 1):
            avg = sum(e[max(0, mm - n):mm], Fraction(0)) / n
            if avg < (e[mm - 1] if mm > n else 0):
                ok = False
                break
        dominated[n] = ok
        coords[n] = {m: sum(e[max(0, m - n):m], Fraction(0)) / n for m in probes}
    if alpha is None:
        alpha = min(tail_norms.values())
    alphas = {n: float(alpha[n] if isinstance(alpha, dict) else alpha) for n in ns}
    if min(alphas.values()) <= tol:
        raise PreconditionError(f"tail norms do not stay away from 0: {tail_norms}")
    norms_ok = all(avg_norms[n] >= tail_norms[n] - 1e-12 and tail_norms[n] >= alphas[n] - tol
                   for n in ns)
    vanish = all(coords[b][m] <= coords[a][m] for m in probes for a, b in zip(ns, ns[1:]))
    if len(ns) > 1:
        vanish = vanish and all(coords[ns[-1]][m] < coords[ns[0]][m] for m in probes)
    ok = norms_ok and vanish and all(dominated.values())
    return Certificate("nonsep-demo", verdict_of(ok),
                       {"phi": phi.to_json(), "xi_length": len(e), "n": ns, "alpha": alphas},
                       {"tail_norm": tail_norms, "average_norm": avg_norms,
                        "coordinates": coords, "dominates_tail": dominated},
                       bound="tail norm >= alpha - tol", tolerance=tol)


# -- mean ergodic decay ----------------------------------------------------------------

def mean_ergodic_decay(T: DSOperator, f: Function, X: SymmetricSpace,
                       ns: Sequence[int] | None = None, tol=Fraction(1, 100)) -> Certificate:
    """Table of ``d_n = ||M_n f - P f||_X``; pass iff eventually non-increasing and small.

    "Eventually" means over the second half of the schedule.  The mean ergodic
    predicate of X is recorded but not enforced, so that failing spaces can be
    shown failing.
    """
    ns = sorted(ns or doubling(1 << 10))
    if not in_R_mu(f):
        raise PreconditionError("mean_ergodic_decay requires f in R_mu")
    est = projection(T, f)
    inputs = {"operator": T.to_json(), "f": to_json(f), "space": X.to_json(), "n": ns,
              "tol": tol}
    if not est.converged:
        return Certificate("decay", UNCONVERGED, inputs, {"projection": est.to_json()},
                           bound="d_n -> 0", tolerance=tol)
    avgs = _averages_at(T, f, ns)
    table = [(n, norm(X, avgs[n] - est.value)) for n in ns]
    late = [d for _, d in table[len(table) // 2:]]
    ok = all(b <= a for a, b in zip(late, late[1:])) and table[-1][1] < tol
    return Certificate("decay", verdict_of(ok), inputs,
                       {"table": [list(r) for r in table], "met_predicate": met_predicate(X),
                        "projection_method": est.method},
                       bound="d_n eventually non-increasing and d_max < tol", tolerance=tol)


def decay_csv(cert: Certificate) -> str:
    rows = ["n,d_n"]
    for n, d in cert.measured.get("table", []):
        rows.append(f"{n},{d}")
    return "\n".join(rows) + "\n"


# -- projection identities ----------------------------------------------------------------

def projection_identities(T: DSOperator, fs: Sequence[Function], tol: float = 1e-9,
                          seed: int | None = None) -> Certificate:
    """``P^2 = P`` and ``T P = P = P T`` on each f."""
    rows, ok, exact = [], True, True
    for f in fs:
        est = projection(T, f, tol)
        exact = exact and est.exact
        Pf = est.value
        checks = {"PP": projection(T, Pf, tol).value - Pf, "TP": T.apply(Pf) - Pf,
                  "PT": projection(T, T.apply(f), tol).value - Pf}
        if est.exact:
            good = {k: d.is_zero() for k, d in checks.items()}
        else:
            good = {k: float(norm(L1PlusLinf(), d)) <= 10 * tol for k, d in checks.items()}
        rows.append(good)
        ok = ok and all(good.values())
    return Certificate("projection-identities", verdict_of(ok),
                       {"operator": T.to_json(), "f": [to_json(f) for f in fs]},
                       {"checks": rows, "exact": exact},
                       bound="P^2 = P, TP = P = PT", tolerance="exact" if exact else 10 * tol,
                       seed=seed)


def submajorization_check(T: DSOperator, f: Function, n: int) -> bool:
    """``(M_n f)* << f*``."""
    return submajorize(cesaro_average(T, f, n), f)


# -- random instances ----------------------------------------------------------------------

def random_rational(rng: random.Random, lo: int = -9, hi: int = 9, den: int = 6) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_vector(rng: random.Random, n: int, signed: bool = True) -> list[Fraction]:
    return [random_rational(rng, -9 if signed else 0, 9) for _ in range(n)]


def _perm_average(rng: random.Random, n: int, k: int, blocks=None) -> list[list[Fraction]]:
    A = [[Fraction(0)] * n for _ in range(n)]
    blocks = blocks or [list(range(n))]
    for _ in range(k):
        for b in blocks:
            img = b[:]
            rng.shuffle(img)
            for i, j in zip(b, img):
                A[i][j] += Fraction(1, k)
    return A


def random_substochastic(rng: random.Random, n: int, signed: bool = False) -> Kernel:
    """Average of random permutation matrices scaled by a factor <= 1, signs optional."""
    A = _perm_average(rng, n, rng.randint(1, 4))
    s = Fraction(rng.randint(1, 4), 4)
    A = [[a * s for a in row] for row in A]
    if signed:
        A = [[-a if rng.random() < 0.5 else a for a in row] for row in A]
    return Kernel(tuple(map(tuple, A)))


def random_block_stochastic(rng: random.Random, n: int) -> Kernel:
    """Doubly stochastic kernel built within a random partition of the atoms."""
    atoms = list(range(n))
    rng.shuffle(atoms)
    blocks, i = [], 0
    while i < n:
        size = rng.randint(1, n - i)
        blocks.append(sorted(atoms[i:i + size]))
        i += size
    return Kernel(tuple(map(tuple, _perm_average(rng, n, rng.randint(1, 3), blocks))))


def random_step(rng: random.Random, max_pieces: int = 5, signed: bool = True) -> StepFunction:
    pieces, a = [], Fraction(rng.randint(0, 3), rng.randint(1, 4))
    for _ in range(rng.randint(1, max_pieces)):
        b = a + Fraction(rng.randint(1, 6), rng.randint(1, 4))
        pieces.append((a, b, random_rational(rng, -6 if signed else 0, 6, 4)))
        a = b + (Fraction(rng.randint(0, 2), 3) if rng.random() < 0.5 else 0)
    return StepFunction.from_pieces(pieces)


# -- seeded batches ------------------------------------------------------------------------

def _batch_certificate(name: str, certs: list[Certificate], seed: int, params: dict) -> Certificate:
    verdict = combine_verdicts(c.verdict for c in certs)
    failures = [c.to_json() for c in certs if c.verdict != PASS]
    return Certificate(name, verdict, dict(params, seed=seed),
                       {"count": len(certs), "failures": failures[:5],
                        "failure_count": len(failures)}, bound="zero failures", seed=seed)


def hopf_batch(seed: int, count: int = 500, sizes=(2, 8), N: int = 64) -> Certificate:
    rng = random.Random(seed)
    certs = []
    for _ in range(count):
        n = rng.randint(*sizes)
        K = random_substochastic(rng, n)
        certs.append(hopf_check(K, K.vector(random_vector(rng, n)), N))
    return _batch_certificate("hopf-batch", certs, seed,
                              {"count": count, "sizes": list(sizes), "N": N})


def maxineq_batch(seed: int, count: int = 200, sizes=(2, 6), N: int = 64,
                  lambdas: Sequence | None = None) -> Certificate:
    rng = random.Random(seed)
    lambdas = list(lambdas or [Fraction(k, 2) for k in range(1, 21)])
    certs = []
    for _ in range(count):
        n = rng.randint(*sizes)
        K = random_substochastic(rng, n, signed=rng.random() < 0.5)
        f = K.vector(random_vector(rng, n))
        for p in (1, 2):
            certs.append(maximal_inequality_check(K, f, p, lambdas, N))
    out = _batch_certificate("maxineq-batch", certs, seed,
                             {"count": count, "sizes": list(sizes), "N": N, "lambdas": lambdas})
    out.measured["positive_checked"] = sum(bool(c.measured["positive_bound_checked"])
                                           for c in certs)
    return out


def submajorization_batch(seed: int, count: int = 1000, max_n: int = 32) -> Certificate:
    rng = random.Random(seed)
    fails = []
    for i in range(count):
        n = rng.randint(1, max_n)
        kind = rng.randrange(3)
        if kind == 0:
            size = rng.randint(2, 6)
            T = random_substochastic(rng, size, signed=rng.random() < 0.5)
            f = T.vector(random_vector(rng, size))
        elif kind == 1:
            T, f = TranslationShift(Fraction(rng.randint(1, 4), rng.randint(1, 3))), random_step(rng)
        else:
            T, f = SequenceShift(), DiscreteVector(tuple(random_vector(rng, rng.randint(1, 6))))
        if not submajorization_check(T, f, n):
            fails.append({"index": i, "operator": T.to_json(), "f": to_json(f), "n": n})
    return Certificate("submajorization-batch", verdict_of(not fails),
                       {"count": count, "max_n": max_n, "seed": seed},
                       {"failures": fails[:5], "failure_count": len(fails)},
                       bound="(M_n f)* << f*", seed=seed)


def projection_batch(seed: int, count: int = 50, n: int = 4, per_kernel: int = 20) -> Certificate:
    rng = random.Random(seed)
    certs = []
    for _ in range(count):
        K = random_block_stochastic(rng, n)
        fs = [K.vector(random_vector(rng, n)) for _ in range(per_kernel)]
        certs.append(projection_identities(K, fs))
    return _batch_certificate("projection-batch", certs, seed,
                              {"count": count, "n": n, "per_kernel": per_kernel})
