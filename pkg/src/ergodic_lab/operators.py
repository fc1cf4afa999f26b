"""Dunford-Schwartz operators, Cesaro averages, maximal functions, projections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import networkx as nx
import numpy as np

from .certificate import Certificate, verdict_of
from .measure import (DiscreteVector, Function, PreconditionError, StepFunction,
                      as_fraction, in_R_mu, step_sum)


class DomainError(TypeError):
    """The operator does not act on this kind of function."""


class DSOperator:
    """Linear map that contracts both the L^1 and the L^inf norm."""

    positive = True

    def apply(self, f: Function) -> Function:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(DSOperator):
    def apply(self, f):
        return f

    def to_json(self):
        return {"op": "identity"}


@dataclass(frozen=True)
class TranslationShift(DSOperator):
    """``(Tf)(t) = f(t - h)`` for ``t > h`` and 0 on ``(0, h]``."""

    h: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "h", as_fraction(self.h))
        if self.h <= 0:
            raise ValueError("shift length must be positive")

    def apply(self, f):
        if not isinstance(f, StepFunction):
            raise DomainError("translation shift acts on step functions on (0, inf)")
        return f.shift(self.h)

    def to_json(self):
        return {"op": "shift", "h": str(self.h)}


@dataclass(frozen=True)
class SequenceShift(DSOperator):
    """``T(x1, x2, ...) = (0, x1, x2, ...)`` on equal atoms."""

    def apply(self, f):
        if not isinstance(f, DiscreteVector) or f.weights is not None:
            raise DomainError("sequence shift acts on equal-atom sequences")
        return DiscreteVector((Fraction(0),) + f.entries, f.atom_weight, f.tail)

    def to_json(self):
        return {"op": "seqshift"}


@dataclass(frozen=True)
class Kernel(DSOperator):
    """``(Tf)_i = sum_j A_ij f_j`` on n atoms with measures ``weights``."""

    matrix: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        A = tuple(tuple(as_fraction(x) for x in row) for row in self.matrix)
        n = len(A)
        if n == 0 or any(len(row) != n for row in A):
            raise ValueError("kernel matrix must be square and non-empty")
        w = (Fraction(1),) * n if self.weights is None else \
            tuple(as_fraction(x) for x in self.weights)
        if len(w) != n or any(x <= 0 for x in w):
            raise ValueError("need n positive weights")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def positive(self) -> bool:
        return all(x >= 0 for row in self.matrix for x in row)

    def vector(self, entries: Sequence) -> DiscreteVector:
        """A function on this kernel's atoms."""
        if len(entries) != self.n:
            raise ValueError(f"need {self.n} entries")
        w = self.weights
        return DiscreteVector(tuple(entries), w[0], 0, w)

    def _check(self, f) -> tuple[Fraction, ...]:
        if not isinstance(f, DiscreteVector):
            raise DomainError("kernels act on vectors over their atoms")
        if f.tail != 0 or len(f.entries) > self.n:
            raise DomainError(f"vector does not live on {self.n} atoms")
        if f.atom_weights(self.n) != self.weights:
            raise DomainError("vector atoms do not match kernel weights")
        return f.padded(self.n)

    def apply(self, f):
        x = self._check(f)
        y = tuple(sum((a * v for a, v in zip(row, x) if a and v), Fraction(0))
                  for row in self.matrix)
        return DiscreteVector(y, self.weights[0], 0, self.weights)

    def row_sums(self) -> list[Fraction]:
        return [sum((abs(a) for a in row), Fraction(0)) for row in self.matrix]

    def column_masses(self) -> list[Fraction]:
        """``sum_i w_i |A_ij|`` for each column j."""
        w = self.weights
        return [sum((w[i] * abs(self.matrix[i][j]) for i in range(self.n)), Fraction(0))
                for j in range(self.n)]

    def is_doubly_stochastic(self) -> bool:
        """Positive, rows sum to 1 and the weights are invariant."""
        return (self.positive and all(s == 1 for s in self.row_sums())
                and list(self.weights) == self.column_masses())

    def to_json(self):
        out = {"op": "kernel", "matrix": [[str(x) for x in row] for row in self.matrix]}
        if any(x != 1 for x in self.weights):
            out["weights"] = [str(x) for x in self.weights]
        return out


@dataclass(frozen=True)
class Composition(DSOperator):
    """``(Tf)(i) = f(sigma(i))`` on n atoms (0-based map ``sigma``)."""

    sigma: tuple[int, ...]
    weights: tuple[Fraction, ...] | None = None
    kernel: Kernel = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.sigma)
        if any(not 0 <= s < n for s in self.sigma):
            raise ValueError("sigma must map {0..n-1} into itself")
        A = [[Fraction(0)] * n for _ in range(n)]
        for i, s in enumerate(self.sigma):
            A[i][s] = Fraction(1)
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "kernel", Kernel(tuple(map(tuple, A)), self.weights))
        object.__setattr__(self, "weights", self.kernel.weights)

    def apply(self, f):
        return self.kernel.apply(f)

    def vector(self, entries):
        return self.kernel.vector(entries)

    def to_json(self):
        out = {"op": "composition", "sigma": list(self.sigma)}
        if any(x != 1 for x in self.weights):
            out["weights"] = [str(x) for x in self.weights]
        return out


def operator_from_json(obj: dict) -> DSOperator:
    """Read ``{"op": "kernel", "matrix": [[...]], "weights": [...]}``, ``{"op": "shift", "h": "1"}``..."""
    if not isinstance(obj, dict) or "op" not in obj:
        raise ValueError("operator JSON needs an 'op' field")
    kind = obj["op"]
    allowed = {"identity": {"op"}, "shift": {"op", "h"}, "seqshift": {"op"},
               "kernel": {"op", "matrix", "weights"},
               "composition": {"op", "sigma", "weights"}}
    if kind not in allowed:
        raise ValueError(f"unknown operator {kind!r}")
    extra = set(obj) - allowed[kind]
    if extra:
        raise ValueError(f"unknown fields for {kind}: {sorted(extra)}")
    if kind == "identity":
        return Identity()
    if kind == "shift":
        return TranslationShift(obj.get("h", 1))
    if kind == "seqshift":
        return SequenceShift()
    if kind == "kernel":
        w = obj.get("weights")
        return Kernel(tuple(tuple(r) for r in obj["matrix"]), None if w is None else tuple(w))
    w = obj.get("weights")
    return Composition(tuple(int(s) for s in obj["sigma"]), None if w is None else tuple(w))


# -- verification ------------------------------------------------------------

def verify_ds(T: DSOperator) -> Certificate:
    """Exact L^1 / L^inf contraction check with margins and a witness on failure."""
    K = T.kernel if isinstance(T, Composition) else T
    if not isinstance(K, Kernel):
        # shifts and the identity preserve measure and sup norms
        return Certificate("ds-check", "pass", {"operator": T.to_json()},
                           {"l1_margin": Fraction(0), "linf_margin": Fraction(0),
                            "method": "analytic"}, bound="margins >= 0")
    row_margin = [1 - s for s in K.row_sums()]
    col_margin = [w - m for w, m in zip(K.weights, K.column_masses())]
    i = min(range(K.n), key=row_margin.__getitem__)
    j = min(range(K.n), key=col_margin.__getitem__)
    ok = row_margin[i] >= 0 and col_margin[j] >= 0
    measured = {"linf_margin": row_margin[i], "l1_margin": col_margin[j],
                "positive": K.positive}
    if row_margin[i] < 0:
        measured["witness_row"] = i
    if col_margin[j] < 0:
        measured["witness_column"] = j
    return Certificate("ds-check", verdict_of(ok), {"operator": T.to_json()}, measured,
                       bound="margins >= 0")


# -- orbits and averages -----------------------------------------------------

def orbit(T: DSOperator, f: Function, n: int) -> list[Function]:
    """``[f, Tf, ..., T^{n-1} f]``."""
    out = [f]
    for _ in range(n - 1):
        out.append(T.apply(out[-1]))
    return out


def _sum(fs: Sequence[Function]) -> Function:
    if isinstance(fs[0], StepFunction):
        return step_sum(fs)
    total = fs[0]
    for g in fs[1:]:
        total = total + g
    return total


def cesaro_average(T: DSOperator, f: Function, n: int) -> Function:
    """``M_n(T) f = (1/n) sum_{k<n} T^k f``, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(T, Identity):
        return f
    return _sum(orbit(T, f, n)) / n


def cesaro_averages(T: DSOperator, f: Function, N: int) -> Iterator[Function]:
    """Yield ``M_1 f, ..., M_N f`` from a single pass over the orbit."""
    partial = None
    g = f
    for n in range(1, N + 1):
        partial = g if partial is None else partial + g
        yield partial / n
        if n < N:
            g = T.apply(g)


def maximal_function(T: DSOperator, f: Function, N: int, *, absolute: bool = True) -> Function:
    """``max_{n<=N} |M_n f|`` (or ``max_{n<=N} M_n f`` when ``absolute`` is False)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    best = None
    for m in cesaro_averages(T, f, N):
        m = m.abs() if absolute else m
        best = m if best is None else best.maximum(m)
    return best


def maximal_functions(T: DSOperator, f: Function, checkpoints: Sequence[int], *,
                      absolute: bool = True) -> dict[int, Function]:
    """Truncated maximal functions at several N from one orbit pass."""
    marks = set(checkpoints)
    out = {}
    best = None
    for n, m in enumerate(cesaro_averages(T, f, max(marks)), start=1):
        m = m.abs() if absolute else m
        best = m if best is None else best.maximum(m)
        if n in marks:
            out[n] = best
    return out


def linear_modulus(T: DSOperator) -> Kernel:
    """Entrywise absolute value of a kernel."""
    if not isinstance(T, Kernel):
        raise TypeError("linear modulus is implemented for kernels only")
    return Kernel(tuple(tuple(abs(a) for a in row) for row in T.matrix), T.weights)


# -- ergodic projection ------------------------------------------------------

@dataclass
class ProjectionEstimate:
    value: Function
    n_used: int
    residual: float
    exact: bool
    converged: bool
    method: str
    reference_norm: str = "L1+Linf"

    def to_json(self):
        from .measure import to_json
        return {"value": to_json(self.value), "n_used": self.n_used,
                "residual": self.residual, "exact": self.exact,
                "converged": self.converged, "method": self.method,
                "reference_norm": self.reference_norm}


def class_average_projection(K: Kernel, f: DiscreteVector) -> DiscreteVector:
    """Cesaro limit of a doubly stochastic kernel: weighted mean over each class.

    With invariant positive weights every communicating class is closed and
    carries the normalised weights as its stationary law.
    """
    x = K._check(f)
    G = nx.DiGraph()
    G.add_nodes_from(range(K.n))
    G.add_edges_from((i, j) for i in range(K.n) for j in range(K.n) if K.matrix[i][j] != 0)
    out = [Fraction(0)] * K.n
    w = K.weights
    for comp in nx.strongly_connected_components(G):
        mass = sum((w[j] for j in comp), Fraction(0))
        mean = sum((w[j] * x[j] for j in comp), Fraction(0)) / mass
        for j in comp:
            out[j] = mean
    return DiscreteVector(tuple(out), w[0], 0, w)


def _l1_plus_linf_float(x: np.ndarray, w: np.ndarray) -> float:
    order = np.argsort(-np.abs(x), kind="stable")
    a, ww = np.abs(x)[order], w[order]
    left = np.concatenate(([0.0], np.cumsum(ww)[:-1]))
    return float(np.sum(a * np.clip(1.0 - left, 0.0, ww)))


def projection(T: DSOperator, f: Function, tol: float = 1e-9,
               n_cap: int = 1 << 20) -> ProjectionEstimate:
    """The ergodic projection ``P f = lim M_n(T) f``.

    Exact for the identity, for shifts (``P f = 0`` on ``R_mu``) and for doubly
    stochastic kernels.  Other kernels double n until
    ``||M_{2n} f - M_n f||_{L1+Linf} < tol`` in floating point, returning an
    unconverged estimate when ``n_cap`` is reached.
    """
    if isinstance(T, Identity):
        return ProjectionEstimate(f, 1, 0.0, True, True, "identity")
    if isinstance(T, (TranslationShift, SequenceShift)):
        if not in_R_mu(f):
            raise PreconditionError("projection for shifts requires f in R_mu")
        return ProjectionEstimate(f * 0, 0, 0.0, True, True, "shift: no invariant functions in R_mu")
    K = T.kernel if isinstance(T, Composition) else T
    if not isinstance(K, Kernel):
        raise DomainError(f"no projection method for {type(T).__name__}")
    if K.is_doubly_stochastic():
        return ProjectionEstimate(class_average_projection(K, f), 0, 0.0, True, True,
                                  "class average")
    x = np.array([float(v) for v in K._check(f)])
    A = np.array([[float(a) for a in row] for row in K.matrix])
    w = np.array([float(v) for v in K.weights])
    partial = np.zeros_like(x)
    g = x.copy()
    done, n = 0, 1
    prev = None
    residual = float("inf")
    while True:
        while done < n:
            partial += g
            g = A @ g
            done += 1
        cur = partial / n
        if prev is not None:
            residual = _l1_plus_linf_float(cur - prev, w)
            if residual < tol or 2 * n > n_cap:
                break
        prev = cur
        n *= 2
    value = DiscreteVector(tuple(Fraction(float(v)) for v in cur), K.weights[0], 0, K.weights)
    return ProjectionEstimate(value, n, residual, False, residual < tol, "residual doubling")
