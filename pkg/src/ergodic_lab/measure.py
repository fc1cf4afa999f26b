"""Exact step functions on (0, inf) and on equal-weight atoms.

Every interval is half-open ``(a, b]``.  A :class:`StepFunction` is stored as
its right endpoints ``b_1 < ... < b_k`` (``b_0 = 0`` implicit), the values on
``(b_{i-1}, b_i]`` and a constant value on ``(b_k, inf)``.  All arithmetic is
done with :class:`fractions.Fraction`; ``math.inf`` is the only non-rational
value any function here returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Iterable, Sequence, Union

INF = math.inf

Extended = Union[Fraction, float]


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and "p/q" or decimal strings into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"not a finite rational: {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot read {type(x).__name__} as a rational")


@dataclass(frozen=True)
class StepFunction:
    """Finitely piecewise-constant function on (0, inf) with a constant tail."""

    breaks: tuple[Fraction, ...] = ()
    values: tuple[Fraction, ...] = ()
    tail: Fraction = Fraction(0)

    def __post_init__(self):
        breaks = tuple(as_fraction(b) for b in self.breaks)
        values = tuple(as_fraction(v) for v in self.values)
        tail = as_fraction(self.tail)
        if len(breaks) != len(values):
            raise ValueError("breaks and values must have equal length")
        prev = Fraction(0)
        for b in breaks:
            if b <= prev:
                raise ValueError("breakpoints must be positive and strictly increasing")
            prev = b
        breaks, values = _canonical(breaks, values, tail)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tail", tail)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_pieces(cls, pieces: Iterable[Sequence], tail=0) -> "StepFunction":
        """Build from ``(a, b, v)`` triples; uncovered gaps take the value 0."""
        breaks: list[Fraction] = []
        values: list[Fraction] = []
        end = Fraction(0)
        for a, b, v in sorted(((as_fraction(a), as_fraction(b), as_fraction(v))
                               for a, b, v in pieces), key=lambda p: p[0]):
            if a < end or b <= a:
                raise ValueError(f"overlapping or empty piece ({a}, {b}]")
            if a > end:
                breaks.append(a)
                values.append(Fraction(0))
            breaks.append(b)
            values.append(v)
            end = b
        return cls(tuple(breaks), tuple(values), as_fraction(tail))

    @classmethod
    def constant(cls, c) -> "StepFunction":
        return cls((), (), as_fraction(c))

    @classmethod
    def indicator(cls, a, b, height=1) -> "StepFunction":
        """``height`` times the indicator of ``(a, b]``."""
        return cls.from_pieces([(a, b, height)])

    # -- inspection -------------------------------------------------------

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        lefts = (Fraction(0),) + self.breaks[:-1]
        return list(zip(lefts, self.breaks, self.values))

    @property
    def end(self) -> Fraction:
        return self.breaks[-1] if self.breaks else Fraction(0)

    def __call__(self, t) -> Fraction:
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("step functions live on (0, inf)")
        for b, v in zip(self.breaks, self.values):
            if t <= b:
                return v
        return self.tail

    def first_value(self) -> Fraction:
        """Value on a right neighbourhood of 0."""
        return self.values[0] if self.values else self.tail

    def is_zero(self) -> bool:
        return not self.breaks and self.tail == 0

    def sup_abs(self) -> Fraction:
        return max([abs(v) for v in self.values] + [abs(self.tail)])

    def integral(self) -> Extended:
        """Lebesgue integral; infinite with the sign of a nonzero tail."""
        if self.tail != 0:
            return INF if self.tail > 0 else -INF
        return sum((v * (b - a) for a, b, v in self.pieces()), Fraction(0))

    def l1_norm(self) -> Extended:
        return self.abs().integral()

    # -- pointwise algebra ------------------------------------------------

    def map(self, fn: Callable[[Fraction], Fraction]) -> "StepFunction":
        return StepFunction(self.breaks, tuple(fn(v) for v in self.values), fn(self.tail))

    def abs(self) -> "StepFunction":
        return self.map(abs)

    def __neg__(self):
        return self.map(lambda v: -v)

    def __mul__(self, c):
        c = as_fraction(c)
        return self.map(lambda v: v * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = as_fraction(c)
        return self.map(lambda v: v / c)

    def __add__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return combine(self, other, lambda x, y: x + y)

    def __sub__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return combine(self, other, lambda x, y: x - y)

    def maximum(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, max)

    def shift(self, h) -> "StepFunction":
        """``t -> f(t - h)`` for ``t > h`` and 0 on ``(0, h]``."""
        h = as_fraction(h)
        if h < 0:
            raise ValueError("shift must be non-negative")
        if h == 0:
            return self
        return StepFunction((h,) + tuple(b + h for b in self.breaks),
                            (Fraction(0),) + self.values, self.tail)

    def to_step(self) -> "StepFunction":
        return self


def _canonical(breaks, values, tail):
    out_b: list[Fraction] = []
    out_v: list[Fraction] = []
    for b, v in zip(breaks, values):
        if out_v and out_v[-1] == v:
            out_b[-1] = b
        else:
            out_b.append(b)
            out_v.append(v)
    while out_v and out_v[-1] == tail:
        out_b.pop()
        out_v.pop()
    return tuple(out_b), tuple(out_v)


def combine(f: StepFunction, g: StepFunction,
            op: Callable[[Fraction, Fraction], Fraction]) -> StepFunction:
    """Apply ``op`` pointwise over the merged breakpoint set."""
    breaks: list[Fraction] = []
    values: list[Fraction] = []
    i = j = 0
    fb, fv, gb, gv = f.breaks, f.values, g.breaks, g.values
    while i < len(fb) or j < len(gb):
        x = fv[i] if i < len(fv) else f.tail
        y = gv[j] if j < len(gv) else g.tail
        if j >= len(gb) or (i < len(fb) and fb[i] < gb[j]):
            b = fb[i]
            i += 1
        elif i >= len(fb) or gb[j] < fb[i]:
            b = gb[j]
            j += 1
        else:
            b = fb[i]
            i += 1
            j += 1
        breaks.append(b)
        values.append(op(x, y))
    return StepFunction(tuple(breaks), tuple(values), op(f.tail, g.tail))


def step_sum(functions: Iterable[StepFunction]) -> StepFunction:
    """Sum many step functions in one sweep over their jump points."""
    start = Fraction(0)
    tail = Fraction(0)
    jumps: dict[Fraction, Fraction] = {}
    for f in functions:
        start += f.first_value()
        tail += f.tail
        prev = f.first_value()
        for b, nxt in zip(f.breaks, f.values[1:] + (f.tail,)):
            if nxt != prev:
                jumps[b] = jumps.get(b, Fraction(0)) + (nxt - prev)
            prev = nxt
    breaks: list[Fraction] = []
    values: list[Fraction] = []
    level = start
    for b in sorted(jumps):
        breaks.append(b)
        values.append(level)
        level += jumps[b]
    return StepFunction(tuple(breaks), tuple(values), tail)


@dataclass(frozen=True)
class DiscreteVector:
    """Sequence on atoms of equal measure ``atom_weight``.

    ``entries`` are finitely many leading coordinates; every later coordinate
    equals ``tail``.  ``weights`` optionally overrides the atom measures of a
    finite atomic space (kernel operators live there); it requires a zero tail
    and one weight per entry.
    """

    entries: tuple[Fraction, ...] = ()
    atom_weight: Fraction = Fraction(1)
    tail: Fraction = Fraction(0)
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        entries = tuple(as_fraction(x) for x in self.entries)
        w = as_fraction(self.atom_weight)
        tail = as_fraction(self.tail)
        if w <= 0:
            raise ValueError("atom weight must be positive")
        weights = self.weights
        if weights is not None:
            weights = tuple(as_fraction(x) for x in weights)
            if len(weights) != len(entries):
                raise ValueError("need one weight per entry")
            if any(x <= 0 for x in weights):
                raise ValueError("atom weights must be positive")
            if tail != 0:
                raise ValueError("weighted vectors live on finitely many atoms")
            if all(x == w for x in weights):
                weights = None
        if weights is None:
            n = len(entries)
            while n and entries[n - 1] == tail:
                n -= 1
            entries = entries[:n]
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "atom_weight", w)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def unit(cls, k: int = 1, atom_weight=1) -> "DiscreteVector":
        """The basis vector ``e_k`` (1-based)."""
        return cls((0,) * (k - 1) + (1,), atom_weight)

    def __len__(self):
        return len(self.entries)

    def coordinate(self, k: int) -> Fraction:
        """1-based coordinate access, continuing with the tail."""
        return self.entries[k - 1] if k <= len(self.entries) else self.tail

    def atom_weights(self, n: int | None = None) -> tuple[Fraction, ...]:
        if self.weights is not None:
            return self.weights
        n = len(self.entries) if n is None else n
        return (self.atom_weight,) * n

    def padded(self, n: int) -> tuple[Fraction, ...]:
        return self.entries + (self.tail,) * (n - len(self.entries))

    def to_step(self) -> StepFunction:
        """Atom k goes to the interval ``(w_1+...+w_{k-1}, w_1+...+w_k]``."""
        ends = tuple(accumulate(self.atom_weights()))
        return StepFunction(ends, self.entries, self.tail)

    def map(self, fn) -> "DiscreteVector":
        return DiscreteVector(tuple(fn(x) for x in self.entries), self.atom_weight,
                              fn(self.tail), self.weights)

    def abs(self):
        return self.map(abs)

    def __neg__(self):
        return self.map(lambda x: -x)

    def __mul__(self, c):
        c = as_fraction(c)
        return self.map(lambda x: x * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = as_fraction(c)
        return self.map(lambda x: x / c)

    def _zip(self, other: "DiscreteVector", op) -> "DiscreteVector":
        if not isinstance(other, DiscreteVector):
            return NotImplemented
        if self.atom_weight != other.atom_weight or self.weights != other.weights:
            raise ValueError("vectors live on different atomic spaces")
        n = max(len(self.entries), len(other.entries))
        a, b = self.padded(n), other.padded(n)
        return DiscreteVector(tuple(op(x, y) for x, y in zip(a, b)), self.atom_weight,
                              op(self.tail, other.tail), self.weights)

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def maximum(self, other):
        return self._zip(other, max)

    def sup_abs(self) -> Fraction:
        return max([abs(x) for x in self.entries] + [abs(self.tail)])

    def is_zero(self) -> bool:
        return not self.entries and self.tail == 0

    def integral(self) -> Extended:
        if self.tail != 0:
            return INF if self.tail > 0 else -INF
        return sum((x * w for x, w in zip(self.entries, self.atom_weights())), Fraction(0))

    def l1_norm(self) -> Extended:
        return self.abs().integral()


Function = Union[StepFunction, DiscreteVector]


def ONE() -> StepFunction:
    """The constant function 1 on (0, inf)."""
    return StepFunction.constant(1)


# -- distribution, rearrangement, submajorization -------------------------

def distribution(f: Function, lam) -> Extended:
    """``mu{|f| > lam}``; ``inf`` exactly when ``lam < |tail|``."""
    lam = as_fraction(lam)
    if lam < 0:
        raise ValueError("threshold must be non-negative")
    if abs(f.tail) > lam:
        return INF
    if isinstance(f, DiscreteVector):
        return sum((w for x, w in zip(f.entries, f.atom_weights()) if abs(x) > lam),
                   Fraction(0))
    return sum((b - a for a, b, v in f.pieces() if abs(v) > lam), Fraction(0))


def rearrangement(f: Function) -> StepFunction:
    """Non-increasing right-continuous rearrangement ``f*`` as a step function.

    Values of ``|f|`` not exceeding ``|tail|`` occupy finite measure while the
    level ``|tail|`` has infinite measure, so they disappear from ``f*``.
    """
    g = f.to_step()
    c = abs(g.tail)
    mass: dict[Fraction, Fraction] = {}
    for a, b, v in g.pieces():
        v = abs(v)
        if v > c:
            mass[v] = mass.get(v, Fraction(0)) + (b - a)
    breaks: list[Fraction] = []
    values: list[Fraction] = []
    t = Fraction(0)
    for v in sorted(mass, reverse=True):
        t += mass[v]
        breaks.append(t)
        values.append(v)
    return StepFunction(tuple(breaks), tuple(values), c)


def primitive(fstar: StepFunction, s) -> Extended:
    """``int_0^s fstar`` for a step function (used on rearrangements)."""
    if s == INF:
        return fstar.integral()
    s = as_fraction(s)
    total = Fraction(0)
    for a, b, v in fstar.pieces():
        if s <= a:
            return total
        total += v * (min(b, s) - a)
    if s > fstar.end:
        total += fstar.tail * (s - fstar.end)
    return total


def submajorize(g: Function, f: Function) -> bool:
    """Hardy-Littlewood relation ``int_0^s g* <= int_0^s f*`` for every s > 0.

    Both primitives are concave and piecewise linear, so comparing them at the
    union of breakpoints and then comparing tail slopes is exact.
    """
    gs, fs = rearrangement(g), rearrangement(f)
    knots = sorted(set(gs.breaks) | set(fs.breaks))
    for s in knots:
        if primitive(gs, s) > primitive(fs, s):
            return False
    # beyond the last knot both primitives are affine with slope = tail value
    return gs.tail <= fs.tail


def in_R_mu(f: Function) -> bool:
    """``f* -> 0`` at infinity, i.e. every super-level set has finite measure."""
    return rearrangement(f).tail == 0


def truncation_split(f: Function, eps) -> tuple[Function, Function]:
    """Split ``f = g + h`` with ``g = f 1{|f| > eps}`` integrable and ``|h| <= eps``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not in_R_mu(f):
        raise PreconditionError("truncation_split requires f in R_mu (f* -> 0)")
    g = f.map(lambda v: v if abs(v) > eps else Fraction(0))
    return g, f - g


def measure_distance(f: Function, g: Function, delta) -> Extended:
    """``mu{|f - g| > delta}``, the measure-topology gauge."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    return distribution(f - g, delta)


def level_set(f: Function, lam) -> StepFunction:
    """Indicator of ``{f > lam}`` (signed; pass ``f.abs()`` for ``{|f| > lam}``)."""
    lam = as_fraction(lam)
    return f.to_step().map(lambda v: Fraction(1) if v > lam else Fraction(0))


def intervals_of(indicator: StepFunction) -> list[tuple[Fraction, Fraction]]:
    """Maximal intervals where a finite-support indicator is nonzero."""
    return [(a, b) for a, b, v in indicator.pieces() if v != 0]


# -- JSON -----------------------------------------------------------------

def frac_str(x: Extended) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return repr(x)


def to_json(f: Function) -> dict:
    if isinstance(f, DiscreteVector):
        out = {"entries": [str(x) for x in f.entries], "atom_weight": str(f.atom_weight),
               "tail": str(f.tail)}
        if f.weights is not None:
            out["weights"] = [str(x) for x in f.weights]
        return out
    return {"pieces": [[str(a), str(b), str(v)] for a, b, v in f.pieces()],
            "tail": str(f.tail)}


def from_json(obj: dict) -> Function:
    if not isinstance(obj, dict):
        raise ValueError("function JSON must be an object")
    if "pieces" in obj:
        extra = set(obj) - {"pieces", "tail"}
        if extra:
            raise ValueError(f"unknown step-function fields: {sorted(extra)}")
        for k, p in enumerate(obj["pieces"]):
            if len(p) != 3:
                raise ValueError(f"pieces[{k}] must be [a, b, v]")
        return StepFunction.from_pieces(obj["pieces"], obj.get("tail", 0))
    if "entries" in obj:
        extra = set(obj) - {"entries", "atom_weight", "tail", "weights"}
        if extra:
            raise ValueError(f"unknown vector fields: {sorted(extra)}")
        return DiscreteVector(tuple(obj["entries"]), obj.get("atom_weight", 1),
                              obj.get("tail", 0), obj.get("weights"))
    raise ValueError("function JSON needs 'pieces' or 'entries'")
