"""Fully symmetric spaces on (0, inf): norms, fundamental functions, predicates.

Orlicz functions and concave generators are closed parametric families, so
every limit the predicates need (``phi(+0)``, ``phi(inf)``, slopes at 0 and
at infinity, Delta_2) is read off the parameters instead of being estimated.

Norms return a :class:`~fractions.Fraction` when the computation is exact, a
``float`` otherwise, and ``math.inf`` for functions outside the space.
Predicates return ``True``, ``False`` or ``None`` (unknown).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .measure import (INF, Extended, Function, StepFunction, as_fraction, frac_str,
                      primitive, rearrangement)

Tri = Optional[bool]


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


def _power(x: Fraction, p: Fraction) -> Extended:
    """``x**p`` exactly when p is a non-negative integer, else as a float."""
    if _is_int(p) and p >= 0:
        return x ** int(p)
    return float(x) ** float(p)


def _fdiv(a: Extended, b: Extended) -> Extended:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return float(a) / float(b)


# -- Orlicz functions -----------------------------------------------------

@dataclass(frozen=True)
class OrliczPower:
    """``Phi(u) = u**p``."""

    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.p < 1:
            raise ValueError("Orlicz power needs p >= 1")

    def __call__(self, u: float) -> float:
        return u ** float(self.p)

    vanishes_below = 0.0
    delta2_at_zero = True
    delta2_at_infinity = True

    @property
    def slope_at_zero(self) -> Fraction:
        return Fraction(1) if self.p == 1 else Fraction(0)

    @property
    def slope_at_infinity(self) -> Extended:
        return Fraction(1) if self.p == 1 else INF

    def inverse(self, y: float) -> float:
        return y ** (1 / float(self.p))

    def to_json(self):
        return {"family": "power", "p": str(self.p)}


@dataclass(frozen=True)
class OrliczShiftedPower:
    """``Phi(u) = ((u - u0)_+)**p``; vanishes on ``[0, u0]``."""

    u0: Fraction
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u0", as_fraction(self.u0))
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.u0 <= 0 or self.p < 1:
            raise ValueError("shifted power needs u0 > 0 and p >= 1")

    def __call__(self, u: float) -> float:
        d = u - float(self.u0)
        return d ** float(self.p) if d > 0 else 0.0

    @property
    def vanishes_below(self) -> float:
        return float(self.u0)

    # Phi(2u) < k Phi(u) has no content where Phi vanishes; left undecided.
    delta2_at_zero = None
    delta2_at_infinity = True
    slope_at_zero = Fraction(0)

    @property
    def slope_at_infinity(self) -> Extended:
        return Fraction(1) if self.p == 1 else INF

    def inverse(self, y: float) -> float:
        return float(self.u0) + y ** (1 / float(self.p))

    def to_json(self):
        return {"family": "shifted_power", "u0": str(self.u0), "p": str(self.p)}


@dataclass(frozen=True)
class OrliczPiecewisePower:
    """``u**p0`` on ``[0, b]``, then the tangent line plus ``(u - b)**p_inf``.

    The splice is convex for any ``p0, p_inf >= 1`` and grows like
    ``u**p_inf`` at infinity.
    """

    p0: Fraction
    p_inf: Fraction
    breakpoint: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("p0", "p_inf", "breakpoint"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.p0 < 1 or self.p_inf < 1 or self.breakpoint <= 0:
            raise ValueError("piecewise power needs p0, p_inf >= 1 and breakpoint > 0")

    def __call__(self, u: float) -> float:
        b, p0 = float(self.breakpoint), float(self.p0)
        if u <= b:
            return u ** p0
        return b ** p0 + p0 * b ** (p0 - 1) * (u - b) + (u - b) ** float(self.p_inf)

    vanishes_below = 0.0
    delta2_at_zero = True
    delta2_at_infinity = True

    @property
    def slope_at_zero(self) -> Fraction:
        return Fraction(1) if self.p0 == 1 else Fraction(0)

    @property
    def slope_at_infinity(self) -> Extended:
        if self.p_inf > 1:
            return INF
        return _mul(self.p0, _power(self.breakpoint, self.p0 - 1)) + 1

    def inverse(self, y: float) -> float:
        b = float(self.breakpoint)
        if y <= self(b):
            return y ** (1 / float(self.p0))
        lo, hi = b, 2 * b
        while self(hi) < y:
            lo, hi = hi, 2 * hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
        return hi

    def to_json(self):
        return {"family": "piecewise_power", "p0": str(self.p0), "p_inf": str(self.p_inf),
                "breakpoint": str(self.breakpoint)}


OrliczFunction = (OrliczPower, OrliczShiftedPower, OrliczPiecewisePower)


# -- concave generators ---------------------------------------------------

@dataclass(frozen=True)
class PhiPower:
    """``phi(t) = t**gamma`` with ``0 < gamma <= 1``."""

    gamma: Fraction

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_fraction(self.gamma))
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")

    def __call__(self, t: float) -> float:
        return float(t) ** float(self.gamma)

    def array(self, t):
        return np.power(t, float(self.gamma))

    def exact(self, t: Fraction) -> Fraction | None:
        return t if self.gamma == 1 else None

    at_zero = Fraction(0)

    @property
    def at_infinity(self) -> Extended:
        return INF

    @property
    def slope_at_zero(self) -> Extended:
        return Fraction(1) if self.gamma == 1 else INF

    @property
    def slope_at_infinity(self) -> Fraction:
        return Fraction(1) if self.gamma == 1 else Fraction(0)

    def to_json(self):
        return {"family": "power", "gamma": str(self.gamma)}


@dataclass(frozen=True)
class PhiLog:
    """``phi(t) = ln(1 + t)``."""

    def __call__(self, t: float) -> float:
        return math.log1p(float(t))

    def array(self, t):
        return np.log1p(t)

    def exact(self, t):
        return None

    at_zero = Fraction(0)
    at_infinity = INF
    slope_at_zero = Fraction(1)
    slope_at_infinity = Fraction(0)

    def to_json(self):
        return {"family": "log"}


@dataclass(frozen=True)
class PhiBounded:
    """``phi(t) = c t / (c + t)``; bounded by ``c``."""

    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", as_fraction(self.c))
        if self.c <= 0:
            raise ValueError("c must be positive")

    def __call__(self, t: float) -> float:
        c = float(self.c)
        return c * float(t) / (c + float(t))

    def exact(self, t: Fraction) -> Fraction:
        return self.c * t / (self.c + t)

    at_zero = Fraction(0)
    slope_at_zero = Fraction(1)
    slope_at_infinity = Fraction(0)

    @property
    def at_infinity(self) -> Fraction:
        return self.c

    def to_json(self):
        return {"family": "bounded", "c": str(self.c)}


@dataclass(frozen=True)
class PhiAffineJump:
    """``phi(0) = 0`` and ``phi(t) = a + b t`` for ``t > 0``."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise ValueError("need a, b >= 0, not both zero")

    def __call__(self, t: float) -> float:
        return float(self.a) + float(self.b) * float(t) if t > 0 else 0.0

    def exact(self, t: Fraction) -> Fraction:
        return self.a + self.b * t if t > 0 else Fraction(0)

    @property
    def at_zero(self) -> Fraction:
        return self.a

    @property
    def at_infinity(self) -> Extended:
        return INF if self.b > 0 else self.a

    @property
    def slope_at_zero(self) -> Extended:
        return INF if self.a > 0 else self.b

    @property
    def slope_at_infinity(self) -> Fraction:
        return self.b

    def to_json(self):
        return {"family": "affine_jump", "a": str(self.a), "b": str(self.b)}


ConcavePhi = (PhiPower, PhiLog, PhiBounded, PhiAffineJump)


def _phi_value(phi, t: Fraction) -> Extended:
    e = phi.exact(t)
    return e if e is not None else phi(t)


# -- spaces ---------------------------------------------------------------

class SymmetricSpace:
    """Common surface of the parametric spaces below."""

    name = "space"

    def norm(self, f: Function) -> Extended:
        raise NotImplementedError

    def fundamental(self, t) -> Extended:
        """``phi_X(t) = ||chi_(0,t]||_X``."""
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        return self.norm(StepFunction.indicator(0, t))

    # analytic limits of the fundamental function
    def alpha(self) -> Extended:
        raise NotImplementedError

    def beta(self) -> Extended:
        raise NotImplementedError

    def contains_one(self) -> bool:
        raise NotImplementedError

    def order_continuous(self) -> Tri:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Lp(SymmetricSpace):
    p: Fraction | float

    def __post_init__(self):
        p = self.p if self.p == INF else as_fraction(self.p)
        if p < 1:
            raise ValueError("p must be >= 1")
        object.__setattr__(self, "p", p)

    @property
    def name(self):
        return f"L^{frac_str(self.p)}"

    def norm(self, f: Function) -> Extended:
        g = f.to_step()
        if self.p == INF:
            return g.sup_abs()
        if g.tail != 0:
            return INF
        if self.p == 1:
            return g.l1_norm()
        total = sum((_power(abs(v), self.p) * (b - a) for a, b, v in g.pieces()), Fraction(0))
        return float(total) ** (1 / float(self.p))

    def alpha(self):
        return Fraction(1) if self.p == 1 else Fraction(0)

    def beta(self):
        return Fraction(1) if self.p == INF else Fraction(0)

    def contains_one(self):
        return self.p == INF

    def order_continuous(self):
        return self.p != INF

    def to_json(self):
        return {"space": "lp", "p": frac_str(self.p)}


@dataclass(frozen=True)
class L1PlusLinf(SymmetricSpace):
    name = "L^1+L^inf"

    def norm(self, f):
        return primitive(rearrangement(f), 1)

    def alpha(self):
        return Fraction(0)

    def beta(self):
        return Fraction(0)

    def contains_one(self):
        return True

    def order_continuous(self):
        return False

    def to_json(self):
        return {"space": "l1plusLinf"}


@dataclass(frozen=True)
class L1CapLinf(SymmetricSpace):
    name = "L^1 cap L^inf"

    def norm(self, f):
        g = f.to_step()
        return max(g.l1_norm(), g.sup_abs())

    def alpha(self):
        return Fraction(1)

    def beta(self):
        return Fraction(1)

    def contains_one(self):
        return False

    def order_continuous(self):
        return False

    def to_json(self):
        return {"space": "l1capLinf"}


@dataclass(frozen=True)
class Orlicz(SymmetricSpace):
    """Orlicz space with the Luxemburg norm."""

    phi: object

    @property
    def name(self):
        return f"Orlicz({self.phi.to_json()['family']})"

    def modular(self, f: Function, a: float) -> float:
        """``int Phi(|f| / a)``."""
        g = f.to_step()
        c = float(abs(g.tail))
        if c > 0 and self.phi(c / a) > 0:
            return INF
        return math.fsum(float(b - l) * self.phi(float(abs(v)) / a) for l, b, v in g.pieces())

    def norm(self, f):
        g = f.to_step()
        if g.is_zero():
            return Fraction(0)
        c = abs(g.tail)
        if c > 0 and self.phi.vanishes_below == 0:
            return INF
        lo = float(c) / self.phi.vanishes_below if c > 0 else 0.0
        if lo > 0 and self.modular(g, lo) <= 1:
            return lo
        hi = max(float(g.sup_abs()), lo, 1e-300)
        while self.modular(g, hi) > 1:
            lo, hi = hi, 2 * hi
        for _ in range(2000):
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            if self.modular(g, mid) > 1:
                lo = mid
            else:
                hi = mid
        return hi

    def fundamental(self, t):
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        return 1.0 / self.phi.inverse(1.0 / float(t))

    def alpha(self):
        # phi_X(t) = 1 / Phi^{-1}(1/t); with u = Phi^{-1}(1/t) -> 0 this is Phi(u)/u
        return self.phi.slope_at_zero if self.phi.vanishes_below == 0 else Fraction(0)

    def beta(self):
        return Fraction(0)

    def contains_one(self):
        return self.phi.vanishes_below > 0

    def order_continuous(self):
        if self.contains_one():
            # an order continuous space sits inside R_mu, which excludes 1
            return False
        if self.phi.delta2_at_zero and self.phi.delta2_at_infinity:
            return True
        return None

    def to_json(self):
        return {"space": "orlicz", "Phi": self.phi.to_json()}


@dataclass(frozen=True)
class Lorentz(SymmetricSpace):
    """``||f|| = int_0^inf f* dphi`` (the jump ``phi(+0)`` weights ``f*(0+)``)."""

    phi: object

    @property
    def name(self):
        return f"Lorentz({self.phi.to_json()['family']})"

    def norm(self, f):
        fs = rearrangement(f)
        total: Extended = Fraction(0)
        prev: Extended = Fraction(0)
        for _, b, v in fs.pieces():
            cur = _phi_value(self.phi, b)
            total = total + _mul(v, _sub(cur, prev))
            prev = cur
        if fs.tail > 0:
            if self.phi.at_infinity == INF:
                return INF
            total = total + _mul(fs.tail, _sub(self.phi.at_infinity, prev))
        return total

    def fundamental(self, t):
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        return _phi_value(self.phi, t)

    def alpha(self):
        return self.phi.slope_at_infinity

    def beta(self):
        return self.phi.at_zero

    def contains_one(self):
        return self.phi.at_infinity != INF

    def order_continuous(self):
        return self.phi.at_zero == 0 and self.phi.at_infinity == INF

    def to_json(self):
        return {"space": "lorentz", "phi": self.phi.to_json()}


@dataclass(frozen=True)
class Marcinkiewicz(SymmetricSpace):
    """``||f|| = sup_s (1/phi(s)) int_0^s f*``.

    On each piece of ``f*`` the ratio ``F/phi`` has derivative with the sign of
    ``v phi - F phi'``, which is non-decreasing because ``phi`` is concave, so
    the ratio is quasi-convex there and its supremum sits at a breakpoint or at
    one of the limits ``s -> 0+``, ``s -> inf``.
    """

    phi: object

    @property
    def name(self):
        return f"Marcinkiewicz({self.phi.to_json()['family']})"

    def norm(self, f):
        fs = rearrangement(f)
        phi = self.phi
        best: Extended = _div_limit(fs.first_value(), phi.slope_at_zero)
        F = Fraction(0)
        for a, b, v in fs.pieces():
            F += v * (b - a)
            best = _max(best, _fdiv(F, _phi_value(phi, b)))
        if fs.tail > 0:
            best = _max(best, _div_limit(fs.tail, phi.slope_at_infinity))
        elif phi.at_infinity != INF:
            best = _max(best, _fdiv(F, phi.at_infinity))
        return best

    def fundamental(self, t):
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        return _fdiv(t, _phi_value(self.phi, t))

    def sequence_norm(self, values, atom_weight: float = 1.0) -> float:
        """Floating-point norm of a long non-negative sequence with zero tail.

        Same breakpoint/limit evaluation as :meth:`norm`, vectorised for
        sequences too long for exact arithmetic.
        """
        x = np.sort(np.abs(np.asarray(values, dtype=float)))[::-1]
        x = x[x > 0]
        if x.size == 0:
            return 0.0
        F = np.cumsum(x) * atom_weight
        s = atom_weight * np.arange(1, x.size + 1, dtype=float)
        phi = self.phi
        phis = np.array([phi(t) for t in s]) if not hasattr(phi, "array") else phi.array(s)
        best = float(np.max(F / phis))
        best = max(best, float(_div_limit(Fraction(1), phi.slope_at_zero)) * x[0])
        if phi.at_infinity != INF:
            best = max(best, F[-1] / float(phi.at_infinity))
        return best

    def alpha(self):
        return _div_limit(Fraction(1), self.phi.at_infinity)

    def beta(self):
        return _div_limit(Fraction(1), self.phi.slope_at_zero)

    def contains_one(self):
        return self.phi.slope_at_infinity > 0

    def order_continuous(self):
        phi = self.phi
        if isinstance(phi, PhiAffineJump) and phi.b == 0:
            # phi constant: the norm is ||f||_1 / a
            return True
        if self.contains_one() or self.beta() > 0:
            return False
        if phi.slope_at_zero == INF:
            # phi(t)/t -> inf at 0 makes M_phi non-separable
            return False
        return None

    def to_json(self):
        return {"space": "marcinkiewicz", "phi": self.phi.to_json()}


def _sub(x: Extended, y: Extended) -> Extended:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x - y
    return float(x) - float(y)


def _mul(x: Extended, y: Extended) -> Extended:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    return float(x) * float(y)


def _max(x: Extended, y: Extended) -> Extended:
    return y if y > x else x


def _div_limit(num: Fraction, den: Extended) -> Extended:
    """``num / den`` with ``x/inf = 0`` and ``x/0 = inf`` for ``x > 0``."""
    if num == 0:
        return Fraction(0)
    if den == INF:
        return Fraction(0)
    if den == 0:
        return INF
    return _fdiv(num, den)


# -- module-level operations -----------------------------------------------

def norm(X: SymmetricSpace, f: Function) -> Extended:
    return X.norm(f)


def fundamental_function(X: SymmetricSpace, t) -> Extended:
    return X.fundamental(t)


def alpha_limit(X: SymmetricSpace) -> Extended:
    """``lim_{t->inf} phi_X(t) / t``."""
    return X.alpha()


def beta_limit(X: SymmetricSpace) -> Extended:
    """``lim_{t->0+} phi_X(t)``."""
    return X.beta()


def contains_indicator_of_infinity(X: SymmetricSpace) -> bool:
    return X.contains_one()


def embeds_in_L1(X: SymmetricSpace) -> bool:
    return X.alpha() > 0


def embeds_in_Linf(X: SymmetricSpace) -> bool:
    return X.beta() > 0


def has_order_continuous_norm(X: SymmetricSpace) -> Tri:
    return X.order_continuous()


def met_predicate(X: SymmetricSpace) -> Tri:
    """Cesaro averages of every DS operator converge in norm.

    True iff the norm is order continuous and ``alpha(X) = 0``; an unknown
    order-continuity answer stays unknown unless ``alpha > 0`` settles it.
    """
    if X.alpha() > 0:
        return False
    oc = X.order_continuous()
    if oc is None:
        return None
    return oc


def met_report(X: SymmetricSpace) -> dict:
    """The MET verdict together with the limits that decide it."""
    oc = X.order_continuous()
    return {
        "space": X.to_json(),
        "met": _tri_str(met_predicate(X)),
        "alpha": frac_str(X.alpha()),
        "beta": frac_str(X.beta()),
        "order_continuous": _tri_str(oc),
        "contains_one": X.contains_one(),
        "embeds_in_L1": embeds_in_L1(X),
        "embeds_in_Linf": embeds_in_Linf(X),
        "subset_of_R_mu": not X.contains_one(),
    }


def _tri_str(x: Tri):
    return "unknown" if x is None else x


def limit_crosscheck(X: SymmetricSpace, exponents=(0, 10, 20), tol: float = 1e-6) -> dict:
    """Compare analytic alpha/beta with samples of the fundamental function.

    Samples ``phi_X(t)/t`` at ``t = 2**k`` and ``phi_X(t)`` at ``t = 2**-k``;
    the limit estimate is the Aitken delta-squared extrapolation of the three
    samples (exact for geometric approach, e.g. power-type ``phi_X``).  The
    one-sided bounds ``alpha <= phi_X(t)/t`` and ``beta <= phi_X(t)`` follow
    from quasi-concavity and are always checked.
    """
    ts_big = [2.0 ** k for k in exponents]
    ts_small = [2.0 ** -k for k in exponents]
    ra = [float(X.fundamental(Fraction(t))) / t for t in ts_big]
    rb = [float(X.fundamental(Fraction(t))) for t in ts_small]
    a_est, b_est = _aitken(ra), _aitken(rb)
    alpha, beta = float(X.alpha()), float(X.beta())
    ok = (alpha <= min(ra) + tol and beta <= min(rb) + tol
          and abs(a_est - alpha) <= tol and abs(b_est - beta) <= tol)
    return {"alpha": alpha, "alpha_samples": ra, "alpha_estimate": a_est,
            "beta": beta, "beta_samples": rb, "beta_estimate": b_est, "consistent": ok}


def _aitken(x: list[float]) -> float:
    x0, x1, x2 = x[-3:]
    den = x2 - 2 * x1 + x0
    if den == 0:
        return x2
    return x2 - (x2 - x1) ** 2 / den


# -- JSON -----------------------------------------------------------------

def _parse_orlicz(obj: dict):
    fam = obj.get("family")
    if fam == "power":
        return OrliczPower(obj["p"])
    if fam == "shifted_power":
        return OrliczShiftedPower(obj["u0"], obj["p"])
    if fam == "piecewise_power":
        return OrliczPiecewisePower(obj["p0"], obj["p_inf"], obj.get("breakpoint", 1))
    raise ValueError(f"unknown Orlicz family {fam!r}")


def _parse_phi(obj: dict):
    fam = obj.get("family")
    if fam == "power":
        return PhiPower(obj["gamma"])
    if fam == "log":
        return PhiLog()
    if fam == "bounded":
        return PhiBounded(obj["c"])
    if fam == "affine_jump":
        return PhiAffineJump(obj["a"], obj["b"])
    raise ValueError(f"unknown concave family {fam!r}")


def space_from_json(obj: dict) -> SymmetricSpace:
    """Read ``{"space": "lorentz", "phi": {"family": "power", "gamma": "2/3"}}`` etc."""
    if not isinstance(obj, dict) or "space" not in obj:
        raise ValueError("space JSON needs a 'space' field")
    kind = obj["space"].lower()
    allowed = {"lp": {"p"}, "orlicz": {"Phi", "phi"}, "lorentz": {"phi"},
               "marcinkiewicz": {"phi"}}.get(kind, set()) | {"space"}
    extra = set(obj) - allowed
    if extra:
        raise ValueError(f"unknown fields for {kind}: {sorted(extra)}")
    if kind == "lp":
        p = obj.get("p", "1")
        return Lp(INF if str(p).lower() in ("inf", "infinity") else p)
    if kind in ("l1", "linf"):
        return Lp(1 if kind == "l1" else INF)
    if kind == "l1pluslinf":
        return L1PlusLinf()
    if kind == "l1caplinf":
        return L1CapLinf()
    if kind == "orlicz":
        return Orlicz(_parse_orlicz(obj.get("Phi") or obj["phi"]))
    if kind == "lorentz":
        return Lorentz(_parse_phi(obj["phi"]))
    if kind == "marcinkiewicz":
        return Marcinkiewicz(_parse_phi(obj["phi"]))
    raise ValueError(f"unknown space {obj['space']!r}")
