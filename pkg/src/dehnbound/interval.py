"""Center-radius interval arithmetic with rigorous enclosures.

An :class:`Interval` stores a double-precision center and a non-negative
radius and represents the closed set ``[center - radius, center + radius]``.
Every operation returns an interval containing the exact real result for
every choice of operands inside its input intervals.

The hardware rounding mode is never changed.  All arithmetic runs in the
default round-to-nearest mode and the rounding error is absorbed into the
radius using error-free transformations (TwoSum, Dekker's TwoProduct).
Those recover the *exact* rounding error of a single ``+`` or ``*``, so no
ulp slack is ever added for exact operations: ``[1±0] + [2±0]`` is ``[3±0]``.

Soundness rules used by the directed-rounding helpers below:

* IEEE ``+ - * / sqrt`` are correctly rounded, so ``fl(x) - x`` is bounded by
  half an ulp of ``fl(x)``; stepping one float up (``nextafter``) from
  ``fl(x)`` therefore gives an upper bound whenever ``fl(x) < x``.
* The sign of ``x - fl(x)`` is known exactly from the error-free
  transformation, so we only step when the rounding went the wrong way.
* When an error-free transformation may be inexact (operands near the
  underflow or overflow thresholds) we fall back to one full ulp, which is
  twice the worst-case error and hence sound.

The only library function not covered by IEEE correct rounding is ``asin``;
it is enclosed by evaluating the platform ``math.asin`` at the endpoints
(monotone function) and widening by ``_ASIN_ULPS`` ulps.  glibc documents
``asin`` as accurate to within one ulp; four ulps leaves a margin, and the
test suite checks the enclosure against 200-bit mpmath on a dense grid.
"""
from __future__ import annotations

import math
from typing import Iterable

__all__ = [
    "Interval",
    "IntervalDomainError",
    "pi",
    "hull",
    "imax",
    "imin",
    "ZERO",
    "ONE",
]

_INF = math.inf
_ASIN_ULPS = 4
# Dekker splitting loses exactness outside this magnitude window.
_SAFE_LO = 2.0 ** -480
_SAFE_HI = 2.0 ** 480
_SPLITTER = 134217729.0  # 2**27 + 1


class IntervalDomainError(ArithmeticError):
    """An operation was applied outside its mathematical domain."""


# ---------------------------------------------------------------------------
# error-free transformations and directed rounding on plain floats


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _safe(x: float) -> bool:
    ax = abs(x)
    return ax == 0.0 or _SAFE_LO < ax < _SAFE_HI


def _prod_err(a: float, b: float, p: float) -> float | None:
    """Exact ``a*b - p`` when recoverable, else None."""
    if not (_safe(a) and _safe(b) and _safe(p)):
        return None
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def add_up(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    return _up(s) if e > 0 else s


def add_down(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    return _down(s) if e < 0 else s


def mul_up(a: float, b: float) -> float:
    p = a * b
    e = _prod_err(a, b, p)
    if e is None:
        return p + math.ulp(p)
    return _up(p) if e > 0 else p


def mul_down(a: float, b: float) -> float:
    p = a * b
    e = _prod_err(a, b, p)
    if e is None:
        return p - math.ulp(p)
    return _down(p) if e < 0 else p


def _div_residual(a: float, b: float, q: float) -> float | None:
    """Exact ``a - q*b`` for ``q = fl(a/b)``, else None."""
    p = q * b
    e = _prod_err(q, b, p)
    if e is None or not _safe(a):
        return None
    # a - p is exact (Sterbenz) since p is within a factor two of a
    return (a - p) - e


def div_up(a: float, b: float) -> float:
    q = a / b
    r = _div_residual(a, b, q)
    if r is None:
        return q + math.ulp(q)
    # sign of (a/b - q) is the sign of r/b
    return _up(q) if (r > 0) == (b > 0) and r != 0 else q


def div_down(a: float, b: float) -> float:
    q = a / b
    r = _div_residual(a, b, q)
    if r is None:
        return q - math.ulp(q)
    return _down(q) if (r < 0) == (b > 0) and r != 0 else q


def sqrt_up(x: float) -> float:
    s = math.sqrt(x)
    e = _prod_err(s, s, s * s)
    if e is None:
        return s + math.ulp(s)
    # compare s*s (= p + e exactly) with x
    p = s * s
    return _up(s) if (p < x or (p == x and e < 0)) else s


def sqrt_down(x: float) -> float:
    s = math.sqrt(x)
    e = _prod_err(s, s, s * s)
    if e is None:
        return max(0.0, s - math.ulp(s))
    p = s * s
    return _down(s) if (p > x or (p == x and e > 0)) else s


def _asin_down(x: float) -> float:
    if x == 0.0:
        return 0.0
    y = math.asin(x)
    return y - _ASIN_ULPS * math.ulp(y)


def _asin_up(x: float) -> float:
    if x == 0.0:
        return 0.0
    y = math.asin(x)
    return y + _ASIN_ULPS * math.ulp(y)


# ---------------------------------------------------------------------------


class Interval:
    """Closed interval ``[center - radius, center + radius]``."""

    __slots__ = ("center", "radius")

    def __init__(self, center: float, radius: float = 0.0):
        center = float(center)
        radius = float(radius)
        if radius < 0:
            raise ValueError(f"negative radius {radius!r}")
        if not (math.isfinite(center) and math.isfinite(radius)):
            center, radius = math.nan, _INF
        self.center = center
        self.radius = radius

    # -- construction ------------------------------------------------------

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, 0.0)

    @classmethod
    def from_bounds(cls, lo: float, hi: float) -> "Interval":
        """Smallest center-radius interval (up to rounding) containing [lo, hi]."""
        lo = float(lo)
        hi = float(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return INVALID
        if lo == hi:
            return cls(lo, 0.0)
        c = lo * 0.5 + hi * 0.5
        r = max(add_up(hi, -c), add_up(c, -lo), 0.0)
        return cls(c, r)

    @classmethod
    def invalid(cls) -> "Interval":
        return INVALID

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Inverse of :meth:`__str__`."""
        c, _, r = text.strip().partition("±")
        return cls(float(c), float(r or 0.0))

    # -- accessors ---------------------------------------------------------

    @property
    def is_valid(self) -> bool:
        return self.radius != _INF

    @property
    def is_thin(self) -> bool:
        return self.radius == 0.0

    def lower(self) -> float:
        if not self.is_valid:
            return -_INF
        return add_down(self.center, -self.radius)

    def upper(self) -> float:
        if not self.is_valid:
            return _INF
        return add_up(self.center, self.radius)

    def bounds(self) -> tuple[float, float]:
        return self.lower(), self.upper()

    def width(self) -> float:
        return add_up(self.radius, self.radius)

    def contains(self, x) -> bool:
        """Containment of a float, Fraction, mpf or another Interval."""
        if isinstance(x, Interval):
            return self.lower() <= x.lower() and x.upper() <= self.upper()
        return self.lower() <= x <= self.upper()

    def __repr__(self) -> str:
        return f"Interval({self.center!r}, {self.radius!r})"

    def __str__(self) -> str:
        return f"{self.center!r}±{self.radius!r}"

    # equality is structural; use the predicates for ordering questions
    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if not (self.is_valid or other.is_valid):
            return True
        return self.center == other.center and self.radius == other.radius

    def __hash__(self):
        return hash((self.center, self.radius)) if self.is_valid else hash("invalid")

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.center, self.radius)

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        if not (self.is_valid and other.is_valid):
            return INVALID
        c, e = _two_sum(self.center, other.center)
        r = self.radius
        if other.radius:
            r = add_up(r, other.radius)
        if e:
            r = add_up(r, abs(e))
        return Interval(c, r)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        if not (self.is_valid and other.is_valid):
            return INVALID
        if self.is_thin and other.is_thin:
            a, b = self.center, other.center
            p = a * b
            e = _prod_err(a, b, p)
            if e is None:
                return Interval(p, math.ulp(p))
            return Interval(p, abs(e) and _up(abs(e)))
        alo, ahi = self.bounds()
        blo, bhi = other.bounds()
        lo = min(mul_down(alo, blo), mul_down(alo, bhi), mul_down(ahi, blo), mul_down(ahi, bhi))
        hi = max(mul_up(alo, blo), mul_up(alo, bhi), mul_up(ahi, blo), mul_up(ahi, bhi))
        return Interval.from_bounds(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _coerce(other)
        if not (self.is_valid and other.is_valid):
            return INVALID
        blo, bhi = other.bounds()
        if blo <= 0.0 <= bhi:
            raise IntervalDomainError(f"division by interval containing zero: {other}")
        alo, ahi = self.bounds()
        lo = min(div_down(alo, blo), div_down(alo, bhi), div_down(ahi, blo), div_down(ahi, bhi))
        hi = max(div_up(alo, blo), div_up(alo, bhi), div_up(ahi, blo), div_up(ahi, bhi))
        return Interval.from_bounds(lo, hi)

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) / self

    def sqr(self) -> "Interval":
        """Square with the dependency handled: the lower bound never goes negative."""
        if not self.is_valid:
            return INVALID
        lo, hi = self.bounds()
        if lo >= 0:
            return Interval.from_bounds(mul_down(lo, lo), mul_up(hi, hi))
        if hi <= 0:
            return Interval.from_bounds(mul_down(hi, hi), mul_up(lo, lo))
        m = max(-lo, hi)
        return Interval.from_bounds(0.0, mul_up(m, m))

    def sqrt(self) -> "Interval":
        if not self.is_valid:
            return INVALID
        lo, hi = self.bounds()
        if lo < 0:
            raise IntervalDomainError(f"sqrt of interval with negative part: {self}")
        return Interval.from_bounds(sqrt_down(lo), sqrt_up(hi))

    def asin(self, clip: bool = False) -> "Interval":
        """Arcsine; ``clip`` says the caller already knows the value lies in [-1, 1].

        A clamped interval can still report an endpoint an ulp past 1, since
        center-radius form cannot hold every pair of bounds exactly; with
        ``clip`` such endpoints are pulled back instead of raising.
        """
        if not self.is_valid:
            return INVALID
        lo, hi = self.bounds()
        if clip:
            lo, hi = max(lo, -1.0), min(hi, 1.0)
        if lo < -1.0 or hi > 1.0:
            raise IntervalDomainError(f"asin outside [-1, 1]: {self}")
        return Interval.from_bounds(_asin_down(lo), _asin_up(hi))

    def acos(self, clip: bool = False) -> "Interval":
        return HALF_PI - self.asin(clip)

    def max0(self) -> "Interval":
        """Pointwise ``max(0, x)``."""
        if not self.is_valid:
            return INVALID
        lo, hi = self.bounds()
        if lo >= 0:
            return self
        if hi <= 0:
            return ZERO
        return Interval.from_bounds(0.0, hi)

    def clamp(self, lo: float, hi: float) -> "Interval":
        """Pointwise ``min(max(x, lo), hi)``."""
        if not self.is_valid:
            return Interval.from_bounds(lo, hi)
        a, b = self.bounds()
        a = min(max(a, lo), hi)
        b = min(max(b, lo), hi)
        if a == self.lower() and b == self.upper():
            return self
        return Interval.from_bounds(a, b)

    # -- set operations ----------------------------------------------------

    def split(self) -> tuple["Interval", "Interval"]:
        lo, hi = self.bounds()
        mid = self.center
        return Interval.from_bounds(lo, mid), Interval.from_bounds(mid, hi)

    def hull(self, other: "Interval") -> "Interval":
        if not (self.is_valid and other.is_valid):
            return INVALID
        return Interval.from_bounds(min(self.lower(), other.lower()), max(self.upper(), other.upper()))

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lower(), other.lower())
        hi = min(self.upper(), other.upper())
        if lo > hi:
            return None
        return Interval.from_bounds(lo, hi)

    # -- predicates --------------------------------------------------------

    def certainly_lt(self, other) -> bool:
        return self.upper() < _coerce(other).lower()

    def certainly_le(self, other) -> bool:
        return self.upper() <= _coerce(other).lower()

    def certainly_gt(self, other) -> bool:
        return self.lower() > _coerce(other).upper()

    def certainly_ge(self, other) -> bool:
        return self.lower() >= _coerce(other).upper()

    def possibly_lt(self, other) -> bool:
        return self.lower() < _coerce(other).upper()

    def possibly_le(self, other) -> bool:
        return self.lower() <= _coerce(other).upper()

    def possibly_gt(self, other) -> bool:
        return self.upper() > _coerce(other).lower()

    def possibly_ge(self, other) -> bool:
        return self.upper() >= _coerce(other).lower()


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, int) and abs(x) > 2 ** 53:
        raise ValueError("integer not exactly representable")
    return Interval(float(x), 0.0)


INVALID = Interval.__new__(Interval)
INVALID.center = math.nan
INVALID.radius = _INF

ZERO = Interval(0.0)
ONE = Interval(1.0)
_PI = Interval(math.pi, math.ulp(math.pi))
HALF_PI = Interval(math.pi / 2, math.ulp(math.pi / 2))


def pi() -> Interval:
    """Enclosure of pi (one ulp radius around the nearest double)."""
    return _PI


def hull(items: Iterable[Interval]) -> Interval:
    items = list(items)
    if not items:
        raise ValueError("hull of nothing")
    lo = min(x.lower() for x in items)
    hi = max(x.upper() for x in items)
    return Interval.from_bounds(lo, hi)


def imax(a: Interval, b: Interval) -> Interval:
    return Interval.from_bounds(max(a.lower(), b.lower()), max(a.upper(), b.upper()))


def imin(a: Interval, b: Interval) -> Interval:
    return Interval.from_bounds(min(a.lower(), b.lower()), min(a.upper(), b.upper()))


# module-level functional aliases, convenient in formula-heavy code
def add(a, b) -> Interval:
    return _coerce(a) + b


def sub(a, b) -> Interval:
    return _coerce(a) - b


def mul(a, b) -> Interval:
    return _coerce(a) * b


def div(a, b) -> Interval:
    return _coerce(a) / b


def neg(a) -> Interval:
    return -_coerce(a)


def sqr(a) -> Interval:
    return _coerce(a).sqr()


def sqrt(a) -> Interval:
    return _coerce(a).sqrt()


def arcsin(a) -> Interval:
    return _coerce(a).asin()


def arccos(a) -> Interval:
    return _coerce(a).acos()


def split(a: Interval) -> tuple[Interval, Interval]:
    return a.split()


def lower(a: Interval) -> float:
    return a.lower()


def upper(a: Interval) -> float:
    return a.upper()


def certainly_lt(a, b) -> bool:
    return _coerce(a).certainly_lt(b)


def certainly_ge(a, b) -> bool:
    return _coerce(a).certainly_ge(b)


def possibly_lt(a, b) -> bool:
    return _coerce(a).possibly_lt(b)
