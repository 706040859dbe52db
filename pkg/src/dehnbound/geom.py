"""Closed-form cusp geometry evaluated in interval arithmetic.

Everything here takes and returns :class:`~dehnbound.interval.Interval`.
Where a quantity is known to be monotone in an argument we evaluate it at
the appropriate endpoints (thin inputs) instead of pushing the whole box
through the formula; that removes the dependency blow-up of naive interval
evaluation and is what makes the search converge at reasonable depth.

Monotonicity facts used (each is checked numerically in the test suite):

* ``I(e2)`` is nondecreasing, so ``L = 2*pi/I`` is nonincreasing.  This holds
  because ``I(e2)`` is the integral of ``rel_length(e2, h) / h**2`` over h and
  the integrand is pointwise nondecreasing in e2.
* ``rel_length`` is nondecreasing in both arguments.
* The lens area ``overlap(a, b, c)`` increases with the radii and decreases
  with the center distance.
* The circumradius of ``O, (m, 0), (mt, h)`` increases with m, and when
  ``h**2 >= m**2 t (1 - t)`` and ``t <= 1/2`` it increases with h and
  decreases with t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .interval import Interval, IntervalDomainError, mul_down, pi

__all__ = [
    "OrthoParams",
    "LatticeParams",
    "AreaBound",
    "improvement_factor",
    "critical_length",
    "rel_length",
    "rel_length2",
    "overlap",
    "area_e2_packing",
    "area_no_mom2",
    "area_no_mom3",
    "area_bonus",
    "circumradius",
    "distinguished_points",
    "MOM_THRESHOLD",
]

# Below this ortholength a Mom-2 structure forces a filling of a known
# census manifold, which is what lets the area theorems assume "no Mom-2".
MOM_THRESHOLD = 1.5152

E2_PACKING = "E2Packing"
NO_MOM2 = "NoMom2"
NO_MOM3 = "NoMom3"
NO_MOM3_BONUS = "NoMom3Bonus"

_ONE = Interval(1.0)
_TWO = Interval(2.0)
_HALF = Interval(0.5)
_SQRT3 = Interval(3.0).sqrt()


def _iv(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(float(x))


# center-radius rounding can put the lower end of [1, x] an ulp below 1
_ONE_SLACK = 1.0 - 2.0 ** -40


def _e2_lower(e2: Interval, what: str) -> float:
    lo = e2.lower()
    if lo < _ONE_SLACK:
        raise IntervalDomainError(f"{what} needs e2 >= 1, got {e2}")
    return max(lo, 1.0)


def _thin(x: float) -> Interval:
    return Interval(x, 0.0)


@dataclass(frozen=True)
class OrthoParams:
    e2: Interval
    e3: Interval | None = None
    e4: Interval | None = None


@dataclass(frozen=True)
class LatticeParams:
    m: Interval
    t: Interval
    h: Interval


@dataclass(frozen=True)
class AreaBound:
    value: Interval
    hypothesis: str
    # which of the two minimum expressions was smaller, for the Mom-3 bound
    branch: str | None = None

    def lower(self) -> float:
        return self.value.lower()


# ---------------------------------------------------------------------------
# improved 6-theorem


def _sq_le_two(x: float) -> bool:
    # exact test of x*x <= 2 for a float x
    return Fraction(x) ** 2 <= 2


def improvement_small(e2: Interval) -> Interval:
    """``2 asin(e2/2) / e2``, the branch for ``e2 <= sqrt(2)``."""
    return _TWO * (e2 * _HALF).asin() / e2


def improvement_large(e2: Interval) -> Interval:
    """``(2 asin(sqrt(1 - 1/e2^2)) + e2^2 - 2 sqrt(e2^2 - 1)) / e2``, for ``e2 > sqrt(2)``."""
    e2sq = e2.sqr()
    inner = (_ONE - _ONE / e2sq).max0().sqrt().clamp(0.0, 1.0)
    return (_TWO * inner.asin(clip=True) + e2sq - _TWO * (e2sq - _ONE).max0().sqrt()) / e2


def _improvement_point(x: float) -> Interval:
    e = _thin(x)
    if _sq_le_two(x):
        return improvement_small(e)
    return improvement_large(e)


def improvement_factor(e2) -> Interval:
    e2 = _iv(e2)
    lo, hi = _e2_lower(e2, "improvement factor"), e2.upper()
    a = _improvement_point(lo)
    if lo == hi:
        return a
    b = _improvement_point(hi)
    return Interval.from_bounds(a.lower(), b.upper())


_L_CACHE: dict[tuple[float, float], Interval] = {}


def critical_length(e2) -> Interval:
    """Slope length beyond which every filling is hyperbolic."""
    e2 = _iv(e2)
    key = e2.bounds()
    got = _L_CACHE.get(key)
    if got is not None:
        return got
    lo, hi = _e2_lower(e2, "critical length"), key[1]
    two_pi = _TWO * pi()
    big = two_pi / _improvement_point(lo)
    out = big
    if hi != lo:
        small = two_pi / _improvement_point(hi)
        out = Interval.from_bounds(small.lower(), big.upper())
    if len(_L_CACHE) > 100_000:
        _L_CACHE.clear()
    _L_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# relative length functions


def _rel_length_point(e2: float, h: float) -> Interval:
    if h >= 1.0:
        return _ONE
    fe, fh = Fraction(e2), Fraction(h)
    above = 2 * fh * fh >= 1 or fh * fe >= 1
    if not above or h <= 0:
        return Interval(0.0)
    hh = _thin(h)
    return (_ONE - _TWO / _thin(e2) * (_ONE - hh.sqr()).max0().sqrt()).max0()


def rel_length(e2, h) -> Interval:
    """Piecewise ratio: 1 above h = 1, a square-root ramp above the threshold, else 0."""
    e2, h = _iv(e2), _iv(h)
    lo = _rel_length_point(e2.lower(), h.lower())
    hi = _rel_length_point(e2.upper(), h.upper())
    return Interval.from_bounds(lo.lower(), max(lo.upper(), hi.upper()))


def rel_length2(e2, h) -> Interval:
    e2, h = _iv(e2), _iv(h)
    a = e2 * (_ONE - h.sqr()).max0().sqrt()
    b = (_ONE - e2.sqr() * h.sqr()).max0().sqrt()
    return (_ONE - a - b).max0().clamp(0.0, 1.0)


# ---------------------------------------------------------------------------
# lens area


def _lens(a: Interval, b: Interval, c: Interval) -> Interval:
    """Lens area for (nearly) thin arguments with c > 0.

    The acos arguments and the Heron-type product are clamped to their valid
    ranges; with the clamps the formula is the true lens area for *every*
    configuration (disjoint gives 0, nested gives pi*min^2), so no branch
    decision is needed.
    """
    ca = ((c.sqr() + a.sqr() - b.sqr()) / (_TWO * c * a)).clamp(-1.0, 1.0)
    cb = ((c.sqr() + b.sqr() - a.sqr()) / (_TWO * c * b)).clamp(-1.0, 1.0)
    prod = ((a + b - c) * (c + a - b) * (c + b - a) * (c + a + b)).max0()
    val = a.sqr() * ca.acos(clip=True) + b.sqr() * cb.acos(clip=True) - _HALF * prod.sqrt()
    cap = pi() * (a if a.upper() <= b.lower() else b if b.upper() <= a.lower() else imin2(a, b)).sqr()
    return val.clamp(0.0, cap.upper())


def imin2(a: Interval, b: Interval) -> Interval:
    return Interval.from_bounds(min(a.lower(), b.lower()), min(a.upper(), b.upper()))


def _overlap_point(a: float, b: float, c: float) -> Interval:
    if a <= 0 or b <= 0:
        return Interval(0.0)
    A, B, C = _thin(a), _thin(b), _thin(c)
    if (A + B).certainly_le(C):
        return Interval(0.0)
    r = min(a, b)
    if c <= 0 or C.certainly_le((A - B) if a >= b else (B - A)):
        return pi() * _thin(r).sqr()
    return _lens(A, B, C)


def overlap(a, b, c) -> Interval:
    """Area of the intersection of disks of radius a and b with centers c apart."""
    a, b, c = _iv(a), _iv(b), _iv(c)
    alo, ahi = max(a.lower(), 0.0), max(a.upper(), 0.0)
    blo, bhi = max(b.lower(), 0.0), max(b.upper(), 0.0)
    clo, chi = max(c.lower(), 0.0), max(c.upper(), 0.0)
    lo = _overlap_point(alo, blo, chi).lower()
    hi = _overlap_point(ahi, bhi, clo).upper()
    return Interval.from_bounds(max(lo, 0.0), max(hi, 0.0))


# ---------------------------------------------------------------------------
# cusp area lower bounds


def area_e2_packing(e2) -> AreaBound:
    """Hexagonal packing of the two enlarged full-sized disks: sqrt(3) e2^2."""
    e2 = _iv(e2)
    return AreaBound(_SQRT3 * e2.sqr(), E2_PACKING)


def _disk(r: Interval) -> Interval:
    return _TWO * pi() * r.sqr()


def area_no_mom2(e2, e3) -> AreaBound:
    e2, e3 = _iv(e2), _iv(e3)
    _e2_lower(e2, "area bound")
    if e3.certainly_lt(e2):
        raise IntervalDomainError("need 1 <= e2 <= e3")
    r1 = e3 * _HALF
    r2 = e3 / e2 - r1
    val = (
        _disk(r1)
        + _disk(r2)
        - overlap(r1, r1, e2)
        - _TWO * overlap(r1, r2, _ONE / e2)
    )
    return AreaBound(val, NO_MOM2)


def _no_mom3_terms(e2: Interval, e3: Interval, e4: Interval, extra_23: bool = True) -> tuple[Interval, Interval]:
    r1 = e4 * _HALF
    r2 = e4 / e2 - r1
    r3 = e4 / e3 - r1
    base = _disk(r1) + _disk(r2) + _disk(r3)
    first = (
        base
        - overlap(r1, r1, e2)
        - overlap(r1, r1, e3)
        - _TWO * overlap(r1, r2, _ONE / e2)
        - _TWO * overlap(r1, r3, _ONE / e3)
    )
    if extra_23:
        first = first - overlap(r2, r3, _ONE / (e2 * e3))
    second = (
        base
        - _TWO * overlap(r1, r2, e3 / e2)
        - _TWO * overlap(r2, r3, _ONE / (e2 * e3))
        - _TWO * overlap(r3, r1, e2 / e3)
        - _TWO * overlap(r1, r2, _ONE / e2)
        - overlap(r1, r1, e2)
    )
    return first, second


def area_no_mom3(e2, e3, e4, extra_23: bool = True) -> AreaBound:
    """Minimum of the two worst-case overlap patterns for O(1), O(2), O(3) disks.

    With ``extra_23`` the first pattern also pays for one O(2)/O(3) overlap at
    center distance 1/(e2 e3).  Charging an extra overlap can only lower the
    bound, so it stays valid; it is the default because it reproduces the
    published 4.13103 at (1.26, 1.38, 1.38), whereas the bare two-triple
    pattern gives 4.17114 there.
    """
    e2, e3, e4 = _iv(e2), _iv(e3), _iv(e4)
    _e2_lower(e2, "area bound")
    if e3.certainly_lt(e2) or e4.certainly_lt(e3):
        raise IntervalDomainError("need 1 <= e2 <= e3 <= e4")
    first, second = _no_mom3_terms(e2, e3, e4, extra_23)
    if first.certainly_lt(second):
        branch = "first"
    elif second.certainly_lt(first):
        branch = "second"
    else:
        branch = "either"
    val = Interval.from_bounds(
        min(first.lower(), second.lower()), min(first.upper(), second.upper())
    )
    return AreaBound(val, NO_MOM3, branch)


def bonus_conditions(e2, e4) -> bool:
    """True when the extra O(4) disks are certainly usable."""
    e2, e4 = _iv(e2), _iv(e4)
    c1 = _TWO * e4.sqr() + _TWO * e4 - e2 * (e4.sqr() + e4 + _ONE)
    c2 = e2 + _ONE - e4.sqr()
    return c1.lower() >= 0.0 and c2.lower() >= 0.0


def bonus_radius(e2, e4) -> Interval:
    e2, e4 = _iv(e2), _iv(e4)
    return _ONE / (e2 * e4) - e4 / e2 + e4 * _HALF


def area_bonus(e2, e4, base: AreaBound, require_mom_range: bool = True) -> AreaBound:
    """Add the O(4) disk contribution when its hypotheses certainly hold.

    ``require_mom_range`` additionally insists on e4 < 1.5152, the range where a
    Mom-2 involving O(4) is itself a reducible case.  Falls back to ``base``.
    """
    e2, e4 = _iv(e2), _iv(e4)
    if not bonus_conditions(e2, e4):
        return base
    if require_mom_range and not e4.upper() < MOM_THRESHOLD:
        return base
    rb = bonus_radius(e2, e4)
    if not rb.lower() > 0.0:
        return base
    extra = _disk(rb) - _TWO * overlap(e4 * _HALF, rb, _ONE / e4)
    return AreaBound(base.value + extra, NO_MOM3_BONUS, base.branch)


# ---------------------------------------------------------------------------
# lattice triangle geometry


def _circ_formula(m: Interval, t: Interval, h: Interval) -> Interval:
    u = (m * (_ONE - t)).sqr() + h.sqr()
    v = (m * t).sqr() + h.sqr()
    return (u.sqrt() * v.sqrt()) / (_TWO * h)


def circumradius(m, t, h) -> Interval:
    """Circumradius of the triangle O, (m, 0), (mt, h)."""
    m, t, h = _iv(m), _iv(t), _iv(h)
    if m.lower() <= 0 or h.lower() <= 0:
        raise IntervalDomainError("circumradius needs m, h > 0")
    tlo, thi = t.bounds()
    if 0.0 <= tlo and thi <= 0.5:
        # t(1-t) is increasing on [0, 1/2]
        worst = (m.sqr() * (_thin(thi) * (_ONE - _thin(thi)))).upper()
        if mul_down(h.lower(), h.lower()) > worst:
            hi = _circ_formula(_thin(m.upper()), _thin(tlo), _thin(h.upper())).upper()
            lo = _circ_formula(_thin(m.lower()), _thin(thi), _thin(h.lower())).lower()
            return Interval.from_bounds(lo, hi)
    return _circ_formula(m, t, h)


def distinguished_points(m, t, h, e3) -> tuple[Interval, Interval, Interval]:
    """Distances from O of the three hexagon points for pairs (A,B), (B,B-A), (B-A,-A).

    For each pair the nearer of the two intersection points of the radius-e3
    circles around the pair.  With d the pair separation, the half chord is
    k = sqrt(e3^2 - d^2/4); O sits at height delta = m h / d above the line of
    the pair and at offset s from its midpoint, so the squared distance is
    (delta - k)^2 + s^2.
    """
    m, t, h, e3 = _iv(m), _iv(t), _iv(h), _iv(e3)
    if m.lower() <= 0 or h.lower() <= 0:
        raise IntervalDomainError("distinguished points need m, h > 0")
    mh = m * h
    e3sq = e3.sqr()
    ob_sq = (m * t).sqr() + h.sqr()           # |B|^2
    ab_sq = (m * (_ONE - t)).sqr() + h.sqr()  # |B - A|^2
    msq = m.sqr()
    out = []
    # (pair separation squared, |P1|^2 - |P2|^2)
    for d_sq, diff in ((ab_sq, ob_sq - msq), (msq, ob_sq - ab_sq), (ob_sq, ab_sq - msq)):
        if e3sq.certainly_lt(d_sq * Interval(0.25)):
            raise IntervalDomainError("circles of radius e3 do not meet")
        d = d_sq.sqrt()
        k = (e3sq - d_sq * Interval(0.25)).max0().sqrt()
        delta = mh / d
        s = diff / (_TWO * d)
        out.append(((delta - k).sqr() + s.sqr()).max0().sqrt())
    return out[0], out[1], out[2]


def hexagon_points_thin(m: float, t: float, h: float, e3: float) -> list[tuple[float, float]]:
    """Plain-float coordinates of the three distinguished points (for plotting and tests)."""
    A = (m, 0.0)
    B = (m * t, h)
    BA = (m * t - m, h)
    nA = (-m, 0.0)
    pts = []
    for p1, p2 in ((A, B), (B, BA), (BA, nA)):
        dx, dy = p2[0] - p1[0], p2[1] - p1[1]
        d = math.hypot(dx, dy)
        mx, my = (p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2
        k = math.sqrt(max(0.0, e3 * e3 - d * d / 4))
        nx, ny = -dy / d, dx / d
        c1 = (mx + k * nx, my + k * ny)
        c2 = (mx - k * nx, my - k * ny)
        pts.append(min(c1, c2, key=lambda p: math.hypot(*p)))
    return pts


def area_for_stage(hypothesis: str, e2: Interval, e3: Interval | None, e4: Interval | None) -> AreaBound:
    """Stage area lower bound valid over the whole (e2, e3, e4) box.

    The no-Mom-2 bound is nondecreasing in e3 and the no-Mom-3 bound is
    nondecreasing in e4, so those are evaluated at the smallest admissible
    value (which also respects e2 <= e3 <= e4).  The bonus term is not
    monotone in e4 and is evaluated over the whole e4 interval.
    """
    if hypothesis == E2_PACKING:
        return area_e2_packing(e2)
    e2lo = e2.lower()
    if hypothesis == NO_MOM2:
        e3lo = max(e3.lower(), e2lo)
        return area_no_mom2(e2, _thin(e3lo))
    e3 = Interval.from_bounds(max(e3.lower(), e2lo), max(e3.upper(), e2lo))
    e4lo = max(e4.lower(), e3.lower())
    base = area_no_mom3(e2, e3, _thin(e4lo))
    if hypothesis == NO_MOM3:
        return base
    e4eff = Interval.from_bounds(e4lo, max(e4.upper(), e4lo))
    return area_bonus(e2, e4eff, base)


__all__ += ["area_for_stage", "hexagon_points_thin", "bonus_conditions", "bonus_radius",
            "improvement_small", "improvement_large", "E2_PACKING", "NO_MOM2", "NO_MOM3",
            "NO_MOM3_BONUS"]
