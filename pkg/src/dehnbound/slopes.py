"""Slopes on the cusp lattice and the Tool 1 counting bounds.

A slope (p, q) sits at the lattice point ``(p + q t) m, q h``; the improved
6-theorem says only slopes of length at most L(e2) can be exceptional.  For
a box of parameters the candidates for a given q are the p with
``|p + q t| <= B_q`` where B_q = sqrt(L^2 - q^2 h_lo^2) / m_lo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import critical_length
from .interval import (
    Interval,
    add_down,
    add_up,
    div_down,
    div_up,
    mul_down,
    mul_up,
    sqrt_up,
)

__all__ = [
    "Slope",
    "SlopeBounds",
    "slope_length_sq",
    "crude_slope_bound",
    "fancy_slope_bound",
    "intersection_number",
    "intersection_from_lengths",
    "max_slopes_for_delta",
    "DELTA_TABLE",
]

# largest possible number of slopes with pairwise intersection <= delta
DELTA_TABLE = (1, 3, 4, 6, 6, 8, 8, 10, 12, 12, 12)


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if self.p == 0 and self.q == 0:
            raise ValueError("(0, 0) is not a slope")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"slope ({self.p},{self.q}) is not primitive")

    @classmethod
    def make(cls, p: int, q: int) -> "Slope":
        """Normalized representative: q >= 0, and p > 0 when q == 0."""
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    def __str__(self):
        return f"({self.p},{self.q})"


def intersection_number(s1: Slope, s2: Slope) -> int:
    return abs(s1.p * s2.q - s2.p * s1.q)


def slope_length_sq(s: Slope, m, t, h) -> Interval:
    m, t, h = (x if isinstance(x, Interval) else Interval(float(x)) for x in (m, t, h))
    x = (Interval(float(s.p)) + Interval(float(s.q)) * t) * m
    return x.sqr() + (Interval(float(s.q)) * h).sqr()


def intersection_from_lengths(l1, l2, area) -> int:
    """Floor of an upper bound for l1 * l2 / area."""
    l1, l2, area = (x if isinstance(x, Interval) else Interval(float(x)) for x in (l1, l2, area))
    if not area.lower() > 0:
        raise ValueError("area must be positive")
    return math.floor((l1 * l2 / area).upper())


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def max_slopes_for_delta(delta: int) -> int:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if delta < len(DELTA_TABLE):
        return DELTA_TABLE[delta]
    p = delta + 1
    while not _is_prime(p):
        p += 1
    return p + 1


@dataclass(frozen=True)
class SlopeBounds:
    max_count: int
    max_intersection: int
    per_q_counts: dict = field(default_factory=dict)
    # explicit candidates with the t-range on which each can occur (fancy only)
    candidates: tuple = ()

    def ok(self, count_cap: int = 10, delta_cap: int = 8) -> bool:
        return self.max_count <= count_cap and self.max_intersection <= delta_cap

    def to_json(self) -> dict:
        return {
            "count": self.max_count,
            "max_int": self.max_intersection,
            "per_q": {str(k): v for k, v in sorted(self.per_q_counts.items())},
        }


def _radius_bounds(L_up: float, m_lo: float, h_lo: float,
                   m_hi: float | None = None, area_lo: float = 0.0) -> list[float]:
    """Upper bounds B_q for q = 1, 2, ... while q h_lo can still be within L.

    B_q(m)^2 = (L^2 - q^2 h^2) / m^2 with h >= h_lo and h >= A / m.  The first
    constraint alone gives the classic bound at m_lo.  The second gives
    ``g(u) = L^2 u - q^2 A^2 u^2`` with u = 1/m^2, a concave quadratic maximised
    over [1/m_hi^2, 1/m_lo^2]; the smaller of the two maxima is kept.
    """
    lsq = mul_up(L_up, L_up)
    use_area = area_lo > 0 and m_hi is not None and m_hi >= m_lo
    if use_area:
        Lsq = Interval.from_bounds(lsq, lsq)
        u_lo = div_down(1.0, mul_up(m_hi, m_hi))
        u_hi = div_up(1.0, mul_down(m_lo, m_lo))
        asq = mul_down(area_lo, area_lo)
    out = []
    q = 1
    while True:
        qh = mul_down(float(q), h_lo)
        r = add_up(lsq, -mul_down(qh, qh))
        if r < 0:
            break
        b2 = div_up(r, mul_down(m_lo, m_lo))
        if use_area:
            c = mul_down(float(q * q), asq)
            # c <= q^2 A^2, so g with c bounds the true g from above
            if c > 0 and div_down(lsq, 2.0 * c) >= u_hi:
                u = Interval.from_bounds(div_down(1.0, mul_up(m_lo, m_lo)), u_hi)
            elif c > 0 and div_up(lsq, 2.0 * c) <= u_lo:
                u = Interval.from_bounds(u_lo, div_up(1.0, mul_down(m_hi, m_hi)))
            else:
                u = None
            if c <= 0:
                g = b2
            elif u is None:
                g = div_up(mul_up(lsq, lsq), mul_down(4.0, c))
            else:
                g = (Lsq * u - Interval(c) * u.sqr()).upper()
            if g < 0:
                break
            b2 = min(b2, g)
        out.append(sqrt_up(b2))
        q += 1
    return out


def _coprime_in_window(n: int, q: int) -> int:
    """Most integers coprime to q among n consecutive integers."""
    if q == 1:
        return n
    phi = sum(1 for r in range(q) if math.gcd(r, q) == 1)
    full, rest = divmod(n, q)
    return full * phi + min(rest, phi)


def _candidates(L_up, m_lo, h_lo, t_lo, t_hi, with_unit=True, m_hi=None, area_lo=0.0):
    """All slopes that can have length <= L somewhere in the box, each with its t-range."""
    out = []
    if with_unit:
        out.append((Slope(1, 0), t_lo, t_hi))
    for q, B in enumerate(_radius_bounds(L_up, m_lo, h_lo, m_hi, area_lo), start=1):
        # p + q t in [-B, B] for some t in [t_lo, t_hi]
        p_min = math.ceil(add_down(-B, -mul_up(float(q), t_hi)))
        p_max = math.floor(add_up(B, -mul_down(float(q), t_lo)))
        for p in range(p_min, p_max + 1):
            if math.gcd(p, q) != 1:
                continue
            a = max(t_lo, div_down(add_down(-B, -float(p)), float(q)))
            b = min(t_hi, div_up(add_up(B, -float(p)), float(q)))
            if a <= b:
                out.append((Slope(p, q), a, b))
    return out


def _max_delta(cands) -> int:
    best = 0
    n = len(cands)
    for i in range(n):
        s1, a1, b1 = cands[i]
        for j in range(i + 1, n):
            s2, a2, b2 = cands[j]
            if a1 <= b2 and a2 <= b1:
                d = abs(s1.p * s2.q - s2.p * s1.q)
                if d > best:
                    best = d
    return best


def _length_cap(L_up: float, area_lo: float) -> int | None:
    if area_lo <= 0:
        return None
    return math.floor(div_up(mul_up(L_up, L_up), area_lo))


def _lower(x) -> float:
    if isinstance(x, Interval):
        return x.lower()
    if isinstance(x, tuple):
        return float(x[0])
    return float(x)


def _upper(x) -> float:
    if isinstance(x, Interval):
        return x.upper()
    if isinstance(x, tuple):
        return float(x[1])
    return float(x)


def crude_slope_bound(e2, m, h_lower, area_lower=None) -> SlopeBounds:
    """t-independent slope count and intersection bound.

    Per q the window ``|p + q t| <= B_q`` has length 2 B_q so holds at most
    floor(2 B_q) + 1 integers, of which at most the coprime-window count are
    prime to q.  The intersection bound enumerates explicit candidates over
    the whole t range [0, 1/2] and is capped by L^2 / (m h).  With an area
    lower bound A the windows also use h >= A / m at each m (see
    ``_radius_bounds``).
    """
    L_up = critical_length(e2).upper()
    m_lo, m_hi = _lower(m), _upper(m)
    h_lo = _lower(h_lower)
    area_lo = 0.0 if area_lower is None else max(_lower(area_lower), 0.0)
    per_q = {0: 1}
    for q, B in enumerate(_radius_bounds(L_up, m_lo, h_lo, m_hi, area_lo), start=1):
        n = math.floor(mul_up(2.0, B)) + 1
        per_q[q] = _coprime_in_window(n, q)
    cands = _candidates(L_up, m_lo, h_lo, 0.0, 0.5, True, m_hi, area_lo)
    delta = _max_delta(cands)
    cap = _length_cap(L_up, max(area_lo, mul_down(m_lo, h_lo)))
    if cap is not None:
        delta = min(delta, cap)
    return SlopeBounds(sum(per_q.values()), delta, per_q)


def fancy_slope_bound(e2, m, t, h, area_lower=None) -> SlopeBounds:
    """Explicit candidate enumeration using the actual t range.

    ``max_count`` is the largest number of candidates simultaneously possible
    at a single t (a sweep over the t-ranges), and ``per_q_counts`` is the
    split by q at a maximizing t.  The slope (1, 0) counts only if m can be
    within L.  ``max_intersection`` is taken over pairs that can coexist.
    """
    L_up = critical_length(e2).upper()
    m_lo, m_hi = _lower(m), _upper(m)
    t_lo, t_hi = max(_lower(t), 0.0), min(_upper(t), 0.5)
    h_lo = _lower(h)
    area_lo = 0.0
    if area_lower is not None:
        area_lo = _lower(area_lower)
        if area_lo > 0:
            h_lo = max(h_lo, div_down(area_lo, m_hi))
    unit = mul_down(m_lo, m_lo) <= mul_up(L_up, L_up)
    cands = _candidates(L_up, m_lo, h_lo, t_lo, t_hi, unit, m_hi, area_lo)

    # sweep: the max overlap of closed intervals is attained at some left end
    best_t, best = t_lo, 0
    for _, a, _b in cands:
        c = sum(1 for _, a2, b2 in cands if a2 <= a <= b2)
        if c > best:
            best, best_t = c, a
    per_q: dict[int, int] = {q: 0 for q in range(4)}
    for s, a, b in cands:
        if a <= best_t <= b:
            per_q[s.q] = per_q.get(s.q, 0) + 1

    delta = _max_delta(cands)
    cap = _length_cap(L_up, max(area_lo, mul_down(m_lo, h_lo)))
    if cap is not None:
        delta = min(delta, cap)
    return SlopeBounds(best, delta, per_q, tuple(s for s, _, _ in cands))
