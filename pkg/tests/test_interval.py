import math
import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnbound.interval import (
    INVALID,
    Interval,
    IntervalDomainError,
    add,
    arcsin,
    certainly_ge,
    certainly_lt,
    div,
    hull,
    lower,
    mul,
    pi,
    possibly_lt,
    split,
    sqr,
    sqrt,
    upper,
)

N_CASES = 100_000


def exact_bounds(iv):
    """The real set an interval denotes: [c - r, c + r] with no rounding."""
    c, r = Fraction(iv.center), Fraction(iv.radius)
    return c - r, c + r


def encloses(iv, exact):
    lo, hi = exact_bounds(iv)
    return lo <= exact <= hi


def rand_interval(rng, scale=None):
    e = rng.uniform(-8, 8) if scale is None else scale
    c = rng.choice((-1, 1)) * rng.uniform(0.5, 1.0) * 2.0 ** e
    r = abs(c) * rng.choice((0.0, 1e-16, 1e-9, 1e-3, 0.3)) * rng.random()
    return Interval(c, r)


def sample_points(rng, iv):
    lo, hi = exact_bounds(iv)
    return (lo, hi, lo + (hi - lo) * Fraction(rng.random()))


# -- examples ---------------------------------------------------------------


def test_add_examples():
    s = add(Interval(1.0), Interval(2.0))
    assert s.contains(3.0) and s.radius <= 2 * math.ulp(3.0)
    x = Interval(0.7, 0.01)
    assert (x + Interval(0.0)).lower() <= x.lower() and (x + Interval(0.0)).upper() >= x.upper()
    s = Interval(0.1) + Interval(0.2)
    assert encloses(s, Fraction(3, 10)) or encloses(s, Fraction(0.1) + Fraction(0.2))
    assert encloses(s, Fraction(0.1) + Fraction(0.2))
    assert s.radius > 0


def test_mul_div_sqr_examples():
    assert mul(Interval(2.0), Interval(3.0)).contains(6.0)
    q = div(Interval(1.0), Interval(3.0))
    assert encloses(q, Fraction(1, 3)) and q.radius > 0
    s = sqr(Interval(-1.0, 0.5))
    assert s.lower() >= 0.0
    assert s.lower() <= 0.25 or s.lower() == 0.0
    assert s.upper() >= 2.25


def test_div_by_zero_interval_raises():
    with pytest.raises(IntervalDomainError):
        Interval(1.0) / Interval(0.0, 1.0)


def test_overflow_gives_invalid():
    big = Interval(1e308)
    assert not (big * big).is_valid
    assert not (big + big).is_valid
    assert not INVALID.is_valid


def test_sqrt_examples():
    assert sqrt(Interval(4.0)).contains(2.0)
    r = sqrt(Interval(2.0))
    assert r.radius > 0
    assert Fraction(r.lower()) ** 2 <= 2 <= Fraction(r.upper()) ** 2
    assert sqrt(Interval(0.0)).contains(0.0)
    with pytest.raises(IntervalDomainError):
        sqrt(Interval(-1.0, 0.5))


def test_asin_examples():
    mp.mp.dps = 40
    assert arcsin(Interval(0.5)).lower() <= mp.pi / 6 <= arcsin(Interval(0.5)).upper()
    assert arcsin(Interval(1.0)).lower() <= mp.pi / 2 <= arcsin(Interval(1.0)).upper()
    r = arcsin(Interval(0.63))
    ref = mp.asin(mp.mpf(0.63))
    assert r.lower() <= ref <= r.upper()
    # frozen from the 40-digit oracle
    assert r.contains(0.6815532115631169)
    with pytest.raises(IntervalDomainError):
        arcsin(Interval(1.0, 0.1))


def test_pi_radius():
    p = pi()
    assert p.lower() <= mp.pi <= p.upper()
    assert p.radius <= 4 * math.ulp(math.pi)


def test_comparisons():
    assert certainly_lt(Interval(1.0, 0.1), Interval(2.0, 0.1))
    assert not certainly_lt(Interval(1.0, 0.6), Interval(2.0, 0.6))
    assert possibly_lt(Interval(1.0, 0.6), Interval(2.0, 0.6))
    assert certainly_ge(Interval(3.0), Interval(3.0))


def test_split_hull_lower():
    a, b = split(Interval(0.0, 1.0))
    assert a.lower() <= -1.0 and a.upper() >= 0.0
    assert b.lower() <= 0.0 and b.upper() >= 1.0
    assert lower(Interval(3.0, 0.5)) == 2.5
    assert upper(Interval(3.0, 0.5)) == 3.5


def test_render_roundtrip():
    x = Interval(0.1, 2.5e-17)
    assert str(x) == "0.1±2.5e-17"
    assert Interval.parse(str(x)) == x


def test_from_bounds_zero_lower_exact():
    x = Interval.from_bounds(0.0, 0.3)
    assert x.lower() == 0.0 and x.upper() >= 0.3


# -- containment soundness --------------------------------------------------


_BINARY = {
    "add": (lambda a, b: a + b, lambda x, y: x + y),
    "sub": (lambda a, b: a - b, lambda x, y: x - y),
    "mul": (lambda a, b: a * b, lambda x, y: x * y),
    "div": (lambda a, b: a / b, lambda x, y: x / y),
}


@pytest.mark.parametrize("name", sorted(_BINARY))
def test_binary_containment(name):
    iop, exact = _BINARY[name]
    rng = random.Random(hash(name) & 0xFFFF)
    bad = 0
    for k in range(N_CASES):
        # mix magnitudes and include cancellation cases
        if k % 4 == 0:
            e = rng.uniform(-4, 4)
            a, b = rand_interval(rng, e), rand_interval(rng, e)
        else:
            a, b = rand_interval(rng), rand_interval(rng)
        if name == "div" and b.lower() <= 0 <= b.upper():
            continue
        r = iop(a, b)
        pa, pb = sample_points(rng, a), sample_points(rng, b)
        for x in (pa[0], pa[1], pa[2]):
            y = pb[k % 3]
            if not encloses(r, exact(x, y)):
                bad += 1
    assert bad == 0


def test_sqr_containment():
    rng = random.Random(11)
    bad = 0
    for _ in range(N_CASES):
        a = rand_interval(rng) if rng.random() < 0.8 else Interval(rng.uniform(-1, 1), rng.uniform(0, 2))
        r = a.sqr()
        if r.lower() < 0:
            bad += 1
        for x in sample_points(rng, a):
            if not encloses(r, x * x):
                bad += 1
    assert bad == 0


def test_sqrt_containment():
    rng = random.Random(12)
    bad = 0
    for _ in range(N_CASES):
        a = rand_interval(rng)
        a = Interval(abs(a.center), min(a.radius, abs(a.center)) * 0.5)
        r = a.sqrt()
        lo, hi = exact_bounds(r)
        for x in sample_points(rng, a):
            # lo <= sqrt(x) <= hi  iff  lo^2 <= x <= hi^2 for lo, hi >= 0
            if not (max(lo, 0) ** 2 <= x <= hi * hi):
                bad += 1
    assert bad == 0


def test_asin_containment():
    mp.mp.dps = 30
    rng = random.Random(13)
    bad = 0
    for k in range(N_CASES):
        c = rng.uniform(-1, 1)
        if k % 10 == 0:
            c = math.copysign(1 - rng.random() * 1e-6, c)
        r = rng.random() * min(1 - abs(c), 1e-3 if k % 2 else 0.2)
        a = Interval(c, r)
        if a.lower() < -1 or a.upper() > 1:
            continue
        out = a.asin()
        lo, hi = exact_bounds(out)
        for x in sample_points(rng, a):
            v = mp.asin(mp.mpf(x.numerator) / x.denominator)
            if not mp.mpf(lo.numerator) / lo.denominator <= v <= mp.mpf(hi.numerator) / hi.denominator:
                bad += 1
    assert bad == 0


def test_asin_dense_grid():
    mp.mp.dps = 30
    for k in range(-2000, 2001):
        x = k / 2000
        r = Interval(x).asin()
        v = mp.asin(mp.mpf(x))
        assert r.lower() <= v <= r.upper()
        assert r.width() <= 16 * math.ulp(max(abs(float(v)), 1e-300)) + 1e-300


# -- inclusion monotonicity and predicates ----------------------------------


def _shrink(rng, a):
    """A random interval whose real set lies inside that of ``a``."""
    while True:
        u, v = sorted((rng.random(), rng.random()))
        c = a.center + a.radius * (u + v - 1)
        r = a.radius * (v - u) * 0.5
        x = Interval(c, r)
        lo, hi = exact_bounds(x)
        LO, HI = exact_bounds(a)
        if LO <= lo and hi <= HI:
            return x


def _inside(a, b):
    lo, hi = exact_bounds(a)
    LO, HI = exact_bounds(b)
    return LO <= lo and hi <= HI


def test_monotone_inclusion():
    rng = random.Random(21)
    for _ in range(20_000):
        A, B = rand_interval(rng), rand_interval(rng)
        a, b = _shrink(rng, A), _shrink(rng, B)
        assert _inside(a + b, A + B)
        assert _inside(a - b, A - B)
        assert _inside(a * b, A * B)
        assert _inside(a.sqr(), A.sqr())
        if not B.lower() <= 0 <= B.upper():
            assert _inside(a / b, A / B)
        if A.lower() >= 0:
            assert _inside(a.sqrt(), A.sqrt())


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
radii = st.floats(min_value=0, max_value=1e3, allow_nan=False)


@given(finite, radii, finite, radii)
@settings(max_examples=500, deadline=None)
def test_lt_never_both(c1, r1, c2, r2):
    a, b = Interval(c1, r1), Interval(c2, r2)
    assert not (certainly_lt(a, b) and certainly_lt(b, a))
    if certainly_lt(a, b):
        assert possibly_lt(a, b)


@given(finite, radii)
@settings(max_examples=500, deadline=None)
def test_split_covers(c, r):
    a = Interval(c, r)
    left, right = a.split()
    h = hull([left, right])
    assert _inside(a, h)
    # the halves meet at the midpoint and overlap by at most rounding
    assert left.upper() >= right.lower()
    assert left.upper() - right.lower() <= 4 * math.ulp(max(abs(c) + r, 1e-300))
