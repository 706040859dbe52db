import math
import random

import mpmath as mp
import pytest
from scipy.integrate import quad

import oracle as O
from dehnbound import geom
from dehnbound.interval import Interval, IntervalDomainError

SQRT2 = math.sqrt(2)


def mpin(iv, x):
    return iv.lower() <= x <= iv.upper()


# -- improvement factor and critical length ---------------------------------


def test_improvement_at_1():
    assert mpin(geom.improvement_factor(Interval(1.0)), mp.pi / 3)
    L = geom.critical_length(Interval(1.0))
    assert mpin(L, 6) and L.width() < 1e-12


def test_improvement_at_2():
    ref = (2 * mp.pi / 3 + 4 - 2 * mp.sqrt(3)) / 2
    assert mpin(geom.improvement_factor(Interval(2.0)), ref)
    L = geom.critical_length(Interval(2.0))
    assert mpin(L, 6 * mp.pi / (mp.pi + 6 - 3 * mp.sqrt(3)))
    assert L.upper() ** 2 <= 23


def test_branch_agreement_at_sqrt2():
    x = Interval(SQRT2)
    a = geom.improvement_small(x)
    b = geom.improvement_large(x)
    assert a.lower() <= b.upper() and b.lower() <= a.upper()
    assert a.width() < 1e-10 and b.width() < 1e-10
    assert abs(a.center - b.center) < 1e-10


def test_straddling_sqrt2_is_hull():
    x = Interval.from_bounds(1.41, 1.42)
    iv = geom.improvement_factor(x)
    for e in (1.41, SQRT2, 1.42):
        assert mpin(iv, O.improvement(e))


def test_improvement_oracle_grid():
    for k in range(0, 301):
        e2 = 1.0 + k / 100
        assert mpin(geom.improvement_factor(Interval(e2)), O.improvement(e2))
        assert mpin(geom.critical_length(Interval(e2)), O.crit_length(e2))


def test_critical_length_nonincreasing():
    vals = [geom.critical_length(Interval(1.0 + k / 10)) for k in range(21)]
    for a, b in zip(vals, vals[1:]):
        assert b.upper() <= a.upper() and b.lower() <= a.lower()


def test_improvement_rejects_e2_below_1():
    with pytest.raises(IntervalDomainError):
        geom.improvement_factor(Interval(0.9))


# -- RelLength ----------------------------------------------------------------


def test_rel_length_examples():
    for e2 in (1.0, 1.3, 2.0):
        assert geom.rel_length(Interval(e2), Interval(1.5)).contains(1.0)
    r = geom.rel_length(Interval(1.0), Interval(0.5))
    assert r.contains(0.0) and r.upper() == 0.0
    r2 = geom.rel_length2(Interval(1.2), Interval(0.9))
    assert mpin(r2, O.rel_length2(1.2, 0.9))


def test_rel_length_oracle_grid():
    rng = random.Random(3)
    for _ in range(2000):
        e2, h = rng.uniform(1, 2), rng.uniform(0.3, 1.2)
        assert mpin(geom.rel_length(Interval(e2), Interval(h)), O.rel_length(e2, h))
        assert mpin(geom.rel_length2(Interval(e2), Interval(h)), O.rel_length2(e2, h))


def test_rel_length_thick_inputs_enclose():
    rng = random.Random(4)
    for _ in range(500):
        e2, h = rng.uniform(1, 2), rng.uniform(0.3, 1.2)
        de, dh = rng.uniform(0, 0.05), rng.uniform(0, 0.05)
        iv = geom.rel_length(Interval(e2, de), Interval(h, dh))
        for _ in range(5):
            x, y = e2 + de * rng.uniform(-1, 1), h + dh * rng.uniform(-1, 1)
            if x >= 1 and y > 0:
                assert mpin(iv, O.rel_length(x, y))


@pytest.mark.parametrize("e2", [1.0, 1.2, SQRT2, 1.7, 2.0])
def test_rel_length_integral_identity(e2):
    def f(h):
        return e2 * geom.rel_length(Interval(e2), Interval(h)).center / (h * h)

    start = max(min(1 / SQRT2, 1 / e2), math.sqrt(max(0.0, 1 - e2 * e2 / 4)))
    val, err = quad(f, start, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    val += e2  # the h >= 1 tail integrates to e2 exactly
    target = geom.improvement_factor(Interval(e2)).center * e2
    assert abs(val - target) < 1e-6


def test_rel_length2_dominates_at_threshold():
    rng = random.Random(5)
    for _ in range(2000):
        e2 = rng.uniform(1, SQRT2)
        h0 = math.sqrt(1 - e2 * e2 / 4)
        h = rng.uniform(h0, 1.0)
        assert O.rel_length2(e2, h) >= O.rel_length(e2, h) - mp.mpf(10) ** -30
        r1 = geom.rel_length(Interval(e2), Interval(h))
        r2 = geom.rel_length2(Interval(e2), Interval(h))
        assert r2.upper() >= r1.lower()
    for e2 in (1.0, 1.2, 1.4):
        h0 = math.sqrt(1 - e2 * e2 / 4)
        assert abs(O.rel_length(e2, h0)) < 1e-12 and abs(O.rel_length2(e2, h0)) < 1e-12


# -- overlap ------------------------------------------------------------------


def test_overlap_examples():
    assert geom.overlap(0.5, 0.5, 1.0).contains(0.0)
    assert geom.overlap(0.5, 0.5, 1.0).upper() == 0.0
    assert mpin(geom.overlap(1.0, 1.0, 0.0), mp.pi)
    o = geom.overlap(1.0, 1.0, 1.0)
    assert mpin(o, 2 * mp.pi / 3 - mp.sqrt(3) / 2)
    assert abs(o.center - 1.2284) < 1e-4


def test_overlap_contained():
    o = geom.overlap(0.2, 1.0, 0.5)
    assert mpin(o, mp.pi * mp.mpf(0.2) ** 2)


def test_overlap_vs_quadrature():
    rng = random.Random(6)
    for _ in range(1000):
        a, b = rng.uniform(0.05, 1.5), rng.uniform(0.05, 1.5)
        c = rng.uniform(0, a + b + 0.2)
        o = geom.overlap(a, b, c)
        ref = O.lens(a, b, c)
        assert abs(o.center - ref) < 1e-3
        assert o.lower() - 1e-12 <= ref <= o.upper() + 1e-12


def test_overlap_thick_encloses():
    rng = random.Random(7)
    for _ in range(300):
        a, b = rng.uniform(0.1, 1), rng.uniform(0.1, 1)
        c = rng.uniform(0, a + b)
        w = rng.uniform(0, 0.02)
        o = geom.overlap(Interval(a, w), Interval(b, w), Interval(c, w))
        for _ in range(4):
            x, y, z = (v + w * rng.uniform(-1, 1) for v in (a, b, c))
            if x > 0 and y > 0 and z >= 0:
                assert mpin(o, O.lens(x, y, z))


def test_overlap_lemma_monotone():
    """Bigger radii and a longer linear overlap never shrink the lens."""
    rng = random.Random(8)
    bad = 0
    for _ in range(10_000):
        a2, b2 = rng.uniform(0.05, 1.2), rng.uniform(0.05, 1.2)
        a1, b1 = a2 + rng.uniform(0, 0.5), b2 + rng.uniform(0, 0.5)
        c2 = rng.uniform(0, a2 + b2)
        lin2 = a2 + b2 - c2
        lin1 = lin2 + rng.uniform(0, 0.5)
        c1 = a1 + b1 - lin1
        if c1 < 0:
            continue
        o1, o2 = geom.overlap(a1, b1, c1), geom.overlap(a2, b2, c2)
        if o1.center < o2.center - 1e-12:
            bad += 1
    assert bad == 0


def test_overlap_triple_lemma():
    """Larger orthoclass indices give less overlap."""
    rng = random.Random(9)
    idx = (1, 2, 3)
    bad = 0
    cases = 0
    while cases < 10_000:
        e2, e3, e4 = sorted(rng.uniform(1.0, 1.6) for _ in range(3))
        e = {1: 1.0, 2: e2, 3: e3}

        def R(x):
            return e4 / e[x] - e4 / 2

        a, b, c = (rng.choice(idx) for _ in range(3))
        d, f_, g = rng.randint(1, a), rng.randint(1, b), rng.randint(1, c)
        big = geom.overlap(R(a), R(b), e[c] / (e[a] * e[b]))
        small = geom.overlap(R(d), R(f_), e[g] / (e[d] * e[f_]))
        if big.center > small.center + 1e-12:
            bad += 1
        cases += 1
    assert bad == 0


# -- area bounds --------------------------------------------------------------


def test_area_packing():
    assert mpin(geom.area_e2_packing(Interval(2.0)).value, 4 * mp.sqrt(3))
    assert mpin(geom.area_e2_packing(Interval(1.0)).value, mp.sqrt(3))
    assert mpin(geom.area_e2_packing(Interval(1.5)).value, 2.25 * mp.sqrt(3))
    assert geom.area_e2_packing(Interval(1.5)).hypothesis == geom.E2_PACKING


def test_area_no_mom2():
    ab = geom.area_no_mom2(Interval(1.0), Interval(1.0))
    assert mpin(ab.value, mp.pi)
    assert ab.hypothesis == geom.NO_MOM2
    ab = geom.area_no_mom2(Interval(1.0), Interval(1.5152))
    assert mpin(ab.value, O.area_no_mom2(1.0, 1.5152))
    with pytest.raises(IntervalDomainError):
        geom.area_no_mom2(Interval(1.3), Interval(1.2))


def test_area_no_mom2_oracle_and_monotone_in_e3():
    for e2 in (1.0, 1.1, 1.25, 1.4):
        prev = None
        for k in range(21):
            e3 = e2 + (1.6 - e2) * k / 20
            v = geom.area_no_mom2(Interval(e2), Interval(e3)).value
            assert mpin(v, O.area_no_mom2(e2, e3))
            if prev is not None:
                assert v.center >= prev - 1e-12
            prev = v.center


def test_area_no_mom3_tangent():
    ab = geom.area_no_mom3(Interval(1.0), Interval(1.0), Interval(1.0))
    assert mpin(ab.value, 3 * mp.pi / 2)


def test_area_no_mom3_min_selection():
    # first pattern smaller
    ab = geom.area_no_mom3(Interval(1.26), Interval(1.38), Interval(1.38))
    f, s = O.no_mom3_terms(1.26, 1.38, 1.38)
    assert f < s and ab.branch == "first" and mpin(ab.value, f)
    # second pattern smaller
    ab = geom.area_no_mom3(Interval(1.0), Interval(1.2), Interval(1.5))
    f, s = O.no_mom3_terms(1.0, 1.2, 1.5)
    assert s < f and ab.branch == "second" and mpin(ab.value, s)


def test_area_no_mom3_monotone_in_e4():
    for e2, e3 in ((1.0, 1.0), (1.1, 1.2), (1.26, 1.38), (1.4, 1.5)):
        prev = None
        for k in range(21):
            e4 = e3 + (51 / 32 - e3) * k / 20
            v = geom.area_no_mom3(Interval(e2), Interval(e3), Interval(e4)).value
            assert mpin(v, O.area_no_mom3(e2, e3, e4))
            if prev is not None:
                assert v.center >= prev - 1e-12
            prev = v.center


def test_area_no_mom3_without_extra_overlap():
    # the bare first pattern; the extra O(2)/O(3) charge only lowers it
    bare = geom.area_no_mom3(Interval(1.26), Interval(1.38), Interval(1.38), extra_23=False)
    full = geom.area_no_mom3(Interval(1.26), Interval(1.38), Interval(1.38))
    assert mpin(bare.value, O.area_no_mom3(1.26, 1.38, 1.38, extra_23=False))
    assert full.value.upper() <= bare.value.lower()


def test_bonus_conditions():
    # e4 below the golden ratio satisfies the first condition
    e2 = e4 = 1.6
    assert 2 * e4 * e4 + 2 * e4 - e2 * (e4 * e4 + e4 + 1) > 0
    assert not geom.bonus_conditions(Interval(1.0), Interval(1.55))
    base = geom.area_no_mom3(Interval(1.0), Interval(1.0), Interval(1.55))
    assert geom.area_bonus(Interval(1.0), Interval(1.55), base) is base


def test_area_example_three():
    base = geom.area_no_mom3(Interval(1.26), Interval(1.38), Interval(1.38))
    tot = geom.area_bonus(Interval(1.26), Interval(1.38), base)
    assert tot.hypothesis == geom.NO_MOM3_BONUS
    ref = O.area_no_mom3(1.26, 1.38, 1.38) + O.bonus(1.26, 1.38)
    assert mpin(tot.value, ref)
    assert 4.13102 <= tot.value.lower() <= 4.13110


def test_area_for_stage_covers_box():
    rng = random.Random(10)
    for _ in range(200):
        e2 = rng.uniform(1.0, 1.35)
        e3 = rng.uniform(e2, 1.45)
        e4 = rng.uniform(e3, 1.5)
        w = 0.01
        box = [Interval.from_bounds(x, x + w) for x in (e2, e3, e4)]
        ab = geom.area_for_stage(geom.NO_MOM3_BONUS, *box)
        for _ in range(3):
            x = e2 + w * rng.random()
            y = max(x, e3 + w * rng.random())
            z = max(y, e4 + w * rng.random())
            pt = geom.area_for_stage(geom.NO_MOM3_BONUS, Interval(x), Interval(y), Interval(z))
            assert ab.value.lower() <= pt.value.lower() + 1e-12


# -- lattice geometry ---------------------------------------------------------


def test_circumradius_examples():
    assert mpin(geom.circumradius(Interval(1.0), Interval(0.5), Interval(math.sqrt(3) / 2)), 1 / mp.sqrt(3))
    m, h = 2.0, 1.5
    assert mpin(geom.circumradius(Interval(m), Interval(0.0), Interval(h)), mp.sqrt(m * m + h * h) / 2)
    A = 4.131031271942631
    R = geom.circumradius(Interval(2.19463), Interval(0.5), Interval(A / 2.19463))
    assert abs(R.center - 1.26101) < 1e-4


def test_circumradius_oracle_and_boxes():
    rng = random.Random(11)
    for _ in range(1000):
        m, t, h = rng.uniform(1, 2.5), rng.uniform(0, 0.5), rng.uniform(1.7, 4)
        assert mpin(geom.circumradius(Interval(m), Interval(t), Interval(h)), O.circumradius(m, t, h))
        w = 0.01
        R = geom.circumradius(Interval.from_bounds(m, m + w), Interval.from_bounds(t, min(t + w, 0.5)),
                              Interval.from_bounds(h, h + w))
        for _ in range(3):
            x, y, z = m + w * rng.random(), min(t + w * rng.random(), 0.5), h + w * rng.random()
            assert mpin(R, O.circumradius(x, y, z))


def test_distinguished_equilateral():
    # unit circles about A and B meet at O and at A + B
    d = geom.distinguished_points(Interval(1.0), Interval(0.5), Interval(math.sqrt(3) / 2), Interval(1.0))
    for x in d:
        assert x.lower() <= 1e-7


def test_distinguished_oracle():
    rng = random.Random(12)
    checked = 0
    while checked < 1000:
        m, t, h = rng.uniform(1, 2.5), rng.uniform(0, 0.5), rng.uniform(1.7, 4)
        R = float(O.circumradius(m, t, h))
        e3 = R + rng.uniform(0.001, 0.5)
        got = geom.distinguished_points(Interval(m), Interval(t), Interval(h), Interval(e3))
        ref = O.distinguished(m, t, h, e3)
        for g, r in zip(got, ref):
            assert g.lower() - 1e-9 <= r <= g.upper() + 1e-9
        pts = geom.hexagon_points_thin(m, t, h, e3)
        for (x, y), r in zip(pts, ref):
            assert abs(math.hypot(x, y) - r) < 1e-9
        checked += 1


def test_distinguished_example_three_golden():
    A = 4.131031271942631
    m = 2.19463
    d = geom.distinguished_points(Interval(m), Interval(0.5), Interval(A / m), Interval(1.38))
    ref = O.distinguished(m, 0.5, A / m, 1.38)
    for g, r in zip(d, ref):
        assert mpin(g, r)
    # frozen from the oracle; every distance is well below e2 = 1.26
    assert abs(d[0].center - 1.0490085405) < 1e-8
    assert abs(d[1].center - 1.0454969319) < 1e-8
    assert all(x.upper() < 1.26 for x in d)
