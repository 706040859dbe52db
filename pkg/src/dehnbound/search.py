"""Staged branch-and-bound over the six cusp parameters.

A box is a product of closed float ranges for (e2, e3, e4, m, t, h).  Each
box is analyzed by the elimination tools in a fixed order; when nothing
applies it is bisected at the float midpoint of one dimension, so children
tile their parent exactly and a leaf is reconstructible from the root region
and its id alone.  An id is a sequence of two-character tokens
``<dim index><L|R>``, e.g. ``"3L0R"`` means "lower half in m, then upper
half in e2".

Monotonicity shortcuts are structural rather than bookkeeping: Tool 1 only
ever reads the lower end of h (so an elimination covers all larger h in the
same slice), and the area bound is evaluated at the lower end of e4 (so a
slice that had enough area is never re-examined for larger e4).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from multiprocessing import Pool
from typing import Callable, Iterable

from . import geom
from .interval import Interval, div_down, mul_down, mul_up, sqrt_down
from .slopes import crude_slope_bound, fancy_slope_bound

DIMS = ("e2", "e3", "e4", "m", "t", "h")
_DIM_INDEX = {d: i for i, d in enumerate(DIMS)}

E3_CAP = 51 / 32  # exactly representable

INFEASIBLE = "Infeasible"
AREA = "AreaContradiction"
CIRCUM = "CircumradiusContradiction"
MOM2 = "Mom2Triggered"
BOUNDS_OK = "BoundsOK"
SPLIT = "Split"
UNRESOLVED = "Unresolved"
TERMINAL = (INFEASIBLE, AREA, CIRCUM, MOM2, BOUNDS_OK)
VERDICTS = TERMINAL + (UNRESOLVED,)


class RegionError(ValueError):
    pass


@dataclass(frozen=True)
class StageSpec:
    name: str
    area: str
    tool2: bool
    tool3: bool
    # default ranges; None means the parameter is not used by the stage
    ranges: dict
    # dimensions that may not be subdivided (thin by construction)
    fixed: tuple = ()


def _stage(name, area, tool2, tool3, e2, e3, e4):
    ranges = {"e2": e2, "e3": e3, "e4": e4, "m": (None, 2.5), "t": (0.0, 0.5), "h": (1.7, 4.0)}
    return StageSpec(name, area, tool2, tool3, ranges)


# e3/e4 lower ends of None mean "the current lower end of the previous parameter"
STAGES = {
    "slopes1": _stage("slopes1", geom.E2_PACKING, True, False, (1.4, 2.0), None, None),
    "slopes2": _stage("slopes2", geom.NO_MOM2, False, False, (1.0, 1.4), (E3_CAP, E3_CAP), None),
    "slopes3": _stage("slopes3", geom.NO_MOM2, True, True, (1.0, 1.4), (1.5, E3_CAP), None),
    "slopes4": _stage("slopes4", geom.NO_MOM3, True, True, (1.0, 1.4), (None, 1.5), (E3_CAP, E3_CAP)),
    "slopes5": _stage("slopes5", geom.NO_MOM3_BONUS, True, True, (1.0, 1.4), (None, 1.5), (None, E3_CAP)),
}


@dataclass(frozen=True)
class ParamBox:
    """Closed float ranges per dimension; ``None`` marks an unused parameter."""

    bounds: tuple
    id: str = ""
    stage: str = "slopes5"

    def get(self, dim: str):
        return self.bounds[_DIM_INDEX[dim]]

    def interval(self, dim: str) -> Interval | None:
        b = self.get(dim)
        if b is None:
            return None
        return Interval.from_bounds(*b)

    @property
    def depth(self) -> int:
        return len(self.id) // 2

    def split(self, dim: str) -> tuple["ParamBox", "ParamBox"]:
        i = _DIM_INDEX[dim]
        lo, hi = self.bounds[i]
        mid = lo * 0.5 + hi * 0.5
        if not lo < mid < hi:
            raise ValueError(f"cannot split {dim} range [{lo!r}, {hi!r}]")
        left = list(self.bounds)
        right = list(self.bounds)
        left[i] = (lo, mid)
        right[i] = (mid, hi)
        return (
            ParamBox(tuple(left), self.id + f"{i}L", self.stage),
            ParamBox(tuple(right), self.id + f"{i}R", self.stage),
        )

    def to_json(self) -> dict:
        return {d: (list(b) if b is not None else None) for d, b in zip(DIMS, self.bounds)}


def id_tokens(box_id: str) -> list[tuple[int, str]]:
    if len(box_id) % 2:
        raise ValueError(f"malformed box id {box_id!r}")
    out = []
    for k in range(0, len(box_id), 2):
        d, s = box_id[k], box_id[k + 1]
        if d not in "012345" or s not in "LR":
            raise ValueError(f"malformed box id {box_id!r}")
        out.append((int(d), s))
    return out


def box_from_id(root: ParamBox, box_id: str) -> ParamBox:
    box = root
    for d, s in id_tokens(box_id):
        left, right = box.split(DIMS[d])
        box = left if s == "L" else right
    return box


def make_region(stage: str, overrides: dict | None = None) -> ParamBox:
    """Root box for a stage, with optional ``{dim: (lo, hi)}`` overrides."""
    if stage not in STAGES:
        raise RegionError(f"unknown stage {stage!r}")
    spec = STAGES[stage]
    overrides = dict(overrides or {})
    for k in overrides:
        if k not in DIMS:
            raise RegionError(f"unknown parameter {k!r}")
    r = dict(spec.ranges)
    out = {}
    for d in DIMS:
        default = r[d]
        if d in overrides:
            if default is None:
                raise RegionError(f"{stage} does not use {d}")
            lo, hi = map(float, overrides[d])
            if not lo <= hi:
                raise RegionError(f"empty range for {d}: {lo}:{hi}")
            dlo, dhi = _resolve(d, default, out)
            if lo < dlo or hi > dhi:
                raise RegionError(f"{d}={lo}:{hi} outside {stage} range [{dlo}, {dhi}]")
            out[d] = (lo, hi)
        elif default is None:
            out[d] = None
        else:
            out[d] = _resolve(d, default, out)
    return ParamBox(tuple(out[d] for d in DIMS), "", stage)


def _resolve(d, default, done):
    lo, hi = default
    if lo is None:
        prev = {"e3": "e2", "e4": "e3", "m": "e2"}[d]
        p = done.get(prev)
        if p is None:
            p = done["e2"]
        lo = p[0]
    return (float(lo), float(hi))


# ---------------------------------------------------------------------------
# analysis of one box


@dataclass
class Verdict:
    kind: str
    witnesses: dict = field(default_factory=dict)

    def to_json(self):
        return {"verdict": self.kind, "witnesses": self.witnesses}


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 40
    workers: int = 1
    count_cap: int = 10
    delta_cap: int = 8
    # number of independent subtrees handed to workers
    tasks: int = 64


_AREA_CACHE: dict = {}


def _area(spec: StageSpec, e2, e3, e4) -> geom.AreaBound:
    key = (spec.area, e2, e3, e4)
    got = _AREA_CACHE.get(key)
    if got is None:
        if len(_AREA_CACHE) > 200_000:
            _AREA_CACHE.clear()
        got = geom.area_for_stage(
            spec.area,
            Interval.from_bounds(*e2),
            Interval.from_bounds(*e3) if e3 is not None else None,
            Interval.from_bounds(*e4) if e4 is not None else None,
        )
        _AREA_CACHE[key] = got
    return got


def analyze_box(box: ParamBox, cfg: SearchConfig = SearchConfig()) -> Verdict:
    """Run the elimination tools on one box.

    Order: ordering feasibility; Tool 1 with h raised to area / m; Tool 2;
    Tool 3.  If all fail, h is further raised to the lattice bound
    ``|(mt, h)| >= m`` and the tools are retried (``lattice_h`` in the
    witnesses); a box lying entirely below that bound is Infeasible.  Each
    verdict is a valid elimination on its own, so the order only decides which
    reason is recorded.
    """
    spec = STAGES.get(box.stage)
    if spec is None:
        raise ValueError(f"unknown stage {box.stage!r}")
    e2, e3, e4, m, t, h = box.bounds
    e2lo = e2[0]

    if e3 is not None and e3[1] < e2lo:
        return Verdict(INFEASIBLE, {"reason": "e3<e2"})
    if e4 is not None and e3 is not None and e4[1] < e3[0]:
        return Verdict(INFEASIBLE, {"reason": "e4<e3"})
    if m[1] < e2lo:
        return Verdict(INFEASIBLE, {"reason": "m<e2"})

    ab = _area(spec, e2, e3, e4)
    A = ab.value.lower()
    w = {"area": A, "hyp": ab.hypothesis}
    if ab.branch:
        w["branch"] = ab.branch
    if A > mul_up(m[1], h[1]):
        return Verdict(AREA, w)
    h_lo = max(h[0], div_down(A, m[1]))
    v = _tools(spec, box, cfg, h_lo, A, w)
    if v is not None:
        return v

    # (mt, h) is no shorter than (m, 0): h >= m sqrt(1 - t^2)
    m_lo = max(m[0], e2lo)
    t_hi = min(t[1], 0.5)
    h_feas = mul_down(m_lo, sqrt_down(max(0.0, 1.0 - mul_up(t_hi, t_hi))))
    if h_feas > h[1]:
        w["reason"] = "|B|<m"
        return Verdict(INFEASIBLE, w)
    if h_feas > h_lo:
        w["lattice_h"] = True
        v = _tools(spec, box, cfg, h_feas, A, w)
        if v is not None:
            return v

    if box.depth >= cfg.max_depth or choose_split(box) is None:
        return Verdict(UNRESOLVED, w)
    return Verdict(SPLIT, w)


def _tools(spec: StageSpec, box: ParamBox, cfg: SearchConfig, h_lo: float, A: float, w: dict):
    e2, e3, e4, m, t, h = box.bounds
    e2lo = e2[0]
    m_lo = max(m[0], e2lo)
    e2i = Interval.from_bounds(*e2)
    L = geom.critical_length(e2i)
    w["L"] = L.upper()
    w["h_lo"] = h_lo
    # Tool 1, crude (t-independent) then fancy
    cb = crude_slope_bound(e2i, (m_lo, m[1]), h_lo, A)
    if cb.ok(cfg.count_cap, cfg.delta_cap):
        w.update(cb.to_json())
        w["bound"] = "crude"
        return Verdict(BOUNDS_OK, w)
    fb = fancy_slope_bound(e2i, (m_lo, m[1]), t, h_lo, A)
    w.update(fb.to_json())
    if fb.ok(cfg.count_cap, cfg.delta_cap):
        w["bound"] = "fancy"
        return Verdict(BOUNDS_OK, w)
    if not (spec.tool2 or spec.tool3):
        return None
    mi = Interval.from_bounds(m_lo, m[1])
    ti = Interval.from_bounds(max(t[0], 0.0), min(t[1], 0.5))
    hi_ = Interval.from_bounds(h_lo, max(h[1], h_lo))
    R = geom.circumradius(mi, ti, hi_)
    w["circumradius"] = R.upper()
    # Tool 2: every point of the plane is within e2 of a lattice point
    if spec.tool2 and R.upper() < e2lo:
        return Verdict(CIRCUM, w)
    # Tool 3: Test 1 must fail (circumradius < e3) before Test 2 applies
    if spec.tool3 and e3 is not None:
        e3eff = (max(e3[0], e2lo), max(e3[1], e2lo))
        if R.upper() < e3eff[0]:
            d = geom.distinguished_points(mi, ti, hi_, Interval.from_bounds(*e3eff))
            w["dist_points"] = [x.upper() for x in d]
            if all(x.upper() < e2lo for x in d):
                return Verdict(MOM2, w)
    return None


# ---------------------------------------------------------------------------
# subdivision


_ROOT_WIDTH: dict = {}


def _norm_widths(stage: str) -> dict:
    got = _ROOT_WIDTH.get(stage)
    if got is None:
        root = make_region(stage)
        got = {}
        for d in DIMS:
            b = root.get(d)
            got[d] = (b[1] - b[0]) if b is not None and b[1] > b[0] else 1.0
        _ROOT_WIDTH[stage] = got
    return got


# loop-nesting order used to break ties
_PRIORITY = ("e2", "e3", "e4", "m", "h", "t")


def choose_split(box: ParamBox) -> str | None:
    """Dimension with the largest width relative to the stage's full range."""
    norm = _norm_widths(box.stage)
    best, best_w = None, 0.0
    for d in _PRIORITY:
        b = box.get(d)
        if b is None:
            continue
        lo, hi = b
        mid = lo * 0.5 + hi * 0.5
        if not lo < mid < hi:
            continue
        rel = (hi - lo) / norm[d]
        if rel > best_w * (1 + 1e-9):
            best, best_w = d, rel
    return best


# ---------------------------------------------------------------------------
# driver


@dataclass
class Summary:
    stage: str
    resolved: bool
    counts: dict
    leaves: int
    max_count: int
    max_intersection: int
    max_depth: int
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "resolved": self.resolved,
            "counts": self.counts,
            "leaves": self.leaves,
            "max_count": self.max_count,
            "max_intersection": self.max_intersection,
            "max_depth": self.max_depth,
            "seconds": round(self.seconds, 3),
        }


def _solve_subtree(args) -> list[tuple]:
    """Depth-first resolution of one subtree; returns leaf records."""
    box, cfg = args
    out = []
    stack = [box]
    while stack:
        b = stack.pop()
        v = analyze_box(b, cfg)
        if v.kind == SPLIT:
            left, right = b.split(choose_split(b))
            stack.append(right)
            stack.append(left)
        else:
            out.append((b.id, b.bounds, v.kind, v.witnesses))
    return out


def _frontier(root: ParamBox, cfg: SearchConfig):
    """Breadth-first expansion to a fixed number of open subtrees.

    Depends only on the region and cfg, never on worker count, so the final
    leaf set is identical however the subtrees are scheduled.
    """
    leaves = []
    level = [root]
    while level and len(level) < cfg.tasks:
        nxt = []
        for b in level:
            v = analyze_box(b, cfg)
            if v.kind == SPLIT:
                nxt.extend(b.split(choose_split(b)))
            else:
                leaves.append((b.id, b.bounds, v.kind, v.witnesses))
        level = nxt
    return leaves, level


def run_stage(
    stage: str,
    region: ParamBox | dict | None = None,
    cfg: SearchConfig = SearchConfig(),
    sink: Callable[[list], None] | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> tuple[Summary, list[tuple]]:
    """Resolve a region; returns the summary and the canonically sorted leaves."""
    if cfg.workers < 1:
        raise ValueError("workers must be >= 1")
    if cfg.max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if region is None or isinstance(region, dict):
        region = make_region(stage, region)
    if region.stage != stage:
        region = replace(region, stage=stage)
    t0 = time.perf_counter()
    leaves, open_boxes = _frontier(region, cfg)
    tasks = [(b, cfg) for b in open_boxes]
    if cfg.workers == 1 or len(tasks) <= 1:
        for i, t in enumerate(tasks):
            leaves.extend(_solve_subtree(t))
            if progress:
                progress(i + 1, len(tasks))
    else:
        with Pool(cfg.workers) as pool:
            for i, part in enumerate(pool.imap_unordered(_solve_subtree, tasks)):
                leaves.extend(part)
                if progress:
                    progress(i + 1, len(tasks))
    leaves.sort(key=lambda r: r[0])
    summary = summarize(stage, leaves, time.perf_counter() - t0)
    if sink is not None:
        sink(leaves)
    return summary, leaves


def summarize(stage: str, leaves: list[tuple], seconds: float = 0.0) -> Summary:
    counts = {k: 0 for k in VERDICTS}
    max_count = max_int = depth = 0
    for bid, _, kind, w in leaves:
        counts[kind] = counts.get(kind, 0) + 1
        depth = max(depth, len(bid) // 2)
        if kind == BOUNDS_OK:
            max_count = max(max_count, w["count"])
            max_int = max(max_int, w["max_int"])
    return Summary(stage, counts[UNRESOLVED] == 0, counts, len(leaves), max_count, max_int, depth, seconds)


# ---------------------------------------------------------------------------
# the e2 > 2 tail


@dataclass
class TailResult:
    ok: bool
    pieces: int
    failure: tuple | None = None
    max_count: int = 0
    max_intersection: int = 0


def _tail_piece(lo: float, hi: float, count_cap: int, delta_cap: int, depth: int = 0):
    """Crude Tool 1 with area sqrt(3) e2^2 over e2 in [lo, hi], m in [e2, 2.5] and m > 2.5."""
    e2 = Interval.from_bounds(lo, hi)
    A = geom.area_e2_packing(e2).value.lower()
    worst = (0, 0)
    # m > 2.5 (or m >= e2 when e2 > 2.5): h >= m sqrt(3)/2
    m_lo = max(lo, 2.5)
    h0 = max(1.7, mul_down(m_lo, sqrt_down(0.75)))
    b = crude_slope_bound(e2, m_lo, h0)
    if not b.ok(count_cap, delta_cap):
        return False, ("m>2.5", lo, hi, b.max_count, b.max_intersection), worst
    worst = (b.max_count, b.max_intersection)
    if lo < 2.5:
        # split m in [e2, 2.5] until the crude bound holds
        stack = [(lo, 2.5, 0)]
        while stack:
            mlo, mhi, d = stack.pop()
            hlo = max(1.7, div_down(A, mhi), mul_down(mlo, sqrt_down(0.75)))
            b = crude_slope_bound(e2, mlo, hlo)
            if b.ok(count_cap, delta_cap):
                worst = (max(worst[0], b.max_count), max(worst[1], b.max_intersection))
                continue
            if d >= 30:
                return False, ("m", lo, hi, mlo, mhi, b.max_count, b.max_intersection), worst
            mid = 0.5 * (mlo + mhi)
            stack.append((mlo, mid, d + 1))
            stack.append((mid, mhi, d + 1))
    return True, None, worst


def tail_elimination(e2_min: float = 2.0, e2_max: float = 3.8, width: float = 0.01,
                     count_cap: int = 10, delta_cap: int = 8) -> TailResult:
    """Check Tool 1 with the packing bound on [e2_min, e2_max] and that no slope survives beyond.

    Beyond 3.7 the critical length is at most 2 pi / (e2 - 2) < e2 <= m, so
    every slope is longer than L and the count is 0.
    """
    if e2_min < 2.0:
        raise ValueError("tail starts at e2 = 2")
    n = max(1, math.ceil((Fraction(e2_max) - Fraction(e2_min)) / Fraction(width)))
    edges = [float(Fraction(e2_min) + (Fraction(e2_max) - Fraction(e2_min)) * k / n) for k in range(n + 1)]
    edges[-1] = e2_max
    mc = mi = 0
    for lo, hi in zip(edges, edges[1:]):
        ok, fail, worst = _tail_piece(lo, hi, count_cap, delta_cap)
        if not ok:
            return TailResult(False, n, fail, mc, mi)
        mc, mi = max(mc, worst[0]), max(mi, worst[1])
    # the far end: L(e2) <= 2 pi / (e2 - 2) < e2 for e2 >= 3.7
    e = Interval(3.7)
    L = geom.critical_length(e)
    bound = Interval(2.0) * Interval(math.pi, math.ulp(math.pi)) / (e - Interval(2.0))
    if not (L.upper() <= bound.upper() and bound.certainly_lt(e)):
        return TailResult(False, n, ("far", 3.7, L.upper(), bound.upper()), mc, mi)
    return TailResult(True, n, None, mc, mi)


def reduction_checks() -> dict:
    """The h > 4 and m > 2.5 compactness reductions as crude bounds at their boundary values."""
    h4 = crude_slope_bound(Interval(1.0), 1.0, 4.0)
    m25 = crude_slope_bound(Interval(1.0), 2.5, mul_down(2.5, sqrt_down(0.75)))
    return {"h>4": h4, "m>2.5": m25}
