"""Command-line front end.

    dehnbound verify --stage slopes1 --region e2=1.5:2.0 [--cert out.jsonl]
    dehnbound probe --e2 1.26 --e3 1.38 --e4 1.38 --m 2.19463 --t 0.5
    dehnbound replay out.jsonl
    dehnbound mom --table m412 --fill 0:(2,1)
    dehnbound table --delta 8

Output is one ``key: value`` per line.  Exit codes: 0 success, 1 usage
error, 2 unresolved boxes (verify) or a failed replay.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import replace

from . import cert, geom, momdata
from . import search as S
from .interval import Interval
from .slopes import crude_slope_bound, fancy_slope_bound, max_slopes_for_delta

EXIT_OK, EXIT_USAGE, EXIT_UNRESOLVED = 0, 1, 2

_RANGE_RE = re.compile(r"^\s*([^:]+?)\s*(?::\s*(.+?)\s*)?$")
_FILL_RE = re.compile(r"^\s*([01])\s*:\s*(\(.*\))\s*$")


class UsageError(Exception):
    pass


def _out(key, value):
    if isinstance(value, float):
        value = repr(value)
    elif isinstance(value, (dict, list)):
        value = json.dumps(value, sort_keys=True)
    print(f"{key}: {value}")


def parse_range(text: str) -> tuple[float, float]:
    """``"lo:hi"`` or a single number (a thin range)."""
    m = _RANGE_RE.match(text)
    if not m:
        raise UsageError(f"bad range {text!r}")
    try:
        lo = float(m.group(1))
        hi = float(m.group(2)) if m.group(2) is not None else lo
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise UsageError(f"bad range {text!r}")
    return lo, hi


def parse_region(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--region expects k=lo:hi, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in S.DIMS:
            raise UsageError(f"unknown parameter {k!r} in --region")
        out[k] = parse_range(v)
    return out


def _config(args) -> S.SearchConfig:
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.max_depth < 0:
        raise UsageError("--max-depth must be >= 0")
    return S.SearchConfig(max_depth=args.max_depth, workers=args.workers)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    cfg = _config(args)
    try:
        region = S.make_region(args.stage, parse_region(args.region))
    except S.RegionError as exc:
        raise UsageError(str(exc)) from None
    summ, leaves = S.run_stage(args.stage, region, cfg)
    d = summ.to_json()
    for k in ("stage", "resolved", "leaves"):
        _out(k, d[k])
    for k, v in d["counts"].items():
        _out(f"count.{k}", v)
    for k in ("max_count", "max_intersection", "max_depth", "seconds"):
        _out(k, d[k])
    if args.cert:
        digest = cert.write_certificate(args.cert, args.stage, region, cfg, leaves)
        _out("cert", args.cert)
        _out("sha256", digest)
    ok = summ.resolved and summ.max_count <= cfg.count_cap and summ.max_intersection <= cfg.delta_cap
    return EXIT_OK if ok else EXIT_UNRESOLVED


# ---------------------------------------------------------------------------
# probe


def _auto_stage(vals: dict) -> str:
    e2 = vals.get("e2")
    if e2 is not None and e2[0] >= 1.4:
        return "slopes1"
    e3, e4 = vals.get("e3"), vals.get("e4")
    if e3 is not None and e3 == (S.E3_CAP, S.E3_CAP) and e4 is None:
        return "slopes2"
    if e3 is not None and e3[0] >= 1.5:
        return "slopes3"
    if e4 is not None and e4 == (S.E3_CAP, S.E3_CAP):
        return "slopes4"
    return "slopes5"


def _probe_box(stage: str, vals: dict) -> S.ParamBox:
    """Stage root with the given values substituted, without range checks."""
    root = S.make_region(stage)
    bounds = list(root.bounds)
    for d, v in vals.items():
        i = S.DIMS.index(d)
        if bounds[i] is None:
            if d in ("e3", "e4"):
                continue  # unused by this stage
        bounds[i] = v
    # lower ends tied to earlier parameters follow the probed values
    e2 = bounds[0]
    if "m" not in vals:
        bounds[3] = (e2[0], max(bounds[3][1], e2[1]))
    if bounds[1] is not None and "e3" not in vals and S.STAGES[stage].ranges["e3"][0] is None:
        bounds[1] = (e2[0], max(bounds[1][1], e2[1]))
    if bounds[2] is not None and "e4" not in vals and S.STAGES[stage].ranges["e4"][0] is None:
        bounds[2] = (bounds[1][0], max(bounds[2][1], bounds[1][1]))
    return S.ParamBox(tuple(bounds), "", stage)


def _probe_one(tag: str, box: S.ParamBox, cfg: S.SearchConfig):
    e2, e3, e4, m, t, h = box.bounds
    sfx = f"[{tag}]" if tag else ""
    e2i = Interval.from_bounds(*e2)
    spec = S.STAGES[box.stage]
    A = S._area(spec, e2, e3, e4).value.lower()
    m_lo = max(m[0], e2[0])
    h_lo = max(h[0], A / m[1])
    mi = Interval.from_bounds(m_lo, max(m[1], m_lo))
    ti = Interval.from_bounds(max(t[0], 0.0), min(t[1], 0.5))
    hi_ = Interval.from_bounds(h_lo, max(h[1], h_lo))
    _out(f"t{sfx}", list(t))
    _out(f"h{sfx}", list(h))
    cb = crude_slope_bound(e2i, (m_lo, m[1]), h_lo, A)
    fb = fancy_slope_bound(e2i, (m_lo, m[1]), t, h_lo, A)
    _out(f"crude.count{sfx}", cb.max_count)
    _out(f"crude.max_int{sfx}", cb.max_intersection)
    _out(f"fancy.count{sfx}", fb.max_count)
    _out(f"fancy.max_int{sfx}", fb.max_intersection)
    _out(f"fancy.per_q{sfx}", {str(k): v for k, v in sorted(fb.per_q_counts.items())})
    R = geom.circumradius(mi, ti, hi_)
    _out(f"circumradius{sfx}", str(R))
    if e3 is not None:
        e3eff = Interval.from_bounds(max(e3[0], e2[0]), max(e3[1], e2[0]))
        if R.upper() < e3eff.lower():
            d = geom.distinguished_points(mi, ti, hi_, e3eff)
            _out(f"dist_points{sfx}", [str(x) for x in d])
    v = S.analyze_box(box, cfg)
    _out(f"verdict{sfx}", v.kind)
    return v


def cmd_probe(args) -> int:
    vals = {}
    for d in S.DIMS:
        x = getattr(args, d)
        if x is not None:
            vals[d] = parse_range(x)
    if "e2" in vals and vals["e2"][0] < 1.0:
        raise UsageError("e2 must be at least 1")
    stage = args.stage or _auto_stage(vals)
    if stage not in S.STAGES:
        raise UsageError(f"unknown stage {stage!r}")
    cfg = _config(args)
    box = _probe_box(stage, vals)
    e2, e3, e4, m, t, h = box.bounds
    e2i = Interval.from_bounds(*e2)
    _out("stage", stage)
    _out("e2", list(e2))
    if e3 is not None:
        _out("e3", list(e3))
    if e4 is not None:
        _out("e4", list(e4))
    _out("m", list(m))
    L = geom.critical_length(e2i)
    _out("L", str(L))
    _out(f"area.{geom.E2_PACKING}", str(geom.area_e2_packing(e2i).value))
    e3i = Interval.from_bounds(*e3) if e3 is not None else None
    e4i = Interval.from_bounds(*e4) if e4 is not None else None
    if e3i is not None and e2[1] <= 1.5152:
        for hyp in (geom.NO_MOM2, geom.NO_MOM3, geom.NO_MOM3_BONUS):
            if hyp != geom.NO_MOM2 and e4i is None:
                continue
            try:
                ab = geom.area_for_stage(hyp, e2i, e3i, e4i)
            except (ArithmeticError, ValueError) as exc:
                _out(f"area.{hyp}", f"n/a ({exc})")
                continue
            _out(f"area.{hyp}", str(ab.value))
    ab = S._area(S.STAGES[stage], e2, e3, e4)
    _out("area.used", ab.hypothesis)
    _out("area.lower", ab.value.lower())
    if "h" not in vals and m[0] == m[1]:
        hv = max(1.7, ab.value.lower() / m[0])
        box = replace(box, bounds=box.bounds[:5] + ((hv, hv),))
    if "t" in vals:
        _probe_one("", box, cfg)
    else:
        _probe_one("", box, cfg)
        for tv in (0.0, 0.5):
            _probe_one(f"t={tv}", replace(box, bounds=box.bounds[:4] + ((tv, tv),) + box.bounds[5:]), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# replay, mom, table


def cmd_replay(args) -> int:
    try:
        res = cert.replay(args.cert_file)
    except (OSError, cert.CertError) as exc:
        _out("error", str(exc))
        return EXIT_USAGE
    _out("result", "OK" if res.ok else "FAIL")
    _out("records", res.records)
    _out("resolved", res.resolved)
    _out("tiling", res.tiling_ok)
    _out("hash", res.hash_ok)
    _out("mismatches", len(res.mismatches))
    for bid, why in res.mismatches[:10]:
        _out("mismatch", f"{bid} {why}")
    return EXIT_OK if res.ok else EXIT_UNRESOLVED


def _load_any(name: str) -> momdata.SurgeryTable:
    if name in momdata.bundled_names():
        return momdata.load_bundled(name)
    return momdata.load_table(name)


def cmd_mom(args) -> int:
    names = [args.table] if args.table else momdata.bundled_names()
    try:
        tables = [_load_any(n) for n in names]
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if args.fill:
        m = _FILL_RE.match(args.fill)
        if not m:
            raise UsageError(f"--fill expects c:(p,q), got {args.fill!r}")
        if len(tables) != 1:
            raise UsageError("--fill needs --table")
        try:
            s = momdata.parse_slope(m.group(2))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        r = momdata.filling_report(tables[0], int(m.group(1)), s)
        _out("manifold", r.manifold)
        _out("cusp", r.cusp)
        _out("fill", str(r.slope))
        _out("candidates", r.count)
        _out("max_delta", r.max_delta)
        _out("set", " ".join(str(x) for x in r.candidates))
        _out("flagged", r.flagged)
        return EXIT_OK
    total = 0
    for tbl in tables:
        reps = momdata.scan_table(tbl)
        flagged = [r for r in reps if r.flagged]
        total += len(flagged)
        _out(f"{tbl.name}.fillings", len(reps))
        _out(f"{tbl.name}.flagged", len(flagged))
        for r in flagged:
            _out(f"{tbl.name}.flag", f"cusp {r.cusp} {r.slope} count {r.count} delta {r.max_delta}")
    _out("flagged_total", total)
    return EXIT_OK


def _next_prime_after(n: int) -> int:
    p = n + 1
    while p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        p += 1
    return p


def cmd_table(args) -> int:
    if args.delta is None or args.delta < 0:
        raise UsageError("--delta must be a non-negative integer")
    _out("delta", args.delta)
    _out("max_slopes", max_slopes_for_delta(args.delta))
    p = _next_prime_after(args.delta)
    _out("prime_fallback", p + 1)
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dehnbound", description="Interval verifier for exceptional Dehn surgery bounds.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp, stage_default):
        sp.add_argument("--stage", default=stage_default, help="slopes1 .. slopes5")
        sp.add_argument("--max-depth", type=int, default=S.SearchConfig.max_depth)
        sp.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="run a stage and optionally write a certificate")
    common(v, "slopes5")
    v.add_argument("--region", action="append", metavar="k=lo:hi")
    v.add_argument("--cert")
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("probe", help="analyze one point or thin box")
    common(pr, None)
    for d in S.DIMS:
        pr.add_argument(f"--{d}", metavar="x|lo:hi")
    pr.set_defaults(func=cmd_probe)

    r = sub.add_parser("replay", help="re-check a certificate")
    r.add_argument("cert_file")
    r.set_defaults(func=cmd_replay)

    mo = sub.add_parser("mom", help="surgery table arithmetic")
    mo.add_argument("--table")
    mo.add_argument("--fill", metavar="c:(p,q)")
    mo.set_defaults(func=cmd_mom)

    t = sub.add_parser("table", help="max slopes for a given intersection bound")
    t.add_argument("--delta", type=int)
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
