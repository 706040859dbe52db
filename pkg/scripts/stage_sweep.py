"""Sweep one stage over consecutive e2 slices and tabulate the verdicts.

    python3 scripts/stage_sweep.py slopes5 --e2 1.0:1.4 --slices 8 --max-depth 56
"""
import argparse
import sys

from dehnbound import search as S


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("stage", choices=sorted(S.STAGES))
    ap.add_argument("--e2", default=None, help="lo:hi, default the stage range")
    ap.add_argument("--slices", type=int, default=4)
    ap.add_argument("--max-depth", type=int, default=40)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args(argv)

    lo, hi = S.STAGES[a.stage].ranges["e2"]
    if a.e2:
        lo, hi = map(float, a.e2.split(":"))
    cfg = S.SearchConfig(max_depth=a.max_depth, workers=a.workers)
    kinds = list(S.VERDICTS)
    print("e2_lo e2_hi leaves depth max_count max_int seconds " + " ".join(kinds))
    all_ok = True
    for k in range(a.slices):
        a_lo = lo + (hi - lo) * k / a.slices
        a_hi = hi if k == a.slices - 1 else lo + (hi - lo) * (k + 1) / a.slices
        s, _ = S.run_stage(a.stage, {"e2": (a_lo, a_hi)}, cfg)
        all_ok &= s.resolved
        print(f"{a_lo:.4f} {a_hi:.4f} {s.leaves} {s.max_depth} {s.max_count} {s.max_intersection} "
              f"{s.seconds:.1f} " + " ".join(str(s.counts.get(x, 0)) for x in kinds), flush=True)
    return 0 if all_ok else 2


if __name__ == "__main__":
    sys.exit(main())
