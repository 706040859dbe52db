"""Report every filling in the bundled surgery tables, flagged ones first.

    python3 scripts/scan_tables.py [--all] [--count-cap 7] [--delta-cap 5]
"""
import argparse
import sys

from dehnbound import momdata


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--all", action="store_true", help="also list fillings within the caps")
    ap.add_argument("--count-cap", type=int, default=7)
    ap.add_argument("--delta-cap", type=int, default=5)
    a = ap.parse_args(argv)
    n_flag = 0
    for name in momdata.bundled_names():
        reps = momdata.scan_table(momdata.load_bundled(name), a.count_cap, a.delta_cap)
        flagged = [r for r in reps if r.flagged]
        n_flag += len(flagged)
        print(f"{name}: {len(reps)} fillings, {len(flagged)} flagged")
        for r in flagged if not a.all else reps:
            mark = "*" if r.flagged else " "
            print(f"  {mark} cusp {r.cusp} fill {r.slope}: {r.count} candidates, max delta {r.max_delta}: "
                  + " ".join(str(s) for s in r.candidates))
    print(f"flagged total: {n_flag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
