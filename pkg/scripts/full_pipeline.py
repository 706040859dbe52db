"""Run slopes1 to slopes5 over the whole compact region plus the e2 > 2 tail.

    python3 scripts/full_pipeline.py --cert-dir certs/ --slopes5-depth 56
"""
import argparse
import json
import sys

from dehnbound.pipeline import PipelineConfig, run_pipeline


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-depth", type=int, default=40)
    ap.add_argument("--slopes5-depth", type=int, default=56,
                    help="depth cap for slopes5 (it is depth-starved at 40)")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--cert-dir")
    ap.add_argument("--json", action="store_true", help="print one JSON summary at the end")
    a = ap.parse_args(argv)

    cfg = PipelineConfig(max_depth=a.max_depth, depth_overrides={"slopes5": a.slopes5_depth},
                         workers=a.workers, cert_dir=a.cert_dir)

    def progress(stage, run):
        s = run.summary
        print(f"{stage}: resolved={s.resolved} leaves={s.leaves} depth={s.max_depth}/{run.max_depth} "
              f"max_count={s.max_count} max_int={s.max_intersection} {s.seconds:.1f}s"
              + (f" replay={run.replay_ok}" if run.replay_ok is not None else ""), flush=True)

    res = run_pipeline(cfg, progress)
    print(f"tail: ok={res.tail.ok} pieces={res.tail.pieces} max_count={res.tail.max_count} "
          f"max_int={res.tail.max_intersection}")
    print(f"resolved: {res.resolved}  ({res.seconds:.0f}s)")
    if a.json:
        print(json.dumps({k: r.summary.to_json() for k, r in res.stages.items()}, sort_keys=True))
    return 0 if res.resolved else 2


if __name__ == "__main__":
    sys.exit(main())
