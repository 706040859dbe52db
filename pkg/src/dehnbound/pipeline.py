"""The whole compact region: slopes1 to slopes5 plus the e2 > 2 tail."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import cert
from . import search as S

__all__ = ["PipelineConfig", "StageRun", "PipelineResult", "run_pipeline"]


@dataclass(frozen=True)
class PipelineConfig:
    max_depth: int = 40
    # per-stage depth caps that override max_depth
    depth_overrides: dict = field(default_factory=lambda: {"slopes5": 56})
    workers: int = 1
    cert_dir: str | None = None
    stages: tuple = ("slopes1", "slopes2", "slopes3", "slopes4", "slopes5")
    tail: bool = True


@dataclass
class StageRun:
    summary: S.Summary
    max_depth: int
    cert_path: str | None = None
    replay_ok: bool | None = None


@dataclass
class PipelineResult:
    stages: dict
    tail: S.TailResult | None
    seconds: float

    @property
    def resolved(self) -> bool:
        ok = all(r.summary.resolved and r.replay_ok is not False for r in self.stages.values())
        return ok and (self.tail is None or self.tail.ok)


def run_pipeline(cfg: PipelineConfig = PipelineConfig(), progress=None) -> PipelineResult:
    t0 = time.perf_counter()
    out = {}
    for stage in cfg.stages:
        depth = cfg.depth_overrides.get(stage, cfg.max_depth)
        scfg = S.SearchConfig(max_depth=depth, workers=cfg.workers)
        region = S.make_region(stage)
        summ, leaves = S.run_stage(stage, region, scfg)
        run = StageRun(summ, depth)
        if cfg.cert_dir:
            p = Path(cfg.cert_dir) / f"{stage}.jsonl"
            p.parent.mkdir(parents=True, exist_ok=True)
            cert.write_certificate(p, stage, region, scfg, leaves)
            run.cert_path = str(p)
            run.replay_ok = bool(cert.replay(p))
        out[stage] = run
        if progress:
            progress(stage, run)
    tail = S.tail_elimination() if cfg.tail else None
    return PipelineResult(out, tail, time.perf_counter() - t0)
