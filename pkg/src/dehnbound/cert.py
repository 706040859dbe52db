"""Replayable elimination certificates.

One JSON object per leaf, sorted by box id, then a footer carrying the
region, the config, a summary and the sha256 of every preceding line.
Floats go through ``json`` and so are written as shortest round-trip
decimals; a certificate is byte-identical however many workers produced it.

Replay rebuilds each box from the region and its id, checks that the leaf
ids tile the region (a complete binary trie with one split dimension per
node), and re-runs ``analyze_box`` on every leaf.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from . import search as S

__all__ = ["CertError", "ReplayResult", "leaf_record", "write_certificate", "certificate_lines", "replay"]


class CertError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _box_json(bounds) -> dict:
    return {d: (None if b is None else [b[0], b[1]]) for d, b in zip(S.DIMS, bounds)}


def leaf_record(stage: str, leaf: tuple) -> dict:
    bid, bounds, kind, w = leaf
    rec = {"id": bid, "stage": stage, "box": _box_json(bounds), "verdict": kind, "witnesses": w}
    if kind == S.MOM2:
        rec["hypothesis"] = "e2 < 1.5152, so a Mom-2 structure means a filling of m125, m129 or m203"
    return rec


def _config_json(cfg: S.SearchConfig) -> dict:
    d = asdict(cfg)
    # scheduling only; never changes the leaves
    d.pop("workers")
    return d


def certificate_lines(stage: str, region: S.ParamBox, cfg: S.SearchConfig, leaves: list) -> list[str]:
    lines = [_dump(leaf_record(stage, lf)) for lf in sorted(leaves, key=lambda r: r[0])]
    digest = hashlib.sha256("".join(x + "\n" for x in lines).encode()).hexdigest()
    summ = S.summarize(stage, leaves).to_json()
    summ.pop("seconds")
    footer = {
        "footer": True,
        "stage": stage,
        "region": _box_json(region.bounds),
        "region_id": region.id,
        "config": _config_json(cfg),
        "summary": summ,
        "sha256": digest,
    }
    lines.append(_dump(footer))
    return lines


def write_certificate(path, stage: str, region: S.ParamBox, cfg: S.SearchConfig, leaves: list) -> str:
    """Write the certificate and return the sha256 recorded in its footer."""
    lines = certificate_lines(stage, region, cfg, leaves)
    with open(path, "w") as fh:
        for x in lines:
            fh.write(x + "\n")
    return json.loads(lines[-1])["sha256"]


@dataclass
class ReplayResult:
    ok: bool
    records: int = 0
    mismatches: list = field(default_factory=list)
    tiling_ok: bool = True
    hash_ok: bool = True
    resolved: bool = False

    def __bool__(self):
        return self.ok


def _bounds_from_json(box: dict, where: str) -> tuple:
    out = []
    for d in S.DIMS:
        if d not in box:
            raise CertError(f"{where}: box is missing {d}")
        b = box[d]
        if b is None:
            out.append(None)
        elif isinstance(b, list) and len(b) == 2 and all(isinstance(x, (int, float)) for x in b):
            out.append((float(b[0]), float(b[1])))
        else:
            raise CertError(f"{where}: bad bounds for {d}: {b!r}")
    return tuple(out)


def _check_tiling(ids: list[str]) -> list[str]:
    """Problems with the id set as a tiling of the root; empty when it tiles."""
    problems = []
    leaves = set(ids)
    if len(leaves) != len(ids):
        problems.append("duplicate leaf ids")
    split_dim: dict[str, int] = {}
    for bid in leaves:
        try:
            toks = S.id_tokens(bid)
        except ValueError as exc:
            problems.append(str(exc))
            continue
        pre = ""
        for dim, _side in toks:
            got = split_dim.setdefault(pre, dim)
            if got != dim:
                problems.append(f"node {pre!r} split along two dimensions")
            pre += f"{dim}{_side}"
    for pre, dim in split_dim.items():
        if pre in leaves:
            problems.append(f"leaf {pre!r} is also an inner node")
        for side in "LR":
            child = f"{pre}{dim}{side}"
            if child not in leaves and child not in split_dim:
                problems.append(f"missing child {child!r}")
    if not split_dim and leaves != {""}:
        problems.append("leaves do not cover the root")
    return problems


def _norm(obj):
    return json.loads(_dump(obj))


def replay(path) -> ReplayResult:
    """Re-check a certificate.  Malformed input raises CertError with the line number."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise CertError(f"{path}: empty certificate")
    recs = []
    for n, line in enumerate(raw, start=1):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CertError(f"{path}:{n}: not JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CertError(f"{path}:{n}: record is not an object")
        recs.append((n, obj))
    n_foot, footer = recs[-1]
    if not footer.get("footer"):
        raise CertError(f"{path}:{n_foot}: last line is not a footer")
    try:
        stage = footer["stage"]
        cfg = S.SearchConfig(**footer["config"])
        root = S.ParamBox(_bounds_from_json(footer["region"], f"{path}:{n_foot}"),
                          footer.get("region_id", ""), stage)
    except (KeyError, TypeError) as exc:
        raise CertError(f"{path}:{n_foot}: bad footer ({exc})") from None
    if stage not in S.STAGES:
        raise CertError(f"{path}:{n_foot}: unknown stage {stage!r}")

    result = ReplayResult(ok=True)
    digest = hashlib.sha256("".join(x + "\n" for x in raw[:-1]).encode()).hexdigest()
    if digest != footer.get("sha256"):
        result.hash_ok = False
        result.mismatches.append(("footer", "content hash differs"))

    ids = []
    leaves = []
    for n, rec in recs[:-1]:
        where = f"{path}:{n}"
        for key in ("id", "stage", "box", "verdict", "witnesses"):
            if key not in rec:
                raise CertError(f"{where}: missing field {key!r}")
        if rec["verdict"] not in S.VERDICTS:
            raise CertError(f"{where}: unknown verdict {rec['verdict']!r}")
        if rec["stage"] != stage:
            result.mismatches.append((rec["id"], "stage differs from footer"))
            continue
        bounds = _bounds_from_json(rec["box"], where)
        bid = rec["id"]
        if not isinstance(bid, str) or not bid.startswith(root.id):
            raise CertError(f"{where}: id {bid!r} is not below the region")
        rel = bid[len(root.id):]
        try:
            box = S.box_from_id(S.ParamBox(root.bounds, "", stage), rel)
        except ValueError as exc:
            raise CertError(f"{where}: {exc}") from None
        box = S.ParamBox(box.bounds, bid, stage)
        ids.append(rel)
        if box.bounds != bounds:
            result.mismatches.append((bid, "box does not match its id"))
            continue
        v = S.analyze_box(box, cfg)
        if v.kind != rec["verdict"]:
            result.mismatches.append((bid, f"verdict {rec['verdict']} but replay gives {v.kind}"))
            continue
        if _norm(v.witnesses) != rec["witnesses"]:
            result.mismatches.append((bid, "witnesses differ"))
            continue
        leaves.append((bid, bounds, v.kind, v.witnesses))
    result.records = len(ids)
    problems = _check_tiling(ids)
    if problems:
        result.tiling_ok = False
        result.mismatches.extend(("tiling", p) for p in problems[:20])
    result.resolved = all(lf[2] != S.UNRESOLVED for lf in leaves) and not result.mismatches
    result.ok = not result.mismatches
    return result
