"""Exceptional-surgery candidate tables for the two-cusp census manifolds.

Each table lists the slopes s with N(s, -) non-hyperbolic on either cusp
("lines") plus the individually marked pairs (s0, s1).  Filling slope s on
one cusp leaves a one-cusped manifold whose exceptional slopes lie among
the lines of the other cusp together with the partners of s.

File format, one record per line::

    manifold <name> symmetric <0|1>
    lines0: (p,q) (p,q) ...
    lines1: (p,q) ...
    pair: (p0,q0) (p1,q1)

Blank lines and ``#`` comments are ignored.  The bundled files are checked
against ``data/SHA256SUMS`` when loaded by name.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .slopes import Slope, intersection_number

__all__ = [
    "SurgeryTable",
    "FillingReport",
    "TableFormatError",
    "load_table",
    "load_bundled",
    "bundled_names",
    "filling_report",
    "scan_table",
    "parse_slope",
]

_SLOPE_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SurgeryTable:
    name: str
    lines0: tuple
    lines1: tuple
    pairs: frozenset
    symmetric: bool

    def lines(self, cusp: int) -> tuple:
        return self.lines0 if cusp == 0 else self.lines1

    def partners(self, cusp: int, s: Slope) -> set:
        if cusp == 0:
            return {b for a, b in self.pairs if a == s}
        return {a for a, b in self.pairs if b == s}

    def filling_slopes(self, cusp: int) -> list:
        """Every slope on ``cusp`` that occurs anywhere in the table."""
        seen = set(self.lines(cusp))
        seen.update(p[cusp] for p in self.pairs)
        return sorted(seen)


@dataclass(frozen=True)
class FillingReport:
    manifold: str
    cusp: int
    slope: Slope
    candidates: tuple
    count: int
    max_delta: int
    flagged: bool = False

    def __str__(self):
        cands = " ".join(str(s) for s in self.candidates)
        flag = " FLAG" if self.flagged else ""
        return (f"{self.manifold} cusp {self.cusp} fill {self.slope}: "
                f"{self.count} candidates, max delta {self.max_delta}{flag} [{cands}]")


def parse_slope(text: str) -> Slope:
    m = _SLOPE_RE.fullmatch(text.strip())
    if not m:
        raise TableFormatError(f"not a slope: {text!r}")
    p, q = int(m.group(1)), int(m.group(2))
    try:
        return Slope.make(p, q)
    except ValueError as exc:
        raise TableFormatError(str(exc)) from None


def _slopes_in(text: str, where: str) -> list:
    rest = _SLOPE_RE.sub("", text).strip()
    if rest:
        raise TableFormatError(f"{where}: unexpected text {rest!r}")
    out = []
    for m in _SLOPE_RE.finditer(text):
        try:
            out.append(Slope.make(int(m.group(1)), int(m.group(2))))
        except ValueError as exc:
            raise TableFormatError(f"{where}: {exc}") from None
    return out


def parse_table(text: str, source: str = "<string>") -> SurgeryTable:
    name = None
    symmetric = None
    lines = {0: [], 1: []}
    pairs = set()
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{n}"
        if line.startswith("manifold"):
            parts = line.split()
            if len(parts) != 4 or parts[2] != "symmetric" or parts[3] not in ("0", "1"):
                raise TableFormatError(f"{where}: bad header {raw!r}")
            name, symmetric = parts[1], parts[3] == "1"
        elif line.startswith("lines0:") or line.startswith("lines1:"):
            lines[int(line[5])].extend(_slopes_in(line[7:], where))
        elif line.startswith("pair:"):
            got = _slopes_in(line[5:], where)
            if len(got) != 2:
                raise TableFormatError(f"{where}: a pair needs exactly two slopes")
            pairs.add((got[0], got[1]))
        else:
            raise TableFormatError(f"{where}: unrecognized line {raw!r}")
    if name is None:
        raise TableFormatError(f"{source}: missing manifold header")
    if symmetric:
        pairs |= {(b, a) for a, b in pairs}
    return SurgeryTable(name, tuple(lines[0]), tuple(lines[1]), frozenset(pairs), symmetric)


def load_table(path) -> SurgeryTable:
    path = Path(path)
    return parse_table(path.read_text(), str(path))


def _data_dir():
    return resources.files("dehnbound") / "data"


def _checksums() -> dict:
    out = {}
    for line in (_data_dir() / "SHA256SUMS").read_text().splitlines():
        if line.strip():
            digest, fname = line.split()
            out[fname] = digest
    return out


def bundled_names() -> list:
    return sorted(f[:-4] for f in _checksums())


def load_bundled(name: str) -> SurgeryTable:
    """Load a bundled table by manifold name, verifying its checksum."""
    sums = _checksums()
    fname = f"{name}.txt"
    if fname not in sums:
        raise KeyError(f"no bundled table {name!r}; have {bundled_names()}")
    data = (_data_dir() / fname).read_bytes()
    if hashlib.sha256(data).hexdigest() != sums[fname]:
        raise TableFormatError(f"checksum mismatch for bundled {fname}")
    return parse_table(data.decode(), fname)


def _max_delta(slopes) -> int:
    best = 0
    for i, a in enumerate(slopes):
        for b in slopes[i + 1:]:
            best = max(best, intersection_number(a, b))
    return best


def filling_report(tbl: SurgeryTable, cusp: int, s: Slope,
                   count_cap: int = 7, delta_cap: int = 5) -> FillingReport:
    """Candidate exceptional slopes on the other cusp after filling ``s`` on ``cusp``."""
    if cusp not in (0, 1):
        raise ValueError("cusp must be 0 or 1")
    other = 1 - cusp
    cands = set(tbl.lines(other)) | tbl.partners(cusp, s)
    cands = tuple(sorted(cands, key=lambda x: (x.q, x.p)))
    n = len(cands)
    d = _max_delta(cands)
    return FillingReport(tbl.name, cusp, s, cands, n, d, n > count_cap or d > delta_cap)


def scan_table(tbl: SurgeryTable, count_cap: int = 7, delta_cap: int = 5,
               include_lines: bool = False) -> list:
    """Reports for every filling slope in the table; flagged ones exceed the caps.

    Line slopes give non-hyperbolic fillings and are skipped unless
    ``include_lines`` is set.
    """
    out = []
    for cusp in (0, 1):
        lines = set(tbl.lines(cusp))
        for s in tbl.filling_slopes(cusp):
            if s in lines and not include_lines:
                continue
            out.append(filling_report(tbl, cusp, s, count_cap, delta_cap))
    return out
