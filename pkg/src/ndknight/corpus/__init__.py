"""Bundled tours transcribed from published figures, plus their checks.

``data/manifest.json`` lists every entry with its expected properties and the
SHA-256 of its ``.ndkt`` file taken when the figure was transcribed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from ..errors import InputError
from ..lattice import Shape
from ..magic import magic_report, quartile_report
from ..tour import Grid, validate
from .format import parse_tour_file, write_tour_file

__all__ = [
    "CorpusEntry",
    "EntryResult",
    "corpus_verify_all",
    "ids",
    "load",
    "parse_tour_file",
    "raw_bytes",
    "verify_entry",
    "write_tour_file",
]


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    caption: str
    shape: Shape
    grid: Grid
    expected: dict
    digest: str


@dataclass
class Check:
    prop: str
    ok: bool
    detail: str = ""


@dataclass
class EntryResult:
    id: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


def _data():
    return resources.files(__package__) / "data"


@lru_cache(maxsize=1)
def _manifest() -> dict:
    return json.loads((_data() / "manifest.json").read_text())


def ids() -> list[str]:
    return [e["id"] for e in _manifest()["entries"]]


def _meta(entry_id: str) -> dict:
    for e in _manifest()["entries"]:
        if e["id"] == entry_id:
            return e
    raise InputError(f"unknown corpus entry {entry_id!r}; known: {', '.join(ids())}")


def raw_bytes(entry_id: str) -> bytes:
    meta = _meta(entry_id)
    return (_data() / meta["file"]).read_bytes()


def load(entry_id: str) -> CorpusEntry:
    meta = _meta(entry_id)
    grid = parse_tour_file(raw_bytes(entry_id))
    return CorpusEntry(meta["id"], meta["caption"], grid.shape, grid, meta["expected"], meta["sha256"])


def _first_bad_line(report, shape: Shape) -> str:
    for line, s in zip(report.lines, report.line_sums):
        if s != report.magic_constant:
            return f"axis-{line.axis} line from {shape.coords(line.cells[0])} sums to {s}"
    return ""


def verify_entry(entry_id: str) -> EntryResult:
    import time

    t0 = time.perf_counter()
    result = EntryResult(entry_id)
    add = result.checks.append
    data = raw_bytes(entry_id)
    meta = _meta(entry_id)
    digest = hashlib.sha256(data).hexdigest()
    add(Check("digest", digest == meta["sha256"], "" if digest == meta["sha256"] else f"sha256 is {digest}"))
    entry = load(entry_id)
    exp = entry.expected
    grid = entry.grid

    tour = validate(grid)
    add(Check("valid", tour.valid, tour.first_violation.reason if tour.first_violation else ""))
    if "closure" in exp:
        add(Check(f"closure={exp['closure']}", tour.closure.value == exp["closure"], f"found {tour.closure.value}"))
    if "cells" in exp:
        add(Check(f"cells={exp['cells']}", grid.shape.cell_count == exp["cells"]))

    cubic = grid.shape.is_cubic
    report = magic_report(grid, include_diagonals=cubic) if cubic else None
    if "magic" in exp:
        ok = report is not None and report.is_magic == exp["magic"]
        if ok and exp["magic"]:
            ok = report.magic_constant == exp["constant"]
        detail = _first_bad_line(report, grid.shape) if report is not None else "not a hypercube"
        add(Check(f"magic={str(exp['magic']).lower()}", ok, detail))
    if "diagonally_magic" in exp:
        ok = report is not None and report.is_diagonally_magic == exp["diagonally_magic"]
        add(Check(f"diagonally_magic={str(exp['diagonally_magic']).lower()}", ok,
                  f"diagonal sums {report.diagonal_sums}" if report is not None else ""))
    if "row_sums" in exp:
        # rows run along axis 0; columns along axis 1
        counts = report.axis_counts(grid.shape.ndim)
        rows_ok = counts[0] == tuple(exp["magic_rows"])
        cols_ok = counts[1] == tuple(exp["magic_columns"])
        add(Check(f"rows {exp['magic_rows'][0]}/{exp['magic_rows'][1]} = {exp['row_sums']}", rows_ok, str(counts[0])))
        add(Check(f"columns {exp['magic_columns'][0]}/{exp['magic_columns'][1]}", cols_ok, str(counts[1])))
    if "quartile_balanced" in exp:
        q = quartile_report(grid)
        add(Check(f"quartile_balanced={str(exp['quartile_balanced']).lower()}", q.balanced == exp["quartile_balanced"],
                  f"{q.balanced_line_count}/{q.total_line_count} lines balanced"))
    result.seconds = time.perf_counter() - t0
    return result


def corpus_verify_all() -> list[EntryResult]:
    return [verify_entry(i) for i in ids()]
