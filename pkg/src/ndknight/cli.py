"""Command-line front end.

Exit codes: 0 success/found/verified, 1 check failed/not found/exhausted,
2 usage or input error.  Reports go to stdout, progress and diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import corpus
from .errors import KnightError, ParseError
from .feasibility import Answer, Basis, closed_tour_feasible, magic_tour_feasible
from .lattice import Shape, degree_profile, enumerate_lines, enumerate_space_diagonals
from .magic import magic_report, quartile_report
from .search import (
    Heuristic,
    Mode,
    SearchConfig,
    Status,
    exhaustive_closed_count,
    find_magic_tour,
    find_tour,
)
from .tour import grid_from_tour, tour_from_grid, validate

OK, FAIL, USAGE = 0, 1, 2

_UNITS = {"ms": 0.001, "s": 1.0, "m": 60.0, "h": 3600.0}


def parse_duration(text: str) -> float:
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*(ms|s|m|h)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r} (use e.g. 60s, 10m)")
    return float(m.group(1)) * _UNITS[m.group(2) or "s"]


def _shape(text: str) -> Shape:
    try:
        return Shape.parse(text)
    except KnightError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("NDKT_JOBS", "1")))
    except ValueError:
        return 1


def _load_grid(src: str):
    """A path to an ndkt file, or the id of a bundled entry."""
    path = Path(src)
    if path.exists():
        return corpus.parse_tour_file(path.read_bytes())
    if src in corpus.ids():
        return corpus.load(src).grid
    raise KnightError(f"no such file or corpus entry: {src}")


def _progress_printer(p):
    hist = p.depth_histogram
    deepest = max((d for d, c in enumerate(hist) if c), default=0)
    print(f"[progress] nodes={p.nodes} rate={p.rate:.0f}/s deepest={deepest}", file=sys.stderr)


def _emit_tour(tour, out: str | None) -> None:
    data = corpus.write_tour_file(grid_from_tour(tour))
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


# ---- subcommands -------------------------------------------------------------

def cmd_verify(args) -> int:
    grid = _load_grid(args.file)
    report = validate(grid)
    print(f"board {grid.shape} ({grid.shape.cell_count} cells)")
    if report.valid:
        print(f"tour: valid, {report.closure.value}")
    else:
        print(f"tour: INVALID, {report.first_violation.reason}")
    print(report.as_kv())
    ok = report.valid
    if args.magic or args.diagonals:
        if not grid.shape.is_cubic:
            raise KnightError(f"magic checks need a hypercube, not {grid.shape}")
        m = magic_report(grid, include_diagonals=args.diagonals)
        print(m.render(grid.shape.ndim))
        print(m.as_kv())
        ok = ok and bool(m.is_magic)
        if args.diagonals:
            ok = ok and bool(m.is_diagonally_magic)
    if args.quartiles:
        q = quartile_report(grid)
        print(f"quartile groups of {q.group_size}: {q.balanced_line_count}/{q.total_line_count} lines balanced")
        print(q.as_kv())
        ok = ok and q.balanced
    return OK if ok else FAIL


def cmd_search(args) -> int:
    shape = args.shape
    if args.mode == "closed" or args.count:
        verdict = closed_tour_feasible(shape)
        if verdict.answer is Answer.IMPOSSIBLE:
            if verdict.basis is Basis.PROVEN and not args.force:
                print(verdict.render())
                print(f"status=infeasible nodes=0 {verdict.as_kv()}")
                return FAIL
            print(f"warning: {verdict.provenance}: {verdict.citation}; searching anyway", file=sys.stderr)
    progress = _progress_printer if args.verbose else None
    if args.count:
        outcome = exhaustive_closed_count(shape, time_limit=args.budget, node_limit=args.nodes, jobs=args.jobs,
                                          progress=progress)
        print(outcome.as_kv())
        return OK if outcome.status is Status.FOUND else FAIL
    config = SearchConfig(
        mode=Mode(args.mode),
        heuristic=Heuristic(args.heuristic),
        time_limit=args.budget,
        node_limit=args.nodes,
        seed=args.seed,
        exhaustive=args.exhaustive,
        jobs=args.jobs,
    )
    outcome = find_tour(shape, config, progress=progress)
    print(outcome.as_kv())
    if outcome.tour is None:
        return FAIL
    _emit_tour(outcome.tour, args.out)
    return OK


def cmd_magic_search(args) -> int:
    shape = args.shape
    if not shape.is_cubic:
        raise KnightError(f"magic search needs a hypercube, not {shape}")
    verdict = magic_tour_feasible(shape.order, shape.ndim)
    if verdict.answer is Answer.IMPOSSIBLE:
        print(verdict.render())
        print(f"status=infeasible nodes=0 {verdict.as_kv()}")
        return FAIL
    prefix = ()
    if args.prefix:
        grid = _load_grid(args.prefix)
        if grid.shape != shape:
            raise KnightError(f"prefix source has shape {grid.shape}, not {shape}")
        seq = tour_from_grid(grid).sequence
        prefix = seq[: args.prefix_steps] if args.prefix_steps is not None else seq
    config = SearchConfig(
        mode=Mode.MAGIC,
        time_limit=args.budget,
        node_limit=args.nodes,
        seed=args.seed,
        prefix=prefix,
        quartile_pruning=args.quartiles,
        exhaustive=args.exhaustive,
        jobs=args.jobs,
        require_closed=args.closed,
    )
    outcome = find_magic_tour(shape, config, progress=_progress_printer if args.verbose else None)
    print(outcome.as_kv())
    if outcome.tour is None:
        return FAIL
    print(magic_report(grid_from_tour(outcome.tour)).as_kv())
    _emit_tour(outcome.tour, args.out)
    return OK


def cmd_feasibility(args) -> int:
    if args.shape is not None:
        if args.magic:
            if not args.shape.is_cubic:
                raise KnightError("magic feasibility is defined for hypercubes")
            verdict = magic_tour_feasible(args.shape.order, args.shape.ndim)
        else:
            verdict = closed_tour_feasible(args.shape)
        label = str(args.shape)
    elif args.order is not None and args.dim is not None:
        if args.magic:
            verdict = magic_tour_feasible(args.order, args.dim)
        else:
            verdict = closed_tour_feasible(Shape([args.order] * args.dim))
        label = "x".join([str(args.order)] * args.dim)
    else:
        raise KnightError("give --shape, or --order with --dim")
    kind = "magic tour" if args.magic else "closed tour"
    print(f"{kind} on {label}: {verdict.render()}")
    print(verdict.as_kv())
    return OK


def _figure_axis_groups(shape: Shape):
    groups = []
    for a in range(0, shape.ndim - 1, 2):
        if shape.dims[a] == shape.dims[a + 1]:
            groups.append((a, a + 1))
    return groups or None


def cmd_analyze(args) -> int:
    shape = args.shape
    if not (args.degrees or args.lines):
        raise KnightError("choose --degrees and/or --lines")
    if args.degrees:
        prof = degree_profile(shape)
        letters = "xyzwuvst"
        names = [
            (letters[i] if i < len(letters) else f"a{i}") + (letters[j] if j < len(letters) else f"a{j}")
            for i, j in prof.planes
        ]
        groups = None if args.all_profiles else _figure_axis_groups(shape)
        classes = prof.distinct(groups)
        print(f"degree profile of {shape}: min={prof.min_total} max={prof.max_total}")
        header = "profile " + " ".join(f"{n:>3}" for n in names) + "  total"
        print(header)
        for k, (vec, total) in enumerate(classes):
            label = chr(ord("A") + k) if k < 26 else str(k)
            print(f"{label:<7} " + " ".join(f"{v:>3}" for v in vec) + f"  {total:>5}")
        print(f"min={prof.min_total} max={prof.max_total} profiles={len(classes)}")
    if args.lines:
        lines = enumerate_lines(shape)
        per_axis = [0] * shape.ndim
        for line in lines:
            per_axis[line.axis] += 1
        for a, c in enumerate(per_axis):
            print(f"axis {a}: {c} lines of length {shape.dims[a]}")
        diag = len(enumerate_space_diagonals(shape)) if shape.is_cubic else None
        if diag is not None:
            print(f"space diagonals: {diag}")
        print(f"lines={len(lines)}" + (f" diagonals={diag}" if diag is not None else ""))
    return OK


def cmd_corpus(args) -> int:
    if args.action == "list":
        for i in corpus.ids():
            e = corpus.load(i)
            print(f"{i:<6} {str(e.shape):<12} {e.caption}")
        return OK
    if args.action == "show":
        if not args.id:
            raise KnightError("corpus show needs an entry id")
        e = corpus.load(args.id)
        sys.stdout.write(corpus.raw_bytes(args.id).decode())
        return OK
    if args.action == "verify-all":
        results = corpus.corpus_verify_all()
        for r in results:
            if r.passed:
                print(f"PASS {r.id:<6} " + ", ".join(c.prop for c in r.checks) + f" ({r.seconds * 1000:.0f} ms)")
            else:
                for c in r.failures():
                    print(f"FAIL {r.id:<6} {c.prop}: {c.detail}")
        bad = sum(not r.passed for r in results)
        print(f"corpus={len(results) - bad}/{len(results)} passed")
        return OK if bad == 0 else FAIL
    raise KnightError(f"unknown corpus action {args.action}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ndkt", description="Knight's tours on n-dimensional boards.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check a tour file")
    v.add_argument("file", help="ndkt file or corpus id")
    v.add_argument("--magic", action="store_true")
    v.add_argument("--diagonals", action="store_true")
    v.add_argument("--quartiles", action="store_true")
    v.set_defaults(func=cmd_verify)

    def budget_flags(sp, default_budget):
        sp.add_argument("--budget", type=parse_duration, default=default_budget, help="wall clock, e.g. 60s, 10m")
        sp.add_argument("--nodes", type=int, default=None, help="node limit")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=_default_jobs())
        sp.add_argument("--exhaustive", action="store_true")
        sp.add_argument("--out", default=None)
        sp.add_argument("-v", "--verbose", action="store_true")

    s = sub.add_parser("search", help="find an open or closed tour")
    s.add_argument("--shape", type=_shape, required=True)
    s.add_argument("--mode", choices=["open", "closed"], default="open")
    s.add_argument("--heuristic", choices=[h.value for h in Heuristic], default="warnsdorff")
    s.add_argument("--count", action="store_true", help="count closed tours from the first cell")
    s.add_argument("--force", action="store_true", help="search even when proven impossible")
    budget_flags(s, None)
    s.set_defaults(func=cmd_search)

    m = sub.add_parser("magic-search", help="find a magic tour")
    m.add_argument("--shape", type=_shape, required=True)
    m.add_argument("--prefix", default=None, help="ndkt file or corpus id whose opening steps seed the search")
    m.add_argument("--prefix-steps", type=int, default=None)
    m.add_argument("--quartiles", action="store_true")
    m.add_argument("--closed", action="store_true")
    budget_flags(m, 60.0)
    m.set_defaults(func=cmd_magic_search)

    f = sub.add_parser("feasibility", help="theorem/conjecture verdicts")
    f.add_argument("--shape", type=_shape, default=None)
    f.add_argument("--order", type=int, default=None)
    f.add_argument("--dim", type=int, default=None)
    f.add_argument("--magic", action="store_true")
    f.set_defaults(func=cmd_feasibility)

    a = sub.add_parser("analyze", help="board geometry")
    a.add_argument("--shape", type=_shape, required=True)
    a.add_argument("--degrees", action="store_true")
    a.add_argument("--lines", action="store_true")
    a.add_argument("--all-profiles", action="store_true", help="do not merge profiles by axis symmetry")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("corpus", help="bundled figure tours")
    c.add_argument("action", choices=["list", "show", "verify-all"])
    c.add_argument("id", nargs="?")
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE
    except (KnightError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
