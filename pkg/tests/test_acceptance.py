"""Acceptance criteria 1-10, one check function each.

Every check returns ``(ok, detail)``.  Under pytest the outcome is recorded
and a one-line PASS/FAIL summary per criterion is printed at the end of the
run; ``python tests/test_acceptance.py`` prints the same lines directly.

Criteria 2 and 3 each contain a clause that no correct implementation can
meet (see the xfail reasons).  Those clauses are checked literally and
reported as FAIL; the remaining parts are asserted by their own tests.
"""

import contextlib
import io
import itertools
import random
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest

from ndknight import corpus
from ndknight.cli import main as cli_main
from ndknight.feasibility import Answer, Basis, closed_tour_feasible, shapes_in_range, verify_conjecture
from ndknight.lattice import Shape, build_move_table, cell_color, degree_profile, knight_neighbors
from ndknight.magic import magic_constant, magic_report
from ndknight.search import SearchConfig, Status, count_tours, find_magic_tour, find_tour, replay_pruner
from ndknight.tour import grid_from_tour, tour_from_grid, validate

sys.path.insert(0, str(Path(__file__).parent))
from oracles import all_cells, closed_obstruction, count_hamiltonian, degree_extremes_brute, is_knight_step  # noqa: E402


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


# ---- 1 -------------------------------------------------------------------------

def check_1():
    buf = io.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = cli_main(["corpus", "verify-all"])
    elapsed = time.perf_counter() - t0
    problems = []
    if code != 0:
        problems.append(f"exit {code}")

    def rep(entry_id, diagonals=False):
        g = corpus.load(entry_id).grid
        return g, validate(g), (magic_report(g, include_diagonals=diagonals) if g.shape.is_cubic else None)

    for entry_id in ("fig2", "fig3"):
        g, v, m = rep(entry_id, True)
        want = "closed" if entry_id == "fig2" else "open"
        if not (v.valid and v.closure.value == want and m.is_magic and m.magic_constant == 130
                and m.magic_diagonal_count == 4 == len(m.diagonal_sums)):
            problems.append(entry_id)
    for entry_id, want, cells in (("fig6", "closed", 48), ("fig7", "open", 48), ("fig8", "closed", 96)):
        g, v, _ = rep(entry_id)
        if not (v.valid and v.closure.value == want and g.shape.cell_count == cells):
            problems.append(entry_id)
    g, v, m = rep("fig9", True)
    if not (v.valid and m.is_magic and m.magic_constant == 514 and m.magic_line_count == 256
            and m.is_diagonally_magic is False):
        problems.append("fig9")
    g, v, m = rep("fig10")
    if not (v.valid and m.is_magic and m.magic_constant == 2050 and m.magic_line_count == 1280):
        problems.append("fig10")
    g, v, m = rep("fig1b")
    if not (v.valid and m.axis_counts(2) == [(6, 6), (0, 6)] and m.magic_constant == 111):
        problems.append("fig1b")
    if elapsed >= 5.0:
        problems.append(f"took {elapsed:.2f}s")
    ok = not problems
    return ok, f"corpus verify-all exit {code}, 8 entries, {elapsed:.2f}s" + ("" if ok else f"; bad: {problems}")


# ---- 2 -------------------------------------------------------------------------

def _constants_from_figures():
    g = corpus.load("fig10").grid
    row = sum(g.at((x, 0, 0, 0, 0)) for x in range(4))
    pairs = [((4, 3), 130), ((4, 4), 514), ((6, 2), 111), ((4, 5), row)]
    return [(m, d, want, magic_constant(m, d)) for (m, d), want in pairs]


def check_2_constants():
    rows = _constants_from_figures()
    bad = [(m, d, got, want) for m, d, want, got in rows if got != want]
    return not bad, "130, 514, 111 and 2050 (fig10 first row) reproduced" if not bad else f"mismatch {bad}"


def _even_odd_order_constants():
    return [(m, d, magic_constant(m, d)) for m in (3, 5, 7) for d in range(2, 6) if magic_constant(m, d) % 2 == 0]


def check_2():
    ok_constants, detail = check_2_constants()
    even = _even_odd_order_constants()
    ok = ok_constants and not even
    if even:
        listed = ", ".join(f"({m},{d})->{c}" for m, d, c in even)
        detail += f"; odd-m constants NOT all odd: {listed} (m = 3 mod 4 with odd d)"
    else:
        detail += "; odd-m constants all odd"
    return ok, detail


# ---- 3 -------------------------------------------------------------------------

FIGURE_TOTALS = [12, 15, 18, 15, 18, 21, 18, 21, 24]


def check_3_table():
    prof = degree_profile(Shape([4, 4, 4, 4]))
    classes = prof.distinct([(0, 1), (2, 3)])
    problems = []
    if (prof.min_total, prof.max_total) != (12, 24):
        problems.append(f"min/max {prof.min_total}/{prof.max_total}")
    if len(classes) != 9 or sorted(t for _, t in classes) != sorted(FIGURE_TOTALS):
        problems.append(f"{len(classes)} profiles")
    for n in (2, 3, 4):
        p = degree_profile(Shape([4] * n))
        if p.min_total != n * (n - 1) or (p.min_total, p.max_total) != degree_extremes_brute([4] * n):
            problems.append(f"4^{n} min {p.min_total}")
    return not problems, "4^4: min 12, max 24, 9 profiles; 4^n min = n(n-1)" if not problems else str(problems)


def check_3():
    ok, detail = check_3_table()
    maxima = {n: degree_profile(Shape([4] * n)).max_total for n in (2, 3, 4)}
    wrong = {n: mx for n, mx in maxima.items() if mx != 4 * n * (n - 1)}
    if wrong:
        ok = False
        detail += "; 4^n max != 4n(n-1): " + ", ".join(f"n={n} max={mx} (not {4 * n * (n - 1)})" for n, mx in wrong.items())
        # the bound itself is reached on larger boards
        detail += "; 4n(n-1) reached on 5^n centers: " + str(
            [len(knight_neighbors(Shape([5] * n), (2,) * n)) for n in (2, 3, 4)]
        )
    return ok, detail


# ---- 4 -------------------------------------------------------------------------

MINIMAL = [("3x4", "open", 1.0), ("3x4x2", "closed", 10.0), ("3x4x2x2", "closed", 60.0), ("3x4x2x2x2", "closed", 600.0)]


def check_4():
    parts = []
    ok = True
    for text, mode, limit in MINIMAL:
        shape = Shape.parse(text)
        out, dt = _timed(find_tour, shape, SearchConfig(mode=mode, time_limit=limit))
        good = out.found and dt < limit
        if good:
            emitted = corpus.write_tour_file(grid_from_tour(out.tour))
            report = validate(corpus.parse_tour_file(emitted))
            good = report.valid and (mode == "open" or report.closed)
        ok &= good
        parts.append(f"{text} {mode} {dt:.3f}s{'' if good else ' FAILED'}")
    return ok, "; ".join(parts)


# ---- 5 -------------------------------------------------------------------------

NONEXISTENCE = [("2x3", "open"), ("3x3", "open"), ("2x2x2", "open"), ("4x4", "closed"), ("2x2x3x3", "closed")]


def check_5():
    parts = []
    ok = True
    for text, mode in NONEXISTENCE:
        shape = Shape.parse(text)
        out, dt = _timed(find_tour, shape, SearchConfig(mode=mode, exhaustive=True, time_limit=60))
        counted = count_tours(shape, mode, time_limit=60)
        good = out.status is Status.EXHAUSTED and counted.count == 0 and counted.status is Status.EXHAUSTED and dt < 60
        ok &= good
        parts.append(f"{text} {mode}: 0 ({dt:.3f}s)" if good else f"{text} {mode}: {out.status.value}")
    return ok, "; ".join(parts)


# ---- 6 -------------------------------------------------------------------------

def odd_shapes(limit=27, max_axes=5):
    out = []
    for d in range(1, max_axes + 1):
        for dims in itertools.combinations_with_replacement(range(1, limit + 1), d):
            n = 1
            for e in dims:
                n *= e
            if n <= limit and n % 2:
                out.append(Shape(dims))
    return out


def check_6():
    disagreements = []
    shapes = odd_shapes()
    t0 = time.perf_counter()
    for s in shapes:
        for perm in set(itertools.permutations(s.dims)):
            v = closed_tour_feasible(Shape(perm))
            if not (v.answer is Answer.IMPOSSIBLE and v.basis is Basis.PROVEN):
                disagreements.append(f"{Shape(perm)} verdict {v.provenance}")
        out = count_tours(s, "closed", time_limit=60)
        if out.status is not Status.EXHAUSTED or out.count != 0:
            disagreements.append(f"{s} search {out.as_kv()}")
    dt = time.perf_counter() - t0
    ok = not disagreements
    return ok, f"{len(shapes)} shapes (1-5 axes, all orderings for verdicts), {len(disagreements)} disagreements, {dt:.2f}s"


# ---- 7 -------------------------------------------------------------------------

def check_7():
    def search(shape):
        out = find_tour(shape, SearchConfig(mode="closed", exhaustive=True, time_limit=300))
        if out.status is Status.BUDGET:
            return None
        return out.found

    shapes = shapes_in_range(4, 2, 4, 48)
    checks, dt = _timed(verify_conjecture, shapes, 48, search)
    bad = [c for c in checks if c.disagrees or c.observed is None]
    # independent certificate for every nonexistence claim
    for c in checks:
        if c.observed is False:
            certified = closed_obstruction(c.shape.dims) is not None
            if not certified and c.shape.cell_count <= 24:
                certified = count_hamiltonian(c.shape.dims, closed=True) == 0
            if not certified:
                bad.append(c)
    summary = ", ".join(f"{c.shape}:{'exists' if c.observed else 'none'}" for c in checks)
    ok = not bad and dt < 600
    return ok, f"{len(checks)} shapes, {len(bad)} disagreements/undecided, {dt:.2f}s ({summary})"


# ---- 8 -------------------------------------------------------------------------

def random_shapes(count=200, max_cells=500, seed=2024):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(1, 6)
        dims = [rng.randint(1, 10) for _ in range(d)]
        n = 1
        for e in dims:
            n *= e
        if n <= max_cells:
            out.append(Shape(dims))
    return out


def _brute_adjacency(dims):
    cells = all_cells(dims)
    adj = {c: [] for c in cells}
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            if is_knight_step(a, b):
                adj[a].append(b)
                adj[b].append(a)
    return adj


def check_8():
    shapes = random_shapes()
    mismatches = 0
    t0 = time.perf_counter()
    for s in shapes:
        brute = _brute_adjacency(s.dims)
        table = build_move_table(s)
        for cell in s.cells():
            if sorted(knight_neighbors(s, cell)) != sorted(brute[cell]):
                mismatches += 1
        for i, nbrs in enumerate(table.adjacency):
            ci = s.coords(i)
            for j in nbrs:
                if i not in table.adjacency[j] or cell_color(ci) == cell_color(s.coords(j)):
                    mismatches += 1
    dt = time.perf_counter() - t0
    cells = sum(s.cell_count for s in shapes)
    return mismatches == 0, f"{len(shapes)} shapes, {cells} cells, {mismatches} mismatches, {dt:.1f}s"


# ---- 9 -------------------------------------------------------------------------

def check_9():
    g2 = corpus.load("fig2").grid
    prefix = tour_from_grid(g2).sequence[:16]
    out, dt = _timed(find_magic_tour, Shape([4, 4, 4]), SearchConfig(prefix=prefix, time_limit=60))
    ok = out.found and dt < 60 and magic_report(grid_from_tour(out.tour)).is_magic
    detail = f"prefix-16 completion {out.status.value} in {dt:.2f}s ({out.nodes_expanded} nodes)"
    prunes = {}
    for entry_id in ("fig2", "fig3", "fig9", "fig10"):
        prunes[entry_id] = len(replay_pruner(corpus.load(entry_id).grid))
    ok = ok and not any(prunes.values())
    return ok, detail + "; replay prunes " + ", ".join(f"{k}={v}" for k, v in prunes.items())


# ---- 10 ------------------------------------------------------------------------

def check_10():
    outs = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            path = Path(tmp) / f"run{k}.ndkt"
            proc = subprocess.run(
                [sys.executable, "-m", "ndknight", "search", "--shape", "3x4x2x2", "--mode", "closed",
                 "--seed", "0", "--jobs", "1", "--out", str(path)],
                capture_output=True, text=True, timeout=120,
            )
            nodes = next((t for t in proc.stdout.split() if t.startswith("nodes=")), None)
            outs.append((proc.returncode, path.read_bytes() if path.exists() else None, nodes))
    (c1, f1, n1), (c2, f2, n2) = outs
    ok = c1 == c2 == 0 and f1 is not None and f1 == f2 and n1 == n2 is not None
    return ok, f"exit {c1}/{c2}, files identical={f1 == f2}, {n1} vs {n2}"


# ---- pytest wiring -------------------------------------------------------------

def _run(acceptance, number, check):
    ok, detail = check()
    acceptance(number, ok, detail)
    return ok, detail


def test_criterion_1(acceptance):
    ok, detail = _run(acceptance, 1, check_1)
    assert ok, detail


def test_criterion_2_figure_constants():
    ok, detail = check_2_constants()
    assert ok, detail


def test_criterion_2_odd_m_parity_holds_for_even_d():
    assert all(d % 2 == 1 and m % 4 == 3 for m, d, _ in _even_odd_order_constants())


@pytest.mark.xfail(strict=True, reason="m(m^d+1)/2 is even when m = 3 mod 4 and d is odd, e.g. (3,3) -> 42")
def test_criterion_2(acceptance):
    ok, detail = _run(acceptance, 2, check_2)
    assert ok, detail


def test_criterion_3_table():
    ok, detail = check_3_table()
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="an order-4 board caps each plane at 4 moves, so its max is 2n(n-1), 24 for n=4")
def test_criterion_3(acceptance):
    ok, detail = _run(acceptance, 3, check_3)
    assert ok, detail


def test_criterion_4(acceptance):
    ok, detail = _run(acceptance, 4, check_4)
    assert ok, detail


def test_criterion_5(acceptance):
    ok, detail = _run(acceptance, 5, check_5)
    assert ok, detail


def test_criterion_6(acceptance):
    ok, detail = _run(acceptance, 6, check_6)
    assert ok, detail


def test_criterion_7(acceptance):
    ok, detail = _run(acceptance, 7, check_7)
    assert ok, detail


def test_criterion_8(acceptance):
    ok, detail = _run(acceptance, 8, check_8)
    assert ok, detail


def test_criterion_9(acceptance):
    ok, detail = _run(acceptance, 9, check_9)
    assert ok, detail


def test_criterion_10(acceptance):
    ok, detail = _run(acceptance, 10, check_10)
    assert ok, detail


if __name__ == "__main__":
    checks = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]
    for number, check in enumerate(checks, start=1):
        ok, detail = check()
        print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
