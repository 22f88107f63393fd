"""Backtracking search for open, closed and magic knight's tours.

All searches share one depth-first engine.  Visited cells are an integer
bitmask; every cell keeps ``avail``, the number of its neighbors that can
still be path-neighbors (unvisited cells, the current head, and for closed
tours the start).  A Hamiltonian path needs every unvisited cell to keep two
such neighbors, except one free end for open paths, which gives a cheap and
sound dead-end test after each move.

Magic searches number cells in visit order and add :class:`LineConstraints`.
"""

from __future__ import annotations

import enum
import heapq
import random
import sys
import time
from collections import deque
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .errors import DomainError, InputError
from .lattice import MoveTable, Shape, enumerate_lines
from .magic import magic_constant, quartile_group
from .tour import Closure, Tour, grid_from_tour, move_table, validate

DEFAULT_MAGIC_BUDGET = 60.0


class Mode(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"
    MAGIC = "magic"


class Heuristic(str, enum.Enum):
    WARNSDORFF = "warnsdorff"
    LEXICOGRAPHIC = "lexicographic"


class Status(str, enum.Enum):
    FOUND = "found"
    EXHAUSTED = "exhausted_no_solution"
    BUDGET = "budget_exceeded"


@dataclass(frozen=True)
class SearchConfig:
    mode: Mode = Mode.OPEN
    heuristic: Heuristic = Heuristic.WARNSDORFF
    time_limit: float | None = None  # seconds
    node_limit: int | None = None
    seed: int = 0
    prefix: tuple[int, ...] = ()
    quartile_pruning: bool = False
    exhaustive: bool = False
    jobs: int = 1
    require_closed: bool = False  # magic mode only

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        object.__setattr__(self, "prefix", tuple(self.prefix))


@dataclass
class Progress:
    nodes: int
    elapsed: float
    depth_histogram: list[int]

    @property
    def rate(self) -> float:
        return self.nodes / self.elapsed if self.elapsed > 0 else 0.0


@dataclass
class SearchOutcome:
    status: Status
    tour: Tour | None = None
    nodes_expanded: int = 0
    elapsed: float = 0.0
    count: int | None = None

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    def as_kv(self) -> str:
        parts = [f"status={self.status.value}", f"nodes={self.nodes_expanded}"]
        if self.count is not None:
            parts.append(f"count={self.count}")
        if self.tour is not None:
            parts.append(f"closure={validate(self.tour).closure.value}")
        parts.append(f"elapsed={self.elapsed:.3f}s")
        return " ".join(parts)


class BudgetExceeded(Exception):
    pass


class _Found(Exception):
    pass


def check_config(shape: Shape, config: SearchConfig) -> None:
    if config.mode is Mode.MAGIC and not shape.is_cubic:
        raise DomainError(f"magic search needs a hypercube, not {shape}")
    if config.quartile_pruning and (config.mode is not Mode.MAGIC or shape.dims[0] != 4 or not shape.is_cubic):
        raise InputError("quartile pruning applies to magic search on order-4 boards")
    if config.require_closed and config.mode is not Mode.MAGIC:
        raise InputError("require_closed is a magic-mode option; use mode=closed")
    if config.jobs < 1:
        raise InputError("jobs must be at least 1")
    table = move_table(shape)
    prefix = config.prefix
    if len(set(prefix)) != len(prefix):
        raise InputError("prefix revisits a cell")
    for i in prefix:
        if not 0 <= i < shape.cell_count:
            raise InputError(f"prefix cell {i} is outside {shape}")
    for a, b in zip(prefix, prefix[1:]):
        if not table.adjacent(a, b):
            raise InputError(f"prefix step {shape.coords(a)} -> {shape.coords(b)} is not a knight move")


class LineConstraints:
    """Line-sum pruning for magic searches.

    Cells get numbers in visit order, so after step ``k`` the unused numbers
    are exactly ``k+1..N``, and a cell's number has the parity of its color
    relative to the start cell.  Rules, checked after every placement:

    * a full line sums to the magic constant;
    * the unused numbers of the right parities can still reach a partial
      line's deficit (smallest and largest attainable sums bracket it);
    * a line with one empty cell fixes that cell's number; fixed numbers must
      be distinct, later than ``k``, and reachable in the remaining steps;
    * with ``quartiles``, no line gets two numbers from the same quarter of
      1..N.
    """

    def __init__(self, shape: Shape, table: MoveTable, quartiles: bool = False):
        self.shape = shape
        self.n = shape.cell_count
        self.target = magic_constant(shape.order, shape.ndim)
        self.lines = [line.cells for line in enumerate_lines(shape)]
        self.cell_lines = [[] for _ in range(self.n)]
        for li, cells in enumerate(self.lines):
            for c in cells:
                self.cell_lines[c].append(li)
        self.table = table
        self.quartiles = quartiles
        self.number = [0] * self.n
        self.sums = [0] * len(self.lines)
        self.left_odd = [0] * len(self.lines)
        self.left_even = [0] * len(self.lines)
        self.groups = [0] * len(self.lines)
        self.odd_cell = None  # per cell: does it receive an odd number
        self.lo = [0] * self.n
        self.hi = [0] * self.n
        self.max_passes = 20
        self._dist: dict[int, list[int]] = {}
        self._colors = [sum(shape.coords(i)) % 2 for i in range(self.n)]

    def start(self, cell: int) -> None:
        c0 = self._colors[cell]
        self.odd_cell = [col == c0 for col in self._colors]
        for li, cells in enumerate(self.lines):
            self.left_odd[li] = sum(self.odd_cell[c] for c in cells)
            self.left_even[li] = len(cells) - self.left_odd[li]

    def distances(self, src: int) -> list[int]:
        d = self._dist.get(src)
        if d is None:
            d = [-1] * self.n
            d[src] = 0
            queue = deque([src])
            adj = self.table.adjacency
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if d[w] < 0:
                        d[w] = d[u] + 1
                        queue.append(w)
            self._dist[src] = d
        return d

    def place(self, cell: int, k: int) -> str | None:
        """Number ``cell`` with ``k``; returns a prune reason or None.

        Always pair with :meth:`unplace`, even when a reason is returned.
        """
        self.number[cell] = k
        odd = self.odd_cell[cell]
        grp = quartile_group(k, self.n) if self.quartiles else 0
        clash = False
        for li in self.cell_lines[cell]:
            self.sums[li] += k
            if odd:
                self.left_odd[li] -= 1
            else:
                self.left_even[li] -= 1
            if self.quartiles:
                bit = 1 << grp
                if self.groups[li] & bit:
                    clash = True
                self.groups[li] += bit
        if (k % 2 == 1) != odd:
            return "number parity does not match cell color"
        if clash:
            return "two numbers from one quarter share a line"
        return self._check(cell, k)

    def unplace(self, cell: int, k: int) -> None:
        self.number[cell] = 0
        odd = self.odd_cell[cell]
        grp = quartile_group(k, self.n) if self.quartiles else 0
        for li in self.cell_lines[cell]:
            self.sums[li] -= k
            if odd:
                self.left_odd[li] += 1
            else:
                self.left_even[li] += 1
            if self.quartiles:
                self.groups[li] -= 1 << grp

    def _check(self, cell: int, k: int) -> str | None:
        n, target = self.n, self.target
        number, odd_cell = self.number, self.odd_cell
        lo, hi = self.lo, self.hi
        # smallest unused odd/even numbers and largest odd/even numbers
        lo_odd = k + 1 if (k + 1) % 2 else k + 2
        lo_even = k + 2 if (k + 1) % 2 else k + 1
        hi_odd = n if n % 2 else n - 1
        hi_even = n - 1 if n % 2 else n
        active = []
        for li, cells in enumerate(self.lines):
            o, e = self.left_odd[li], self.left_even[li]
            deficit = target - self.sums[li]
            if o + e == 0:
                if deficit:
                    return f"full line sums to {self.sums[li]}, not {target}"
                continue
            if deficit % 2 != o % 2:
                return "line deficit has the wrong parity"
            low = o * lo_odd + o * (o - 1) + e * lo_even + e * (e - 1)
            high = o * hi_odd - o * (o - 1) + e * hi_even - e * (e - 1)
            if not low <= deficit <= high:
                return "unused numbers cannot complete a line"
            active.append(([c for c in cells if not number[c]], deficit))

        empties = [c for c in range(n) if not number[c]]
        for c in empties:
            if odd_cell[c]:
                lo[c], hi[c] = lo_odd, hi_odd
            else:
                lo[c], hi[c] = lo_even, hi_even
        # tighten every empty cell's interval against each of its lines
        for _ in range(self.max_passes):
            changed = False
            for cells, deficit in active:
                slo = shi = 0
                for c in cells:
                    slo += lo[c]
                    shi += hi[c]
                if deficit < slo or deficit > shi:
                    return "line sum is out of reach"
                for c in cells:
                    top = deficit - slo + lo[c]
                    if top < hi[c]:
                        if (top % 2 == 1) != odd_cell[c]:
                            top -= 1
                        hi[c] = top
                        changed = True
                    bottom = deficit - shi + hi[c]
                    if bottom > lo[c]:
                        if (bottom % 2 == 1) != odd_cell[c]:
                            bottom += 1
                        lo[c] = bottom
                        changed = True
                    if lo[c] > hi[c]:
                        return "a cell has no number left"
            if not changed:
                break

        # distinct numbers: earliest-deadline-first per parity class
        for want_odd in (True, False):
            spans = sorted((lo[c], hi[c]) for c in empties if odd_cell[c] == want_odd)
            heap: list[int] = []
            i, t = 0, 0
            while i < len(spans) or heap:
                if not heap:
                    t = max(t, spans[i][0])
                while i < len(spans) and spans[i][0] <= t:
                    heapq.heappush(heap, spans[i][1])
                    i += 1
                if heapq.heappop(heap) < t:
                    return "cells cannot all get distinct numbers"
                t += 2

        dist = self.distances(cell)
        for c in empties:
            d = dist[c]
            if d < 0 or d > hi[c] - k:
                return "a cell cannot be reached in time"
        return None

    def allows(self, cell: int, value: int) -> bool:
        return self.lo[cell] <= value <= self.hi[cell]

    def deadline(self, cell: int) -> int:
        return self.hi[cell]


class _Engine:
    """Depth-first search state for one board and one configuration."""

    def __init__(self, shape: Shape, config: SearchConfig, count_all: bool = False,
                 progress: Callable[[Progress], None] | None = None, stop_event=None):
        self.shape = shape
        self.config = config
        self.table = move_table(shape)
        self.adj = self.table.adjacency
        self.masks = self.table.masks
        self.n = shape.cell_count
        self.closed = config.mode is Mode.CLOSED or config.require_closed
        self.count_all = count_all
        self.rng = random.Random(config.seed) if config.seed else None
        self.warnsdorff = config.heuristic is Heuristic.WARNSDORFF
        self.constraints = (
            LineConstraints(shape, self.table, config.quartile_pruning) if config.mode is Mode.MAGIC else None
        )
        self.progress = progress
        self.stop_event = stop_event
        self.nodes = 0
        self.count = 0
        self.hist = [0] * (self.n + 1)
        self.t0 = time.monotonic()
        self._next_report = self.t0 + 1.0
        self.deadline = self.t0 + config.time_limit if config.time_limit is not None else None
        self.node_limit = config.node_limit
        self.path: list[int] = []
        self.result: list[int] | None = None

    # ---- state ---------------------------------------------------------
    def _reset(self, start: int) -> None:
        self.avail = list(self.table.degrees)
        self.unvisited = (1 << self.n) - 1
        self.ends = sum(1 for d in self.avail if d <= 1)
        self.path = []
        if self.constraints is not None:
            self.constraints.start(start)

    def _tick(self) -> None:
        self.nodes += 1
        if self.progress is not None:
            self.hist[len(self.path)] += 1
        if self.nodes & 1023 == 0:
            now = time.monotonic()
            if self.deadline is not None and now > self.deadline:
                raise BudgetExceeded
            if self.stop_event is not None and self.stop_event.is_set():
                raise BudgetExceeded
            if self.progress is not None and now >= self._next_report:
                self._next_report = now + 1.0
                self.progress(Progress(self.nodes, now - self.t0, list(self.hist)))
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceeded

    def _enter(self, u: int) -> str | None:
        """Move the head to ``u``.  Returns a prune reason or None."""
        path = self.path
        avail = self.avail
        bit = 1 << u
        reason = None
        if avail[u] <= 1:
            self.ends -= 1
        self.unvisited &= ~bit
        if path:
            h = path[-1]
            sticky = self.closed and len(path) == 1
            if not sticky:
                unv = self.unvisited
                for w in self.adj[h]:
                    avail[w] -= 1
                    if (unv >> w) & 1:
                        a = avail[w]
                        if a == 1:
                            self.ends += 1
                        if a == 0 or (self.closed and a < 2):
                            reason = "unvisited cell cut off"
        path.append(u)
        if reason is None:
            remaining = self.n - len(path)
            if remaining:
                if self.ends > (0 if self.closed else 1):
                    reason = "too many dead ends"
                elif self.closed and not (self.masks[path[0]] & self.unvisited):
                    reason = "start cell cannot be rejoined"
        if self.constraints is not None:
            r = self.constraints.place(u, len(path))
            reason = reason or r
        return reason

    def _leave(self) -> None:
        path = self.path
        u = path.pop()
        if self.constraints is not None:
            self.constraints.unplace(u, len(path) + 1)
        avail = self.avail
        if path:
            h = path[-1]
            sticky = self.closed and len(path) == 1
            if not sticky:
                unv = self.unvisited
                for w in self.adj[h]:
                    if (unv >> w) & 1 and avail[w] == 1:
                        self.ends -= 1
                    avail[w] += 1
        self.unvisited |= 1 << u
        if avail[u] <= 1:
            self.ends += 1

    # ---- search --------------------------------------------------------
    def _candidates(self, h: int) -> list[int]:
        unv = self.unvisited
        cands = [u for u in self.adj[h] if (unv >> u) & 1]
        cons = self.constraints
        if cons is not None:
            value = len(self.path) + 1
            cands = [u for u in cands if cons.allows(u, value)]
        if len(cands) > 1:
            if self.rng is not None:
                self.rng.shuffle(cands)
            if self.warnsdorff:
                masks = self.masks
                if cons is not None:
                    cands.sort(key=lambda u: (cons.deadline(u), (masks[u] & unv).bit_count()))
                else:
                    cands.sort(key=lambda u: (masks[u] & unv).bit_count())
        return cands

    def _dfs(self) -> None:
        self._tick()
        path = self.path
        if len(path) == self.n:
            if self.closed and not (self.masks[path[-1]] >> path[0]) & 1:
                return
            if self.count_all:
                self.count += 1
                return
            self.result = list(path)
            raise _Found
        for u in self._candidates(path[-1]):
            if self._enter(u) is None:
                self._dfs()
            self._leave()

    def run_from(self, prefix: Sequence[int]) -> bool:
        """Search all completions of ``prefix``.  True when stopped by a find."""
        self._reset(prefix[0])
        entered = 0
        try:
            for u in prefix:
                entered += 1
                if self._enter(u) is not None:
                    break
            else:
                self._dfs()
        except _Found:
            return True
        # budget exceptions propagate without unwinding; the engine is discarded then
        for _ in range(entered):
            self._leave()
        return False

    def starts(self) -> list[tuple[int, ...]]:
        prefix = self.config.prefix
        if prefix:
            return [prefix]
        if self.closed:
            return [(0,)]
        return [(s,) for s in range(self.n)]

    def elapsed(self) -> float:
        return time.monotonic() - self.t0


def _connected(table: MoveTable) -> bool:
    n = len(table.adjacency)
    seen = {0}
    queue = [0]
    while queue:
        u = queue.pop()
        for w in table.adjacency[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def _verify_found(shape: Shape, seq: list[int], config: SearchConfig) -> Tour:
    tour = Tour(shape, seq)
    report = validate(tour)
    assert report.valid, report
    if config.mode is Mode.CLOSED or config.require_closed:
        assert report.closure is Closure.CLOSED
    if config.mode is Mode.MAGIC:
        from .magic import magic_report

        assert magic_report(grid_from_tour(tour)).is_magic
    return tour


def _run_serial(shape: Shape, config: SearchConfig, count_all: bool, progress=None, stop_event=None,
                branches: Sequence[tuple[int, ...]] | None = None) -> SearchOutcome:
    engine = _Engine(shape, config, count_all=count_all, progress=progress, stop_event=stop_event)
    limit = sys.getrecursionlimit()
    if limit < shape.cell_count + 500:
        sys.setrecursionlimit(shape.cell_count + 500)
    n = shape.cell_count
    trivially_empty = n > 1 and not _connected(engine.table)
    try:
        if not trivially_empty:
            for prefix in branches if branches is not None else engine.starts():
                if engine.run_from(prefix):
                    tour = _verify_found(shape, engine.result, config)
                    return SearchOutcome(Status.FOUND, tour, engine.nodes, engine.elapsed())
    except BudgetExceeded:
        return SearchOutcome(Status.BUDGET, None, engine.nodes, engine.elapsed(),
                             engine.count if count_all else None)
    status = Status.FOUND if count_all and engine.count else Status.EXHAUSTED
    return SearchOutcome(status, None, engine.nodes, engine.elapsed(), engine.count if count_all else None)


# ---- parallel ---------------------------------------------------------------

_worker_stop = None


def _init_worker(event):
    global _worker_stop
    _worker_stop = event


def _worker(shape_dims, config, count_all, branch):
    return _run_serial(Shape(shape_dims), config, count_all, stop_event=_worker_stop, branches=[branch])


def _split(shape: Shape, config: SearchConfig) -> list[tuple[int, ...]]:
    """Branches at the first free decision: start cells, or the second cell."""
    engine = _Engine(shape, config)
    starts = engine.starts()
    if len(starts) > 1:
        return starts
    (prefix,) = starts
    table = move_table(shape)
    taken = set(prefix)
    return [prefix + (u,) for u in table.adjacency[prefix[-1]] if u not in taken] or [prefix]


def _run_parallel(shape: Shape, config: SearchConfig, count_all: bool) -> SearchOutcome:
    import multiprocessing as mp

    t0 = time.monotonic()
    branches = _split(shape, config)
    ctx = mp.get_context("spawn")
    stop = ctx.Manager().Event()
    nodes = 0
    count = 0
    budget_hit = False
    found = None
    with ProcessPoolExecutor(config.jobs, mp_context=ctx, initializer=_init_worker, initargs=(stop,)) as pool:
        pending = {pool.submit(_worker, shape.dims, config, count_all, b) for b in branches}
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                out = fut.result()
                nodes += out.nodes_expanded
                if out.count:
                    count += out.count
                if out.status is Status.BUDGET and not (found and not count_all):
                    budget_hit = True
                if out.status is Status.FOUND and out.tour is not None and found is None:
                    found = out.tour
                    if not count_all:
                        stop.set()
    elapsed = time.monotonic() - t0
    if found is not None and not count_all:
        return SearchOutcome(Status.FOUND, found, nodes, elapsed)
    if budget_hit:
        return SearchOutcome(Status.BUDGET, None, nodes, elapsed, count if count_all else None)
    status = Status.FOUND if count_all and count else Status.EXHAUSTED
    return SearchOutcome(status, None, nodes, elapsed, count if count_all else None)


# ---- public API -----------------------------------------------------------------

def find_tour(shape: Shape, config: SearchConfig | None = None,
              progress: Callable[[Progress], None] | None = None) -> SearchOutcome:
    """Find one open or closed tour (or a magic one in magic mode).

    Closed searches start at flat index 0 unless a prefix is given; open
    searches try every start cell.  The search is complete, so without a
    budget it either finds a tour or reports ``exhausted_no_solution``.
    """
    config = config or SearchConfig()
    check_config(shape, config)
    if config.mode is Mode.MAGIC and config.time_limit is None and config.node_limit is None \
            and not config.exhaustive:
        config = replace(config, time_limit=DEFAULT_MAGIC_BUDGET)
    if shape.cell_count == 1:
        t = Tour(shape, [0])
        if config.mode is Mode.CLOSED or config.require_closed:
            return SearchOutcome(Status.EXHAUSTED, None, 1, 0.0)
        return SearchOutcome(Status.FOUND, t, 1, 0.0)
    if config.jobs > 1:
        return _run_parallel(shape, config, count_all=False)
    return _run_serial(shape, config, count_all=False, progress=progress)


def find_magic_tour(shape: Shape, config: SearchConfig | None = None,
                    progress: Callable[[Progress], None] | None = None) -> SearchOutcome:
    """Magic-constrained search; odd orders are refused before searching."""
    from .feasibility import Answer, magic_tour_feasible

    if not shape.is_cubic:
        raise DomainError(f"magic search needs a hypercube, not {shape}")
    verdict = magic_tour_feasible(shape.order, shape.ndim)
    if verdict.answer is Answer.IMPOSSIBLE:
        raise DomainError(f"no magic tour on {shape}: {verdict.citation}")
    config = replace(config or SearchConfig(), mode=Mode.MAGIC)
    return find_tour(shape, config, progress=progress)


def count_tours(shape: Shape, mode: Mode | str = Mode.CLOSED, time_limit: float | None = None,
                node_limit: int | None = None, jobs: int = 1, progress=None) -> SearchOutcome:
    """Count tour sequences exhaustively.

    Closed tours are counted from flat index 0, once per direction; open tours
    from every start, so each path is counted once per direction as well.
    ``status`` is ``found`` for a positive count, ``exhausted_no_solution`` for
    zero and ``budget_exceeded`` when the count is partial (and so proves
    nothing).
    """
    config = SearchConfig(mode=mode, heuristic=Heuristic.LEXICOGRAPHIC, time_limit=time_limit,
                          node_limit=node_limit, exhaustive=True, jobs=jobs)
    if config.mode is Mode.MAGIC:
        raise InputError("counting is only offered for open and closed tours")
    if shape.cell_count == 1:
        count = 1 if config.mode is Mode.OPEN else 0
        return SearchOutcome(Status.FOUND if count else Status.EXHAUSTED, None, 1, 0.0, count)
    if jobs > 1:
        return _run_parallel(shape, config, count_all=True)
    return _run_serial(shape, config, count_all=True, progress=progress)


def exhaustive_closed_count(shape: Shape, time_limit: float | None = None, node_limit: int | None = None,
                            jobs: int = 1, progress=None) -> SearchOutcome:
    """Number of closed tour sequences from flat index 0; see :func:`count_tours`."""
    return count_tours(shape, Mode.CLOSED, time_limit, node_limit, jobs, progress)


def replay_pruner(grid_or_tour, quartile_pruning: bool = False, closed: bool = False,
                  magic: bool | None = None) -> list[tuple[int, str]]:
    """Feed a finished tour through the search's pruning rules step by step.

    Returns ``(step, reason)`` for every step at which a rule fired; a sound
    pruner yields an empty list for any real tour.  The magic rules apply by
    default on hypercubes.
    """
    from .tour import Grid, tour_from_grid

    tour = tour_from_grid(grid_or_tour) if isinstance(grid_or_tour, Grid) else grid_or_tour
    shape = tour.shape
    if magic is None:
        magic = shape.is_cubic
    mode = Mode.MAGIC if magic else Mode.OPEN
    config = SearchConfig(mode=mode, quartile_pruning=quartile_pruning, require_closed=closed and mode is Mode.MAGIC)
    if closed and mode is not Mode.MAGIC:
        config = replace(config, mode=Mode.CLOSED)
    engine = _Engine(shape, config)
    engine._reset(tour.sequence[0])
    events = []
    for k, u in enumerate(tour.sequence, start=1):
        reason = engine._enter(u)
        if reason is not None:
            events.append((k, reason))
    return events
