"""Tours as visiting sequences and as numbered grids."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InputError
from .lattice import MoveTable, Shape, build_move_table, cell_color, symmetries, transform_index_map


@lru_cache(maxsize=64)
def move_table(shape: Shape) -> MoveTable:
    """Cached :func:`build_move_table`."""
    return build_move_table(shape)


class Closure(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class Tour:
    """Flat cell indices in visiting order.  Not validated on construction."""

    shape: Shape
    sequence: tuple[int, ...]

    def __init__(self, shape: Shape, sequence: Sequence[int]):
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "sequence", tuple(int(i) for i in sequence))

    def __len__(self):
        return len(self.sequence)

    def cells(self):
        return [self.shape.coords(i) for i in self.sequence]

    def rotated(self, k: int) -> Tour:
        """Same cycle started ``k`` steps later.  Only meaningful for closed tours."""
        k %= max(len(self.sequence), 1)
        return Tour(self.shape, self.sequence[k:] + self.sequence[:k])

    def reversed(self) -> Tour:
        return Tour(self.shape, self.sequence[::-1])


@dataclass(frozen=True)
class Grid:
    """Visit step (1..N) stored per cell, flat-index order.

    The numbering is not required to be a bijection here; :func:`validate`
    reports that.
    """

    shape: Shape
    numbers: tuple[int, ...]

    def __init__(self, shape: Shape, numbers: Sequence[int]):
        numbers = tuple(int(v) for v in numbers)
        if len(numbers) != shape.cell_count:
            raise InputError(f"{len(numbers)} numbers given for board {shape} with {shape.cell_count} cells")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "numbers", numbers)

    def at(self, cell: Sequence[int]) -> int:
        return self.numbers[self.shape.index(cell)]

    def numbering_problem(self) -> tuple[int, str] | None:
        """First missing/duplicated/out-of-range number, or None for a bijection."""
        n = len(self.numbers)
        where: dict[int, int] = {}
        for idx, v in enumerate(self.numbers):
            if not 1 <= v <= n:
                return v, f"number {v} at {self.shape.coords(idx)} is outside 1..{n}"
            if v in where:
                return v, (
                    f"number {v} appears at both {self.shape.coords(where[v])} and {self.shape.coords(idx)}"
                )
            where[v] = idx
        return None


@dataclass(frozen=True)
class Violation:
    step: int
    reason: str


@dataclass(frozen=True)
class TourReport:
    valid: bool
    closure: Closure
    first_violation: Violation | None = None

    @property
    def closed(self) -> bool:
        return self.closure is Closure.CLOSED

    def as_kv(self) -> str:
        parts = [f"valid={str(self.valid).lower()}", f"closure={self.closure.value}"]
        if self.first_violation is not None:
            parts.append(f"violation_step={self.first_violation.step}")
        return " ".join(parts)


def validate(obj: Grid | Tour) -> TourReport:
    """Check that consecutive numbers sit a knight move apart."""
    if isinstance(obj, Tour) and len(obj.sequence) != obj.shape.cell_count:
        raise InputError(f"tour has {len(obj.sequence)} steps, board {obj.shape} has {obj.shape.cell_count} cells")
    grid = obj if isinstance(obj, Grid) else grid_from_tour(obj, check=False)
    problem = grid.numbering_problem()
    if problem is not None:
        return TourReport(False, Closure.OPEN, Violation(*problem))
    seq = _sequence(grid)
    table = move_table(grid.shape)
    for k in range(len(seq) - 1):
        if not table.adjacent(seq[k], seq[k + 1]):
            a, b = grid.shape.coords(seq[k]), grid.shape.coords(seq[k + 1])
            return TourReport(
                False,
                Closure.OPEN,
                Violation(k + 1, f"step {k + 1} at {a} to step {k + 2} at {b} is not a knight move"),
            )
    closed = len(seq) > 1 and table.adjacent(seq[-1], seq[0])
    return TourReport(True, Closure.CLOSED if closed else Closure.OPEN)


def _sequence(grid: Grid) -> list[int]:
    seq = [0] * len(grid.numbers)
    for idx, v in enumerate(grid.numbers):
        seq[v - 1] = idx
    return seq


def grid_from_tour(tour: Tour, check: bool = True) -> Grid:
    n = tour.shape.cell_count
    if check and sorted(tour.sequence) != list(range(n)):
        raise InputError("tour sequence is not a permutation of the board's cells")
    numbers = [0] * n
    for k, idx in enumerate(tour.sequence):
        if 0 <= idx < n:
            numbers[idx] = k + 1
    return Grid(tour.shape, numbers)


def tour_from_grid(grid: Grid) -> Tour:
    problem = grid.numbering_problem()
    if problem is not None:
        raise InputError(problem[1])
    return Tour(grid.shape, _sequence(grid))


def endpoints_same_color(obj: Grid | Tour) -> bool:
    tour = obj if isinstance(obj, Tour) else tour_from_grid(obj)
    shape = tour.shape
    return cell_color(shape.coords(tour.sequence[0])) == cell_color(shape.coords(tour.sequence[-1]))


def canonical_form(tour: Tour) -> tuple[int, ...]:
    """Lexicographically least sequence over board symmetries and reversal.

    Two tours are the same up to symmetry exactly when their canonical forms
    are equal.  Start-point rotation of closed tours is not factored out.
    """
    best = None
    for perm, flips in symmetries(tour.shape):
        _, mapping = transform_index_map(tour.shape, perm, flips)
        seq = tuple(mapping[i] for i in tour.sequence)
        for cand in (seq, seq[::-1]):
            if best is None or cand < best:
                best = cand
    return best


def same_up_to_symmetry(a: Tour, b: Tour) -> bool:
    return a.shape == b.shape and canonical_form(a) == canonical_form(b)
