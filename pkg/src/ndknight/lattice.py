"""Geometry of n-dimensional rectangular boards.

Cells are addressed either by a coordinate tuple or by a flat index.  The flat
index puts axis 0 fastest, then axis 1, then the higher axes, which is the
order in which the numbers of a layered figure are read: left to right along a
printed row, rows top to bottom, then successive blocks.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

from .errors import CapacityError, DomainError, InputError

Cell = tuple[int, ...]

MAX_TABLE_CELLS = 1 << 28


class Color(enum.IntEnum):
    LIGHT = 0
    DARK = 1


@dataclass(frozen=True)
class Shape:
    """Per-axis extents of a board."""

    dims: tuple[int, ...]

    def __init__(self, dims: Sequence[int]):
        dims = tuple(int(e) for e in dims)
        if not dims:
            raise InputError("a shape needs at least one axis")
        if any(e < 1 for e in dims):
            raise InputError(f"extents must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def parse(cls, text: str) -> Shape:
        """Parse ``"3x4x2x2"`` style text."""
        parts = text.strip().lower().replace("×", "x").split("x")
        try:
            dims = [int(p) for p in parts]
        except ValueError:
            raise InputError(f"cannot parse shape {text!r}") from None
        if any(e < 1 for e in dims):
            raise InputError(f"extents must be positive in {text!r}")
        return cls(dims)

    def __str__(self) -> str:
        return "x".join(map(str, self.dims))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def cell_count(self) -> int:
        return math.prod(self.dims)

    @property
    def is_cubic(self) -> bool:
        return len(set(self.dims)) == 1

    @property
    def order(self) -> int:
        if not self.is_cubic:
            raise DomainError(f"{self} is not a hypercube")
        return self.dims[0]

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for e in self.dims:
            out.append(s)
            s *= e
        return tuple(out)

    def contains(self, cell: Sequence[int]) -> bool:
        return len(cell) == len(self.dims) and all(0 <= c < e for c, e in zip(cell, self.dims))

    def check(self, cell: Sequence[int]) -> Cell:
        cell = tuple(cell)
        if not self.contains(cell):
            raise InputError(f"cell {cell} is outside board {self}")
        return cell

    def index(self, cell: Sequence[int]) -> int:
        cell = self.check(cell)
        return sum(c * s for c, s in zip(cell, self.strides))

    def coords(self, index: int) -> Cell:
        if not 0 <= index < self.cell_count:
            raise InputError(f"flat index {index} is outside board {self}")
        out = []
        for e in self.dims:
            index, c = divmod(index, e)
            out.append(c)
        return tuple(out)

    def cells(self) -> Iterator[Cell]:
        """All cells in flat-index order."""
        for rev in itertools.product(*(range(e) for e in reversed(self.dims))):
            yield rev[::-1]


def parse_shape(text: str) -> Shape:
    return Shape.parse(text)


def _offsets(ndim: int) -> list[tuple[int, int, int, int]]:
    """(axis_a, delta_a, axis_b, delta_b) for every knight step in ``ndim`` dimensions."""
    out = []
    for a, b in itertools.combinations(range(ndim), 2):
        for da, db in ((1, 2), (2, 1)):
            for sa, sb in itertools.product((1, -1), repeat=2):
                out.append((a, sa * da, b, sb * db))
    return out


def knight_neighbors(shape: Shape, cell: Sequence[int]) -> list[Cell]:
    """Cells one knight move away from ``cell``, sorted by flat index.

    A move changes exactly two coordinates, one by 1 and the other by 2.
    """
    cell = shape.check(cell)
    out = []
    for a, da, b, db in _offsets(shape.ndim):
        ca, cb = cell[a] + da, cell[b] + db
        if 0 <= ca < shape.dims[a] and 0 <= cb < shape.dims[b]:
            nxt = list(cell)
            nxt[a], nxt[b] = ca, cb
            out.append(tuple(nxt))
    out.sort(key=shape.index)
    return out


def cell_color(cell: Sequence[int]) -> Color:
    return Color(sum(cell) % 2)


@dataclass(frozen=True)
class MoveTable:
    """Precomputed knight adjacency over flat indices."""

    shape: Shape
    adjacency: tuple[tuple[int, ...], ...]

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbor sets as integer bitmasks keyed by flat index."""
        out = []
        for nbrs in self.adjacency:
            m = 0
            for j in nbrs:
                m |= 1 << j
            out.append(m)
        return tuple(out)

    @property
    def min_degree(self) -> int:
        return min(self.degrees)

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def edge_count(self) -> int:
        """Number of directed edges (twice the undirected count)."""
        return sum(self.degrees)

    def adjacent(self, i: int, j: int) -> bool:
        return (self.masks[i] >> j) & 1 == 1


def build_move_table(shape: Shape) -> MoveTable:
    n = shape.cell_count
    if n > MAX_TABLE_CELLS:
        raise CapacityError(f"{shape} has {n} cells; move tables are limited to {MAX_TABLE_CELLS}")
    dims, strides = shape.dims, shape.strides
    steps = [(a, da, b, db, da * strides[a] + db * strides[b]) for a, da, b, db in _offsets(shape.ndim)]
    adjacency = []
    for idx, cell in enumerate(shape.cells()):
        nbrs = [
            idx + jump
            for a, da, b, db, jump in steps
            if 0 <= cell[a] + da < dims[a] and 0 <= cell[b] + db < dims[b]
        ]
        nbrs.sort()
        adjacency.append(tuple(nbrs))
    return MoveTable(shape, tuple(adjacency))


@dataclass(frozen=True)
class DegreeProfile:
    """Move counts per cell, split by coordinate plane.

    ``planes`` lists axis pairs ``(i, j)`` with ``i < j`` in lexicographic
    order; ``per_plane[k]`` holds one count per plane for the cell with flat
    index ``k``.
    """

    shape: Shape
    planes: tuple[tuple[int, int], ...]
    per_plane: tuple[tuple[int, ...], ...]
    totals: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "totals", tuple(sum(p) for p in self.per_plane))

    @property
    def min_total(self) -> int:
        return min(self.totals)

    @property
    def max_total(self) -> int:
        return max(self.totals)

    def distinct(self, axis_groups: Sequence[Sequence[int]] | None = None) -> list[tuple[tuple[int, ...], int]]:
        """Distinct ``(per_plane, total)`` pairs, sorted by total then vector.

        ``axis_groups`` names sets of interchangeable axes; each profile is
        reduced to its least representative under permutations inside every
        group.  The layered-figure view of a 4-D board, where the xy layer and
        the zw block arrangement are each drawn up to symmetry, corresponds to
        ``[(0, 1), (2, 3)]``.
        """
        perms = [tuple(range(self.shape.ndim))]
        if axis_groups:
            perms = []
            choices = [list(itertools.permutations(g)) for g in axis_groups]
            for combo in itertools.product(*choices):
                p = list(range(self.shape.ndim))
                for group, image in zip(axis_groups, combo):
                    for src, dst in zip(group, image):
                        p[src] = dst
                perms.append(tuple(p))
        where = {pl: k for k, pl in enumerate(self.planes)}
        seen = set()
        for vec in set(self.per_plane):
            variants = []
            for p in perms:
                moved = [0] * len(vec)
                for k, (i, j) in enumerate(self.planes):
                    a, b = sorted((p[i], p[j]))
                    moved[where[(a, b)]] = vec[k]
                variants.append(tuple(moved))
            seen.add(min(variants))
        return sorted(((v, sum(v)) for v in seen), key=lambda t: (t[1], t[0]))


def degree_profile(shape: Shape) -> DegreeProfile:
    if shape.ndim < 2:
        raise DomainError("degree profiles need at least two axes")
    planes = tuple(itertools.combinations(range(shape.ndim), 2))

    def plane_moves(e_a, c_a, e_b, c_b):
        count = 0
        for da, db in ((1, 2), (2, 1), (1, -2), (2, -1), (-1, 2), (-2, 1), (-1, -2), (-2, -1)):
            if 0 <= c_a + da < e_a and 0 <= c_b + db < e_b:
                count += 1
        return count

    dims = shape.dims
    rows = []
    for cell in shape.cells():
        rows.append(tuple(plane_moves(dims[i], cell[i], dims[j], cell[j]) for i, j in planes))
    return DegreeProfile(shape, planes, tuple(rows))


class Line(NamedTuple):
    axis: int
    cells: tuple[int, ...]


def enumerate_lines(shape: Shape) -> list[Line]:
    """Every maximal axis-aligned run, grouped by axis then by first cell."""
    lines = []
    n = shape.cell_count
    for axis, (extent, stride) in enumerate(zip(shape.dims, shape.strides)):
        for base in range(n):
            if (base // stride) % extent == 0:
                lines.append(Line(axis, tuple(base + t * stride for t in range(extent))))
    return lines


def enumerate_space_diagonals(shape: Shape) -> list[tuple[int, ...]]:
    """Corner-to-corner diagonals of a hypercube, as flat-index sequences.

    Each diagonal starts at coordinate 0 on axis 0, so a diagonal and its
    reverse are not both listed.
    """
    if not shape.is_cubic:
        raise DomainError(f"space diagonals are only defined for hypercubes, not {shape}")
    m, d = shape.order, shape.ndim
    out = []
    for signs in itertools.product((1, -1), repeat=d - 1):
        seq = []
        for t in range(m):
            cell = (t,) + tuple(t if s > 0 else m - 1 - t for s in signs)
            seq.append(shape.index(cell))
        out.append(tuple(seq))
    return out


def symmetries(shape: Shape) -> Iterator[tuple[tuple[int, ...], tuple[bool, ...]]]:
    """Axis permutations and reflections that map the board onto itself.

    Yields ``(perm, flips)``: the new axis ``k`` is old axis ``perm[k]``,
    reflected when ``flips[k]`` is true.
    """
    d = shape.ndim
    for perm in itertools.permutations(range(d)):
        if any(shape.dims[perm[k]] != shape.dims[k] for k in range(d)):
            continue
        for flips in itertools.product((False, True), repeat=d):
            yield perm, flips


def transform_index_map(shape: Shape, perm: Sequence[int], flips: Sequence[bool]) -> tuple[Shape, list[int]]:
    """Relabel cells under an axis permutation plus reflections.

    Returns the image shape and ``mapping`` with ``mapping[old] = new`` flat
    index.
    """
    new_shape = Shape([shape.dims[p] for p in perm])
    mapping = []
    for cell in shape.cells():
        new = [cell[p] for p in perm]
        for k, f in enumerate(flips):
            if f:
                new[k] = new_shape.dims[k] - 1 - new[k]
        mapping.append(new_shape.index(new))
    return new_shape, mapping
