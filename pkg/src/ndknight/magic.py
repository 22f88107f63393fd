"""Line sums, magic constants and the four-group balance check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InputError
from .lattice import Line, enumerate_lines, enumerate_space_diagonals
from .tour import Grid


def magic_constant(order: int, dim: int) -> int:
    """Common line sum of a 1..m**d numbering: m * (m**d + 1) / 2."""
    if order < 1 or dim < 1:
        raise InputError("order and dimension must be positive")
    return order * (order**dim + 1) // 2


@dataclass(frozen=True)
class MagicReport:
    """Sums of every axis line (and optionally every space diagonal).

    On a non-cubic board ``magic_constant``, ``is_magic`` and ``magic_ratio``
    are None: only the sums are meaningful there.
    """

    magic_constant: int | None
    lines: tuple[Line, ...]
    line_sums: tuple[int, ...]
    magic_line_count: int
    total_line_count: int
    is_magic: bool | None
    magic_ratio: Fraction | None
    diagonal_sums: tuple[int, ...] | None = None
    is_diagonally_magic: bool | None = None

    @property
    def magic_diagonal_count(self) -> int | None:
        if self.diagonal_sums is None:
            return None
        return sum(s == self.magic_constant for s in self.diagonal_sums)

    def axis_counts(self, ndim: int) -> list[tuple[int, int]]:
        """(magic lines, lines) per axis."""
        out = [[0, 0] for _ in range(ndim)]
        for line, s in zip(self.lines, self.line_sums):
            out[line.axis][1] += 1
            out[line.axis][0] += s == self.magic_constant
        return [tuple(x) for x in out]

    def as_kv(self) -> str:
        if self.is_magic is None:
            return f"magic=undefined lines={self.total_line_count}"
        parts = [
            f"magic={str(self.is_magic).lower()}",
            f"lines={self.magic_line_count}/{self.total_line_count}",
            f"constant={self.magic_constant}",
        ]
        if self.diagonal_sums is not None:
            parts.append(f"diag={self.magic_diagonal_count}/{len(self.diagonal_sums)}")
        parts.append(f"ratio={self.magic_ratio}")
        return " ".join(parts)

    def render(self, ndim: int) -> str:
        names = ["rows", "columns", "pillars", "posts"]
        rows = []
        if self.magic_constant is not None:
            rows.append(f"magic constant   {self.magic_constant}")
        for axis, (good, total) in enumerate(self.axis_counts(ndim)):
            label = names[axis] if axis < len(names) else f"axis-{axis} lines"
            rows.append(f"{label:<16} {good}/{total} magic" if self.magic_constant else f"{label:<16} {total}")
        if self.diagonal_sums is not None:
            rows.append(f"space diagonals  {self.magic_diagonal_count}/{len(self.diagonal_sums)} magic")
            rows.append("diagonal sums    " + " ".join(map(str, self.diagonal_sums)))
        if self.magic_ratio is not None:
            rows.append(f"magic ratio      {self.magic_ratio} ({float(self.magic_ratio):.1%})")
        return "\n".join(rows)


def magic_report(grid: Grid, include_diagonals: bool = False, ratio_counts_diagonals: bool = False) -> MagicReport:
    """Line-sum audit of a numbering.

    The magic ratio counts axis-aligned lines only unless
    ``ratio_counts_diagonals`` is set (which also requires the diagonals).
    """
    shape = grid.shape
    cubic = shape.is_cubic
    if (include_diagonals or ratio_counts_diagonals) and not cubic:
        raise DomainError(f"space diagonals are only defined for hypercubes, not {shape}")
    nums = grid.numbers
    lines = tuple(enumerate_lines(shape))
    sums = tuple(sum(nums[i] for i in line.cells) for line in lines)
    if not cubic:
        return MagicReport(None, lines, sums, 0, len(lines), None, None)

    target = magic_constant(shape.order, shape.ndim)
    good = sum(s == target for s in sums)
    diag_sums = diag_magic = None
    if include_diagonals or ratio_counts_diagonals:
        diag_sums = tuple(sum(nums[i] for i in d) for d in enumerate_space_diagonals(shape))
        diag_magic = all(s == target for s in diag_sums)
    if ratio_counts_diagonals:
        ratio = Fraction(good + sum(s == target for s in diag_sums), len(lines) + len(diag_sums))
    else:
        ratio = Fraction(good, len(lines))
    return MagicReport(
        magic_constant=target,
        lines=lines,
        line_sums=sums,
        magic_line_count=good,
        total_line_count=len(lines),
        is_magic=good == len(lines),
        magic_ratio=ratio,
        diagonal_sums=diag_sums,
        is_diagonally_magic=diag_magic,
    )


@dataclass(frozen=True)
class QuartileReport:
    group_count: int
    group_size: int
    balanced_line_count: int
    total_line_count: int

    @property
    def balanced(self) -> bool:
        return self.balanced_line_count == self.total_line_count

    def as_kv(self) -> str:
        return (
            f"quartiles={str(self.balanced).lower()} "
            f"balanced={self.balanced_line_count}/{self.total_line_count}"
        )


def quartile_group(number: int, cell_count: int) -> int:
    """0-based group of ``number`` when 1..N is cut into four equal runs."""
    return (number - 1) * 4 // cell_count


def quartile_report(grid: Grid) -> QuartileReport:
    shape = grid.shape
    if not shape.is_cubic or shape.order != 4:
        raise DomainError(f"quartile balance is defined for order-4 hypercubes, not {shape}")
    n = shape.cell_count
    lines = enumerate_lines(shape)
    balanced = 0
    for line in lines:
        groups = {quartile_group(grid.numbers[i], n) for i in line.cells}
        balanced += len(groups) == 4
    return QuartileReport(4, n // 4, balanced, len(lines))
