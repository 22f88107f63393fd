"""Existence verdicts for closed tours and magic tours.

Every verdict says where it comes from: a proven theorem, a conjecture, a
bundled example tour, or nothing at all.  Two-dimensional boards follow
Schwenk's theorem and three-dimensional boxes the DeMaio-Mathew theorem; from
four dimensions on the closed-tour answer is the generalized conjecture,
except that an odd number of cells is a proof of impossibility at any size.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .lattice import Shape


class Answer(str, enum.Enum):
    IMPOSSIBLE = "impossible"
    POSSIBLE = "possible"
    UNKNOWN = "unknown"


class Basis(str, enum.Enum):
    PROVEN = "proven"
    CONJECTURED = "conjectured"
    EXAMPLE = "established-by-example"
    OPEN = "open"


@dataclass(frozen=True)
class FeasibilityVerdict:
    answer: Answer
    basis: Basis
    rule: str
    citation: str
    corroboration: str | None = None

    @property
    def provenance(self) -> str:
        if self.basis is Basis.OPEN:
            return "open"
        return f"{self.basis.value}({self.rule})"

    def as_kv(self) -> str:
        out = f"answer={self.answer.value} provenance={self.provenance}"
        if self.corroboration:
            out += f" corroborated_by={self.corroboration}"
        return out

    def render(self) -> str:
        lines = [f"{self.answer.value} [{self.provenance}]", f"  {self.citation}"]
        if self.corroboration:
            lines.append(f"  corroborated by corpus entry {self.corroboration}")
        return "\n".join(lines)


SCHWENK = "Schwenk: an m x n board (m <= n) has a closed tour unless"
DEMAIO = "DeMaio-Mathew: an i x j x k box (all >= 2) has a closed tour unless"
KUMAR = "generalized conjecture: an a1 x ... x an board (all >= 2) has a closed tour unless"

# closed tours printed in the bundled corpus, keyed by sorted extents
_CLOSED_EXAMPLES = {
    (2, 2, 3, 4): "fig6",
    (2, 2, 2, 3, 4): "fig8",
    (4, 4, 4): "fig2",
    (4, 4, 4, 4): "fig9",
    (4, 4, 4, 4, 4): "fig10",
    (6, 6): "fig1b",
}


def _proven(answer, rule, citation):
    return FeasibilityVerdict(answer, Basis.PROVEN, rule, citation)


def _schwenk(m: int, n: int) -> FeasibilityVerdict:
    if m % 2 and n % 2:
        return _proven(Answer.IMPOSSIBLE, "schwenk-a", f"{SCHWENK} (a) m and n are both odd")
    if m in (1, 2, 4):
        return _proven(Answer.IMPOSSIBLE, "schwenk-b", f"{SCHWENK} (b) m is 1, 2 or 4")
    if m == 3 and n in (4, 6, 8):
        return _proven(Answer.IMPOSSIBLE, "schwenk-c", f"{SCHWENK} (c) m = 3 and n is 4, 6 or 8")
    return _proven(Answer.POSSIBLE, "schwenk", f"{SCHWENK} none of (a)-(c) holds")


def _demaio(i: int, j: int, k: int) -> FeasibilityVerdict:
    if i % 2 and j % 2 and k % 2:
        return _proven(Answer.IMPOSSIBLE, "demaio-mathew-a", f"{DEMAIO} (a) i, j and k are all odd")
    if i == j == 2:
        return _proven(Answer.IMPOSSIBLE, "demaio-mathew-b", f"{DEMAIO} (b) i = j = 2")
    if i == 2 and j == k == 3:
        return _proven(Answer.IMPOSSIBLE, "demaio-mathew-c", f"{DEMAIO} (c) i = 2 and j = k = 3")
    return _proven(Answer.POSSIBLE, "demaio-mathew", f"{DEMAIO} none of (a)-(c) holds")


def conjecture_predicts_closed(dims: Sequence[int]) -> bool:
    """The generalized conjecture's prediction for extents all >= 2, any count >= 2."""
    a = sorted(dims)
    n = len(a)
    if all(x % 2 for x in a):
        return False
    if all(x == 2 for x in a[: n - 1]):
        return False
    if all(x == 2 for x in a[: n - 2]) and a[n - 2] == a[n - 1] == 3:
        return False
    return True


def closed_tour_feasible(shape: Shape) -> FeasibilityVerdict:
    """Does the board have a closed knight's tour?

    Size-1 axes are dropped first; a board that collapses to one axis is an
    m = 1 board in Schwenk's sense.
    """
    dims = sorted(e for e in shape.dims if e > 1)
    if len(dims) <= 1:
        n = dims[0] if dims else 1
        v = _schwenk(1, n)
    elif len(dims) == 2:
        v = _schwenk(*dims)
    elif len(dims) == 3:
        v = _demaio(*dims)
    else:
        a = dims
        n = len(a)
        if all(x % 2 for x in a):
            return _proven(
                Answer.IMPOSSIBLE,
                "parity-odd-cells",
                "a board with an odd number of cells has no closed tour: "
                "its first and last cells share a color",
            )
        if all(x == 2 for x in a[: n - 1]):
            return FeasibilityVerdict(
                Answer.IMPOSSIBLE, Basis.CONJECTURED, "conjecture-b", f"{KUMAR} (b) all but one extent equal 2"
            )
        if all(x == 2 for x in a[: n - 2]) and a[n - 2] == a[n - 1] == 3:
            return FeasibilityVerdict(
                Answer.IMPOSSIBLE,
                Basis.CONJECTURED,
                "conjecture-c",
                f"{KUMAR} (c) all but two extents equal 2 and the other two equal 3",
            )
        v = FeasibilityVerdict(Answer.POSSIBLE, Basis.CONJECTURED, "conjecture", f"{KUMAR} none of (a)-(c) holds")
    if v.answer is Answer.POSSIBLE:
        example = _CLOSED_EXAMPLES.get(tuple(dims))
        if example is not None:
            v = FeasibilityVerdict(v.answer, v.basis, v.rule, v.citation, example)
    return v


def magic_tour_feasible(order: int, dim: int) -> FeasibilityVerdict:
    """Can an order-``order`` hypercube in ``dim`` dimensions carry a magic tour?"""
    if order < 1 or dim < 1:
        raise ValueError("order and dimension must be positive")
    if order == 1:
        return _proven(Answer.POSSIBLE, "single-cell", "a single cell is trivially a magic tour")
    if order % 2:
        return _proven(
            Answer.IMPOSSIBLE,
            "odd-order-magic",
            "odd order: odd numbers sit on the start color, and two adjacent parallel "
            "lines hold different counts of that color, so their sums differ in parity",
        )
    if order == 2 and dim >= 2:
        return _proven(Answer.IMPOSSIBLE, "immobile", "a knight cannot move on a board with all extents 2")
    if dim == 2 and order % 4 == 2:
        return _proven(
            Answer.IMPOSSIBLE, "singly-even-2d", "Jelliss: no magic tour on a plane board with singly-even sides"
        )
    if order == 4 and dim in (3, 4, 5):
        example = {3: "fig2", 4: "fig9", 5: "fig10"}[dim]
        return FeasibilityVerdict(
            Answer.POSSIBLE, Basis.EXAMPLE, example, f"bundled magic tour {example}", example
        )
    return FeasibilityVerdict(Answer.UNKNOWN, Basis.OPEN, "open", "no theorem or bundled example decides this case")


@dataclass(frozen=True)
class ConjectureCheck:
    shape: Shape
    predicted: bool
    observed: bool | None  # None when the search ran out of budget
    skipped: bool = False

    @property
    def disagrees(self) -> bool:
        return self.observed is not None and self.observed != self.predicted


def shapes_in_range(ndim: int, low: int, high: int, max_cells: int) -> list[Shape]:
    """Sorted-extent shapes (one per multiset) with every extent in [low, high]."""
    out = []
    for dims in itertools.combinations_with_replacement(range(low, high + 1), ndim):
        s = Shape(dims)
        if s.cell_count <= max_cells:
            out.append(s)
    return out


def verify_conjecture(
    shapes: Iterable[Shape], cell_budget: int, search: Callable[[Shape], bool | None]
) -> list[ConjectureCheck]:
    """Compare predictions against ``search(shape)`` (True = closed tour exists).

    Shapes over ``cell_budget`` are skipped and flagged.  The full comparison
    list is returned; filter on ``disagrees`` for findings.
    """
    results = []
    for shape in shapes:
        predicted = closed_tour_feasible(shape).answer is Answer.POSSIBLE
        if shape.cell_count > cell_budget:
            results.append(ConjectureCheck(shape, predicted, None, skipped=True))
            continue
        results.append(ConjectureCheck(shape, predicted, search(shape)))
    return results
