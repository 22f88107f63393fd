"""Reader and writer for ``ndkt v1`` tour files.

Layout::

    ndkt v1
    shape: 4 4 4
    19 46 63 2        <- one printed row = one run along axis 0
    48 1 20 61        <- rows stack along axis 1 to form a block
    ...
                      <- one blank line when axis 2 advances,
                         two when axis 3 advances, and so on

The writer is canonical: single spaces, one trailing newline, exact blank-line
counts.  The reader ignores blank lines, so hand-edited files need not get the
separators exactly right.
"""

from __future__ import annotations

from ..errors import CellCountError, DuplicateNumberError, HeaderError, NumberRangeError, ParseError
from ..lattice import Shape
from ..tour import Grid

HEADER = "ndkt v1"


def write_tour_file(grid: Grid) -> bytes:
    shape = grid.shape
    width = shape.dims[0]
    height = shape.dims[1] if shape.ndim > 1 else 1
    higher = shape.dims[2:]
    out = [HEADER, "shape: " + " ".join(map(str, shape.dims))]
    nums = grid.numbers
    block_size = width * height
    for b in range(len(nums) // block_size):
        if b:
            # blank lines = 1 + number of higher axes that wrapped to zero
            level, rest = 1, b
            for e in higher:
                if rest % e:
                    break
                rest //= e
                level += 1
            out.extend([""] * level)
        base = b * block_size
        for r in range(height):
            row = nums[base + r * width : base + (r + 1) * width]
            out.append(" ".join(map(str, row)))
    return ("\n".join(out) + "\n").encode("ascii")


def parse_tour_file(data: bytes | str) -> Grid:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise HeaderError(f"expected header {HEADER!r}", line=1, column=1)
    if len(lines) < 2 or not lines[1].startswith("shape:"):
        raise HeaderError("expected 'shape: <e0> <e1> ...'", line=2, column=1)
    try:
        shape = Shape([int(t) for t in lines[1][len("shape:"):].split()])
    except ValueError as exc:
        raise HeaderError(f"bad shape line: {exc}", line=2, column=7) from None

    n = shape.cell_count
    width = shape.dims[0]
    values: list[tuple[int, int, int]] = []  # value, line, column
    for lineno, raw in enumerate(lines[2:], start=3):
        if not raw.strip():
            continue
        row = []
        col = 0
        for tok in raw.split():
            col = raw.index(tok, col)
            try:
                row.append((int(tok), lineno, col + 1))
            except ValueError:
                raise ParseError(f"not an integer: {tok!r}", lineno, col + 1) from None
            col += len(tok)
        if len(row) != width:
            raise ParseError(f"row has {len(row)} values, expected {width}", lineno, 1)
        values.extend(row)
        if len(values) > n:
            raise CellCountError(f"more than {n} values for shape {shape}", lineno, 1)
    if len(values) != n:
        raise CellCountError(f"found {len(values)} values, shape {shape} needs {n}", len(lines), None)

    seen: dict[int, int] = {}
    for idx, (v, lineno, col) in enumerate(values):
        if not 1 <= v <= n:
            raise NumberRangeError(
                f"number {v} at {shape.coords(idx)} is outside 1..{n}", lineno, col
            )
        if v in seen:
            a, b = shape.coords(seen[v]), shape.coords(idx)
            raise DuplicateNumberError(f"number {v} appears at both {a} and {b}", a, b, lineno, col)
        seen[v] = idx
    return Grid(shape, [v for v, _, _ in values])
