"""Tour validation, the grid text format, and necessary admissibility checks."""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from princetour.core import BoardDims, Cell, MoveGraph, Piece, build_move_graph


class TourKind(enum.Enum):
    CLOSED = "closed"
    OPEN = "open"


class Condition(enum.Enum):
    COVERAGE = "Coverage"
    STEP = "Step"
    CLOSURE = "Closure"
    BOUNDS = "Bounds"
    LENGTH = "Length"
    DUPLICATE = "Duplicate"


@dataclass(frozen=True)
class Tour:
    cells: tuple[Cell, ...]
    kind: TourKind
    dims: BoardDims

    def __init__(self, cells: Iterable[Sequence[int]], kind: TourKind, dims: BoardDims):
        object.__setattr__(self, "cells", tuple(Cell(int(r), int(c)) for r, c in cells))
        object.__setattr__(self, "kind", TourKind(kind))
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.cells)

    def rotated(self, shift: int) -> Tour:
        """Same cycle, started ``shift`` positions later."""
        s = shift % len(self.cells) if self.cells else 0
        return Tour(self.cells[s:] + self.cells[:s], self.kind, self.dims)

    def reversed(self) -> Tour:
        return Tour(self.cells[::-1], self.kind, self.dims)


@dataclass(frozen=True)
class Violation:
    condition: Condition
    index: int | None  # 1-based tour position, None when no single position is to blame
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def conditions(self) -> set[Condition]:
        return {v.condition for v in self.violations}

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        lines = ["invalid"]
        for v in self.violations:
            where = "" if v.index is None else f" at position {v.index}"
            lines.append(f"  {v.condition.value}{where}: {v.detail}")
        return "\n".join(lines)


def verify_tour(tour: Tour, piece: Piece) -> VerifyReport:
    """Check coverage, consecutive attacks and (for closed tours) closure.

    Every broken condition is reported once, at its first offending position.
    """
    dims = tour.dims
    cells = tour.cells
    total = dims.size
    offs = piece.offset_set
    found: list[Violation] = []

    if len(cells) != total:
        found.append(Violation(Condition.LENGTH, None, f"tour has {len(cells)} cells, board has {total}"))

    m, n = dims.rows, dims.cols
    seen: set[Cell] = set()
    bounds_hit = dup_hit = False
    for pos, cell in enumerate(cells, 1):
        if not (1 <= cell[0] <= m and 1 <= cell[1] <= n):
            if not bounds_hit:
                found.append(Violation(Condition.BOUNDS, pos, f"cell {cell} outside {dims}"))
                bounds_hit = True
            continue
        if cell in seen and not dup_hit:
            found.append(Violation(Condition.DUPLICATE, pos, f"cell {cell} visited twice"))
            dup_hit = True
        seen.add(cell)

    if len(seen) != total:
        missing = next(c for c in dims.cells() if c not in seen)
        found.append(Violation(Condition.COVERAGE, None, f"{total - len(seen)} cells never visited, first {missing}"))

    for pos, (a, b) in enumerate(zip(cells, cells[1:]), 1):
        if (b[0] - a[0], b[1] - a[1]) not in offs:
            found.append(Violation(Condition.STEP, pos, f"{a} does not attack {b}"))
            break

    if tour.kind is TourKind.CLOSED and cells:
        a, b = cells[-1], cells[0]
        if (b.row - a.row, b.col - a.col) not in offs:
            found.append(Violation(Condition.CLOSURE, len(cells), f"last cell {a} does not attack first cell {b}"))

    return VerifyReport(tuple(found))


# -- grid text format -------------------------------------------------------


class GridParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class RenderError(ValueError):
    pass


_TOKEN = re.compile(r"\S+")
_POSITIVE = re.compile(r"0*[1-9][0-9]*")


def parse_grid(
    text: str,
    dims: BoardDims | None = None,
    kind: TourKind = TourKind.CLOSED,
) -> Tour:
    """Read a numbered grid: the cell holding value ``t`` is the tour's t-th cell."""
    rows: list[list[tuple[int, int]]] = []  # (value, column) per token
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = []
        for match in _TOKEN.finditer(raw):
            token, col = match.group(), match.start() + 1
            if not _POSITIVE.fullmatch(token):
                raise GridParseError(f"expected a positive integer, got {token!r}", lineno, col)
            row.append((int(token), col))
        if rows and len(row) != len(rows[0]):
            raise GridParseError(f"row has {len(row)} entries, expected {len(rows[0])}", lineno)
        rows.append(row)
        lines.append(lineno)
    if not rows:
        raise GridParseError("grid is empty")

    found = BoardDims(len(rows), len(rows[0]))
    if dims is not None and dims != found:
        raise GridParseError(f"grid is {found}, expected {dims}")
    total = found.size
    order: list[Cell | None] = [None] * total
    for r, (row, lineno) in enumerate(zip(rows, lines), 1):
        for c, (value, col) in enumerate(row, 1):
            if value > total:
                raise GridParseError(f"value {value} exceeds cell count {total}", lineno, col)
            if order[value - 1] is not None:
                raise GridParseError(f"duplicate value {value}", lineno, col)
            order[value - 1] = Cell(r, c)
    return Tour(order, kind, found)  # type: ignore[arg-type]


def render_grid(tour: Tour) -> str:
    dims = tour.dims
    if len(tour.cells) != dims.size:
        raise RenderError(f"tour has {len(tour.cells)} cells, board {dims} needs {dims.size}")
    grid = [[0] * dims.cols for _ in range(dims.rows)]
    for t, cell in enumerate(tour.cells, 1):
        if cell not in dims:
            raise RenderError(f"cell {cell} outside {dims}")
        if grid[cell.row - 1][cell.col - 1]:
            raise RenderError(f"cell {cell} visited twice")
        grid[cell.row - 1][cell.col - 1] = t
    return "".join(" ".join(map(str, row)) + "\n" for row in grid)


# -- necessary conditions ---------------------------------------------------


class Check(enum.Enum):
    COLOR_PARITY = "ColorParity"
    MIN_DEGREE = "MinDegree"
    BIPARTITE_BALANCE = "BipartiteBalance"
    CONNECTIVITY = "Connectivity"


@dataclass(frozen=True)
class CheckOutcome:
    check: Check
    passed: bool
    detail: str
    witness: Cell | None = None


@dataclass(frozen=True)
class AdmissibilityReport:
    outcomes: tuple[CheckOutcome, ...] = field(default=())

    @property
    def impossible(self) -> bool:
        return any(not o.passed for o in self.outcomes)

    @property
    def reason(self) -> CheckOutcome | None:
        """The first failing check, or None when the verdict is inconclusive."""
        return next((o for o in self.outcomes if not o.passed), None)

    @property
    def verdict(self) -> str:
        reason = self.reason
        return "Inconclusive" if reason is None else f"Impossible({reason.check.value})"

    def __getitem__(self, check: Check) -> CheckOutcome:
        return next(o for o in self.outcomes if o.check is check)

    def __str__(self) -> str:
        lines = []
        for o in self.outcomes:
            status = "pass" if o.passed else "FAIL"
            lines.append(f"{o.check.value:<17} {status}  {o.detail}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _color(cell_index: int, cols: int) -> int:
    return (cell_index // cols + cell_index % cols) % 2


def necessary_conditions(
    dims: BoardDims,
    piece: Piece,
    kind: TourKind = TourKind.CLOSED,
    graph: MoveGraph | None = None,
) -> AdmissibilityReport:
    """Run the parity, degree, balance and connectivity checks.

    A failing check proves no tour of ``kind`` exists; passing all of them
    proves nothing.
    """
    kind = TourKind(kind)
    graph = graph or build_move_graph(dims, piece)
    total = dims.size
    parities = {(dr + dc) % 2 for dr, dc in piece.offsets}
    counts = [0, 0]
    for i in range(total):
        counts[_color(i, dims.cols)] += 1
    outcomes = []

    if parities == {0} and counts[1] > 0:
        outcomes.append(CheckOutcome(Check.COLOR_PARITY, False, "every move preserves square color, both colors present"))
    else:
        outcomes.append(CheckOutcome(Check.COLOR_PARITY, True, "some move changes square color" if 1 in parities else "board is one color"))

    degs = graph.degrees()
    closed = kind is TourKind.CLOSED
    if total == 1:
        need = 2 if closed else 0
    else:
        # a closed tour of two cells walks the same edge there and back
        need = 1 if closed and total == 2 else (2 if closed else 1)
    low = [i for i, d in enumerate(degs) if d < need]
    if low:
        w = dims.cell_at(low[0])
        outcomes.append(CheckOutcome(Check.MIN_DEGREE, False, f"{w} has degree {degs[low[0]]} < {need}", w))
    elif not closed and sum(1 for d in degs if d == 1) > 2 and total > 1:
        ones = [i for i, d in enumerate(degs) if d == 1]
        w = dims.cell_at(ones[2])
        outcomes.append(CheckOutcome(Check.MIN_DEGREE, False, f"{len(ones)} cells of degree 1, an open tour has 2 ends", w))
    else:
        outcomes.append(CheckOutcome(Check.MIN_DEGREE, True, f"minimum degree {min(degs)}"))

    if parities == {1}:
        diff = abs(counts[0] - counts[1])
        ok = diff == 0 if closed else diff <= 1
        outcomes.append(CheckOutcome(Check.BIPARTITE_BALANCE, ok, f"color classes {counts[0]}/{counts[1]}"))
    else:
        outcomes.append(CheckOutcome(Check.BIPARTITE_BALANCE, True, "move graph not forced bipartite by color"))

    reached = _reachable(graph, 0)
    if len(reached) == total:
        outcomes.append(CheckOutcome(Check.CONNECTIVITY, True, "move graph connected"))
    else:
        w = dims.cell_at(min(set(range(total)) - reached))
        outcomes.append(CheckOutcome(Check.CONNECTIVITY, False, f"{w} unreachable from (1,1)", w))

    return AdmissibilityReport(tuple(outcomes))


def _reachable(graph: MoveGraph, source: int) -> set[int]:
    seen = {source}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen
