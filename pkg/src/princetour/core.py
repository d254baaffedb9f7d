"""Board geometry, leaper move sets and the move graph.

Cells are 1-indexed ``(row, col)`` with row 1 at the top. Internally the move
graph addresses cells by their row-major index ``(row - 1) * cols + (col - 1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

# Python ints have no fixed width; this only guards against absurd allocations.
MAX_CELLS = 1 << 20


class InvalidPieceError(ValueError):
    pass


class CapacityError(ValueError):
    pass


class Cell(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row},{self.col})"


@dataclass(frozen=True)
class BoardDims:
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if not (isinstance(self.rows, int) and isinstance(self.cols, int)):
            raise TypeError("board dimensions must be integers")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"board dimensions must be positive, got {self.rows}x{self.cols}")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __contains__(self, cell: object) -> bool:
        if not isinstance(cell, tuple) or len(cell) != 2:
            return False
        r, c = cell
        return 1 <= r <= self.rows and 1 <= c <= self.cols

    def cell(self, row: int, col: int) -> Cell:
        """Return the validated cell ``(row, col)``."""
        if not (1 <= row <= self.rows and 1 <= col <= self.cols):
            raise ValueError(f"cell ({row},{col}) outside {self}")
        return Cell(row, col)

    def index(self, cell: tuple[int, int]) -> int:
        r, c = cell
        if not (1 <= r <= self.rows and 1 <= c <= self.cols):
            raise ValueError(f"cell ({r},{c}) outside {self}")
        return (r - 1) * self.cols + (c - 1)

    def cell_at(self, index: int) -> Cell:
        return Cell(index // self.cols + 1, index % self.cols + 1)

    def cells(self) -> list[Cell]:
        return [Cell(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)]

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


Offset = tuple[int, int]


@dataclass(frozen=True)
class Piece:
    """A leaper given by a finite, negation-closed set of ``(drow, dcol)`` offsets.

    Use :meth:`prince`, :meth:`knight` or :meth:`custom` rather than the raw
    constructor.
    """

    kind: str
    k: int | None
    offsets: tuple[Offset, ...] = field(repr=False)

    @classmethod
    def prince(cls, k: int) -> Piece:
        """k-prince: moves to any cell at Manhattan distance exactly ``k``."""
        _check_k(k)
        offs = set()
        for dx in range(-k, k + 1):
            rest = k - abs(dx)
            offs.add((dx, rest))
            offs.add((dx, -rest))
        return cls("prince", k, tuple(sorted(offs)))

    @classmethod
    def knight(cls, k: int) -> Piece:
        """Generalized k-knight: ``k - 1`` steps along one axis and 1 along the other."""
        _check_k(k)
        a, b = k - 1, 1
        offs = {(sa * x, sb * y) for x, y in ((a, b), (b, a)) for sa in (1, -1) for sb in (1, -1)}
        return cls("knight", k, tuple(sorted(offs)))

    @classmethod
    def custom(cls, moves: Iterable[Sequence[int]]) -> Piece:
        offs = set()
        for mv in moves:
            dx, dy = (int(v) for v in mv)
            if (dx, dy) == (0, 0):
                raise InvalidPieceError("custom piece may not contain the null move (0,0)")
            offs.add((dx, dy))
        if not offs:
            raise InvalidPieceError("custom piece needs at least one offset")
        missing = {(-dx, -dy) for dx, dy in offs} - offs
        if missing:
            warnings.warn(
                f"custom offsets not closed under negation; adding {sorted(missing)}",
                stacklevel=2,
            )
            offs |= missing
        return cls("custom", None, tuple(sorted(offs)))

    @cached_property
    def offset_set(self) -> frozenset[Offset]:
        return frozenset(self.offsets)

    @property
    def spec(self) -> str:
        if self.kind == "custom":
            return "custom:" + ";".join(f"{dx},{dy}" for dx, dy in self.offsets)
        return f"{self.kind}:{self.k}"

    def __str__(self) -> str:
        return self.spec

    def is_rotation_invariant(self) -> bool:
        """True when a quarter turn ``(dx, dy) -> (dy, -dx)`` maps the offset set to itself."""
        offs = set(self.offsets)
        return {(dy, -dx) for dx, dy in offs} == offs


def _check_k(k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise InvalidPieceError(f"k must be a positive integer, got {k!r}")


def parse_piece(text: str) -> Piece:
    """Parse ``prince:<k>``, ``knight:<k>`` or ``custom:<dx>,<dy>[;<dx>,<dy>...]``."""
    kind, sep, arg = text.strip().partition(":")
    if not sep:
        raise InvalidPieceError(f"piece spec {text!r} lacks ':'")
    kind = kind.lower()
    try:
        if kind in ("prince", "knight"):
            k = int(arg)
            return Piece.prince(k) if kind == "prince" else Piece.knight(k)
        if kind == "custom":
            moves = []
            for chunk in arg.split(";"):
                if not chunk.strip():
                    continue
                dx, dy = chunk.split(",")
                moves.append((int(dx), int(dy)))
            return Piece.custom(moves)
    except ValueError as exc:
        if isinstance(exc, InvalidPieceError):
            raise
        raise InvalidPieceError(f"malformed piece spec {text!r}") from exc
    raise InvalidPieceError(f"unknown piece kind {kind!r}")


def offsets(piece: Piece) -> tuple[Offset, ...]:
    if not piece.offsets or (0, 0) in piece.offsets:
        raise InvalidPieceError(f"ill-formed piece {piece!r}")
    return piece.offsets


def attacks(a: tuple[int, int], b: tuple[int, int], piece: Piece) -> bool:
    return (b[0] - a[0], b[1] - a[1]) in piece.offset_set


@dataclass(frozen=True, eq=False)
class MoveGraph:
    """Symmetric attack graph of ``piece`` over every cell of ``dims``.

    ``adjacency[i]`` lists the neighbours of cell index ``i`` in ascending
    row-major order; ``masks[i]`` is the same set as a bitset.
    """

    dims: BoardDims
    piece: Piece
    adjacency: tuple[tuple[int, ...], ...]
    masks: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.dims.size

    def neighbors(self, cell: tuple[int, int]) -> list[Cell]:
        return [self.dims.cell_at(j) for j in self.adjacency[self.dims.index(cell)]]

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.masks[i] >> j & 1)

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]


def build_move_graph(dims: BoardDims, piece: Piece) -> MoveGraph:
    if dims.size > MAX_CELLS:
        raise CapacityError(f"board {dims} has more than {MAX_CELLS} cells")
    offs = offsets(piece)
    m, n = dims.rows, dims.cols
    adjacency = []
    masks = []
    for r in range(m):
        for c in range(n):
            nbrs = sorted(
                (r + dr) * n + (c + dc)
                for dr, dc in offs
                if 0 <= r + dr < m and 0 <= c + dc < n
            )
            adjacency.append(tuple(nbrs))
            mask = 0
            for j in nbrs:
                mask |= 1 << j
            masks.append(mask)
    return MoveGraph(dims, piece, tuple(adjacency), tuple(masks))


def degree(graph: MoveGraph, cell: tuple[int, int]) -> int:
    return len(graph.adjacency[graph.dims.index(cell)])


def board_symmetries(dims: BoardDims, piece: Piece) -> list[tuple[int, ...]]:
    """Board symmetries that also preserve the piece's offset set.

    Each symmetry is returned as a permutation of row-major cell indices; the
    identity is always first. Square boards use the dihedral group of order 8,
    other rectangles the four symmetries of the rectangle.
    """
    m, n = dims.rows, dims.cols
    # Maps on 0-indexed coordinates, each paired with its action on offsets.
    maps = [
        (lambda r, c: (r, c), lambda dr, dc: (dr, dc)),
        (lambda r, c: (m - 1 - r, c), lambda dr, dc: (-dr, dc)),
        (lambda r, c: (r, n - 1 - c), lambda dr, dc: (dr, -dc)),
        (lambda r, c: (m - 1 - r, n - 1 - c), lambda dr, dc: (-dr, -dc)),
    ]
    if m == n:
        maps += [
            (lambda r, c: (c, r), lambda dr, dc: (dc, dr)),
            (lambda r, c: (c, n - 1 - r), lambda dr, dc: (dc, -dr)),
            (lambda r, c: (n - 1 - c, r), lambda dr, dc: (-dc, dr)),
            (lambda r, c: (n - 1 - c, n - 1 - r), lambda dr, dc: (-dc, -dr)),
        ]
    offs = piece.offset_set
    result = []
    for cell_map, off_map in maps:
        if {off_map(dr, dc) for dr, dc in offs} != offs:
            continue
        perm = []
        for r in range(m):
            for c in range(n):
                rr, cc = cell_map(r, c)
                perm.append(rr * n + cc)
        result.append(tuple(perm))
    return result
