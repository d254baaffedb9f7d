"""The three closed prince tours printed in the source article, kept verbatim."""

from __future__ import annotations

from dataclasses import dataclass

from princetour.core import BoardDims, Piece, parse_piece
from princetour.verify import Tour, TourKind, parse_grid


@dataclass(frozen=True)
class Fixture:
    name: str
    dims: BoardDims
    piece_spec: str
    grid: str

    @property
    def piece(self) -> Piece:
        return parse_piece(self.piece_spec)

    def tour(self) -> Tour:
        return parse_grid(self.grid, self.dims, TourKind.CLOSED)


FIXTURES = {
    f.name: f
    for f in (
        Fixture(
            "prince7-8x8",
            BoardDims(8, 8),
            "prince:7",
            "52 41 48 27 36 1 54 13\n"
            "43 46 25 34 7 30 51 56\n"
            "64 3 60 15 10 5 40 49\n"
            "29 58 55 12 21 18 63 38\n"
            "6 31 50 53 44 23 26 61\n"
            "17 8 37 42 47 28 35 32\n"
            "24 19 62 39 2 57 14 11\n"
            "45 22 33 4 59 16 9 20\n",
        ),
        Fixture(
            "prince3-4x4",
            BoardDims(4, 4),
            "prince:3",
            "3 6 9 14\n"
            "12 15 4 7\n"
            "5 2 13 10\n"
            "16 11 8 1\n",
        ),
        Fixture(
            "prince5-6x6",
            BoardDims(6, 6),
            "prince:5",
            "9 12 5 24 29 18\n"
            "20 17 34 31 26 21\n"
            "15 22 1 10 7 14\n"
            "32 25 28 19 4 33\n"
            "3 8 13 16 35 2\n"
            "36 11 6 23 30 27\n",
        ),
    )
}
