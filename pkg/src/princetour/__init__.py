"""Leaper tours (k-princes, generalized knights) on rectangular boards."""

from princetour.core import (
    BoardDims,
    CapacityError,
    Cell,
    InvalidPieceError,
    MoveGraph,
    Piece,
    attacks,
    build_move_graph,
    degree,
    offsets,
    parse_piece,
)
from princetour.verify import (
    AdmissibilityReport,
    GridParseError,
    RenderError,
    Tour,
    TourKind,
    VerifyReport,
    necessary_conditions,
    parse_grid,
    render_grid,
    verify_tour,
)
from princetour.search import (
    Outcome,
    PreconditionError,
    SearchConfig,
    SearchResult,
    SearchStats,
    Strategy,
    exhaustive_hamiltonian,
    find_tour,
    portfolio,
    rotational_search,
)

__all__ = [
    "AdmissibilityReport",
    "BoardDims",
    "CapacityError",
    "Cell",
    "GridParseError",
    "InvalidPieceError",
    "MoveGraph",
    "Outcome",
    "Piece",
    "PreconditionError",
    "RenderError",
    "SearchConfig",
    "SearchResult",
    "SearchStats",
    "Strategy",
    "Tour",
    "TourKind",
    "VerifyReport",
    "attacks",
    "build_move_graph",
    "degree",
    "exhaustive_hamiltonian",
    "find_tour",
    "necessary_conditions",
    "offsets",
    "parse_grid",
    "parse_piece",
    "portfolio",
    "render_grid",
    "rotational_search",
    "verify_tour",
]
