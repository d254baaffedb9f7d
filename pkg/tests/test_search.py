import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PIECES_SMALL, all_boards, count_cycles_dp
from princetour.core import BoardDims, CapacityError, Cell, Piece, build_move_graph
from princetour.search import (
    Outcome,
    PreconditionError,
    SearchConfig,
    Strategy,
    exhaustive_hamiltonian,
    find_tour,
    portfolio,
    quarter_turn,
    rotational_search,
)
from princetour.verify import TourKind, necessary_conditions, verify_tour

UNBOUNDED = SearchConfig(unbounded=True)


def test_config_requires_budget_or_opt_in():
    with pytest.raises(ValueError):
        SearchConfig()
    SearchConfig(node_budget=10)
    SearchConfig(time_budget=1.0)
    with pytest.raises(ValueError):
        SearchConfig(unbounded=True, seed=-1)
    with pytest.raises(ValueError):
        SearchConfig(unbounded=True, turns=3)


def test_prince7_8x8_found():
    res = find_tour(BoardDims(8, 8), Piece.prince(7), TourKind.CLOSED, SearchConfig(Strategy.WARNSDORFF, time_budget=60))
    assert res.found
    assert verify_tour(res.tour, Piece.prince(7)).valid
    assert res.stats.max_depth <= 64


def test_plain_backtrack_6x6():
    res = find_tour(BoardDims(6, 6), Piece.prince(5), TourKind.CLOSED, SearchConfig(Strategy.BACKTRACK, time_budget=60))
    assert res.found and verify_tour(res.tour, Piece.prince(5)).valid
    assert res.stats.strategy_used == "backtrack"


def test_prince3_4x4_found():
    res = find_tour(BoardDims(4, 4), Piece.prince(3), TourKind.CLOSED, UNBOUNDED)
    assert res.found and verify_tour(res.tour, Piece.prince(3)).valid


def test_2x2_cycle():
    res = find_tour(BoardDims(2, 2), Piece.prince(1), TourKind.CLOSED, UNBOUNDED)
    assert res.found
    assert res.tour.cells == (Cell(1, 1), Cell(1, 2), Cell(2, 2), Cell(2, 1))


def test_4x4_knight_has_no_closed_tour():
    res = find_tour(BoardDims(4, 4), Piece.knight(3), TourKind.CLOSED, UNBOUNDED)
    assert res.outcome is Outcome.EXHAUSTED
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(4, 4), Piece.knight(3)), TourKind.CLOSED) == (False, 0)


def test_default_start_is_corner_for_closed():
    res = find_tour(BoardDims(6, 6), Piece.prince(5), TourKind.CLOSED, UNBOUNDED)
    assert res.tour.cells[0] == Cell(1, 1)


def test_explicit_start():
    cfg = SearchConfig(start=(3, 4), unbounded=True)
    res = find_tour(BoardDims(6, 6), Piece.prince(3), TourKind.OPEN, cfg)
    assert res.found and res.tour.cells[0] == Cell(3, 4)
    with pytest.raises(PreconditionError):
        find_tour(BoardDims(6, 6), Piece.prince(3), TourKind.OPEN, SearchConfig(start=(7, 1), unbounded=True))


def test_open_tour_starts_at_degree_one_cell():
    # 1x5 with the 1-prince is a path graph; its ends have degree one
    res = find_tour(BoardDims(1, 5), Piece.prince(1), TourKind.OPEN, UNBOUNDED)
    assert res.found and res.tour.cells[0] == Cell(1, 1)


def test_node_budget_is_exact_and_not_nonexistence():
    res = find_tour(BoardDims(4, 4), Piece.knight(3), TourKind.OPEN, SearchConfig(node_budget=5))
    assert res.outcome is Outcome.BUDGET_EXCEEDED
    assert res.stats.nodes_expanded == 5
    zero = find_tour(BoardDims(4, 4), Piece.prince(3), TourKind.CLOSED, SearchConfig(node_budget=0))
    assert zero.outcome is Outcome.BUDGET_EXCEEDED


def test_time_budget_stops_hopeless_search():
    # 7x7 knight closed: odd cell count makes a cycle impossible, but the search
    # has no parity rule and would run for a very long time
    res = find_tour(BoardDims(7, 7), Piece.knight(3), TourKind.CLOSED, SearchConfig(Strategy.BACKTRACK, time_budget=0.2))
    assert res.outcome is Outcome.BUDGET_EXCEEDED
    assert res.stats.elapsed < 5


def test_cancel_event_stops_search():
    ev = threading.Event()
    ev.set()
    res = find_tour(BoardDims(7, 7), Piece.knight(3), TourKind.CLOSED, SearchConfig(Strategy.BACKTRACK, time_budget=30), cancel=ev)
    assert res.outcome is Outcome.BUDGET_EXCEEDED


# -- soundness and determinism ------------------------------------------------


def _fuzz_cases(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        dims = BoardDims(rng.randint(1, 8), rng.randint(1, 8))
        piece = Piece.prince(rng.randint(1, 9)) if rng.random() < 0.7 else Piece.knight(rng.randint(2, 5))
        kind = rng.choice(list(TourKind))
        strategy = rng.choice([Strategy.WARNSDORFF, Strategy.BACKTRACK])
        yield dims, piece, kind, SearchConfig(
            strategy, node_budget=20000, seed=rng.getrandbits(64), randomize_ties=rng.random() < 0.5
        )


@pytest.mark.parametrize("case", list(_fuzz_cases(120, 2024)), ids=lambda c: f"{c[0]}-{c[1]}-{c[2].value}")
def test_found_tours_always_verify(case):
    dims, piece, kind, cfg = case
    res = find_tour(dims, piece, kind, cfg)
    if res.found:
        assert verify_tour(res.tour, piece).valid
        assert res.tour.kind is kind
    assert res.stats.max_depth <= dims.size
    if res.outcome is Outcome.EXHAUSTED:
        assert not exhaustive_hamiltonian(build_move_graph(dims, piece), kind, stop_at_first=True)[0] if dims.size <= 16 else True


@pytest.mark.parametrize("randomize", [False, True])
def test_deterministic_runs(randomize):
    cfg = SearchConfig(Strategy.WARNSDORFF, time_budget=30, seed=99, randomize_ties=randomize)
    a = find_tour(BoardDims(8, 8), Piece.prince(1), TourKind.CLOSED, cfg)
    b = find_tour(BoardDims(8, 8), Piece.prince(1), TourKind.CLOSED, cfg)
    assert a.tour == b.tour
    assert a.stats.nodes_expanded == b.stats.nodes_expanded


def test_seed_changes_randomized_order():
    tours = {
        find_tour(BoardDims(6, 6), Piece.prince(3), TourKind.CLOSED,
                  SearchConfig(time_budget=30, seed=s, randomize_ties=True)).tour.cells
        for s in range(6)
    }
    assert len(tours) > 1


# -- oracle -----------------------------------------------------------------------


def test_oracle_small_examples():
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(2, 2), Piece.prince(1)), TourKind.CLOSED) == (True, 2)
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(1, 2), Piece.prince(1)), TourKind.CLOSED) == (True, 1)
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(1, 1), Piece.prince(1)), TourKind.CLOSED) == (False, 0)
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(1, 1), Piece.prince(1)), TourKind.OPEN) == (True, 1)
    # a path on three cells, read in either direction
    assert exhaustive_hamiltonian(build_move_graph(BoardDims(1, 3), Piece.prince(1)), TourKind.OPEN) == (True, 2)


def test_oracle_4x4_prince3_count_matches_dp():
    g = build_move_graph(BoardDims(4, 4), Piece.prince(3))
    exists, count = exhaustive_hamiltonian(g, TourKind.CLOSED)
    assert exists
    assert count == count_cycles_dp(BoardDims(4, 4), Piece.prince(3)) == 3712


@pytest.mark.parametrize("dims", [BoardDims(2, 3), BoardDims(3, 4), BoardDims(2, 6), BoardDims(4, 4)], ids=str)
def test_oracle_cycle_counts_match_dp(dims, small_piece):
    g = build_move_graph(dims, small_piece)
    assert exhaustive_hamiltonian(g, TourKind.CLOSED)[1] == count_cycles_dp(dims, small_piece)


def test_oracle_capacity():
    with pytest.raises(CapacityError):
        exhaustive_hamiltonian(build_move_graph(BoardDims(5, 5), Piece.prince(1)), TourKind.CLOSED)


def test_oracle_stop_at_first():
    g = build_move_graph(BoardDims(4, 4), Piece.prince(3))
    assert exhaustive_hamiltonian(g, TourKind.OPEN, stop_at_first=True) == (True, 1)


@pytest.mark.parametrize("dims", [d for d in all_boards(12)], ids=str)
def test_search_agrees_with_oracle(dims, small_piece):
    g = build_move_graph(dims, small_piece)
    for kind in TourKind:
        exists, _ = exhaustive_hamiltonian(g, kind, stop_at_first=True)
        res = find_tour(dims, small_piece, kind, UNBOUNDED, graph=g)
        assert res.outcome in (Outcome.FOUND, Outcome.EXHAUSTED)
        assert res.found == exists
        if necessary_conditions(dims, small_piece, kind, g).impossible:
            assert res.outcome is Outcome.EXHAUSTED


@pytest.mark.parametrize("dims", all_boards(16), ids=str)
def test_symmetry_reduction_keeps_answer(dims, small_piece):
    for kind in TourKind:
        plain = find_tour(dims, small_piece, kind, UNBOUNDED)
        reduced = find_tour(dims, small_piece, kind, SearchConfig(unbounded=True, symmetry_reduction=True))
        assert plain.outcome == reduced.outcome
        assert reduced.stats.nodes_expanded <= plain.stats.nodes_expanded or kind is TourKind.CLOSED
        if reduced.found:
            assert verify_tour(reduced.tour, small_piece).valid


def test_symmetry_reduction_prunes_root():
    cfg_plain = SearchConfig(Strategy.BACKTRACK, unbounded=True)
    cfg_sym = SearchConfig(Strategy.BACKTRACK, unbounded=True, symmetry_reduction=True)
    a = find_tour(BoardDims(4, 4), Piece.knight(3), TourKind.CLOSED, cfg_plain)
    b = find_tour(BoardDims(4, 4), Piece.knight(3), TourKind.CLOSED, cfg_sym)
    assert a.outcome is b.outcome is Outcome.EXHAUSTED
    assert b.stats.nodes_expanded < a.stats.nodes_expanded


# -- rotational -------------------------------------------------------------------


def _check_rotational(tour, side, turns=4):
    cells = tour.cells
    quarter = len(cells) // turns
    for t in range(len(cells) - quarter):
        c = cells[t]
        expect = quarter_turn(c, side) if turns == 4 else Cell(side + 1 - c.row, side + 1 - c.col)
        assert cells[t + quarter] == expect


@pytest.mark.parametrize("side,k", [(2, 1), (6, 1), (6, 3), (6, 5), (10, 3), (10, 7), (10, 9)])
def test_rotational_tours_have_quarter_turn_symmetry(side, k):
    res = rotational_search(BoardDims(side, side), Piece.prince(k), SearchConfig(Strategy.ROTATIONAL, time_budget=30))
    assert res.found
    assert verify_tour(res.tour, Piece.prince(k)).valid
    _check_rotational(res.tour, side)


def test_2x2_rotational_path_of_one_cell():
    res = rotational_search(BoardDims(2, 2), Piece.prince(1), SearchConfig(Strategy.ROTATIONAL, unbounded=True))
    assert res.found and res.stats.max_depth == 1


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_8x8_quarter_turn_family_is_empty(k):
    # a quarter path has 16 cells; with colour-flipping moves it cannot close
    res = rotational_search(BoardDims(8, 8), Piece.prince(k), SearchConfig(Strategy.ROTATIONAL, unbounded=True))
    assert res.outcome is Outcome.EXHAUSTED
    top = find_tour(BoardDims(8, 8), Piece.prince(k), TourKind.CLOSED, SearchConfig(Strategy.ROTATIONAL, unbounded=True))
    assert top.outcome is Outcome.BUDGET_EXCEEDED


def test_prince2_rotational_exhausts_but_reports_unknown():
    cfg = SearchConfig(Strategy.ROTATIONAL, unbounded=True)
    assert rotational_search(BoardDims(8, 8), Piece.prince(2), cfg).outcome is Outcome.EXHAUSTED
    assert find_tour(BoardDims(8, 8), Piece.prince(2), TourKind.CLOSED, cfg).outcome is Outcome.BUDGET_EXCEEDED


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_half_turn_tours_on_8x8(k):
    res = rotational_search(BoardDims(8, 8), Piece.prince(k), SearchConfig(Strategy.ROTATIONAL, time_budget=30, turns=2))
    assert res.found
    assert verify_tour(res.tour, Piece.prince(k)).valid
    _check_rotational(res.tour, 8, turns=2)


def test_rotational_preconditions():
    cfg = SearchConfig(Strategy.ROTATIONAL, unbounded=True)
    with pytest.raises(PreconditionError):
        rotational_search(BoardDims(5, 5), Piece.prince(1), cfg)
    with pytest.raises(PreconditionError):
        rotational_search(BoardDims(4, 6), Piece.prince(1), cfg)
    with pytest.warns(UserWarning):
        lopsided = Piece.custom([(1, 2)])
    with pytest.raises(PreconditionError):
        rotational_search(BoardDims(4, 4), lopsided, cfg)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 5), k=st.integers(1, 9).filter(lambda k: k % 2), seed=st.integers(0, 2**64 - 1))
def test_rotational_outputs_are_symmetric(n, k, seed):
    side = 2 * n
    cfg = SearchConfig(Strategy.ROTATIONAL, node_budget=20000, seed=seed, randomize_ties=True)
    res = rotational_search(BoardDims(side, side), Piece.prince(k), cfg)
    if res.found:
        assert verify_tour(res.tour, Piece.prince(k)).valid
        _check_rotational(res.tour, side)


# -- portfolio --------------------------------------------------------------------


def test_portfolio_finds_prince7():
    cfgs = [SearchConfig(Strategy.WARNSDORFF, time_budget=60), SearchConfig(Strategy.ROTATIONAL, time_budget=60)]
    res = portfolio(BoardDims(8, 8), Piece.prince(7), TourKind.CLOSED, cfgs)
    assert res.found and verify_tour(res.tour, Piece.prince(7)).valid


def test_portfolio_single_matches_find_tour():
    cfg = SearchConfig(Strategy.WARNSDORFF, time_budget=60)
    a = portfolio(BoardDims(6, 6), Piece.prince(5), TourKind.CLOSED, [cfg])
    b = find_tour(BoardDims(6, 6), Piece.prince(5), TourKind.CLOSED, cfg)
    assert a.outcome == b.outcome and a.tour == b.tour
    assert a.stats.nodes_expanded == b.stats.nodes_expanded


def test_portfolio_exhaustion():
    cfgs = [SearchConfig(Strategy.BACKTRACK, unbounded=True), SearchConfig(Strategy.BACKTRACK, unbounded=True)]
    res = portfolio(BoardDims(4, 4), Piece.knight(3), TourKind.CLOSED, cfgs)
    assert res.outcome is Outcome.EXHAUSTED


def test_portfolio_rotational_exhaustion_is_not_proof():
    cfgs = [SearchConfig(Strategy.ROTATIONAL, unbounded=True), SearchConfig(Strategy.WARNSDORFF, node_budget=1)]
    res = portfolio(BoardDims(8, 8), Piece.prince(3), TourKind.CLOSED, cfgs)
    assert res.outcome is Outcome.BUDGET_EXCEEDED


def test_portfolio_skips_inapplicable_strategies():
    cfgs = [SearchConfig(Strategy.ROTATIONAL, unbounded=True), SearchConfig(Strategy.WARNSDORFF, unbounded=True)]
    res = portfolio(BoardDims(3, 4), Piece.prince(1), TourKind.CLOSED, cfgs)
    assert res.found
    with pytest.raises(PreconditionError):
        portfolio(BoardDims(3, 3), Piece.prince(1), TourKind.CLOSED, [cfgs[0], cfgs[0]])


def test_portfolio_needs_configs():
    with pytest.raises(ValueError):
        portfolio(BoardDims(2, 2), Piece.prince(1), TourKind.CLOSED, [])


def test_sequential_portfolio_is_reproducible():
    cfgs = [SearchConfig(Strategy.ROTATIONAL, unbounded=True), SearchConfig(Strategy.WARNSDORFF, unbounded=True)]
    runs = [portfolio(BoardDims(8, 8), Piece.prince(5), TourKind.CLOSED, cfgs, concurrent=False) for _ in range(2)]
    assert runs[0].found and runs[0].tour == runs[1].tour
    assert runs[0].stats.nodes_expanded == runs[1].stats.nodes_expanded
    # the quarter-turn family is empty on 8x8, so Warnsdorff supplied the tour
    assert runs[0].stats.strategy_used == "warnsdorff"
