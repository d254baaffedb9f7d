"""Tour search: pruned backtracking, rotational composition, exhaustive oracle."""

from __future__ import annotations

import enum
import random
import sys
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Sequence

from princetour.core import (
    BoardDims,
    CapacityError,
    Cell,
    MoveGraph,
    Piece,
    board_symmetries,
    build_move_graph,
)
from princetour.verify import Tour, TourKind


ORACLE_MAX_CELLS = 24
POLL_INTERVAL = 4096
# one interpreter frame per path cell
MAX_SEARCH_CELLS = 20000


class PreconditionError(ValueError):
    pass


class Strategy(enum.Enum):
    BACKTRACK = "backtrack"
    WARNSDORFF = "warnsdorff"
    ROTATIONAL = "rotational"


class Outcome(enum.Enum):
    FOUND = "Found"
    EXHAUSTED = "ExhaustedNoTour"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class SearchConfig:
    """How to run one search.

    Either ``node_budget`` or ``time_budget`` must be given, unless
    ``unbounded=True`` is passed explicitly. ``turns`` only matters for the
    rotational strategy: 4 composes quarter turns, 2 half turns.
    """

    strategy: Strategy = Strategy.WARNSDORFF
    start: tuple[int, int] | None = None
    node_budget: int | None = None
    time_budget: float | None = None
    seed: int = 0
    randomize_ties: bool = False
    symmetry_reduction: bool = False
    unbounded: bool = False
    turns: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.node_budget is None and self.time_budget is None and not self.unbounded:
            raise ValueError("set node_budget or time_budget, or pass unbounded=True")
        if self.node_budget is not None and self.node_budget < 0:
            raise ValueError("node_budget must be non-negative")
        if self.time_budget is not None and self.time_budget < 0:
            raise ValueError("time_budget must be non-negative")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.turns not in (2, 4):
            raise ValueError("turns must be 2 or 4")


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    max_depth: int = 0
    elapsed: float = 0.0
    strategy_used: str = ""


@dataclass
class SearchResult:
    outcome: Outcome
    tour: Tour | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.outcome is Outcome.FOUND


class _Stop(Exception):
    pass


class _EitherEvent:
    def __init__(self, a: threading.Event, b: threading.Event):
        self.a, self.b = a, b

    def is_set(self) -> bool:
        return self.a.is_set() or self.b.is_set()


class _Budget:
    """Node counter with an exact node cap and a polled deadline / cancel flag."""

    def __init__(self, config: SearchConfig, cancel: threading.Event | None = None):
        self.limit = config.node_budget
        self.deadline = None if config.time_budget is None else time.perf_counter() + config.time_budget
        self.cancel = cancel
        self.nodes = 0
        self.max_depth = 0
        self.started = time.perf_counter()

    def poll(self) -> None:
        if self.cancel is not None and self.cancel.is_set():
            raise _Stop
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise _Stop

    def stats(self, strategy: str) -> SearchStats:
        return SearchStats(self.nodes, self.max_depth, time.perf_counter() - self.started, strategy)


# -- backtracking ------------------------------------------------------------


def _hamiltonian_from(
    graph: MoveGraph,
    start: int,
    closed: bool,
    warnsdorff: bool,
    rng: random.Random | None,
    budget: _Budget,
    second_choices: set[int] | None = None,
) -> list[int] | None:
    """Depth-first search for a Hamiltonian path/cycle from ``start``.

    ``cnt[v]`` is the number of unvisited neighbours of ``v``; ``ones`` and
    ``zeros`` are bitsets of unvisited vertices with ``cnt`` 1 and 0. A vertex
    still to be placed needs two usable neighbours on a cycle (one at a path
    end), where "usable" means unvisited, the current head, or (closed) the
    start vertex.
    """
    adj = graph.adjacency
    masks = graph.masks
    total = graph.size
    limit = budget.limit
    cnt = [len(a) for a in adj]
    unv = ((1 << total) - 1) & ~(1 << start)
    for w in adj[start]:
        cnt[w] -= 1
    ones = zeros = 0
    for v in range(total):
        if unv >> v & 1:
            if cnt[v] == 1:
                ones |= 1 << v
            elif cnt[v] == 0:
                zeros |= 1 << v
    start_mask = masks[start] if closed else 0
    path = [start]

    def extend(x: int, r: int, zeros: int, ones: int) -> bool:
        nonlocal unv
        budget.nodes += 1
        if limit is not None and budget.nodes > limit:
            budget.nodes = limit
            raise _Stop
        if budget.nodes % POLL_INTERVAL == 0:
            budget.poll()
        depth = total - r
        if depth > budget.max_depth:
            budget.max_depth = depth

        if r == 0:
            return not closed or bool(start_mask >> x & 1)
        mx = masks[x]
        if r == 1:
            last = unv.bit_length() - 1
            if not mx >> last & 1 or (closed and not start_mask >> last & 1):
                return False
            cands = [last]
        else:
            if zeros:
                return False
            if closed:
                if cnt[start] == 0:
                    return False
                if ones & ~(mx | start_mask):
                    return False
                forced = ones & mx & ~start_mask
                if forced & (forced - 1):
                    return False
                tail = ones & start_mask & ~mx
                if tail & (tail - 1):
                    return False
            else:
                ends = ones & ~mx
                if ends & (ends - 1):
                    return False
                forced = 0
            if forced:
                cands = [forced.bit_length() - 1]
            else:
                cands = [w for w in adj[x] if unv >> w & 1]
                if second_choices is not None and x == start and r == total - 1:
                    cands = [w for w in cands if w in second_choices]
                if warnsdorff:
                    if rng is not None:
                        rng.shuffle(cands)
                    cands.sort(key=cnt.__getitem__)

        for c in cands:
            bit = 1 << c
            unv ^= bit
            nz = zeros & ~bit
            no = ones & ~bit
            for w in adj[c]:
                k = cnt[w] - 1
                cnt[w] = k
                if unv >> w & 1:
                    if k == 1:
                        no |= 1 << w
                    elif k == 0:
                        no &= ~(1 << w)
                        nz |= 1 << w
            path.append(c)
            if extend(c, r - 1, nz, no):
                return True
            path.pop()
            for w in adj[c]:
                cnt[w] += 1
            unv |= bit
        return False

    if extend(start, total - 1, zeros, ones):
        return path
    return None


def _second_cell_reps(graph: MoveGraph, start: int, symmetries: list[tuple[int, ...]]) -> set[int]:
    """One neighbour of ``start`` per orbit of the symmetries fixing ``start``."""
    stab = [g for g in symmetries if g[start] == start]
    reps = set()
    seen: set[int] = set()
    for w in graph.adjacency[start]:
        if w in seen:
            continue
        reps.add(w)
        seen.update(g[w] for g in stab)
    return reps


def _open_starts(graph: MoveGraph, symmetries: list[tuple[int, ...]] | None) -> list[int]:
    degs = graph.degrees()
    starts = [v for v in range(graph.size) if degs[v] == 1]
    if not starts:
        # ascending degree, ties row-major
        starts = sorted(range(graph.size), key=lambda v: (degs[v], v))
    if symmetries:
        reps = []
        seen: set[int] = set()
        for v in starts:
            if v not in seen:
                reps.append(v)
                seen.update(g[v] for g in symmetries)
        starts = reps
    return starts


def _backtrack(
    graph: MoveGraph,
    kind: TourKind,
    config: SearchConfig,
    cancel: threading.Event | None,
) -> SearchResult:
    dims = graph.dims
    closed = kind is TourKind.CLOSED
    warnsdorff = config.strategy is Strategy.WARNSDORFF
    rng = random.Random(config.seed) if warnsdorff and config.randomize_ties else None
    budget = _Budget(config, cancel)
    symmetries = board_symmetries(dims, graph.piece) if config.symmetry_reduction else None

    if config.start is not None:
        starts = [dims.index(config.start)]
    elif closed:
        starts = [0]
    else:
        starts = _open_starts(graph, symmetries)

    path = None
    try:
        for s in starts:
            second = _second_cell_reps(graph, s, symmetries) if symmetries else None
            path = _hamiltonian_from(graph, s, closed, warnsdorff, rng, budget, second)
            if path is not None:
                break
    except _Stop:
        return SearchResult(Outcome.BUDGET_EXCEEDED, None, budget.stats(config.strategy.value))
    except RecursionError as exc:
        raise CapacityError(f"board {dims} too deep for recursive search") from exc
    stats = budget.stats(config.strategy.value)
    if path is None:
        return SearchResult(Outcome.EXHAUSTED, None, stats)
    return SearchResult(Outcome.FOUND, Tour([dims.cell_at(i) for i in path], kind, dims), stats)


# -- rotational composition ---------------------------------------------------


def _turn_map(dims: BoardDims, turns: int) -> list[int]:
    m, n = dims.rows, dims.cols
    if turns == 4:
        # (r, c) -> (c, n - 1 - r) on 0-indexed coordinates
        return [c * n + (n - 1 - r) for r in range(m) for c in range(n)]
    return [(m - 1 - r) * n + (n - 1 - c) for r in range(m) for c in range(n)]


def quarter_turn(cell: tuple[int, int], side: int) -> Cell:
    """Rotate a 1-indexed cell a quarter turn on a ``side x side`` board."""
    return Cell(cell[1], side + 1 - cell[0])


def rotational_search(
    dims: BoardDims,
    piece: Piece,
    config: SearchConfig,
    cancel: threading.Event | None = None,
    graph: MoveGraph | None = None,
) -> SearchResult:
    """Search closed tours of the form ``P, rho(P), rho^2(P), ...``.

    ``rho`` is the quarter turn ``(i, j) -> (j, side + 1 - i)`` when
    ``config.turns == 4`` and the half turn when it is 2. ``P`` picks one cell
    from every rho-orbit and its last cell must attack ``rho(P[0])``.
    Exhaustion only rules out this symmetric family.
    """
    turns = config.turns
    if turns == 4:
        if not dims.is_square or dims.rows % 2:
            raise PreconditionError(f"quarter-turn search needs an even square board, got {dims}")
        if not piece.is_rotation_invariant():
            raise PreconditionError(f"{piece} is not invariant under a quarter turn")
    elif dims.size % 2:
        raise PreconditionError(f"half-turn search needs an even cell count, got {dims}")

    graph = graph or build_move_graph(dims, piece)
    total = graph.size
    adj = graph.adjacency
    masks = graph.masks
    rho = _turn_map(dims, turns)
    orbit_mask = []
    for v in range(total):
        mask, w = 0, v
        for _ in range(turns):
            mask |= 1 << w
            w = rho[w]
        orbit_mask.append(mask)
    length = total // turns
    warnsdorff = config.strategy is not Strategy.BACKTRACK
    rng = random.Random(config.seed) if config.randomize_ties else None
    budget = _Budget(config, cancel)
    label = f"{Strategy.ROTATIONAL.value}{'' if turns == 4 else '-half'}"

    start = dims.index(config.start) if config.start is not None else 0
    target = rho[start]
    path = [start]
    free = ((1 << total) - 1) & ~orbit_mask[start]

    def onward(c: int) -> int:
        return (masks[c] & free & ~orbit_mask[c]).bit_count()

    def extend(x: int, r: int) -> bool:
        nonlocal free
        budget.nodes += 1
        if budget.limit is not None and budget.nodes > budget.limit:
            budget.nodes = budget.limit
            raise _Stop
        if budget.nodes % POLL_INTERVAL == 0:
            budget.poll()
        if length - r > budget.max_depth:
            budget.max_depth = length - r
        if r == 0:
            return bool(masks[x] >> target & 1)
        if not masks[target] & free:
            return False
        cands = [w for w in adj[x] if free >> w & 1]
        if warnsdorff:
            if rng is not None:
                rng.shuffle(cands)
            cands.sort(key=onward)
        for c in cands:
            orb = orbit_mask[c]
            free &= ~orb
            path.append(c)
            if extend(c, r - 1):
                return True
            path.pop()
            free |= orb
        return False

    try:
        ok = (
            _parity_allows(dims, piece, start, target, length - 1)
            and target in _component(graph, start)
            and extend(start, length - 1)
        )
    except _Stop:
        return SearchResult(Outcome.BUDGET_EXCEEDED, None, budget.stats(label))
    stats = budget.stats(label)
    if not ok:
        return SearchResult(Outcome.EXHAUSTED, None, stats, detail="no rotationally symmetric tour")
    cells = list(path)
    layer = path
    for _ in range(turns - 1):
        layer = [rho[v] for v in layer]
        cells.extend(layer)
    tour = Tour([dims.cell_at(v) for v in cells], TourKind.CLOSED, dims)
    return SearchResult(Outcome.FOUND, tour, stats)


def _parity_allows(dims: BoardDims, piece: Piece, start: int, target: int, steps: int) -> bool:
    """Colour bookkeeping: can ``steps`` moves plus one closing move join start to target?"""
    parities = {(dr + dc) % 2 for dr, dc in piece.offsets}
    if len(parities) != 1:
        return True
    n = dims.cols
    start_color = (start // n + start % n) % 2
    target_color = (target // n + target % n) % 2
    flip = parities.pop()
    return (start_color + flip * (steps + 1)) % 2 == target_color


def _component(graph: MoveGraph, source: int) -> set[int]:
    seen = {source}
    stack = [source]
    while stack:
        for w in graph.adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


# -- public entry points ------------------------------------------------------


def find_tour(
    dims: BoardDims,
    piece: Piece,
    kind: TourKind = TourKind.CLOSED,
    config: SearchConfig | None = None,
    *,
    cancel: threading.Event | None = None,
    graph: MoveGraph | None = None,
) -> SearchResult:
    """Search for a tour of ``kind``.

    ``ExhaustedNoTour`` is returned only after a complete traversal of the
    search tree; a rotational run that exhausts its family is reported as
    ``BudgetExceeded`` because other tours may still exist.
    """
    kind = TourKind(kind)
    config = config or SearchConfig(unbounded=True)
    if config.start is not None and config.start not in dims:
        raise PreconditionError(f"start {config.start} outside {dims}")
    if dims.size > MAX_SEARCH_CELLS:
        raise CapacityError(f"search is limited to {MAX_SEARCH_CELLS} cells, got {dims.size}")
    if sys.getrecursionlimit() < dims.size + 500:
        sys.setrecursionlimit(dims.size + 500)
    graph = graph or build_move_graph(dims, piece)
    if config.strategy is Strategy.ROTATIONAL:
        result = rotational_search(dims, piece, config, cancel, graph)
        if result.found:
            result.tour = Tour(result.tour.cells, kind, dims)
        elif result.outcome is Outcome.EXHAUSTED:
            result.outcome = Outcome.BUDGET_EXCEEDED
        return result
    return _backtrack(graph, kind, config, cancel)


def portfolio(
    dims: BoardDims,
    piece: Piece,
    kind: TourKind,
    configs: Sequence[SearchConfig],
    cancel: threading.Event | None = None,
    concurrent: bool = True,
) -> SearchResult:
    """Run several configurations; the first tour found wins.

    With ``concurrent=False`` the configurations run one after another in the
    given order, which makes the merged statistics reproducible.
    """
    if not configs:
        raise ValueError("portfolio needs at least one configuration")
    graph = build_move_graph(dims, piece)
    if len(configs) == 1:
        return find_tour(dims, piece, kind, configs[0], cancel=cancel, graph=graph)

    stop = threading.Event()
    started = time.perf_counter()
    flag = stop if cancel is None else _EitherEvent(stop, cancel)

    results: list[tuple[SearchConfig, SearchResult]] = []
    errors: list[Exception] = []
    winner: SearchResult | None = None
    if not concurrent:
        for cfg in configs:
            try:
                res = find_tour(dims, piece, kind, cfg, cancel=cancel, graph=graph)
            except PreconditionError as exc:
                errors.append(exc)
                continue
            results.append((cfg, res))
            if res.found:
                winner = res
                break
        return _merge(results, errors, winner, started)

    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        pending = {
            pool.submit(find_tour, dims, piece, kind, cfg, cancel=flag, graph=graph): cfg
            for cfg in configs
        }
        while pending:
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                cfg = pending.pop(fut)
                try:
                    res = fut.result()
                except PreconditionError as exc:
                    errors.append(exc)
                    continue
                results.append((cfg, res))
                if res.found and winner is None:
                    winner = res
                    stop.set()
    stop.set()
    return _merge(results, errors, winner, started)


def _merge(
    results: list[tuple[SearchConfig, SearchResult]],
    errors: list[Exception],
    winner: SearchResult | None,
    started: float,
) -> SearchResult:
    if not results:
        raise errors[0]
    stats = SearchStats(
        nodes_expanded=sum(r.stats.nodes_expanded for _, r in results),
        max_depth=max(r.stats.max_depth for _, r in results),
        elapsed=time.perf_counter() - started,
        strategy_used="portfolio",
    )
    if winner is not None:
        stats.strategy_used = winner.stats.strategy_used
        return SearchResult(Outcome.FOUND, winner.tour, stats)
    if any(r.outcome is Outcome.EXHAUSTED and c.strategy is not Strategy.ROTATIONAL for c, r in results):
        return SearchResult(Outcome.EXHAUSTED, None, stats)
    return SearchResult(Outcome.BUDGET_EXCEEDED, None, stats)


def default_portfolio(time_budget: float | None = 60.0, seed: int = 0) -> list[SearchConfig]:
    """Warnsdorff backtracking alongside quarter- and half-turn rotational search."""
    unbounded = time_budget is None
    return [
        SearchConfig(Strategy.WARNSDORFF, time_budget=time_budget, seed=seed, unbounded=unbounded),
        SearchConfig(Strategy.ROTATIONAL, time_budget=time_budget, seed=seed, unbounded=unbounded),
        SearchConfig(Strategy.ROTATIONAL, time_budget=time_budget, seed=seed, unbounded=unbounded, turns=2),
    ]


def applicable(config: SearchConfig, dims: BoardDims, piece: Piece) -> bool:
    """Whether ``config`` can run at all on this board and piece."""
    if config.strategy is not Strategy.ROTATIONAL:
        return True
    if config.turns == 4:
        return dims.is_square and dims.rows % 2 == 0 and piece.is_rotation_invariant()
    return dims.size % 2 == 0


# -- exhaustive oracle ----------------------------------------------------------


def exhaustive_hamiltonian(
    graph: MoveGraph,
    kind: TourKind = TourKind.CLOSED,
    stop_at_first: bool = False,
) -> tuple[bool, int]:
    """Count tours by plain depth-first enumeration in row-major order.

    Closed tours are counted as sequences starting at cell (1,1), so each
    undirected cycle on three or more cells contributes two (one per
    direction). Open tours are counted as sequences. With ``stop_at_first``
    the count is 0 or 1.
    """
    total = graph.size
    if total > ORACLE_MAX_CELLS:
        raise CapacityError(f"oracle is limited to {ORACLE_MAX_CELLS} cells, got {total}")
    kind = TourKind(kind)
    adj = graph.adjacency
    closed = kind is TourKind.CLOSED
    full = (1 << total) - 1

    def count(v: int, seen: int, first: int) -> int:
        if seen == full:
            return 1 if not closed or graph.has_edge(v, first) else 0
        n = 0
        for w in adj[v]:
            if not seen >> w & 1:
                n += count(w, seen | 1 << w, first)
                if n and stop_at_first:
                    return n
        return n

    starts = [0] if closed else range(total)
    found = 0
    for s in starts:
        found += count(s, 1 << s, s)
        if found and stop_at_first:
            break
    return found > 0, found
