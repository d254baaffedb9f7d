"""Sweeps over (board, k) pairs and reproduction of the known results."""

from __future__ import annotations

import csv
import io
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from princetour.core import BoardDims, Piece, build_move_graph
from princetour.search import Outcome, SearchConfig, applicable, default_portfolio, portfolio
from princetour.verify import TourKind, necessary_conditions, verify_tour

COLUMNS = ("rows", "cols", "piece", "kind", "admissibility", "outcome", "strategy", "nodes", "seconds", "bound_applies")

_RANK = {"Found": 3, "ExhaustedNoTour": 2, "BudgetExceeded": 0}


@dataclass(frozen=True)
class KnownBound:
    """Board half-side from which a closed k-prince tour on 2n x 2n is known to exist."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"bound is stated for odd k, got {self.k}")

    @property
    def n_threshold(self) -> int:
        return (self.k - 1) * (3 * self.k - 2)

    def applies(self, n: int) -> bool:
        return n >= self.n_threshold


def bound_applies(n: int, k: int) -> bool:
    return k % 2 == 1 and k >= 1 and KnownBound(k).applies(n)


@dataclass(frozen=True)
class SurveyRow:
    rows: int
    cols: int
    piece: str
    kind: str
    admissibility: str
    outcome: str
    strategy: str
    nodes: int
    seconds: float
    bound_applies: bool

    @property
    def key(self) -> tuple[int, int, str, str]:
        return (self.rows, self.cols, self.piece, self.kind)

    @property
    def rank(self) -> int:
        # RuledOut(...) is as final as an exhausted search
        return _RANK.get(self.outcome, 2)


def evaluate_case(
    dims: BoardDims,
    piece: Piece,
    kind: TourKind = TourKind.CLOSED,
    configs: list[SearchConfig] | None = None,
    concurrent: bool = False,
) -> SurveyRow:
    """Filter by necessary conditions, then search if the filter is inconclusive.

    Strategies run in sequence by default so that the row is reproducible.
    """
    graph = build_move_graph(dims, piece)
    report = necessary_conditions(dims, piece, kind, graph)
    n = dims.rows // 2
    applies = dims.is_square and dims.rows % 2 == 0 and piece.kind == "prince" and bound_applies(n, piece.k)
    if report.impossible:
        outcome = f"RuledOut({report.reason.check.value})"
        return SurveyRow(dims.rows, dims.cols, piece.spec, kind.value, report.verdict, outcome, "-", 0, 0.0, applies)

    configs = [c for c in (configs or default_portfolio()) if applicable(c, dims, piece)]
    started = time.perf_counter()
    result = portfolio(dims, piece, kind, configs, concurrent=concurrent)
    seconds = round(time.perf_counter() - started, 6)
    if result.found and not verify_tour(result.tour, piece).valid:
        raise AssertionError(f"search produced an invalid tour on {dims} with {piece}")
    return SurveyRow(
        dims.rows,
        dims.cols,
        piece.spec,
        kind.value,
        report.verdict,
        result.outcome.value,
        result.stats.strategy_used,
        result.stats.nodes_expanded,
        seconds,
        applies,
    )


def _survey_case(n: int, k: int, time_budget: float | None, node_budget: int | None, seed: int) -> SurveyRow:
    return evaluate_case(BoardDims(2 * n, 2 * n), Piece.prince(k), TourKind.CLOSED, _configs(time_budget, node_budget, seed))


def _configs(time_budget: float | None, node_budget: int | None, seed: int) -> list[SearchConfig]:
    configs = default_portfolio(time_budget, seed)
    if node_budget is not None:
        configs = [SearchConfig(c.strategy, node_budget=node_budget, time_budget=time_budget, seed=seed, turns=c.turns) for c in configs]
    return configs


def survey(
    n_range: Iterable[int],
    k_filter: Iterable[int] | None = None,
    time_budget: float | None = 60.0,
    node_budget: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> list[SurveyRow]:
    """Closed k-prince tours on 2n x 2n boards for every odd k <= 2n - 1.

    Rows come back sorted by (n, k) whatever the completion order. With
    ``workers > 1`` cases run in separate processes.
    """
    ns = sorted(set(n_range))
    if not ns or ns[0] < 1:
        raise ValueError("n_range must contain positive integers")
    wanted = None if k_filter is None else set(k_filter)
    cases = [(n, k) for n in ns for k in range(1, 2 * n, 2) if wanted is None or k in wanted]
    args = [(n, k, time_budget, node_budget, seed) for n, k in cases]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_survey_case, *zip(*args)))
    else:
        rows = [_survey_case(*a) for a in args]
    return sorted(rows, key=_sort_key)


def _sort_key(row: SurveyRow) -> tuple:
    k = int(row.piece.split(":")[1]) if row.piece.split(":")[1].isdigit() else 0
    return (row.rows, row.cols, k, row.piece, row.kind)


def merge_rows(existing: Iterable[SurveyRow], new: Iterable[SurveyRow]) -> list[SurveyRow]:
    """Union by (board, piece, kind); the better outcome wins, ties go to ``new``."""
    merged = {r.key: r for r in existing}
    for r in new:
        old = merged.get(r.key)
        if old is None or r.rank >= old.rank:
            merged[r.key] = r
    return sorted(merged.values(), key=_sort_key)


def export_table(rows: Iterable[SurveyRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(
            [r.rows, r.cols, r.piece, r.kind, r.admissibility, r.outcome, r.strategy, r.nodes, f"{r.seconds:.6f}", str(r.bound_applies).lower()]
        )
    return buf.getvalue()


def parse_table(text: str) -> list[SurveyRow]:
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header!r}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        if len(rec) != len(COLUMNS):
            raise ValueError(f"row has {len(rec)} fields: {rec!r}")
        rows.append(
            SurveyRow(
                int(rec[0]), int(rec[1]), rec[2], rec[3], rec[4], rec[5], rec[6], int(rec[7]), float(rec[8]), rec[9] == "true"
            )
        )
    return rows


def write_table(path: str | os.PathLike, rows: Iterable[SurveyRow], merge: bool = True) -> list[SurveyRow]:
    """Write the TSV atomically, merging with an existing table at ``path``."""
    path = Path(path)
    rows = list(rows)
    if merge and path.exists():
        rows = merge_rows(parse_table(path.read_text(encoding="utf-8")), rows)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(export_table(rows))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return rows


# -- reproduction of the published results -------------------------------------


@dataclass(frozen=True)
class CaseReport:
    label: str
    expected: str
    row: SurveyRow

    @property
    def status(self) -> str:
        if self.row.outcome == self.expected or (self.expected == "RuledOut" and self.row.outcome.startswith("RuledOut")):
            return "PASS"
        if self.expected == "Found" and self.row.outcome == Outcome.BUDGET_EXCEEDED.value:
            return "FAIL(budget)"
        return "FAIL(wrong-answer)"


@dataclass(frozen=True)
class PropositionReport:
    cases: tuple[CaseReport, ...]

    @property
    def passed(self) -> bool:
        return all(c.status == "PASS" for c in self.cases)

    def __str__(self) -> str:
        lines = [
            f"{c.status:<18} {c.label:<28} expected {c.expected:<9} got {c.row.outcome:<22} {c.row.seconds:.3f}s"
            for c in self.cases
        ]
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def reproduce_propositions(time_budget: float | None = 60.0, seed: int = 0) -> PropositionReport:
    """(a) 8x8: closed k-prince tours exactly for k in {1, 3, 5, 7} among k <= 14.
    (b) 2n x 2n, n <= 4: a closed tour for every odd k <= 2n - 1."""
    configs = default_portfolio(time_budget, seed)
    cases = []
    for k in range(1, 15):
        expected = "Found" if k in (1, 3, 5, 7) else "RuledOut"
        row = evaluate_case(BoardDims(8, 8), Piece.prince(k), TourKind.CLOSED, configs)
        cases.append(CaseReport(f"8x8 prince:{k}", expected, row))
    for n in range(1, 5):
        for k in range(1, 2 * n, 2):
            row = evaluate_case(BoardDims(2 * n, 2 * n), Piece.prince(k), TourKind.CLOSED, configs)
            cases.append(CaseReport(f"{2 * n}x{2 * n} prince:{k}", "Found", row))
    return PropositionReport(tuple(cases))
