"""Command-line interface.

Exit codes: 0 success / tour found / exists / inconclusive, 2 invalid tour,
3 unparsable grid, 4 no tour (exhausted, impossible, oracle says none),
5 budget exceeded, 64 usage, 65 oracle capacity, 66 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from princetour.core import BoardDims, CapacityError, InvalidPieceError, build_move_graph, parse_piece
from princetour.fixtures import FIXTURES
from princetour.search import (
    ORACLE_MAX_CELLS,
    Outcome,
    PreconditionError,
    SearchConfig,
    Strategy,
    exhaustive_hamiltonian,
    find_tour,
    portfolio,
)
from princetour.survey import export_table, survey, write_table
from princetour.verify import GridParseError, TourKind, necessary_conditions, parse_grid, render_grid, verify_tour

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_NONE = 4
EXIT_BUDGET = 5
EXIT_USAGE = 64
EXIT_CAPACITY = 65
EXIT_IO = 66

STRATEGIES = ("backtrack", "warnsdorff", "rotational", "rotational-half", "portfolio")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _piece(text: str):
    try:
        return parse_piece(text)
    except InvalidPieceError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cell(text: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r,c, got {text!r}") from None
    return r, c


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_board(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rows", type=_positive, required=True)
    p.add_argument("--cols", type=_positive, required=True)
    p.add_argument("--piece", type=_piece, required=True, help="prince:<k>, knight:<k> or custom:dx,dy;...")
    _add_kind(p)


def _add_kind(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--closed", dest="kind", action="store_const", const=TourKind.CLOSED)
    g.add_argument("--open", dest="kind", action="store_const", const=TourKind.OPEN)
    p.set_defaults(kind=TourKind.CLOSED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="princetour", description="Leaper tours on rectangular boards.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a numbered grid file")
    p.add_argument("file", help="grid file, '-' for standard input")
    p.add_argument("--piece", type=_piece, required=True)
    _add_kind(p)

    p = sub.add_parser("solve", help="search for a tour")
    _add_board(p)
    p.add_argument("--strategy", choices=STRATEGIES, default="warnsdorff")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--randomize-ties", action="store_true")
    p.add_argument("--symmetry", action="store_true", help="break board symmetries at the root")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--start", type=_cell)
    p.add_argument("--out")

    p = sub.add_parser("analyze", help="run the necessary-condition checks")
    _add_board(p)

    p = sub.add_parser("oracle", help=f"exhaustive enumeration (at most {ORACLE_MAX_CELLS} cells)")
    _add_board(p)

    p = sub.add_parser("survey", help="closed k-prince sweep over 2n x 2n boards")
    p.add_argument("--min-n", type=_positive, default=1)
    p.add_argument("--max-n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, action="append", help="restrict to this k (repeatable)")
    p.add_argument("--time-limit-per", type=float, default=60.0)
    p.add_argument("--node-limit-per", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out")

    p = sub.add_parser("fixtures", help="the published example tours")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--print", dest="name")
    return parser


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_IO
    except UnicodeDecodeError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        tour = parse_grid(text, kind=args.kind)
    except GridParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = verify_tour(tour, args.piece)
    print(report)
    return EXIT_OK if report.valid else EXIT_INVALID


def _solve_configs(args: argparse.Namespace) -> list[SearchConfig]:
    common = dict(
        start=args.start,
        node_budget=args.node_limit,
        time_budget=args.time_limit,
        seed=args.seed,
        randomize_ties=args.randomize_ties,
        symmetry_reduction=args.symmetry,
        unbounded=args.node_limit is None and args.time_limit is None,
    )
    if args.strategy == "portfolio":
        return [
            SearchConfig(Strategy.WARNSDORFF, **common),
            SearchConfig(Strategy.ROTATIONAL, **common),
            SearchConfig(Strategy.ROTATIONAL, turns=2, **common),
        ]
    if args.strategy == "rotational-half":
        return [SearchConfig(Strategy.ROTATIONAL, turns=2, **common)]
    return [SearchConfig(Strategy(args.strategy), **common)]


def cmd_solve(args: argparse.Namespace) -> int:
    dims = BoardDims(args.rows, args.cols)
    if args.start is not None and args.start not in dims:
        raise UsageError(f"--start {args.start} outside {dims}")
    if (args.node_limit is not None and args.node_limit < 0) or (args.time_limit is not None and args.time_limit < 0):
        raise UsageError("limits must be non-negative")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must fit in 64 unsigned bits")
    configs = _solve_configs(args)
    try:
        if len(configs) == 1:
            result = find_tour(dims, args.piece, args.kind, configs[0])
        else:
            result = portfolio(dims, args.piece, args.kind, configs)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    s = result.stats
    print(
        f"outcome={result.outcome.value} strategy={s.strategy_used} nodes_expanded={s.nodes_expanded} "
        f"max_depth={s.max_depth} elapsed={s.elapsed:.3f}s",
        file=sys.stderr,
    )
    if result.outcome is Outcome.FOUND:
        grid = render_grid(result.tour)
        if args.out:
            try:
                Path(args.out).write_text(grid, encoding="utf-8")
            except OSError as exc:
                print(f"cannot write {args.out}: {exc}", file=sys.stderr)
                return EXIT_IO
        else:
            sys.stdout.write(grid)
        return EXIT_OK
    return EXIT_NONE if result.outcome is Outcome.EXHAUSTED else EXIT_BUDGET


def cmd_analyze(args: argparse.Namespace) -> int:
    report = necessary_conditions(BoardDims(args.rows, args.cols), args.piece, args.kind)
    print(report)
    return EXIT_NONE if report.impossible else EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    dims = BoardDims(args.rows, args.cols)
    if dims.size > ORACLE_MAX_CELLS:
        print(f"error: oracle is limited to {ORACLE_MAX_CELLS} cells, {dims} has {dims.size}", file=sys.stderr)
        return EXIT_CAPACITY
    exists, count = exhaustive_hamiltonian(build_move_graph(dims, args.piece), args.kind)
    print(f"exists: {str(exists).lower()}")
    print(f"count: {count}")
    return EXIT_OK if exists else EXIT_NONE


def cmd_survey(args: argparse.Namespace) -> int:
    if args.min_n > args.max_n:
        raise UsageError("--min-n exceeds --max-n")
    time_budget = args.time_limit_per if args.time_limit_per > 0 else None
    if time_budget is None and args.node_limit_per is None:
        raise UsageError("a survey needs a time or node limit per case")
    rows = survey(
        range(args.min_n, args.max_n + 1),
        k_filter=args.k,
        time_budget=time_budget,
        node_budget=args.node_limit_per,
        seed=args.seed,
        workers=args.workers,
    )
    try:
        if args.out:
            write_table(args.out, rows)
        else:
            sys.stdout.write(export_table(rows))
    except OSError as exc:
        print(f"cannot write survey table: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.list:
        for name, fx in FIXTURES.items():
            print(f"{name}\t{fx.dims}\t{fx.piece_spec}")
        return EXIT_OK
    fx = FIXTURES.get(args.name)
    if fx is None:
        raise UsageError(f"unknown fixture {args.name!r}; choose from {', '.join(FIXTURES)}")
    sys.stdout.write(fx.grid)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "analyze": cmd_analyze,
    "oracle": cmd_oracle,
    "survey": cmd_survey,
    "fixtures": cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"princetour {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
