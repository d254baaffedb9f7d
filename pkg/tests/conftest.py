import itertools

import pytest

from princetour.core import BoardDims, Piece


def brute_attacks(a, b, k):
    """Manhattan-distance test written straight from the definition."""
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == k


def all_boards(max_cells):
    return [BoardDims(m, n) for m in range(1, max_cells + 1) for n in range(1, max_cells + 1) if m * n <= max_cells]


def count_cycles_dp(dims, piece):
    """Directed Hamiltonian cycles through cell index 0, by subset dynamic programming.

    Independent of the depth-first oracle: counts walks over (visited-set, end)
    states instead of enumerating paths.
    """
    cells = dims.cells()
    n = len(cells)
    offs = set(piece.offsets)
    adj = [[(b.row - a.row, b.col - a.col) in offs for b in cells] for a in cells]
    if n == 1:
        return 0
    ways = {(1, 0): 1}
    for _ in range(n - 1):
        nxt = {}
        for (mask, v), w in ways.items():
            for u in range(n):
                if not mask >> u & 1 and adj[v][u]:
                    key = (mask | 1 << u, u)
                    nxt[key] = nxt.get(key, 0) + w
        ways = nxt
    return sum(w for (mask, v), w in ways.items() if adj[v][0])


PIECES_SMALL = [Piece.prince(k) for k in range(1, 7)] + [Piece.knight(k) for k in range(2, 5)]


@pytest.fixture(params=PIECES_SMALL, ids=lambda p: p.spec)
def small_piece(request):
    return request.param


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("] ")[1].split(".")[0])):
            terminalreporter.write_line(line)
