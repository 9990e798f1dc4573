"""Stage I: column ordering by reduction to the traveling-salesman problem.

Consecutive block minimization asks for a column permutation of the
membership matrix minimizing the total number of blocks across all sets.
The reduction: one TSP node per unique column, plus one auxiliary node whose
column is all zeros; the distance between two nodes is the Hamming distance
between their columns.  Cutting a Hamiltonian cycle at the auxiliary node
yields a column order whose total block count is exactly half of the tour
cost — every block contributes one 0→1 and one 1→0 transition, and the
all-zero auxiliary column guarantees both boundary transitions of the first
and last blocks are counted.  Minimizing tour cost therefore minimizes
blocks exactly.  (An all-*ones* auxiliary column, occasionally seen for this
reduction, minimizes the number of zero-gaps instead, which differs from the
block count by the weights of the boundary columns; it is not used here.)

Two solvers are provided.  The exact solver runs Held-Karp dynamic
programming for up to 16 unique columns and depth-first branch-and-bound
above that, and degrades to the heuristic result with a ``TIMEOUT_FALLBACK``
status when the deadline expires.  The heuristic solver is nearest-neighbor
construction followed by full 2-opt descent and a fixed-schedule simulated
annealing pass (geometric cooling, see ``_anneal``), then a final 2-opt
descent; it is deterministic for a fixed seed.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from typing import Sequence

from .common import SolveStatus
from .setmodel import (
    ColumnOrder,
    MembershipMatrix,
    collapse_duplicate_columns,
    count_blocks,
)

DEFAULT_TIMEOUT = 300.0

# Deadline polls happen every this many inner-loop steps; cheap enough to
# keep timeout granularity well under a second at desk scale.
_POLL_INTERVAL = 2048


@dataclass(frozen=True)
class TspInstance:
    """Distance matrix over unique columns plus the auxiliary all-zero node.

    ``groups[k]`` lists the original column indices represented by node
    ``k`` (nodes ``0..aux_index-1``); the auxiliary node is last.
    """

    dist: tuple[tuple[int, ...], ...]
    aux_index: int
    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.dist)
        if self.aux_index != n - 1:
            raise ValueError("auxiliary node must be the last node")
        if len(self.groups) != n - 1:
            raise ValueError("one column group per non-auxiliary node required")
        for i in range(n):
            if len(self.dist[i]) != n:
                raise ValueError("distance matrix must be square")
            if self.dist[i][i] != 0:
                raise ValueError("diagonal must be zero")
            for j in range(n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise ValueError("distance matrix must be symmetric")

    @property
    def node_count(self) -> int:
        return len(self.dist)


@dataclass(frozen=True)
class TourResult:
    """A column order over the *original* columns plus the cycle cost."""

    order: ColumnOrder
    tour_cost: int
    status: SolveStatus


def build_tsp_instance(mat: MembershipMatrix) -> TspInstance:
    """Collapse duplicate columns and build the Hamming-distance instance."""
    reduced, groups = collapse_duplicate_columns(mat)
    bits = list(reduced.column_bits())
    bits.append(0)  # auxiliary all-zero column
    n = len(bits)
    dist = tuple(
        tuple((bits[i] ^ bits[j]).bit_count() for j in range(n)) for i in range(n)
    )
    return TspInstance(dist=dist, aux_index=n - 1, groups=groups)


def tour_to_column_order(
    tour: Sequence[int], aux_index: int, groups: Sequence[Sequence[int]]
) -> ColumnOrder:
    """Rotate the cycle so the auxiliary node is last, drop it, expand duplicates."""
    if sorted(tour) != list(range(len(groups) + 1)):
        raise ValueError("tour must visit every node exactly once")
    pos = list(tour).index(aux_index)
    rotated = list(tour[pos + 1 :]) + list(tour[:pos])
    expanded = [orig for node in rotated for orig in groups[node]]
    return ColumnOrder(tuple(expanded))


def _tour_cost(tour: Sequence[int], dist: Sequence[Sequence[int]]) -> int:
    n = len(tour)
    return sum(dist[tour[k]][tour[(k + 1) % n]] for k in range(n))


class _Deadline:
    """Polls the monotonic clock only every ``_POLL_INTERVAL`` calls."""

    def __init__(self, timeout: float | None):
        if timeout is None:
            self._expires: float | None = None
            self._dead = False
        else:
            self._expires = time.monotonic() + timeout
            self._dead = timeout <= 0
        self._ticks = 0

    def expired(self) -> bool:
        if self._expires is None:
            return False
        if self._dead:
            return True
        self._ticks += 1
        if self._ticks % _POLL_INTERVAL:
            return False
        self._dead = time.monotonic() > self._expires
        return self._dead


class _TimeoutExpired(Exception):
    pass


def _held_karp(inst: TspInstance, deadline: _Deadline) -> tuple[list[int], int]:
    """Exact minimum Hamiltonian cycle via bitmask DP, anchored at the auxiliary node."""
    aux = inst.aux_index
    m = aux  # real nodes 0..m-1
    dist = inst.dist
    if m == 0:
        return [aux], 0
    size = 1 << m
    INF = math.inf
    cost = [[INF] * m for _ in range(size)]
    parent = [[-1] * m for _ in range(size)]
    for j in range(m):
        cost[1 << j][j] = dist[aux][j]
    for mask in range(size):
        if deadline.expired():
            raise _TimeoutExpired
        row = cost[mask]
        for j in range(m):
            cj = row[j]
            if cj is INF:
                continue
            dj = dist[j]
            for k in range(m):
                if mask & (1 << k):
                    continue
                nmask = mask | (1 << k)
                cand = cj + dj[k]
                if cand < cost[nmask][k]:
                    cost[nmask][k] = cand
                    parent[nmask][k] = j
    full = size - 1
    best_j, best_total = -1, INF
    for j in range(m):
        total = cost[full][j] + dist[j][aux]
        if total < best_total:
            best_total, best_j = total, j
    path = []
    mask, j = full, best_j
    while j != -1:
        path.append(j)
        mask, j = mask ^ (1 << j), parent[mask][j]
    path.reverse()
    return [aux] + path, int(best_total)


def _branch_and_bound(
    inst: TspInstance, deadline: _Deadline, seed: int
) -> tuple[list[int], int]:
    """Exact search with a min-outgoing-edge lower bound, warm-started by the heuristic."""
    aux = inst.aux_index
    n = inst.node_count
    dist = inst.dist
    warm = _heuristic_tour(inst, seed)
    best_cost = _tour_cost(warm, dist)
    pos = warm.index(aux)
    best_tour = warm[pos:] + warm[:pos]
    # min_out[v]: cheapest edge leaving v toward any other node; a valid
    # relaxation of "every remaining node is departed exactly once".
    min_out = [min(dist[v][w] for w in range(n) if w != v) for v in range(n)]
    neighbors = [
        sorted((w for w in range(n) if w != v), key=lambda w: (dist[v][w], w))
        for v in range(n)
    ]
    visited = [False] * n
    visited[aux] = True
    tour = [aux]

    def dfs(current: int, cost: int, remaining: int, tail_bound: int) -> None:
        nonlocal best_cost, best_tour
        if deadline.expired():
            raise _TimeoutExpired
        if remaining == 0:
            total = cost + dist[current][aux]
            if total < best_cost:
                best_cost = total
                best_tour = tour[:]
            return
        if cost + tail_bound >= best_cost:
            return
        for w in neighbors[current]:
            if visited[w]:
                continue
            step = dist[current][w]
            if cost + step + tail_bound - min_out[w] >= best_cost:
                continue
            visited[w] = True
            tour.append(w)
            dfs(w, cost + step, remaining - 1, tail_bound - min_out[w])
            tour.pop()
            visited[w] = False

    dfs(aux, 0, n - 1, sum(min_out[v] for v in range(n) if v != aux))
    return best_tour, best_cost


def solve_tour_exact(
    inst: TspInstance, timeout: float | None = DEFAULT_TIMEOUT, seed: int = 0
) -> TourResult:
    """Minimum-cost tour, or the heuristic result flagged as a timeout fallback.

    ``seed`` only matters on the fallback path, where it is handed to
    :func:`solve_tour_heuristic` so that both pipeline modes agree.
    """
    deadline = _Deadline(timeout)
    try:
        if deadline.expired():
            raise _TimeoutExpired
        if inst.node_count <= 17:  # ≤16 unique columns
            tour, cost = _held_karp(inst, deadline)
        else:
            tour, cost = _branch_and_bound(inst, deadline, seed)
    except _TimeoutExpired:
        fallback = solve_tour_heuristic(inst, seed)
        return TourResult(fallback.order, fallback.tour_cost, SolveStatus.TIMEOUT_FALLBACK)
    order = tour_to_column_order(tour, inst.aux_index, inst.groups)
    return TourResult(order, cost, SolveStatus.OPTIMAL)


def _nearest_neighbor(inst: TspInstance) -> list[int]:
    dist = inst.dist
    n = inst.node_count
    tour = [inst.aux_index]
    unvisited = set(range(n)) - {inst.aux_index}
    while unvisited:
        here = tour[-1]
        tour.append(min(unvisited, key=lambda w: (dist[here][w], w)))
        unvisited.remove(tour[-1])
    return tour


def _two_opt(tour: list[int], dist: Sequence[Sequence[int]]) -> list[int]:
    """Best-improvement 2-opt descent until no reversal shortens the cycle."""
    n = len(tour)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            a, b = tour[i], tour[i + 1]
            for j in range(i + 2, n):
                c, d = tour[j], tour[(j + 1) % n]
                if a == d:
                    continue
                delta = dist[a][c] + dist[b][d] - dist[a][b] - dist[c][d]
                if delta < 0:
                    tour[i + 1 : j + 1] = reversed(tour[i + 1 : j + 1])
                    improved = True
        # loop again from scratch after a full sweep with improvements
    return tour


def _anneal(tour: list[int], dist: Sequence[Sequence[int]], rng: random.Random) -> list[int]:
    """Fixed-schedule simulated annealing over 2-opt moves.

    Schedule: 150·n proposals, geometric cooling by 0.995 per proposal,
    starting temperature max(1, cost/10).  Returns the best cycle seen.
    """
    n = len(tour)
    if n < 4:
        return tour
    cost = _tour_cost(tour, dist)
    best, best_cost = tour[:], cost
    temp = max(1.0, cost / 10.0)
    for _ in range(150 * n):
        i = rng.randrange(n - 1)
        j = rng.randrange(i + 1, n)
        a, b = tour[i - 1], tour[i]
        c, d = tour[j], tour[(j + 1) % n]
        if a == c or b == d:  # reversal would be a no-op on the cycle
            delta = None
        else:
            delta = dist[a][c] + dist[b][d] - dist[a][b] - dist[c][d]
        if delta is not None and (delta < 0 or rng.random() < math.exp(-delta / temp)):
            tour[i : j + 1] = reversed(tour[i : j + 1])
            cost += delta
            if cost < best_cost:
                best, best_cost = tour[:], cost
        temp *= 0.995
    return best


def _heuristic_tour(inst: TspInstance, seed: int) -> list[int]:
    rng = random.Random(seed)
    tour = _two_opt(_nearest_neighbor(inst), inst.dist)
    tour = _anneal(tour, inst.dist, rng)
    return _two_opt(tour, inst.dist)


def solve_tour_heuristic(inst: TspInstance, seed: int) -> TourResult:
    """Nearest-neighbor + 2-opt + annealing tour; deterministic per seed."""
    tour = _heuristic_tour(inst, seed)
    order = tour_to_column_order(tour, inst.aux_index, inst.groups)
    return TourResult(order, _tour_cost(tour, inst.dist), SolveStatus.HEURISTIC_ONLY)


def order_columns(
    mat: MembershipMatrix,
    mode: str = "exact",
    seed: int = 0,
    timeout: float | None = DEFAULT_TIMEOUT,
) -> TourResult:
    """Full stage I: build the instance and solve with the requested mode."""
    inst = build_tsp_instance(mat)
    if mode == "exact":
        return solve_tour_exact(inst, timeout=timeout, seed=seed)
    if mode == "heuristic":
        return solve_tour_heuristic(inst, seed)
    raise ValueError(f"unknown mode: {mode!r}")


def brute_force_min_blocks(mat: MembershipMatrix) -> int:
    """Exhaustive minimum total block count over all column permutations.

    Exponential; intended for oracles and toy instances only.
    """
    best = math.inf
    for perm in itertools.permutations(range(mat.n_cols)):
        _, total = count_blocks(mat, ColumnOrder(perm))
        best = min(best, total)
    return int(best)
