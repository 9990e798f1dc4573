"""Stage II: pack non-conflicting sets into shared rows.

A conflict graph has one vertex per set; an edge forbids sharing a row.
Three compatibility models decide the edges (and, for Γ3, extra triple
constraints):

* Γ1 — two sets may share a row iff they are disjoint; edges join
  intersecting sets.
* Γ2 — additionally, their active ranges must not overlap (so block links
  never overlap); edges join sets with intersecting ranges.
* Γ3 — disjointness plus: at any column, at most two sets in one row may
  have that column inside their active range (two block links can share a
  row on separate lanes; three cannot).  Edges are Γ1's; the triple rule is
  carried by the per-set T-sets T_S = {S′ : s_S ∈ range(S′)}.  By Helly's
  property for intervals, three ranges share a column iff all three lie in
  the T-set of the one starting last, so "≤2 per row from every T_S"
  enforces exactly the triple rule.

Row assignment is a graph coloring with color classes as rows, optionally
capacity-bounded (≤ B sets per row).  Solvers: DSATUR-style heuristics
(saturation counts blocked colors: neighbor colors, full classes, and
triple-blocked colors), an exact branch-and-bound search with clique
pre-fixing and color-symmetry breaking realizing the integer-programming
semantics (one color per vertex; adjacent vertices differ; ≤B per class;
≤2 per class per T-set; new colors opened in index order — this also covers
neighborless vertices, which can never occupy an unopened color), and, for
B = 2, an exact polynomial route via maximum matching in the complement
graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from .common import SolveStatus, Variant
from .setmodel import ActiveRange, ColumnOrder, MembershipMatrix, active_ranges

DEFAULT_TIMEOUT = 300.0


@dataclass(frozen=True)
class ConflictGraph:
    """Undirected graph on set indices 0..n-1; edges stored as (i, j) with i < j."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ValueError(f"bad edge ({i}, {j}) for {self.n} vertices")

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        neigh: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            neigh[i].add(j)
            neigh[j].add(i)
        return tuple(frozenset(s) for s in neigh)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def complement(self) -> "ConflictGraph":
        comp = frozenset(
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if (i, j) not in self.edges
        )
        return ConflictGraph(self.n, comp)


@dataclass(frozen=True)
class TSets:
    """Per set S, the sets whose active range contains S's start position."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        for s, t in enumerate(self.sets):
            if s not in t:
                raise ValueError(f"T-set of {s} must contain {s} itself")

    @cached_property
    def constraint_sets(self) -> tuple[frozenset[int], ...]:
        """Deduplicated T-sets with ≥3 members: the ones that constrain rows."""
        seen: list[frozenset[int]] = []
        for t in self.sets:
            if len(t) >= 3 and t not in seen:
                seen.append(t)
        return tuple(sorted(seen, key=sorted))

    @cached_property
    def triples(self) -> frozenset[frozenset[int]]:
        """All conflicting triples: 3-subsets of any T-set."""
        import itertools

        found: set[frozenset[int]] = set()
        for t in self.constraint_sets:
            for combo in itertools.combinations(sorted(t), 3):
                found.add(frozenset(combo))
        return frozenset(found)

    def triple_counts(self, n: int) -> tuple[int, ...]:
        counts = [0] * n
        for t in self.triples:
            for v in t:
                counts[v] += 1
        return tuple(counts)


@dataclass(frozen=True)
class RowAssignment:
    """Set index → row index; rows are numbered 0..row_count-1 without gaps."""

    row_of: tuple[int, ...]
    row_count: int
    bound: int | None
    status: SolveStatus

    def __post_init__(self) -> None:
        if sorted(set(self.row_of)) != list(range(self.row_count)):
            raise ValueError("rows must be exactly 0..row_count-1")
        if self.bound is not None:
            if self.bound < 2:
                raise ValueError("bound must be ≥ 2")
            sizes = self.row_sizes()
            if any(size > self.bound for size in sizes):
                raise ValueError("a row exceeds the bound")

    def row_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.row_count
        for r in self.row_of:
            sizes[r] += 1
        return tuple(sizes)

    def sets_in_row(self, row: int) -> tuple[int, ...]:
        return tuple(v for v, r in enumerate(self.row_of) if r == row)


def build_conflict_graph(
    mat: MembershipMatrix, variant: Variant, ord: ColumnOrder | None = None
) -> tuple[ConflictGraph, TSets | None]:
    """Edges (and T-sets for Γ3) for one compatibility model.

    ``ord`` is required for Γ2/Γ3, whose constraints depend on active
    ranges, and ignored for Γ1.
    """
    if variant is Variant.G0:
        raise ValueError("Γ0 keeps one set per row and has no conflict graph")
    n = mat.n_rows
    row_bits = [sum(bit << j for j, bit in enumerate(row)) for row in mat.rows]
    intersecting = frozenset(
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if row_bits[i] & row_bits[j]
    )
    if variant is Variant.G1:
        return ConflictGraph(n, intersecting), None
    if ord is None:
        raise ValueError(f"{variant.value} needs a column order")
    ranges = active_ranges(mat, ord)
    if variant is Variant.G2:
        overlapping = frozenset(
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if ranges[i].overlaps(ranges[j])
        )
        return ConflictGraph(n, intersecting | overlapping), None
    # Γ3
    return ConflictGraph(n, intersecting), compute_t_sets(ranges)


def compute_t_sets(ranges: Sequence[ActiveRange]) -> TSets:
    """T_S = sets whose active range contains S's start; always includes S."""
    sets = tuple(
        frozenset(i for i, r in enumerate(ranges) if r.contains(own.start))
        for own in ranges
    )
    return TSets(sets)


def greedy_clique(graph: ConflictGraph) -> tuple[int, ...]:
    """Grow a clique by repeatedly adding the highest-degree compatible vertex.

    Ties break toward the lowest index.  Returned in pick order; the exact
    solver pre-fixes member k to color k.
    """
    adj = graph.adjacency
    chosen: list[int] = []
    candidates = set(range(graph.n))
    while candidates:
        best = max(candidates, key=lambda v: (len(adj[v]), -v))
        chosen.append(best)
        candidates = {v for v in candidates if v in adj[best]}
    return tuple(chosen)


class _Blocked:
    """Incrementally maintained infeasible-color bookkeeping for one search."""

    def __init__(
        self,
        graph: ConflictGraph,
        bound: int | None,
        tsets: TSets | None,
    ):
        self.adj = graph.adjacency
        self.bound = bound
        self.constraints = tsets.constraint_sets if tsets is not None else ()
        self.cons_of: list[list[int]] = [[] for _ in range(graph.n)]
        for ci, t in enumerate(self.constraints):
            for v in t:
                self.cons_of[v].append(ci)

    def blocked_colors(
        self,
        v: int,
        color: Sequence[int],
        class_size: Sequence[int],
        cons_count: Sequence[list[int]],
        used: int,
    ) -> set[int]:
        """Colors in 0..used-1 that v cannot take in the current partial state."""
        out = {color[u] for u in self.adj[v] if color[u] >= 0}
        if self.bound is not None:
            out.update(c for c in range(used) if class_size[c] >= self.bound)
        for ci in self.cons_of[v]:
            counts = cons_count[ci]
            out.update(c for c in range(used) if counts[c] >= 2)
        return out


def _dsatur_order_solve(
    graph: ConflictGraph,
    bound: int | None,
    tsets: TSets | None,
) -> tuple[list[int], int]:
    """The shared DSATUR loop: returns (color per vertex, colors used)."""
    n = graph.n
    helper = _Blocked(graph, bound, tsets)
    tri = tsets.triple_counts(n) if tsets is not None else (0,) * n
    degree = [graph.degree(v) for v in range(n)]
    color = [-1] * n
    class_size = [0] * n
    cons_count = [[0] * n for _ in helper.constraints]
    used = 0
    for _ in range(n):
        best_v, best_key, best_blocked = -1, None, None
        for v in range(n):
            if color[v] >= 0:
                continue
            blocked = helper.blocked_colors(v, color, class_size, cons_count, used)
            key = (len(blocked), degree[v] + tri[v], -v)
            if best_key is None or key > best_key:
                best_v, best_key, best_blocked = v, key, blocked
        assert best_blocked is not None
        c = next(
            (c for c in range(used) if c not in best_blocked), used
        )
        if c == used:
            used += 1
        color[best_v] = c
        class_size[c] += 1
        for ci in helper.cons_of[best_v]:
            cons_count[ci][c] += 1
    return color, used


def dsatur(
    graph: ConflictGraph,
    bound: int | None = None,
    tsets: TSets | None = None,
) -> RowAssignment:
    """Deterministic DSATUR heuristic covering all three variants.

    Saturation of an uncolored vertex = number of colors it cannot take:
    colors of its neighbors, full classes (bounded case), and colors held by
    two other members of one of its T-sets (Γ3 case).  Ties break by
    decreasing degree plus the number of conflicting triples containing the
    vertex, then by lowest index.  Vertices take the lowest feasible color.
    """
    color, used = _dsatur_order_solve(graph, bound, tsets)
    return RowAssignment(tuple(color), used, bound, SolveStatus.HEURISTIC_ONLY)


class _SearchTimeout(Exception):
    pass


def exact_min_rows(
    graph: ConflictGraph,
    bound: int | None = None,
    tsets: TSets | None = None,
    clique: Sequence[int] | None = None,
    warm_start: RowAssignment | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
) -> RowAssignment:
    """Provably minimum row count via branch-and-bound, or the warm start on timeout.

    The search fixes the clique to the first colors, branches on the most
    saturated uncolored vertex, tries feasible existing colors then at most
    one new color (symmetry breaking), and prunes with
    max(|clique|, ⌈n/B⌉) as global lower bound and the incumbent as upper
    bound.  ``warm_start`` supplies the incumbent and the fallback result;
    it defaults to :func:`dsatur`.
    """
    from .colorder import _Deadline  # shared deadline helper

    n = graph.n
    if clique is None:
        clique = greedy_clique(graph)
    if warm_start is None:
        warm_start = dsatur(graph, bound, tsets)
    if warm_start.bound != bound:
        raise ValueError("warm start solved a different bound")
    deadline = _Deadline(timeout)
    if deadline.expired():
        # A non-positive timeout skips even the trivial optimality proof so
        # the stage uniformly reports the fallback protocol.
        return RowAssignment(
            warm_start.row_of, warm_start.row_count, bound, SolveStatus.TIMEOUT_FALLBACK
        )
    lower = max(len(clique), math.ceil(n / bound) if bound is not None else 1, 1)
    best_count = warm_start.row_count
    best_rows = list(warm_start.row_of)
    if best_count <= lower:
        return RowAssignment(tuple(best_rows), best_count, bound, SolveStatus.OPTIMAL)

    helper = _Blocked(graph, bound, tsets)
    tri = tsets.triple_counts(n) if tsets is not None else (0,) * n
    degree = [graph.degree(v) for v in range(n)]
    color = [-1] * n
    class_size = [0] * n
    cons_count = [[0] * n for _ in helper.constraints]
    for k, v in enumerate(clique):
        color[v] = k
        class_size[k] += 1
        for ci in helper.cons_of[v]:
            cons_count[ci][k] += 1
    used0 = len(clique)

    class _Done(Exception):
        pass

    def dfs(colored: int, used: int) -> None:
        nonlocal best_count, best_rows
        if deadline.expired():
            raise _SearchTimeout
        if used >= best_count:
            return
        if colored == n:
            best_count = used
            best_rows = color[:]
            if best_count <= lower:
                raise _Done
            return
        best_v, best_key, best_blocked = -1, None, None
        for v in range(n):
            if color[v] >= 0:
                continue
            blocked = helper.blocked_colors(v, color, class_size, cons_count, used)
            key = (len(blocked), degree[v] + tri[v], -v)
            if best_key is None or key > best_key:
                best_v, best_key, best_blocked = v, key, blocked
        assert best_blocked is not None
        candidates = [c for c in range(used) if c not in best_blocked]
        if used + 1 < best_count:
            candidates.append(used)
        for c in candidates:
            color[best_v] = c
            class_size[c] += 1
            for ci in helper.cons_of[best_v]:
                cons_count[ci][c] += 1
            dfs(colored + 1, used if c < used else used + 1)
            color[best_v] = -1
            class_size[c] -= 1
            for ci in helper.cons_of[best_v]:
                cons_count[ci][c] -= 1

    try:
        dfs(used0, used0)
    except _SearchTimeout:
        return RowAssignment(
            warm_start.row_of, warm_start.row_count, bound, SolveStatus.TIMEOUT_FALLBACK
        )
    except _Done:
        pass
    return RowAssignment(tuple(best_rows), best_count, bound, SolveStatus.OPTIMAL)


def match_pairs_b2(graph: ConflictGraph) -> RowAssignment:
    """Exact minimum rows for B = 2 via maximum matching in the complement.

    Each matched pair shares a row; unmatched vertices sit alone, so the row
    count is |V| − |M|, which is minimum.  Always reports ``OPTIMAL`` — the
    matching route is polynomial and used in both pipeline modes.
    """
    comp = graph.complement()
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(sorted(comp.edges))
    matching = nx.max_weight_matching(g, maxcardinality=True)
    partner = {}
    for u, v in matching:
        partner[u] = v
        partner[v] = u
    row_of = [-1] * graph.n
    next_row = 0
    for v in range(graph.n):
        if row_of[v] >= 0:
            continue
        row_of[v] = next_row
        mate = partner.get(v)
        if mate is not None and row_of[mate] < 0:
            row_of[mate] = next_row
        next_row += 1
    return RowAssignment(tuple(row_of), next_row, 2, SolveStatus.OPTIMAL)


def assign_rows(
    graph: ConflictGraph,
    bound: int | None = None,
    tsets: TSets | None = None,
    mode: str = "exact",
    timeout: float | None = DEFAULT_TIMEOUT,
) -> RowAssignment:
    """Stage II dispatcher: matching for B=2, else exact search or DSATUR."""
    if bound == 2:
        return match_pairs_b2(graph)
    if mode == "exact":
        return exact_min_rows(graph, bound, tsets, timeout=timeout)
    if mode == "heuristic":
        return dsatur(graph, bound, tsets)
    raise ValueError(f"unknown mode: {mode!r}")


def validate_assignment(
    assignment: RowAssignment,
    graph: ConflictGraph,
    tsets: TSets | None = None,
) -> list[str]:
    """Re-check every row constraint; returns human-readable violations."""
    problems = []
    for i, j in sorted(graph.edges):
        if assignment.row_of[i] == assignment.row_of[j]:
            problems.append(f"conflicting sets {i} and {j} share row {assignment.row_of[i]}")
    if assignment.bound is not None:
        for r, size in enumerate(assignment.row_sizes()):
            if size > assignment.bound:
                problems.append(f"row {r} holds {size} sets, bound is {assignment.bound}")
    if tsets is not None:
        for t in tsets.constraint_sets:
            per_row: dict[int, int] = {}
            for v in t:
                per_row[assignment.row_of[v]] = per_row.get(assignment.row_of[v], 0) + 1
            for r, count in sorted(per_row.items()):
                if count > 2:
                    problems.append(
                        f"row {r} holds {count} sets of T-set {sorted(t)} (max 2)"
                    )
    return problems
