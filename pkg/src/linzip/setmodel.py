"""Core domain types for set systems, membership matrices, and block counting.

A set system is a collection of named sets over a shared universe of
elements.  Drawn as a matrix (sets as rows, elements as columns), each set
appears as one or more *blocks*: maximal runs of consecutive member columns
under the current column order.  Everything downstream (column ordering, row
packing, rendering) is driven by the block structure, so the primitives here
are block runs, per-set block counts, active ranges (first to last member
position), and the alternation predicate between two sets.

All types are immutable after construction and all operations are pure.
Positions reported by :func:`active_range` and :func:`block_runs` are
1-based; internal storage is 0-based.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


@dataclass(frozen=True)
class SetSystem:
    """An ordered universe of elements plus ordered, named, nonempty sets.

    ``set_members[i]`` holds the member names of ``set_names[i]``.  Element
    and set names are unique; every member must appear in ``elements``.
    """

    elements: tuple[str, ...]
    set_names: tuple[str, ...]
    set_members: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("element identifiers must be unique")
        if len(set(self.set_names)) != len(self.set_names):
            raise ValueError("set names must be unique")
        if len(self.set_names) != len(self.set_members):
            raise ValueError("set_names and set_members must have equal length")
        if not self.set_names:
            raise ValueError("a set system needs at least one set")
        known = set(self.elements)
        for name, members in zip(self.set_names, self.set_members):
            if not members:
                raise ValueError(f"set {name!r} is empty")
            unknown = members - known
            if unknown:
                raise ValueError(f"set {name!r} has unknown members: {sorted(unknown)}")

    @classmethod
    def from_sets(
        cls, elements: Sequence[str], sets: Mapping[str, Iterable[str]] | Sequence[tuple[str, Iterable[str]]]
    ) -> "SetSystem":
        """Build a system from (name, members) pairs, dropping memberless elements.

        Elements that belong to no set would render as permanently empty
        columns and never affect any algorithm, so they are removed here
        with a warning.
        """
        pairs = list(sets.items()) if isinstance(sets, Mapping) else [(n, m) for n, m in sets]
        names = tuple(name for name, _ in pairs)
        members = tuple(frozenset(m) for _, m in pairs)
        used: set[str] = set()
        for m in members:
            used |= m
        kept = tuple(e for e in elements if e in used)
        dropped = [e for e in elements if e not in used]
        if dropped:
            warnings.warn(
                f"dropping {len(dropped)} element(s) belonging to no set: {dropped}",
                stacklevel=2,
            )
        return cls(elements=kept, set_names=names, set_members=members)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_sets(self) -> int:
        return len(self.set_names)

    def member_indices(self, set_index: int) -> frozenset[int]:
        """Element indices (column indices) of one set."""
        pos = {e: j for j, e in enumerate(self.elements)}
        return frozenset(pos[m] for m in self.set_members[set_index])


@dataclass(frozen=True)
class MembershipMatrix:
    """Binary matrix: ``rows[i][j] == 1`` iff element ``j`` belongs to set ``i``."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("matrix needs at least one row")
        width = len(self.rows[0])
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError("ragged matrix")
            if any(bit not in (0, 1) for bit in row):
                raise ValueError(f"row {i} has non-binary entries")
            if not any(row):
                raise ValueError(f"row {i} is all zeros (sets must be nonempty)")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    def column_bits(self) -> tuple[int, ...]:
        """Each column packed into an int, bit ``i`` set iff ``rows[i][j] == 1``.

        Two elements are equivalent with regard to set membership exactly
        when their packed columns are equal.
        """
        cols = []
        for j in range(self.n_cols):
            bits = 0
            for i in range(self.n_rows):
                if self.rows[i][j]:
                    bits |= 1 << i
            cols.append(bits)
        return tuple(cols)


@dataclass(frozen=True)
class ColumnOrder:
    """A permutation of column indices; ``perm[p]`` is the column at position ``p``."""

    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm must be a permutation of 0..n-1")

    def __len__(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "ColumnOrder":
        return cls(tuple(range(n)))

    def position_of(self) -> tuple[int, ...]:
        """Inverse permutation: 0-based position of each column."""
        inv = [0] * len(self.perm)
        for p, c in enumerate(self.perm):
            inv[c] = p
        return tuple(inv)

    def reversed(self) -> "ColumnOrder":
        return ColumnOrder(tuple(reversed(self.perm)))


@dataclass(frozen=True)
class ActiveRange:
    """1-based positions of a set's first and last member under an order."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("start must be <= end")
        if self.start < 1:
            raise ValueError("positions are 1-based")

    def contains(self, position: int) -> bool:
        return self.start <= position <= self.end

    def overlaps(self, other: "ActiveRange") -> bool:
        return self.start <= other.end and other.start <= self.end


def build_membership_matrix(sys: SetSystem) -> MembershipMatrix:
    """Set-by-element binary membership matrix in the system's own ordering."""
    pos = {e: j for j, e in enumerate(sys.elements)}
    rows = []
    for members in sys.set_members:
        row = [0] * sys.n_elements
        for m in members:
            row[pos[m]] = 1
        rows.append(tuple(row))
    return MembershipMatrix(tuple(rows))


def block_runs(mat: MembershipMatrix, ord: ColumnOrder) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Per set, the maximal runs of member columns as 1-based (start, end) positions."""
    if len(ord) != mat.n_cols:
        raise ValueError("order length does not match column count")
    out = []
    for row in mat.rows:
        runs: list[tuple[int, int]] = []
        start = None
        for p, col in enumerate(ord.perm, start=1):
            if row[col]:
                if start is None:
                    start = p
            elif start is not None:
                runs.append((start, p - 1))
                start = None
        if start is not None:
            runs.append((start, len(ord)))
        out.append(tuple(runs))
    return tuple(out)


def count_blocks(mat: MembershipMatrix, ord: ColumnOrder) -> tuple[tuple[int, ...], int]:
    """Number of blocks per set under the order, and their total."""
    per_set = tuple(len(runs) for runs in block_runs(mat, ord))
    return per_set, sum(per_set)


def active_range(set_index: int, mat: MembershipMatrix, ord: ColumnOrder) -> ActiveRange:
    """1-based positions of the first and last member of one set under the order."""
    row = mat.rows[set_index]
    positions = [p for p, col in enumerate(ord.perm, start=1) if row[col]]
    return ActiveRange(start=positions[0], end=positions[-1])


def active_ranges(mat: MembershipMatrix, ord: ColumnOrder) -> tuple[ActiveRange, ...]:
    """Active ranges of all sets under one order."""
    return tuple(active_range(i, mat, ord) for i in range(mat.n_rows))


def alternates(set_i: int, set_j: int, mat: MembershipMatrix, ord: ColumnOrder) -> bool:
    """Whether blocks of the two sets interleave under the order.

    Merging the block start positions of both sets in increasing position,
    the predicate holds iff the owner sequence contains the pattern X, Y, X.
    The contract covers disjoint pairs; for those, alternation is equivalent
    to the two active ranges intersecting.
    """
    if set_i == set_j:
        raise ValueError("alternates needs two distinct sets")
    runs = block_runs(mat, ord)
    merged = sorted(
        [(start, 0) for start, _ in runs[set_i]] + [(start, 1) for start, _ in runs[set_j]]
    )
    owners = [owner for _, owner in merged]
    # With only two owners, any X..Y..X pattern implies the first owner
    # switches away and returns, so one scan suffices.
    first = owners[0]
    switched = False
    for owner in owners:
        if owner != first:
            switched = True
        elif switched:
            return True
    return False


def collapse_duplicate_columns(
    mat: MembershipMatrix,
) -> tuple[MembershipMatrix, tuple[tuple[int, ...], ...]]:
    """Merge columns with identical bit vectors.

    Returns the reduced matrix plus, per reduced column, the original column
    indices it stands for (in first-occurrence order).  Expanding a reduced
    order with duplicates placed adjacently preserves the block count, so
    tour solvers only ever see the reduced instance.
    """
    cols = mat.column_bits()
    first_seen: dict[int, int] = {}
    groups: list[list[int]] = []
    for j, bits in enumerate(cols):
        if bits in first_seen:
            groups[first_seen[bits]].append(j)
        else:
            first_seen[bits] = len(groups)
            groups.append([j])
    reduced_rows = []
    for row in mat.rows:
        reduced_rows.append(tuple(row[group[0]] for group in groups))
    return MembershipMatrix(tuple(reduced_rows)), tuple(tuple(g) for g in groups)


def expand_order(
    reduced_order: ColumnOrder, groups: Sequence[Sequence[int]]
) -> ColumnOrder:
    """Turn an order over reduced columns into one over the original columns.

    Duplicate columns are placed adjacently, in original index order.
    """
    expanded: list[int] = []
    for k in reduced_order.perm:
        expanded.extend(groups[k])
    return ColumnOrder(tuple(expanded))
