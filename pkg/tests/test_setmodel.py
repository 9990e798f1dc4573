"""Tests for the core set-system types and block primitives."""

from __future__ import annotations

import itertools
import random

import pytest

from linzip.setmodel import (
    ActiveRange,
    ColumnOrder,
    MembershipMatrix,
    SetSystem,
    active_range,
    active_ranges,
    alternates,
    block_runs,
    build_membership_matrix,
    collapse_duplicate_columns,
    count_blocks,
    expand_order,
)


# ---------------------------------------------------------------------------
# Independent oracles (deliberately different implementations from the library)
# ---------------------------------------------------------------------------


def oracle_count_runs(bits: list[int]) -> int:
    """Run counter on a 0/1 string representation, not on matrix rows."""
    return len([run for run in "".join(map(str, bits)).split("0") if run])


def oracle_total_blocks(rows: list[list[int]], perm: list[int]) -> int:
    return sum(oracle_count_runs([row[c] for c in perm]) for row in rows)


def oracle_range(row: list[int], perm: list[int]) -> tuple[int, int]:
    """Brute-force position scan for the first/last member, 1-based."""
    hits = [p + 1 for p, c in enumerate(perm) if row[c]]
    return min(hits), max(hits)


def oracle_ranges_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return max(a[0], b[0]) <= min(a[1], b[1])


def toy_system() -> SetSystem:
    return SetSystem(
        elements=("a", "b", "c", "d"),
        set_names=("S1", "S2", "S3"),
        set_members=(frozenset({"a", "c"}), frozenset({"b"}), frozenset({"d"})),
    )


def random_system(rng: random.Random, n_sets: int, n_elems: int) -> SetSystem:
    elements = tuple(f"e{j}" for j in range(n_elems))
    members = []
    for _ in range(n_sets):
        size = rng.randint(1, n_elems)
        members.append(frozenset(rng.sample(elements, size)))
    names = tuple(f"S{i}" for i in range(n_sets))
    used = set().union(*members)
    kept = tuple(e for e in elements if e in used)
    return SetSystem(elements=kept, set_names=names, set_members=tuple(members))


# ---------------------------------------------------------------------------
# SetSystem / MembershipMatrix construction
# ---------------------------------------------------------------------------


class TestBuildMembershipMatrix:
    def test_toy_rows(self):
        mat = build_membership_matrix(toy_system())
        assert mat.rows == ((1, 0, 1, 0), (0, 1, 0, 0), (0, 0, 0, 1))

    def test_single_set_single_element(self):
        sys = SetSystem(("a",), ("S",), (frozenset({"a"}),))
        mat = build_membership_matrix(sys)
        assert mat.rows == ((1,),)

    def test_row_sums_equal_cardinalities(self):
        rng = random.Random(11)
        for _ in range(30):
            sys = random_system(rng, rng.randint(1, 6), rng.randint(1, 9))
            mat = build_membership_matrix(sys)
            for i, members in enumerate(sys.set_members):
                assert sum(mat.rows[i]) == len(members)

    def test_rejects_duplicate_elements(self):
        with pytest.raises(ValueError, match="unique"):
            SetSystem(("a", "a"), ("S",), (frozenset({"a"}),))

    def test_rejects_duplicate_set_names(self):
        with pytest.raises(ValueError, match="unique"):
            SetSystem(("a", "b"), ("S", "S"), (frozenset({"a"}), frozenset({"b"})))

    def test_rejects_unknown_member(self):
        with pytest.raises(ValueError, match="unknown"):
            SetSystem(("a",), ("S",), (frozenset({"z"}),))

    def test_rejects_empty_set(self):
        with pytest.raises(ValueError, match="empty"):
            SetSystem(("a",), ("S",), (frozenset(),))

    def test_rejects_zero_sets(self):
        with pytest.raises(ValueError, match="at least one"):
            SetSystem(("a",), (), ())

    def test_from_sets_drops_memberless_elements_with_warning(self):
        with pytest.warns(UserWarning, match="no set"):
            sys = SetSystem.from_sets(["a", "b", "c"], {"S": ["a", "c"]})
        assert sys.elements == ("a", "c")
        assert sys.set_members == (frozenset({"a", "c"}),)

    def test_from_sets_keeps_order_without_warning(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            sys = SetSystem.from_sets(["b", "a"], [("S1", ["a"]), ("S2", ["b"])])
        assert sys.elements == ("b", "a")
        assert sys.set_names == ("S1", "S2")

    def test_matrix_rejects_all_zero_row(self):
        with pytest.raises(ValueError, match="all zeros"):
            MembershipMatrix(((1, 0), (0, 0)))

    def test_matrix_rejects_ragged(self):
        with pytest.raises(ValueError, match="ragged"):
            MembershipMatrix(((1, 0), (1,)))

    def test_matrix_rejects_non_binary(self):
        with pytest.raises(ValueError, match="non-binary"):
            MembershipMatrix(((1, 2),))


class TestColumnOrder:
    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            ColumnOrder((0, 0, 1))

    def test_identity_and_inverse(self):
        ord = ColumnOrder((2, 0, 1))
        assert ord.position_of() == (1, 2, 0)
        assert ColumnOrder.identity(3).perm == (0, 1, 2)

    def test_reversed(self):
        assert ColumnOrder((2, 0, 1)).reversed().perm == (1, 0, 2)


# ---------------------------------------------------------------------------
# count_blocks
# ---------------------------------------------------------------------------


class TestCountBlocks:
    def test_split_versus_contiguous(self):
        mat = MembershipMatrix(((1, 0, 1),))  # {a,c} over (a,b,c)
        per_set, total = count_blocks(mat, ColumnOrder((0, 1, 2)))
        assert per_set == (2,) and total == 2
        per_set, total = count_blocks(mat, ColumnOrder((0, 2, 1)))  # (a,c,b)
        assert per_set == (1,) and total == 1

    def test_all_ones_row_single_block(self):
        mat = MembershipMatrix(((1, 1, 1, 1),))
        for perm in itertools.permutations(range(4)):
            assert count_blocks(mat, ColumnOrder(perm)) == ((1,), 1)

    def test_matches_independent_scan(self):
        rng = random.Random(5)
        for _ in range(40):
            rows = []
            while len(rows) < 5:
                row = [rng.randint(0, 1) for _ in range(6)]
                if any(row):
                    rows.append(row)
            mat = MembershipMatrix(tuple(tuple(r) for r in rows))
            perm = list(range(6))
            rng.shuffle(perm)
            per_set, total = count_blocks(mat, ColumnOrder(tuple(perm)))
            assert total == oracle_total_blocks(rows, perm)
            for i, row in enumerate(rows):
                assert per_set[i] == oracle_count_runs([row[c] for c in perm])

    def test_invariant_under_row_permutation(self):
        rng = random.Random(7)
        rows = [[1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 0, 0]]
        perm = ColumnOrder((3, 1, 0, 2))
        _, base = count_blocks(MembershipMatrix(tuple(map(tuple, rows))), perm)
        for _ in range(5):
            shuffled = rows[:]
            rng.shuffle(shuffled)
            _, total = count_blocks(MembershipMatrix(tuple(map(tuple, shuffled))), perm)
            assert total == base

    def test_count_is_one_iff_contiguous(self):
        rng = random.Random(13)
        for _ in range(40):
            row = [rng.randint(0, 1) for _ in range(7)]
            if not any(row):
                row[0] = 1
            mat = MembershipMatrix((tuple(row),))
            perm = list(range(7))
            rng.shuffle(perm)
            per_set, _ = count_blocks(mat, ColumnOrder(tuple(perm)))
            positions = sorted(p for p, c in enumerate(perm) if row[c])
            contiguous = positions[-1] - positions[0] + 1 == len(positions)
            assert per_set[0] >= 1
            assert (per_set[0] == 1) == contiguous

    def test_rejects_wrong_length_order(self):
        mat = MembershipMatrix(((1, 0),))
        with pytest.raises(ValueError, match="length"):
            count_blocks(mat, ColumnOrder((0,)))


class TestBlockRuns:
    def test_runs_positions_one_based(self):
        mat = MembershipMatrix(((1, 0, 1, 1), (0, 1, 0, 0)))
        runs = block_runs(mat, ColumnOrder((0, 1, 2, 3)))
        assert runs == (((1, 1), (3, 4)), ((2, 2),))

    def test_runs_follow_order(self):
        mat = MembershipMatrix(((1, 0, 1),))
        runs = block_runs(mat, ColumnOrder((1, 0, 2)))  # b,a,c
        assert runs == (((2, 3),),)


# ---------------------------------------------------------------------------
# active_range
# ---------------------------------------------------------------------------


class TestActiveRange:
    def test_toy_ranges(self):
        mat = build_membership_matrix(toy_system())
        ident = ColumnOrder.identity(4)
        assert active_range(0, mat, ident) == ActiveRange(1, 3)
        assert active_range(2, mat, ident) == ActiveRange(4, 4)

    def test_matches_position_scan(self):
        rng = random.Random(23)
        for _ in range(40):
            rows = []
            while len(rows) < 4:
                row = [rng.randint(0, 1) for _ in range(8)]
                if any(row):
                    rows.append(row)
            mat = MembershipMatrix(tuple(map(tuple, rows)))
            perm = list(range(8))
            rng.shuffle(perm)
            ord = ColumnOrder(tuple(perm))
            for i, row in enumerate(rows):
                got = active_range(i, mat, ord)
                assert (got.start, got.end) == oracle_range(row, perm)

    def test_contains_and_overlaps(self):
        r = ActiveRange(2, 5)
        assert r.contains(2) and r.contains(5) and not r.contains(6)
        assert r.overlaps(ActiveRange(5, 9))
        assert not r.overlaps(ActiveRange(6, 9))

    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            ActiveRange(3, 2)


# ---------------------------------------------------------------------------
# alternates
# ---------------------------------------------------------------------------


class TestAlternates:
    def test_toy_true_case(self):
        mat = build_membership_matrix(toy_system())
        assert alternates(0, 1, mat, ColumnOrder.identity(4))  # S1,S2,S1

    def test_toy_false_case(self):
        # S1={a,b}, S3={d} under (a,b,c,d): S1 entirely before S3.
        mat = MembershipMatrix(((1, 1, 0, 0), (0, 0, 0, 1)))
        assert not alternates(0, 1, mat, ColumnOrder.identity(4))

    def test_symmetric(self):
        mat = build_membership_matrix(toy_system())
        ord = ColumnOrder.identity(4)
        for i, j in itertools.combinations(range(3), 2):
            assert alternates(i, j, mat, ord) == alternates(j, i, mat, ord)

    def test_rejects_same_set(self):
        mat = build_membership_matrix(toy_system())
        with pytest.raises(ValueError):
            alternates(1, 1, mat, ColumnOrder.identity(4))

    def test_disjoint_pairs_match_range_overlap_oracle(self):
        rng = random.Random(31)
        checked = 0
        for _ in range(120):
            n = rng.randint(3, 8)
            rows = []
            while len(rows) < 4:
                row = [rng.randint(0, 1) for _ in range(n)]
                if any(row):
                    rows.append(row)
            mat = MembershipMatrix(tuple(map(tuple, rows)))
            perm = list(range(n))
            rng.shuffle(perm)
            ord = ColumnOrder(tuple(perm))
            for i, j in itertools.combinations(range(4), 2):
                if any(a and b for a, b in zip(rows[i], rows[j])):
                    continue  # contract covers disjoint pairs only
                checked += 1
                ri = oracle_range(rows[i], perm)
                rj = oracle_range(rows[j], perm)
                assert alternates(i, j, mat, ord) == oracle_ranges_overlap(ri, rj)
        assert checked > 50  # the sample actually exercised the property


# ---------------------------------------------------------------------------
# collapse_duplicate_columns
# ---------------------------------------------------------------------------


class TestCollapseDuplicates:
    def test_identical_columns_merge(self):
        # columns 0 and 2 identical
        mat = MembershipMatrix(((1, 0, 1), (1, 1, 1)))
        reduced, groups = collapse_duplicate_columns(mat)
        assert reduced.rows == ((1, 0), (1, 1))
        assert groups == ((0, 2), (1,))

    def test_all_distinct_is_identity(self):
        mat = MembershipMatrix(((1, 0, 1), (0, 1, 1)))
        reduced, groups = collapse_duplicate_columns(mat)
        assert reduced.rows == mat.rows
        assert groups == ((0,), (1,), (2,))

    def test_expansion_preserves_block_count(self):
        rng = random.Random(41)
        for _ in range(40):
            n = rng.randint(2, 8)
            rows = []
            while len(rows) < 4:
                row = [rng.randint(0, 1) for _ in range(n)]
                if any(row):
                    rows.append(row)
            mat = MembershipMatrix(tuple(map(tuple, rows)))
            reduced, groups = collapse_duplicate_columns(mat)
            perm = list(range(reduced.n_cols))
            rng.shuffle(perm)
            reduced_order = ColumnOrder(tuple(perm))
            _, reduced_total = count_blocks(reduced, reduced_order)
            expanded = expand_order(reduced_order, groups)
            _, full_total = count_blocks(mat, expanded)
            assert full_total == reduced_total

    def test_active_ranges_helper(self):
        mat = build_membership_matrix(toy_system())
        ranges = active_ranges(mat, ColumnOrder.identity(4))
        assert [(r.start, r.end) for r in ranges] == [(1, 3), (2, 2), (4, 4)]
