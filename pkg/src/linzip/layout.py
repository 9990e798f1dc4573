"""Stage III: row ordering and circular color assignment.

Rows are displayed in a uniformly random order drawn from the given seed.
Colors come from a 10-color palette (Tableau10 hex values by default,
configurable): traversing rows in display order and the sets inside each row
by ascending block-start position, a running counter assigns palette index
``counter mod P`` and never resets.  With ≤ P sets per row this guarantees
pairwise distinct colors inside every row.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from typing import Sequence

from .common import Variant
from .compress import RowAssignment
from .setmodel import ActiveRange, ColumnOrder, MembershipMatrix, active_ranges

TABLEAU10 = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)


@dataclass(frozen=True)
class DiagramLayout:
    """Everything the renderer needs: order, rows, display order, colors, style."""

    order: ColumnOrder
    assignment: RowAssignment
    row_order: tuple[int, ...]
    color_of: tuple[int, ...]
    style: Variant
    palette: tuple[str, ...] = TABLEAU10

    def __post_init__(self) -> None:
        if sorted(self.row_order) != list(range(self.assignment.row_count)):
            raise ValueError("row_order must be a permutation of the rows")
        if len(self.color_of) != len(self.assignment.row_of):
            raise ValueError("one palette index per set required")
        if any(c < 0 or c >= len(self.palette) for c in self.color_of):
            raise ValueError("palette index out of range")
        if self.style is Variant.G0 and any(s != 1 for s in self.assignment.row_sizes()):
            raise ValueError("Γ0 keeps one set per row")

    @property
    def row_count(self) -> int:
        return self.assignment.row_count

    def display_rows(self) -> tuple[tuple[int, ...], ...]:
        """Sets per row, top to bottom, each row in ascending set index."""
        return tuple(self.assignment.sets_in_row(r) for r in self.row_order)

    def color_hex(self, set_index: int) -> str:
        return self.palette[self.color_of[set_index]]


def order_rows(assignment: RowAssignment, seed: int) -> tuple[int, ...]:
    """Uniformly random display order of rows; deterministic per seed."""
    perm = list(range(assignment.row_count))
    random.Random(seed).shuffle(perm)
    return tuple(perm)


def assign_colors_circular(
    assignment: RowAssignment,
    row_order: Sequence[int],
    ranges: Sequence[ActiveRange],
    palette_size: int = len(TABLEAU10),
) -> tuple[int, ...]:
    """Cyclic palette indices: rows in display order, sets by block start.

    The counter runs across rows without resetting.  Ties on the start
    position break by set index.  If a row holds more than ``palette_size``
    sets a warning is issued since colors must then repeat inside it.
    """
    color_of = [0] * len(assignment.row_of)
    counter = 0
    for row in row_order:
        members = sorted(
            assignment.sets_in_row(row), key=lambda s: (ranges[s].start, s)
        )
        if len(members) > palette_size:
            warnings.warn(
                f"row {row} holds {len(members)} sets; palette has "
                f"{palette_size} colors, so colors repeat within the row",
                stacklevel=2,
            )
        for s in members:
            color_of[s] = counter % palette_size
            counter += 1
    return tuple(color_of)


def build_layout(
    mat: MembershipMatrix,
    order: ColumnOrder,
    assignment: RowAssignment,
    style: Variant,
    seed: int,
    palette: tuple[str, ...] = TABLEAU10,
) -> DiagramLayout:
    """Run stage III and bundle the result."""
    ranges = active_ranges(mat, order)
    row_order = order_rows(assignment, seed)
    color_of = assign_colors_circular(assignment, row_order, ranges, len(palette))
    return DiagramLayout(
        order=order,
        assignment=assignment,
        row_order=row_order,
        color_of=color_of,
        style=style,
        palette=palette,
    )
