"""linzip: compressed linear set diagrams.

Order columns to minimize blocks, pack compatible sets into shared rows,
assign row order and colors, and render SVG — with exact and heuristic
solvers for the two optimization stages and a benchmark harness comparing
them.
"""

from .colorder import (
    TourResult,
    TspInstance,
    build_tsp_instance,
    order_columns,
    solve_tour_exact,
    solve_tour_heuristic,
    tour_to_column_order,
)
from .common import SolveStatus, Variant, derive_seed
from .compress import (
    ConflictGraph,
    RowAssignment,
    TSets,
    assign_rows,
    build_conflict_graph,
    compute_t_sets,
    dsatur,
    exact_min_rows,
    greedy_clique,
    match_pairs_b2,
)
from .formats import ParseError, parse_instance, write_instance
from .generate import generate_synthetic
from .layout import (
    TABLEAU10,
    DiagramLayout,
    assign_colors_circular,
    build_layout,
    order_rows,
)
from .pipeline import Metrics, PipelineConfig, run
from .render import RenderGeometry, SvgDocument, render, validate_document
from .setmodel import (
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
)

__version__ = "0.1.0"

__all__ = [
    "ActiveRange",
    "ColumnOrder",
    "ConflictGraph",
    "DiagramLayout",
    "MembershipMatrix",
    "Metrics",
    "ParseError",
    "PipelineConfig",
    "RenderGeometry",
    "RowAssignment",
    "SetSystem",
    "SolveStatus",
    "SvgDocument",
    "TABLEAU10",
    "TSets",
    "TourResult",
    "TspInstance",
    "Variant",
    "active_range",
    "active_ranges",
    "alternates",
    "assign_colors_circular",
    "assign_rows",
    "block_runs",
    "build_conflict_graph",
    "build_layout",
    "build_membership_matrix",
    "build_tsp_instance",
    "collapse_duplicate_columns",
    "compute_t_sets",
    "count_blocks",
    "derive_seed",
    "dsatur",
    "exact_min_rows",
    "generate_synthetic",
    "greedy_clique",
    "match_pairs_b2",
    "order_columns",
    "order_rows",
    "parse_instance",
    "render",
    "run",
    "solve_tour_exact",
    "solve_tour_heuristic",
    "tour_to_column_order",
    "validate_document",
    "write_instance",
]
