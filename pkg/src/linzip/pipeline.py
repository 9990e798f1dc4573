"""The four-stage orchestration: order → compress → layout → render.

``run`` executes one configuration end to end and reports :class:`Metrics`.
In exact mode each optimization stage may hit its timeout, in which case the
heuristic result is used for the remaining stages and the stage status says
``timeout_fallback``.  All randomness flows from the single config seed via
``derive_seed(seed, stage_tag)`` with tags ``"order"`` (annealing /
fallback) and ``"rows"`` (row shuffle), so exact and heuristic runs of the
same seed share their random streams.

Metrics wall times are measured but serialized as null by default —
metrics files must be byte-identical across repeated runs, and timing
fields would break that.  Pass ``include_times=True`` (or the CLI's
``--record-times``) to write them.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

from .colorder import order_columns
from .common import SolveStatus, Variant, derive_seed
from .compress import assign_rows, build_conflict_graph
from .layout import DiagramLayout, build_layout
from .render import RenderGeometry, SvgDocument, render
from .setmodel import SetSystem, build_membership_matrix, count_blocks
from .compress import RowAssignment

DEFAULT_TIMEOUT = 300.0
_MODES = ("exact", "heuristic")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one pipeline invocation depends on."""

    variant: Variant = Variant.G2
    bound: int | None = None  # None = unbounded
    mode: str = "exact"
    timeout: float = DEFAULT_TIMEOUT
    seed: int = 0
    geometry: RenderGeometry = field(default_factory=RenderGeometry)
    column_labels: str = "elements"

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.timeout < 0:
            raise ValueError("timeout must be ≥ 0 (0 forces the fallback protocol)")
        if self.bound is not None and self.bound < 2:
            raise ValueError("bound must be ≥ 2 (or None for unbounded)")


@dataclass(frozen=True)
class Metrics:
    """Quality and provenance numbers for one pipeline run."""

    total_blocks: int
    row_count: int
    set_count: int
    compression_ratio: float
    t_ord: float | None
    t_comp: float | None
    status_ord: str
    status_comp: str

    def __post_init__(self) -> None:
        if not 0 < self.compression_ratio <= 1:
            raise ValueError("compression_ratio must lie in (0, 1]")
        if self.total_blocks < self.set_count:
            raise ValueError("every set has at least one block")

    def to_dict(self, include_times: bool = False) -> dict[str, Any]:
        return {
            "total_blocks": self.total_blocks,
            "row_count": self.row_count,
            "set_count": self.set_count,
            "compression_ratio": self.compression_ratio,
            "t_ord": self.t_ord if include_times else None,
            "t_comp": self.t_comp if include_times else None,
            "status_ord": self.status_ord,
            "status_comp": self.status_comp,
        }

    def to_json(self, include_times: bool = False) -> str:
        return json.dumps(self.to_dict(include_times), indent=2, sort_keys=True) + "\n"


def run(
    config: PipelineConfig, sys: SetSystem
) -> tuple[DiagramLayout, SvgDocument, Metrics]:
    """Execute stages I–IV for one instance; never fails on timeouts."""
    mat = build_membership_matrix(sys)

    t0 = time.perf_counter()
    tour = order_columns(
        mat,
        mode=config.mode,
        seed=derive_seed(config.seed, "order"),
        timeout=config.timeout,
    )
    t_ord = time.perf_counter() - t0
    order = tour.order

    t0 = time.perf_counter()
    if config.variant is Variant.G0:
        assignment = RowAssignment(
            tuple(range(mat.n_rows)), mat.n_rows, None, SolveStatus.OPTIMAL
        )
    else:
        graph, tsets = build_conflict_graph(mat, config.variant, order)
        assignment = assign_rows(
            graph, config.bound, tsets, mode=config.mode, timeout=config.timeout
        )
    t_comp = time.perf_counter() - t0

    layout = build_layout(
        mat,
        order,
        assignment,
        config.variant,
        seed=derive_seed(config.seed, "rows"),
    )
    doc = render(layout, sys, config.geometry, config.column_labels)

    _, total_blocks = count_blocks(mat, order)
    metrics = Metrics(
        total_blocks=total_blocks,
        row_count=assignment.row_count,
        set_count=mat.n_rows,
        compression_ratio=assignment.row_count / mat.n_rows,
        t_ord=t_ord,
        t_comp=t_comp,
        status_ord=tour.status.value,
        status_comp=assignment.status.value,
    )
    return layout, doc, metrics
