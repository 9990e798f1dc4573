"""Exact-vs-heuristic benchmark harness.

For every instance and every compression variant in the grid (default:
Γ1/Γ2/Γ3 × {unbounded, B=3}), both pipeline modes run on identical seeds.
Each (instance, variant, bound, mode) cell yields one metrics row; each
(instance, variant, bound) pair additionally yields EH-ratios — the exact
pipeline's metric divided by the heuristic pipeline's metric.  When no
exact stage timed out, the blocks and row EH-ratios are ≤ 1 by optimality;
rows where exact fell back are flagged instead of trusted.

Cells are independent, so the harness can fan out over processes.  Failures
in one cell are recorded and do not stop the run.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .common import Variant
from .pipeline import DEFAULT_TIMEOUT, Metrics, PipelineConfig, run
from .setmodel import SetSystem

DEFAULT_GRID: tuple[tuple[Variant, int | None], ...] = (
    (Variant.G1, None),
    (Variant.G1, 3),
    (Variant.G2, None),
    (Variant.G2, 3),
    (Variant.G3, None),
    (Variant.G3, 3),
)
_EH_METRICS = ("total_blocks", "row_count", "compression_ratio")


@dataclass(frozen=True)
class BenchCell:
    """One (instance, variant, bound, mode) pipeline execution."""

    instance: str
    variant: Variant
    bound: int | None
    mode: str
    element_count: int
    metrics: Metrics | None
    error: str | None = None

    def sort_key(self) -> tuple:
        return (self.instance, self.variant.value, -1 if self.bound is None else self.bound, self.mode)


@dataclass(frozen=True)
class EhRow:
    """EH-ratios (exact / heuristic) for one instance and variant cell."""

    instance: str
    variant: Variant
    bound: int | None
    set_count: int
    eh_blocks: float
    eh_rows: float
    eh_compression: float
    exact_timed_out: bool


@dataclass(frozen=True)
class EhReport:
    cells: tuple[BenchCell, ...]
    eh_rows: tuple[EhRow, ...]

    def summary(self) -> list[dict[str, object]]:
        """Min/quartiles/max of each EH metric per (variant, bound)."""
        rows: list[dict[str, object]] = []
        for variant, bound in sorted(
            {(r.variant, r.bound) for r in self.eh_rows},
            key=lambda vb: (vb[0].value, -1 if vb[1] is None else vb[1]),
        ):
            members = [r for r in self.eh_rows if (r.variant, r.bound) == (variant, bound)]
            for metric in ("eh_blocks", "eh_rows", "eh_compression"):
                data = sorted(getattr(r, metric) for r in members)
                if len(data) >= 2:
                    q1, q2, q3 = statistics.quantiles(data, n=4, method="inclusive")
                else:
                    q1 = q2 = q3 = data[0]
                rows.append(
                    {
                        "variant": variant.value,
                        "bound": "inf" if bound is None else bound,
                        "metric": metric,
                        "count": len(data),
                        "min": min(data),
                        "p25": q1,
                        "median": q2,
                        "p75": q3,
                        "max": max(data),
                    }
                )
        return rows


def _run_cell(
    args: tuple[str, SetSystem, Variant, int | None, str, float, int]
) -> BenchCell:
    name, sys, variant, bound, mode, timeout, seed = args
    try:
        config = PipelineConfig(
            variant=variant, bound=bound, mode=mode, timeout=timeout, seed=seed
        )
        _, _, metrics = run(config, sys)
        return BenchCell(name, variant, bound, mode, sys.n_elements, metrics)
    except Exception as exc:  # per-instance failures are recorded, not fatal
        return BenchCell(name, variant, bound, mode, sys.n_elements, None, str(exc))


def bench(
    corpus: Sequence[tuple[str, SetSystem]],
    grid: Iterable[tuple[Variant, int | None]] = DEFAULT_GRID,
    timeout: float = DEFAULT_TIMEOUT,
    seed: int = 0,
    jobs: int = 1,
) -> EhReport:
    """Run the full grid over the corpus and assemble the report."""
    work = [
        (name, sys, variant, bound, mode, timeout, seed)
        for name, sys in corpus
        for variant, bound in grid
        for mode in ("exact", "heuristic")
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_cell, work))
    else:
        cells = [_run_cell(item) for item in work]
    cells.sort(key=BenchCell.sort_key)

    by_key: dict[tuple[str, Variant, int | None], dict[str, BenchCell]] = {}
    for cell in cells:
        by_key.setdefault((cell.instance, cell.variant, cell.bound), {})[cell.mode] = cell
    eh_rows = []
    for (name, variant, bound), pair in sorted(
        by_key.items(),
        key=lambda kv: (kv[0][0], kv[0][1].value, -1 if kv[0][2] is None else kv[0][2]),
    ):
        exact = pair.get("exact")
        heur = pair.get("heuristic")
        if not exact or not heur or exact.metrics is None or heur.metrics is None:
            continue
        em, hm = exact.metrics, heur.metrics
        eh_rows.append(
            EhRow(
                instance=name,
                variant=variant,
                bound=bound,
                set_count=em.set_count,
                eh_blocks=em.total_blocks / hm.total_blocks,
                eh_rows=em.row_count / hm.row_count,
                eh_compression=em.compression_ratio / hm.compression_ratio,
                exact_timed_out="timeout_fallback" in (em.status_ord, em.status_comp),
            )
        )
    return EhReport(cells=tuple(cells), eh_rows=tuple(eh_rows))


def _bound_str(bound: int | None) -> str:
    return "inf" if bound is None else str(bound)


def write_report_csv(
    report: EhReport, path: str | Path, include_times: bool = False
) -> Path:
    """One row per (instance, variant, bound, mode)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "instance",
                "variant",
                "bound",
                "mode",
                "set_count",
                "element_count",
                "total_blocks",
                "row_count",
                "compression_ratio",
                "status_ord",
                "status_comp",
                "t_ord",
                "t_comp",
                "error",
            ]
        )
        for cell in report.cells:
            m = cell.metrics
            writer.writerow(
                [
                    cell.instance,
                    cell.variant.value,
                    _bound_str(cell.bound),
                    cell.mode,
                    m.set_count if m else "",
                    cell.element_count,
                    m.total_blocks if m else "",
                    m.row_count if m else "",
                    f"{m.compression_ratio:.6f}" if m else "",
                    m.status_ord if m else "",
                    m.status_comp if m else "",
                    f"{m.t_ord:.6f}" if m and include_times else "",
                    f"{m.t_comp:.6f}" if m and include_times else "",
                    cell.error or "",
                ]
            )
    return path


def write_eh_csv(report: EhReport, path: str | Path) -> Path:
    """One row of EH-ratios per (instance, variant, bound)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "instance",
                "variant",
                "bound",
                "set_count",
                "eh_blocks",
                "eh_rows",
                "eh_compression",
                "exact_timed_out",
            ]
        )
        for row in report.eh_rows:
            writer.writerow(
                [
                    row.instance,
                    row.variant.value,
                    _bound_str(row.bound),
                    row.set_count,
                    f"{row.eh_blocks:.6f}",
                    f"{row.eh_rows:.6f}",
                    f"{row.eh_compression:.6f}",
                    str(row.exact_timed_out).lower(),
                ]
            )
    return path


def write_summary_csv(report: EhReport, path: str | Path) -> Path:
    """Aggregate quantiles of the EH metrics per (variant, bound)."""
    path = Path(path)
    rows = report.summary()
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["variant", "bound", "metric", "count", "min", "p25", "median", "p75", "max"]
        )
        for row in rows:
            writer.writerow(
                [
                    row["variant"],
                    row["bound"],
                    row["metric"],
                    row["count"],
                    *(f"{row[k]:.6f}" for k in ("min", "p25", "median", "p75", "max")),
                ]
            )
    return path
