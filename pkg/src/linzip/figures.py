"""Benchmark figures rendered next to the delimited report.

Two plots per report: a boxplot of the exact pipeline's compression ratios
per (variant, bound) cell, and a scatter of the blocks EH-ratio against the
instance size.  PNG output is byte-deterministic (fixed dpi, no embedded
software metadata).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import EhReport, _bound_str

_VARIANT_COLORS = {"g1": "#4e79a7", "g2": "#e15759", "g3": "#59a14f"}


def save_figures(report: EhReport, report_path: str | Path) -> list[Path]:
    """Write the figures alongside ``report_path``; returns their paths."""
    report_path = Path(report_path)
    stem = report_path.with_suffix("")
    out: list[Path] = []

    groups: dict[str, list[float]] = {}
    for cell in report.cells:
        if cell.mode != "exact" or cell.metrics is None:
            continue
        label = f"{cell.variant.value}\nB={_bound_str(cell.bound)}"
        groups.setdefault(label, []).append(cell.metrics.compression_ratio)
    if groups:
        fig, ax = plt.subplots(figsize=(7, 4))
        labels = sorted(groups)
        ax.boxplot([groups[label] for label in labels], tick_labels=labels)
        ax.set_ylabel("compression ratio (rows / sets)")
        ax.set_title("Exact-mode compression per variant")
        ax.set_ylim(0, 1.05)
        fig.tight_layout()
        path = Path(f"{stem}_compression.png")
        fig.savefig(path, dpi=100, metadata={"Software": None})
        plt.close(fig)
        out.append(path)

    if report.eh_rows:
        fig, ax = plt.subplots(figsize=(7, 4))
        for variant_value, color in _VARIANT_COLORS.items():
            xs = [r.set_count for r in report.eh_rows if r.variant.value == variant_value]
            ys = [r.eh_blocks for r in report.eh_rows if r.variant.value == variant_value]
            if xs:
                ax.scatter(xs, ys, s=14, color=color, label=variant_value, alpha=0.7)
        ax.axhline(1.0, color="#888888", linewidth=1, linestyle="--")
        ax.set_xlabel("number of sets")
        ax.set_ylabel("blocks EH-ratio (exact / heuristic)")
        ax.set_title("Ordering quality: exact vs heuristic")
        ax.legend()
        fig.tight_layout()
        path = Path(f"{stem}_eh_blocks.png")
        fig.savefig(path, dpi=100, metadata={"Software": None})
        plt.close(fig)
        out.append(path)
    return out
