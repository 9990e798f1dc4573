"""Command-line interface: ``linzip render | bench | gen``."""

from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import fields
from pathlib import Path

from .bench import (
    DEFAULT_GRID,
    bench,
    write_eh_csv,
    write_report_csv,
    write_summary_csv,
)
from .common import Variant, derive_seed
from .figures import save_figures
from .formats import ParseError, parse_instance, write_instance
from .generate import generate_synthetic
from .pipeline import DEFAULT_TIMEOUT, PipelineConfig, run
from .render import RenderGeometry

_GEOMETRY_FLAGS = {
    "column_width": "--column-width",
    "row_height": "--row-height",
    "block_margin": "--block-margin",
    "row_margin": "--row-margin",
    "link_thickness": "--link-thickness",
    "label_font_size": "--font-size",
    "canvas_width": "--canvas-width",
}


def _add_render_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("render", help="render one instance to SVG")
    p.add_argument("--input", required=True, help="instance file (.json or .csv)")
    p.add_argument("--format", choices=("json", "csv"), help="override format detection")
    p.add_argument(
        "--variant",
        default="g2",
        choices=[v.value for v in Variant],
        help="diagram style / compatibility model (default: g2)",
    )
    p.add_argument(
        "--bound",
        type=int,
        default=None,
        help="max sets per row (omit for unbounded)",
    )
    p.add_argument("--mode", default="exact", choices=("exact", "heuristic"))
    p.add_argument(
        "--timeout",
        type=float,
        default=DEFAULT_TIMEOUT,
        help="per-stage exact-solver timeout in seconds (default: 300)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--metrics", help="also write metrics JSON here")
    p.add_argument(
        "--record-times",
        action="store_true",
        help="include wall times in metrics (breaks byte-reproducibility)",
    )
    p.add_argument(
        "--column-labels",
        default="elements",
        choices=("elements", "cardinality"),
        help="label columns with element names or set-membership counts",
    )
    p.add_argument(
        "--no-sidecar",
        action="store_true",
        help="skip the structural metadata sidecar (<out>.meta.json)",
    )
    p.add_argument("--geometry-file", help="JSON file with geometry overrides")
    for field_name, flag in _GEOMETRY_FLAGS.items():
        p.add_argument(flag, dest=field_name, type=float, default=None)


def _add_bench_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("bench", help="exact-vs-heuristic benchmark over a corpus")
    p.add_argument("--corpus", help="directory of instance files (.json/.csv)")
    p.add_argument(
        "--synthetic",
        type=int,
        metavar="N",
        help="generate N synthetic instances instead of reading a corpus",
    )
    p.add_argument("--sets", type=int, default=20, help="synthetic sets per instance")
    p.add_argument(
        "--elements", type=int, default=40, help="synthetic elements per instance"
    )
    p.add_argument("--density", type=float, default=0.3, help="synthetic overlap density")
    p.add_argument("--grid", default="default", choices=("default",))
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--record-times", action="store_true")
    p.add_argument(
        "--no-figures", action="store_true", help="skip the PNG figures"
    )


def _add_gen_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("gen", help="generate one synthetic instance")
    p.add_argument("--sets", type=int, required=True)
    p.add_argument("--elements", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="instance JSON path")


def _geometry_from_args(args: argparse.Namespace) -> RenderGeometry:
    values: dict[str, float] = {}
    if args.geometry_file:
        raw = json.loads(Path(args.geometry_file).read_text(encoding="utf-8"))
        known = {f.name for f in fields(RenderGeometry)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown geometry keys: {sorted(unknown)}")
        values.update(raw)
    for field_name in _GEOMETRY_FLAGS:
        override = getattr(args, field_name)
        if override is not None:
            values[field_name] = override
    return RenderGeometry(**values)


def _cmd_render(args: argparse.Namespace) -> int:
    sys = parse_instance(args.input, args.format)
    config = PipelineConfig(
        variant=Variant.parse(args.variant),
        bound=args.bound,
        mode=args.mode,
        timeout=args.timeout,
        seed=args.seed,
        geometry=_geometry_from_args(args),
        column_labels=args.column_labels,
    )
    _, doc, metrics = run(config, sys)
    doc.save(args.out, sidecar=not args.no_sidecar)
    if args.metrics:
        Path(args.metrics).write_text(
            metrics.to_json(include_times=args.record_times), encoding="utf-8"
        )
    print(
        f"{args.out}: {metrics.total_blocks} blocks, {metrics.row_count} rows "
        f"for {metrics.set_count} sets "
        f"(ratio {metrics.compression_ratio:.3f}; "
        f"order {metrics.status_ord}, rows {metrics.status_comp})"
    )
    return 0


def _load_corpus(args: argparse.Namespace) -> list[tuple[str, object]]:
    if (args.corpus is None) == (args.synthetic is None):
        raise ValueError("provide exactly one of --corpus or --synthetic")
    if args.corpus is not None:
        root = Path(args.corpus)
        paths = sorted(
            [*root.glob("*.json"), *root.glob("*.csv")], key=lambda p: p.name
        )
        if not paths:
            raise ValueError(f"no .json/.csv instances under {root}")
        return [(p.stem, parse_instance(p)) for p in paths]
    if args.synthetic < 1:
        raise ValueError("--synthetic needs N ≥ 1")
    return [
        (
            f"inst{i:03d}",
            generate_synthetic(
                args.sets,
                args.elements,
                args.density,
                derive_seed(args.seed, f"instance:{i}"),
            ),
        )
        for i in range(args.synthetic)
    ]


def _cmd_bench(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args)
    report = bench(
        corpus,
        grid=DEFAULT_GRID,
        timeout=args.timeout,
        seed=args.seed,
        jobs=args.jobs,
    )
    out = Path(args.out)
    write_report_csv(report, out, include_times=args.record_times)
    eh_path = out.with_name(out.stem + "_eh.csv")
    summary_path = out.with_name(out.stem + "_summary.csv")
    write_eh_csv(report, eh_path)
    write_summary_csv(report, summary_path)
    written = [out, eh_path, summary_path]
    if not args.no_figures:
        written.extend(save_figures(report, out))
    failures = [c for c in report.cells if c.error]
    print(f"{len(report.cells)} cells over {len(corpus)} instances")
    for row in report.summary():
        if row["metric"] == "eh_blocks":
            print(
                f"  {row['variant']} B={row['bound']}: "
                f"median blocks EH-ratio {row['median']:.4f} "
                f"(n={row['count']})"
            )
    if failures:
        print(f"  {len(failures)} cell(s) failed; see the error column")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    sys = generate_synthetic(args.sets, args.elements, args.density, args.seed)
    write_instance(sys, args.out)
    print(f"wrote {args.out}: {sys.n_sets} sets over {sys.n_elements} elements")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="linzip",
        description="Compressed linear set diagrams: order, pack, color, render.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_render_parser(sub)
    _add_bench_parser(sub)
    _add_gen_parser(sub)
    args = parser.parse_args(argv)
    handlers = {"render": _cmd_render, "bench": _cmd_bench, "gen": _cmd_gen}
    try:
        return handlers[args.command](args)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
