"""Stage IV: SVG rendering of a diagram layout, plus a structural validator.

Each block is a horizontal bar colored by its set's palette color; element
labels sit above the matrix; light vertical guide lines mark every block
boundary so columns can be followed across rows.  Multi-block sets get a
thin *block link* spanning their active range: a single center lane in the
Γ2 style (ranges never overlap within a row there) and top/bottom lanes in
the Γ3 style (at most two ranges overlap anywhere, and the one starting
first takes the top lane).  Γ0 and Γ1 styles draw no links.  Set labels go
inside the set's largest block (leftmost among ties) over a white backing,
truncated with an ellipsis when the block is narrow — the full name stays
available in an SVG ``<title>``; the Γ0 style writes them in a left gutter
instead.

Alongside the SVG text, :func:`render` produces structural metadata (the
same rectangles, links, guides, and labels as plain data).  Tests and the
validator operate on the metadata, never on raw SVG strings.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any
from xml.sax.saxutils import escape, quoteattr

from .common import Variant
from .layout import DiagramLayout
from .setmodel import (
    MembershipMatrix,
    SetSystem,
    active_ranges,
    block_runs,
    build_membership_matrix,
)

_GUIDE_COLOR = "#d0d0d0"
_LABEL_FONT = "sans-serif"
_CHAR_WIDTH_EM = 0.6  # rough average glyph width used for label fitting


@dataclass(frozen=True)
class RenderGeometry:
    """Pixel geometry; ``canvas_width`` (if set) rescales the column width."""

    column_width: float = 18.0
    row_height: float = 28.0
    block_margin: float = 4.0
    row_margin: float = 8.0
    link_thickness: float = 2.0
    label_font_size: float = 12.0
    canvas_width: float | None = None

    def __post_init__(self) -> None:
        values = (
            self.column_width,
            self.row_height,
            self.block_margin,
            self.row_margin,
            self.link_thickness,
            self.label_font_size,
        )
        if any(v <= 0 for v in values):
            raise ValueError("all geometry values must be strictly positive")
        if self.link_thickness >= self.row_height:
            raise ValueError("link_thickness must be smaller than row_height")


@dataclass(frozen=True)
class SvgDocument:
    """SVG text plus the structural metadata it was generated from."""

    svg: str
    metadata: dict[str, Any]

    def metadata_json(self) -> str:
        return json.dumps(self.metadata, indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path, sidecar: bool = True) -> Path:
        """Write the SVG; with ``sidecar``, also ``<path>.meta.json``."""
        path = Path(path)
        path.write_text(self.svg, encoding="utf-8")
        if sidecar:
            Path(str(path) + ".meta.json").write_text(
                self.metadata_json(), encoding="utf-8"
            )
        return path


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _check_layout(sys: SetSystem, mat: MembershipMatrix, layout: DiagramLayout) -> None:
    if len(layout.order) != mat.n_cols:
        raise ValueError("layout order does not match the element count")
    if len(layout.assignment.row_of) != mat.n_rows:
        raise ValueError("layout assignment does not match the set count")
    ranges = active_ranges(mat, layout.order)
    for row in range(layout.row_count):
        members = layout.assignment.sets_in_row(row)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                i, j = members[a], members[b]
                if any(x and y for x, y in zip(mat.rows[i], mat.rows[j])):
                    raise ValueError(
                        f"style mismatch: intersecting sets {sys.set_names[i]!r} "
                        f"and {sys.set_names[j]!r} share a row"
                    )
                if layout.style is Variant.G2 and ranges[i].overlaps(ranges[j]):
                    raise ValueError(
                        f"style mismatch: Γ2 row holds overlapping ranges of "
                        f"{sys.set_names[i]!r} and {sys.set_names[j]!r}"
                    )
        if layout.style is Variant.G3:
            for p in range(1, mat.n_cols + 1):
                covering = [i for i in members if ranges[i].contains(p)]
                if len(covering) > 2:
                    raise ValueError(
                        f"style mismatch: Γ3 row has {len(covering)} ranges at "
                        f"column {p}"
                    )


def _assign_lanes(
    layout: DiagramLayout,
    members: tuple[int, ...],
    runs,
    ranges,
) -> dict[int, str]:
    """Lane per multi-block set in one row: center for Γ2, top/bottom for Γ3."""
    linked = sorted(
        (s for s in members if len(runs[s]) > 1),
        key=lambda s: (ranges[s].start, s),
    )
    if layout.style is Variant.G2:
        return {s: "center" for s in linked}
    lanes: dict[int, str] = {}
    free_after = {"top": 0, "bottom": 0}  # rightmost occupied position per lane
    for s in linked:
        if free_after["top"] < ranges[s].start:
            lane = "top"
        elif free_after["bottom"] < ranges[s].start:
            lane = "bottom"
        else:  # three overlapping ranges would violate Γ3; guarded earlier
            raise ValueError("no free link lane: Γ3 constraint violated")
        lanes[s] = lane
        free_after[lane] = ranges[s].end
    return lanes


def render(
    layout: DiagramLayout,
    sys: SetSystem,
    geometry: RenderGeometry = RenderGeometry(),
    column_labels: str = "elements",
) -> SvgDocument:
    """Produce the SVG document and structural metadata for one layout.

    ``column_labels`` is ``"elements"`` (element names above each column) or
    ``"cardinality"`` (number of sets containing the element).
    """
    if column_labels not in ("elements", "cardinality"):
        raise ValueError(f"unknown column label mode: {column_labels!r}")
    mat = build_membership_matrix(sys)
    _check_layout(sys, mat, layout)
    runs = block_runs(mat, layout.order)
    ranges = active_ranges(mat, layout.order)
    geo = geometry
    n_cols = mat.n_cols

    left_gutter = 10.0
    if layout.style is Variant.G0:
        widest = max(len(name) for name in sys.set_names)
        left_gutter += widest * _CHAR_WIDTH_EM * geo.label_font_size + 8.0
    right_margin = 10.0
    if geo.canvas_width is not None:
        inner = geo.canvas_width - left_gutter - right_margin
        if inner <= 0:
            raise ValueError("canvas_width smaller than the gutters")
        geo = replace(geo, column_width=inner / n_cols, canvas_width=None)
    cw = geo.column_width
    top_band = geo.label_font_size + 10.0
    width = left_gutter + n_cols * cw + right_margin
    height = (
        top_band
        + layout.row_count * (geo.row_height + geo.row_margin)
        - geo.row_margin
        + 10.0
    )

    def col_x(position: int) -> float:
        """Left edge of the column at 1-based display position."""
        return left_gutter + (position - 1) * cw

    def row_y(display_index: int) -> float:
        return top_band + display_index * (geo.row_height + geo.row_margin)

    rects: list[dict[str, Any]] = []
    links: list[dict[str, Any]] = []
    labels: list[dict[str, Any]] = []
    guides: list[dict[str, Any]] = []

    matrix_bottom = row_y(layout.row_count - 1) + geo.row_height
    boundary_positions = sorted(
        {p for set_runs in runs for start, end in set_runs for p in (start - 1, end)}
    )
    for p in boundary_positions:
        guides.append(
            {
                "boundary_position": p,
                "x": round(col_x(p + 1), 2),
                "y1": round(top_band, 2),
                "y2": round(matrix_bottom, 2),
            }
        )

    display = layout.display_rows()
    for display_index, members in enumerate(display):
        y = row_y(display_index)
        lanes = (
            _assign_lanes(layout, members, runs, ranges)
            if layout.style in (Variant.G2, Variant.G3)
            else {}
        )
        for s in members:
            color = layout.color_hex(s)
            for start, end in runs[s]:
                x = col_x(start) + geo.block_margin / 2
                w = (end - start + 1) * cw - geo.block_margin
                rects.append(
                    {
                        "set_index": s,
                        "set": sys.set_names[s],
                        "row": display_index,
                        "block": [start, end],
                        "x": round(x, 2),
                        "y": round(y, 2),
                        "width": round(w, 2),
                        "height": round(geo.row_height, 2),
                        "color": color,
                    }
                )
            if s in lanes:
                lane = lanes[s]
                if lane == "center":
                    ly = y + geo.row_height / 2
                elif lane == "top":
                    ly = y + geo.link_thickness / 2
                else:
                    ly = y + geo.row_height - geo.link_thickness / 2
                links.append(
                    {
                        "set_index": s,
                        "set": sys.set_names[s],
                        "row": display_index,
                        "lane": lane,
                        "x1": round(col_x(ranges[s].start) + geo.block_margin / 2, 2),
                        "x2": round(col_x(ranges[s].end + 1) - geo.block_margin / 2, 2),
                        "y": round(ly, 2),
                        "color": color,
                    }
                )

    # column labels above the matrix
    for position in range(1, n_cols + 1):
        col = layout.order.perm[position - 1]
        if column_labels == "elements":
            text = sys.elements[col]
        else:
            text = str(sum(mat.rows[i][col] for i in range(mat.n_rows)))
        labels.append(
            {
                "kind": "element",
                "text": text,
                "full": text,
                "x": round(col_x(position) + cw / 2, 2),
                "y": round(top_band - 6.0, 2),
                "anchor": "middle",
                "background": False,
            }
        )

    # set labels: inside the largest block (Γ1–Γ3), or in the left gutter (Γ0)
    char_w = _CHAR_WIDTH_EM * geo.label_font_size
    for display_index, members in enumerate(display):
        y_mid = row_y(display_index) + geo.row_height / 2 + geo.label_font_size / 3
        for s in members:
            name = sys.set_names[s]
            if layout.style is Variant.G0:
                labels.append(
                    {
                        "kind": "set",
                        "set_index": s,
                        "text": name,
                        "full": name,
                        "x": round(left_gutter - 8.0, 2),
                        "y": round(y_mid, 2),
                        "anchor": "end",
                        "background": False,
                    }
                )
                continue
            largest = max(runs[s], key=lambda r: (r[1] - r[0], -r[0]))
            start, end = largest
            block_w = (end - start + 1) * cw - geo.block_margin
            fit = int((block_w - 4.0) / char_w)
            shown = name if len(name) <= fit else name[: max(0, fit - 1)] + "…"
            labels.append(
                {
                    "kind": "set",
                    "set_index": s,
                    "text": shown,
                    "full": name,
                    "x": round(col_x(start) + geo.block_margin / 2 + block_w / 2, 2),
                    "y": round(y_mid, 2),
                    "anchor": "middle",
                    "background": True,
                }
            )

    metadata: dict[str, Any] = {
        "style": layout.style.value,
        "canvas": {"width": round(width, 2), "height": round(height, 2)},
        "column_order": [sys.elements[c] for c in layout.order.perm],
        "rows": [
            {"display_index": k, "row_id": layout.row_order[k], "sets": list(display[k])}
            for k in range(layout.row_count)
        ],
        "rects": rects,
        "links": links,
        "guides": guides,
        "labels": labels,
    }
    svg = _emit_svg(metadata, geo)
    return SvgDocument(svg=svg, metadata=metadata)


def _emit_svg(meta: dict[str, Any], geo: RenderGeometry) -> str:
    w, h = meta["canvas"]["width"], meta["canvas"]["height"]
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
        '<g class="guides">',
    ]
    for g in meta["guides"]:
        parts.append(
            f'<line x1="{_fmt(g["x"])}" y1="{_fmt(g["y1"])}" '
            f'x2="{_fmt(g["x"])}" y2="{_fmt(g["y2"])}" '
            f'stroke="{_GUIDE_COLOR}" stroke-width="1"/>'
        )
    parts.append("</g>")
    parts.append('<g class="links">')
    for ln in meta["links"]:
        parts.append(
            f'<line x1="{_fmt(ln["x1"])}" y1="{_fmt(ln["y"])}" '
            f'x2="{_fmt(ln["x2"])}" y2="{_fmt(ln["y"])}" '
            f'stroke="{ln["color"]}" stroke-width="{_fmt(geo.link_thickness)}"/>'
        )
    parts.append("</g>")
    parts.append('<g class="blocks">')
    for r in meta["rects"]:
        parts.append(
            f'<rect x="{_fmt(r["x"])}" y="{_fmt(r["y"])}" '
            f'width="{_fmt(r["width"])}" height="{_fmt(r["height"])}" '
            f'fill="{r["color"]}"/>'
        )
    parts.append("</g>")
    parts.append('<g class="labels">')
    font = f'font-family="{_LABEL_FONT}" font-size="{_fmt(geo.label_font_size)}"'
    for lb in meta["labels"]:
        if lb["background"]:
            bg_w = len(lb["text"]) * _CHAR_WIDTH_EM * geo.label_font_size + 4.0
            bg_h = geo.label_font_size + 2.0
            parts.append(
                f'<rect x="{_fmt(lb["x"] - bg_w / 2)}" '
                f'y="{_fmt(lb["y"] - geo.label_font_size)}" '
                f'width="{_fmt(bg_w)}" height="{_fmt(bg_h)}" fill="white"/>'
            )
        title = (
            f"<title>{escape(lb['full'])}</title>" if lb["full"] != lb["text"] else ""
        )
        parts.append(
            f'<text x="{_fmt(lb["x"])}" y="{_fmt(lb["y"])}" {font} '
            f'text-anchor="{lb["anchor"]}">{title}{escape(lb["text"])}</text>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def validate_document(
    doc: SvgDocument, sys: SetSystem, layout: DiagramLayout
) -> list[str]:
    """Structural checks for a rendered document; returns violations.

    Checks: well-formed XML; per-set rectangle count equals the block count
    under the layout's order; no horizontal overlap between rectangles in
    one row; at most one link per x-span per row for Γ2 and at most two for
    Γ3; every set has at least one rectangle.
    """
    problems: list[str] = []
    try:
        ET.fromstring(doc.svg)
    except ET.ParseError as exc:
        problems.append(f"SVG is not well-formed XML: {exc}")

    mat = build_membership_matrix(sys)
    runs = block_runs(mat, layout.order)
    per_set: dict[int, int] = {}
    for r in doc.metadata["rects"]:
        per_set[r["set_index"]] = per_set.get(r["set_index"], 0) + 1
    for s in range(mat.n_rows):
        expect = len(runs[s])
        got = per_set.get(s, 0)
        if got != expect:
            problems.append(
                f"set {sys.set_names[s]!r}: {got} rectangles, expected {expect}"
            )
        if got == 0:
            problems.append(f"set {sys.set_names[s]!r} has no rectangle")

    by_row: dict[int, list[dict[str, Any]]] = {}
    for r in doc.metadata["rects"]:
        by_row.setdefault(r["row"], []).append(r)
    for row, rects in sorted(by_row.items()):
        ordered = sorted(rects, key=lambda r: r["x"])
        for a, b in zip(ordered, ordered[1:]):
            if a["x"] + a["width"] > b["x"] + 1e-9:
                problems.append(
                    f"row {row}: rectangles of {a['set']!r} and {b['set']!r} overlap"
                )

    links_by_row: dict[int, list[dict[str, Any]]] = {}
    for ln in doc.metadata["links"]:
        links_by_row.setdefault(ln["row"], []).append(ln)
    limit = 1 if layout.style is Variant.G2 else 2
    if layout.style in (Variant.G2, Variant.G3):
        for row, lns in sorted(links_by_row.items()):
            xs = sorted({x for ln in lns for x in (ln["x1"], ln["x2"])})
            for x in xs:
                covering = [ln for ln in lns if ln["x1"] <= x <= ln["x2"]]
                if len(covering) > limit:
                    problems.append(
                        f"row {row}: {len(covering)} links cover x={x} "
                        f"(limit {limit} for {layout.style.value})"
                    )
    elif doc.metadata["links"]:
        problems.append(f"{layout.style.value} must not contain link lines")
    return problems
