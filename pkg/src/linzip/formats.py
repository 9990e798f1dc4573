"""Instance ingestion and serialization.

Two interchangeable on-disk formats:

* JSON (canonical): ``{"elements": ["a", "b"], "sets": {"S1": ["a"], ...}}``
* CSV: header row = element names (first cell ignored), one row per set
  with the set name in the first column and 0/1 membership cells.

Both validate into a :class:`~linzip.setmodel.SetSystem`; memberless
elements are dropped with a warning and structural problems raise
:class:`ParseError` carrying file and line/field context.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .setmodel import SetSystem


class ParseError(ValueError):
    """An instance file that cannot be turned into a valid set system."""


def _fail(path: Path, where: str, problem: str) -> ParseError:
    return ParseError(f"{path}: {where}: {problem}")


def _reject_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _parse_json(path: Path) -> SetSystem:
    try:
        data = json.loads(
            path.read_text(encoding="utf-8"), object_pairs_hook=_reject_duplicate_keys
        )
    except json.JSONDecodeError as exc:
        raise _fail(path, f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    except ValueError as exc:
        raise _fail(path, "object keys", str(exc)) from exc
    if not isinstance(data, dict):
        raise _fail(path, "top level", "expected a JSON object")
    for key in ("elements", "sets"):
        if key not in data:
            raise _fail(path, "top level", f"missing {key!r}")
    elements = data["elements"]
    sets = data["sets"]
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise _fail(path, "field 'elements'", "expected a list of strings")
    if not isinstance(sets, dict):
        raise _fail(path, "field 'sets'", "expected an object of name → members")
    for name, members in sets.items():
        if not isinstance(members, list) or not all(
            isinstance(m, str) for m in members
        ):
            raise _fail(path, f"set {name!r}", "members must be a list of strings")
        if not members:
            raise _fail(path, f"set {name!r}", "set is empty")
        unknown = sorted(set(members) - set(elements))
        if unknown:
            raise _fail(path, f"set {name!r}", f"unknown members: {unknown}")
    if len(set(elements)) != len(elements):
        raise _fail(path, "field 'elements'", "duplicate element identifiers")
    try:
        return SetSystem.from_sets(elements, sets)
    except ValueError as exc:
        raise _fail(path, "validation", str(exc)) from exc


def _parse_csv(path: Path) -> SetSystem:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise _fail(path, "line 1", "empty file") from None
        if len(header) < 2:
            raise _fail(path, "line 1", "header must list at least one element")
        elements = [h.strip() for h in header[1:]]
        if len(set(elements)) != len(elements):
            raise _fail(path, "line 1", "duplicate element identifiers")
        pairs: list[tuple[str, list[str]]] = []
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            name = row[0].strip()
            if not name:
                raise _fail(path, f"line {lineno}", "missing set name")
            if name in seen:
                raise _fail(path, f"line {lineno}", f"duplicate set name {name!r}")
            seen.add(name)
            if len(row) != len(elements) + 1:
                raise _fail(
                    path,
                    f"line {lineno}",
                    f"expected {len(elements) + 1} cells, found {len(row)}",
                )
            members = []
            for element, cell in zip(elements, row[1:]):
                value = cell.strip()
                if value not in ("0", "1"):
                    raise _fail(
                        path,
                        f"line {lineno}, field {element!r}",
                        f"cells must be 0 or 1, found {cell!r}",
                    )
                if value == "1":
                    members.append(element)
            if not members:
                raise _fail(path, f"line {lineno}", f"set {name!r} is empty")
            pairs.append((name, members))
        if not pairs:
            raise _fail(path, "content", "no sets found")
    try:
        return SetSystem.from_sets(elements, pairs)
    except ValueError as exc:
        raise _fail(path, "validation", str(exc)) from exc


def parse_instance(path: str | Path, format: str | None = None) -> SetSystem:
    """Load a set system from JSON or CSV; the suffix picks the format."""
    path = Path(path)
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format == "json":
        return _parse_json(path)
    if format == "csv":
        return _parse_csv(path)
    raise ParseError(f"{path}: unsupported format {format!r} (use json or csv)")


def write_instance(sys: SetSystem, path: str | Path) -> Path:
    """Write the canonical JSON representation."""
    path = Path(path)
    payload = {
        "elements": list(sys.elements),
        "sets": {
            name: sorted(members)
            for name, members in zip(sys.set_names, sys.set_members)
        },
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path
