"""Shared enums and the seed-derivation helper used across pipeline stages."""

from __future__ import annotations

import enum
import hashlib


class Variant(enum.Enum):
    """Diagram style / row-compatibility model.

    G0 is the plain one-set-per-row diagram.  G1 packs disjoint sets into a
    row, G2 additionally forbids overlapping spans within a row, and G3
    allows at most two spans of a row to overlap at any column.
    """

    G0 = "g0"
    G1 = "g1"
    G2 = "g2"
    G3 = "g3"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown variant {text!r}; expected one of g0, g1, g2, g3") from None


class SolveStatus(enum.Enum):
    """Outcome of a solver stage.

    OPTIMAL means a proof of minimality was obtained.  HEURISTIC_ONLY marks a
    result produced without any optimality claim.  TIMEOUT_FALLBACK marks an
    exact attempt that ran out of time and returned the heuristic result.
    """

    OPTIMAL = "optimal"
    HEURISTIC_ONLY = "heuristic_only"
    TIMEOUT_FALLBACK = "timeout_fallback"


def derive_seed(seed: int, tag: str) -> int:
    """Derive a per-stage RNG seed from the master seed and a stage tag.

    Uses SHA-256 so the derivation is stable across processes and Python
    hash randomization.  Every randomized stage draws its stream from
    ``derive_seed(config.seed, stage_tag)``.
    """
    digest = hashlib.sha256(f"{seed}:{tag}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
