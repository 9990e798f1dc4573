"""Synthetic co-authorship-style instances.

Each set stands for a paper, each element for an author.  Sets have 1–6
members.  ``density`` steers overlap: each member slot after the very first
set reuses an already-used element with probability ``density`` and draws a
fresh one otherwise.  Fresh elements are reserved so that every set can
always start with one — density 0 therefore yields pairwise-disjoint sets,
while density 1 makes every later set reuse earlier authors only, which
connects the conflict graph.  Deterministic for a fixed seed.
"""

from __future__ import annotations

import random

from .setmodel import SetSystem

MAX_SET_SIZE = 6


def generate_synthetic(
    n_sets: int, n_elements: int, density: float, seed: int
) -> SetSystem:
    """Random set system with controlled pairwise overlap.

    Requires ``n_elements ≥ n_sets`` so each set can own a fresh element.
    Elements that end up in no set are omitted from the result.
    """
    if n_sets < 1 or n_elements < 1:
        raise ValueError("n_sets and n_elements must be positive")
    if n_elements < n_sets:
        raise ValueError("need at least one element per set (n_elements ≥ n_sets)")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(seed)
    pool = [f"e{j}" for j in range(n_elements)]
    next_fresh = 0
    used: list[str] = []
    sets: list[tuple[str, list[str]]] = []
    for i in range(n_sets):
        reserved_for_others = n_sets - i - 1
        target = rng.randint(1, MAX_SET_SIZE)
        members: list[str] = []
        while len(members) < target:
            fresh_spare = (n_elements - next_fresh) - reserved_for_others
            reuse_candidates = [e for e in used if e not in members]
            want_reuse = (
                i > 0 and reuse_candidates and rng.random() < density
            )
            if want_reuse:
                members.append(rng.choice(reuse_candidates))
            elif fresh_spare > 0:
                members.append(pool[next_fresh])
                next_fresh += 1
            elif reuse_candidates and density > 0:
                members.append(rng.choice(reuse_candidates))
            else:
                break  # no fresh spare and reuse disallowed: close the set early
        # the reservation guarantees the first slot always succeeds,
        # so members is never empty here
        for m in members:
            if m not in used:
                used.append(m)
        sets.append((f"P{i}", members))
    kept = tuple(e for e in pool if e in set(used))
    return SetSystem(
        elements=kept,
        set_names=tuple(name for name, _ in sets),
        set_members=tuple(frozenset(m) for _, m in sets),
    )
