"""Seeded random instance and matching generators for tests and the CLI."""

from __future__ import annotations

import random

from .model import Instance, Matching

__all__ = [
    "random_marriage",
    "random_roommates",
    "random_maximal_matching",
    "chain_instance",
]


def random_marriage(
    rng: random.Random, na: int, nb: int, density: float = 1.0
) -> Instance:
    """Random marriage instance; each potential edge kept with ``density``."""
    aa = [f"a{i}" for i in range(1, na + 1)]
    bb = [f"b{j}" for j in range(1, nb + 1)]
    nbrs: dict[str, list[str]] = {v: [] for v in aa + bb}
    for a in aa:
        for b in bb:
            if rng.random() < density:
                nbrs[a].append(b)
                nbrs[b].append(a)
    prefs = {}
    for v, lst in nbrs.items():
        lst = lst[:]
        rng.shuffle(lst)
        prefs[v] = lst
    side = {v: "A" for v in aa}
    side.update({v: "B" for v in bb})
    return Instance("marriage", aa + bb, prefs, side)


def random_roommates(rng: random.Random, n: int, density: float = 1.0) -> Instance:
    """Random roommates instance on n vertices."""
    vv = [f"v{i}" for i in range(1, n + 1)]
    nbrs: dict[str, list[str]] = {v: [] for v in vv}
    for i, u in enumerate(vv):
        for w in vv[i + 1 :]:
            if rng.random() < density:
                nbrs[u].append(w)
                nbrs[w].append(u)
    prefs = {}
    for v, lst in nbrs.items():
        lst = lst[:]
        rng.shuffle(lst)
        prefs[v] = lst
    return Instance("roommates", vv, prefs)


def chain_instance(m: int) -> Instance:
    """Path with m edges where every vertex prefers its lower neighbor.

    The unique stable matching pairs the path greedily from the left; the
    instance admits no unstable popular matching, so the quadratic decision
    probes every edge.  Used by the scaling benchmarks.
    """
    if m < 1:
        raise ValueError("chain needs at least one edge")
    vv = [f"x{i}" for i in range(m + 1)]
    prefs: dict[str, list[str]] = {}
    for i, v in enumerate(vv):
        nbrs = []
        if i > 0:
            nbrs.append(vv[i - 1])
        if i < m:
            nbrs.append(vv[i + 1])
        prefs[v] = nbrs
    side = {v: ("A" if i % 2 == 0 else "B") for i, v in enumerate(vv)}
    return Instance("marriage", vv, prefs, side)


def random_maximal_matching(rng: random.Random, inst: Instance) -> Matching:
    """Greedy maximal matching over a shuffled edge order."""
    edges = list(inst.edges)
    rng.shuffle(edges)
    used: set[str] = set()
    picked = []
    for u, v in edges:
        if u in used or v in used:
            continue
        used.update((u, v))
        picked.append((u, v))
    return Matching(inst, picked)
