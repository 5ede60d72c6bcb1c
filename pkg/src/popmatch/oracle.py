"""Definition-level ground truth by exhaustive enumeration.

Everything in this module is deliberately naive: matchings are enumerated by
a recursive include/exclude walk over the edge list, popularity and dominance
come straight from their definitions by comparing every pair of matchings
head to head, and satisfiability is decided by trying every assignment.  The
decision procedures in the rest of the package are tested against this
module; it must stay free of any code from ``popularity``.

The stable-matching enumerator is the one non-naive resident: it prunes on
definitely-blocking edges so that it can cope with the large gadget
instances, but it still enumerates exactly the stable set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .election import delta, label_edges
from .model import Instance, Matching

__all__ = [
    "ExhaustiveReport",
    "default_cap",
    "enumerate_matchings",
    "classify_exhaustive",
    "enumerate_stable_matchings",
    "brute_sat",
]

DEFAULT_VERTEX_CAP = 20


def default_cap() -> int:
    """Enumeration vertex cap; the POPMATCH_CAP environment variable overrides."""
    raw = os.environ.get("POPMATCH_CAP")
    if raw is None:
        return DEFAULT_VERTEX_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"POPMATCH_CAP must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise ValueError("POPMATCH_CAP must be positive")
    return cap


@dataclass(frozen=True)
class ExhaustiveReport:
    """Every matching of an instance, classified from the definitions.

    ``blocking`` maps each matching to the tuple of its blocking edges, so
    ``blocking[m] == ()`` exactly for the stable matchings.  ``min_popular_size``
    and ``max_popular_size`` are None when no matching is popular (possible
    for roommates instances).
    """

    matchings: tuple[Matching, ...]
    stable: tuple[Matching, ...]
    popular: tuple[Matching, ...]
    dominant: tuple[Matching, ...]
    min_popular_size: int | None
    max_popular_size: int | None
    blocking: dict[Matching, tuple[tuple[str, str], ...]]


def enumerate_matchings(inst: Instance, cap: int | None = None) -> Iterator[Matching]:
    """Every matching of ``inst`` exactly once, include/exclude over the edge list."""
    cap = default_cap() if cap is None else cap
    if len(inst.vertices) > cap:
        raise ValueError(
            f"instance has {len(inst.vertices)} vertices, enumeration cap is {cap}"
        )
    edges = inst.edges
    used: set[str] = set()
    chosen: list[tuple[str, str]] = []

    def walk(i: int) -> Iterator[Matching]:
        if i == len(edges):
            yield Matching(inst, chosen)
            return
        u, v = edges[i]
        yield from walk(i + 1)
        if u not in used and v not in used:
            used.add(u)
            used.add(v)
            chosen.append((u, v))
            yield from walk(i + 1)
            chosen.pop()
            used.discard(u)
            used.discard(v)

    return walk(0)


def classify_exhaustive(inst: Instance, cap: int | None = None) -> ExhaustiveReport:
    """Stable, popular, and dominant sets straight from the definitions."""
    matchings = tuple(enumerate_matchings(inst, cap))
    blocking = {
        m: tuple(sorted(label_edges(inst, m).blocking, key=lambda e: inst.index[e[0]]))
        for m in matchings
    }
    stable = tuple(m for m in matchings if not blocking[m])

    # larger matchings are the likely beaters, so screening them first lets
    # the all() calls below bail out quickly on the many unpopular matchings
    by_size = sorted(matchings, key=len, reverse=True)

    popular = tuple(
        m for m in matchings if all(delta(inst, m, n) >= 0 for n in by_size)
    )

    dominant = tuple(
        m
        for m in popular
        if all(delta(inst, m, n) > 0 for n in by_size if len(n) > len(m))
    )

    sizes = sorted(len(m) for m in popular)
    return ExhaustiveReport(
        matchings=matchings,
        stable=stable,
        popular=popular,
        dominant=dominant,
        min_popular_size=sizes[0] if sizes else None,
        max_popular_size=sizes[-1] if sizes else None,
        blocking=blocking,
    )


def enumerate_stable_matchings(
    inst: Instance, node_budget: int = 10_000_000
) -> list[Matching]:
    """Exactly the stable matchings, by pruned search.

    Vertices are fixed in id order: the lowest open vertex either pairs with
    an open neighbor or stays unmatched for good.  A branch dies as soon as
    two fixed vertices form a blocking edge, which keeps the search narrow
    even on instances far too large for full enumeration.  ``node_budget``
    bounds the number of search nodes as a safety valve.
    """
    verts = inst.vertices
    n = len(verts)
    idx = inst.index
    ranks = inst.ranks
    # partner: vertex -> partner id, or "" for fixed-unmatched; absent = open
    partner: dict[str, str] = {}
    out: list[Matching] = []
    nodes = 0

    def prefers_over_state(x: str, y: str) -> bool:
        """Would fixed vertex x rather have y than its fixed state?"""
        p = partner.get(x)
        if p == "":
            return True
        if p is None:  # open vertices have no final verdict yet
            return False
        return ranks.prefers(x, y, p)

    def fixed_block(w: str) -> bool:
        """Does w, just fixed, form a blocking edge with another fixed vertex?"""
        for z in inst.prefs[w]:
            if z == partner.get(w):
                continue
            if partner.get(z) is None:
                continue
            if prefers_over_state(w, z) and prefers_over_state(z, w):
                return True
        return False

    def walk(lo: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise ValueError("stable-matching search exceeded its node budget")
        while lo < n and verts[lo] in partner:
            lo += 1
        if lo == n:
            out.append(Matching(inst, [(u, p) for u, p in partner.items() if p and idx[u] < idx[p]]))
            return
        u = verts[lo]
        for v in inst.prefs[u]:
            if v in partner:
                continue
            partner[u] = v
            partner[v] = u
            if not fixed_block(u) and not fixed_block(v):
                walk(lo + 1)
            del partner[u]
            del partner[v]
        partner[u] = ""
        if not fixed_block(u):
            walk(lo + 1)
        del partner[u]

    walk(0)
    return out


def brute_sat(f) -> dict[int, bool] | None:
    """A satisfying assignment of a small formula, or None.

    Accepts either a raw CNF (``num_vars``, ``clauses`` of signed literals)
    or a normalized formula (``num_original``, ``positive_clauses``,
    ``negative_clauses``), in which case only the originals are free and
    variable n+i is forced to the complement of variable i.
    """
    if hasattr(f, "positive_clauses"):
        n = f.num_original
        if n > 24:
            raise ValueError(f"{n} variables exceed the brute-force bound of 24")
        for bits in product((False, True), repeat=n):
            assign = {i + 1: bits[i] for i in range(n)}
            assign.update({n + i + 1: not bits[i] for i in range(n)})
            if all(any(assign[v] for v in cl) for cl in f.positive_clauses):
                return assign
        return None

    n = f.num_vars
    if n > 24:
        raise ValueError(f"{n} variables exceed the brute-force bound of 24")
    for bits in product((False, True), repeat=n):
        assign = {i + 1: bits[i] for i in range(n)}
        ok = True
        for cl in f.clauses:
            if not any(assign[abs(lit)] == (lit > 0) for lit in cl):
                ok = False
                break
        if ok:
            return assign
    return None
