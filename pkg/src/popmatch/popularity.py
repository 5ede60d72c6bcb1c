"""Popularity and dominance tests plus witness utilities.

Two independent popularity tests are provided.  The weight test (marriage
instances only) maximizes the head-to-head weight of a rival matching via
successive best-gain augmentations and compares the optimum against zero.
The structure test searches the restricted graph for one of the three
forbidden patterns: an alternating cycle through a blocking edge, an
alternating path through two blocking edges, and an alternating path from
an unmatched vertex through a blocking edge.  A fast walk-level screen
rules out all three for most popular inputs; when the screen fires, an
exhaustive simple-path search settles the answer and produces the
certificate.  The screen is complete (every forbidden pattern trips it),
so a clean screen already proves popularity, for roommates instances too.
"""

from __future__ import annotations

from typing import NamedTuple

from .election import label_edges, vote, weighting
from .model import Instance, Matching

__all__ = [
    "ForbiddenStructure",
    "is_stable",
    "is_popular_weight",
    "is_popular_structure",
    "is_dominant",
    "verify_witness",
    "find_witness_small",
    "check_structure",
]

Witness = dict[str, int]


class ForbiddenStructure(NamedTuple):
    """A popularity-refuting pattern: kind is "cycle" or "path".

    ``vertices`` lists the pattern in order; a cycle closes back to its
    first vertex with a matching edge.
    """

    kind: str
    vertices: tuple[str, ...]


def is_stable(inst: Instance, m: Matching) -> tuple[bool, tuple[str, str] | None]:
    """Whether m has no blocking edge; returns the first one otherwise."""
    for u, v in inst.edges:
        if (u, v) in m:
            continue
        if vote(inst, u, v, m) > 0 and vote(inst, v, u, m) > 0:
            return False, (u, v)
    return True, None


# ---------------------------------------------------------------------------
# weight test


def is_popular_weight(inst: Instance, m: Matching) -> bool:
    """Marriage-only popularity test by maximizing a rival's weight."""
    inst.require_marriage("the weight test")
    wt = weighting(inst, m)
    base = sum(wt.loop.values())
    profit = {
        (a, b): wt.edge[(a, b)] - wt.loop[a] - wt.loop[b] for a, b in inst.edges
    }

    partner: dict[str, str] = {}
    total = base
    n = len(inst.vertices)
    while True:
        gain, path = _best_augmentation(inst, profit, partner, n)
        if path is None or gain <= 0:
            break
        for a, b in path[::2]:
            partner[a] = b
            partner[b] = a
        total += gain
    if total < 0:
        raise AssertionError("rival weight optimum below zero")
    return total == 0


def _best_augmentation(inst, profit, partner, n):
    """Best-gain augmenting path for the current rival matching.

    Longest-path relaxation over the residual orientation: unused edges go
    A to B at their profit, used edges go back at minus theirs.  Free A
    vertices are sources, free B vertices are sinks.  Relative to a
    maximum-weight matching of its size there is no positive alternating
    cycle, so n rounds suffice.
    """
    dist = {u: 0 if u not in partner else None for u in inst.side_a()}
    dist.update({v: None for v in inst.side_b()})
    via: dict[str, tuple[str, str, str]] = {}

    for rounds in range(n + 1):
        changed = False
        for a, b in inst.edges:
            if partner.get(a) == b:
                if dist[b] is not None and (
                    dist[a] is None or dist[b] - profit[(a, b)] > dist[a]
                ):
                    dist[a] = dist[b] - profit[(a, b)]
                    via[a] = (b, a, b)
                    changed = True
            else:
                if dist[a] is not None and (
                    dist[b] is None or dist[a] + profit[(a, b)] > dist[b]
                ):
                    dist[b] = dist[a] + profit[(a, b)]
                    via[b] = (a, a, b)
                    changed = True
        if not changed:
            break
    else:
        raise AssertionError("positive alternating cycle in rival search")

    best = None
    for v in inst.side_b():
        if v in partner or dist[v] is None:
            continue
        if best is None or dist[v] > dist[best]:
            best = v
    if best is None:
        return None, None

    path = []
    cur = best
    for _ in range(2 * n):
        if cur not in via:
            break
        prev, a, b = via[cur]
        path.append((a, b))
        cur = prev
    else:
        raise AssertionError("augmenting path reconstruction looped")
    path.reverse()
    return dist[best], path


# ---------------------------------------------------------------------------
# structure test


class _RestrictedGraph:
    """Non-matching restricted-graph adjacency with blocking flags."""

    def __init__(self, inst: Instance, m: Matching):
        self.inst = inst
        self.m = m
        lab = label_edges(inst, m)
        self.blocking = lab.blocking
        self.partner = {u: m.partner(u) for u in inst.vertices}
        self.adj: dict[str, list[tuple[str, bool]]] = {u: [] for u in inst.vertices}
        for u in inst.vertices:
            for v in inst.prefs[u]:
                e = inst.canonical_edge(u, v)
                if e in m:
                    continue
                if lab.labels[e] == (-1, -1):
                    continue
                self.adj[u].append((v, e in lab.blocking))
        self.pp_edges = [e for e in inst.edges if e in lab.blocking]

    def has_fresh_blocking(self, u, path):
        for v, pp in self.adj[u]:
            if pp and v not in path:
                return v
        return None


def is_popular_structure(
    inst: Instance, m: Matching
) -> tuple[bool, ForbiddenStructure | None]:
    """Popularity by absence of forbidden alternating structures.

    Returns the first structure found in search order (unmatched-endpoint
    paths, then two-blocking paths by blocking edge, then cycles) when the
    matching is unpopular.
    """
    rg = _RestrictedGraph(inst, m)
    if not rg.pp_edges:
        return True, None
    if not _screen_fires(rg):
        return True, None
    found = _find_free_path(rg) or _find_two_blocking_path(rg) or _find_cycle(rg)
    if found is None:
        return True, None
    return False, found


def _screen_fires(rg: _RestrictedGraph) -> bool:
    """Walk-level screen; tripped by every forbidden structure."""
    incident_pp = {u: any(pp for _, pp in rg.adj[u]) for u in rg.inst.vertices}

    def reach(starts):
        seen = set(starts)
        stack = list(starts)
        while stack:
            u = stack.pop()
            for v, _ in rg.adj[u]:
                w = rg.partner[v]
                if w is not None and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    free = [u for u in rg.inst.vertices if rg.partner[u] is None]
    if any(incident_pp[u] for u in reach(free)):
        return True

    for x, y in rg.pp_edges:
        starts = [rg.partner[z] for z in (x, y) if rg.partner[z] is not None]
        for u in reach(starts):
            for v, pp in rg.adj[u]:
                if pp and rg.inst.canonical_edge(u, v) != (x, y):
                    return True

    # strongly connected components of the anchor digraph
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    comp: dict[str, int] = {}
    counter = [0, 0]
    for root in rg.inst.vertices:
        if rg.partner[root] is None or root in index:
            continue
        work = [(root, iter(rg.adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        trail = [root]
        on_trail = {root}
        while work:
            u, it = work[-1]
            advanced = False
            for v, _ in it:
                w = rg.partner[v]
                if w is None:
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    trail.append(w)
                    on_trail.add(w)
                    work.append((w, iter(rg.adj[w])))
                    advanced = True
                    break
                if w in on_trail:
                    low[u] = min(low[u], index[w])
            if advanced:
                continue
            work.pop()
            if low[u] == index[u]:
                while True:
                    w = trail.pop()
                    on_trail.discard(w)
                    comp[w] = counter[1]
                    if w == u:
                        break
                counter[1] += 1
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[u])
    for x, y in rg.pp_edges:
        for u, v in ((x, y), (y, x)):
            w = rg.partner[v]
            if w is None or rg.partner[u] is None:
                continue
            if comp.get(u) is not None and comp.get(u) == comp.get(w):
                return True
    return False


def _extend(rg, path, in_path, want_pp, closing=None):
    """Depth-first extension over non-blocking steps from the last anchor.

    Fires on the first blocking edge to a fresh vertex when ``want_pp``,
    or on an edge back to ``closing`` when given.  Returns the completed
    vertex tuple or None.
    """
    u = path[-1]
    if closing is not None:
        for v, _ in rg.adj[u]:
            if v == closing:
                return tuple(path) + (v,)
    if want_pp:
        v = rg.has_fresh_blocking(u, in_path)
        if v is not None:
            return tuple(path) + (v,)
    for v, pp in rg.adj[u]:
        if closing is None and pp:
            continue
        if v in in_path:
            continue
        w = rg.partner[v]
        if w is None or w in in_path:
            continue
        path += [v, w]
        in_path.update((v, w))
        hit = _extend(rg, path, in_path, want_pp, closing)
        if hit is not None:
            return hit
        del path[-2:]
        in_path.difference_update((v, w))
    return None


def _find_free_path(rg):
    for f in rg.inst.vertices:
        if rg.partner[f] is not None:
            continue
        hit = _extend(rg, [f], {f}, want_pp=True)
        if hit is not None:
            return ForbiddenStructure("path", hit)
    return None


def _find_two_blocking_path(rg):
    for x, y in rg.pp_edges:
        for a, b in ((x, y), (y, x)):
            w = rg.partner[b]
            if w is None:
                continue
            hit = _extend(rg, [a, b, w], {a, b, w}, want_pp=True)
            if hit is not None:
                return ForbiddenStructure("path", hit)
    return None


def _find_cycle(rg):
    for x, y in rg.pp_edges:
        mx, my = rg.partner[x], rg.partner[y]
        if mx is None or my is None:
            continue
        hit = _extend(rg, [x, y, my], {x, y, my}, want_pp=False, closing=mx)
        if hit is not None:
            return ForbiddenStructure("cycle", hit)
    return None


def check_structure(inst: Instance, m: Matching, s: ForbiddenStructure) -> bool:
    """Validate a claimed forbidden structure against the definitions."""
    verts = s.vertices
    if len(set(verts)) != len(verts) or len(verts) < 2:
        return False
    lab = label_edges(inst, m)
    pairs = list(zip(verts, verts[1:]))
    if s.kind == "cycle":
        if len(verts) % 2 != 0 or len(verts) < 4:
            return False
        pairs.append((verts[-1], verts[0]))
    elif s.kind != "path":
        return False
    statuses = []
    blocked = 0
    for u, v in pairs:
        if not inst.has_edge(u, v):
            return False
        e = inst.canonical_edge(u, v)
        if e in m:
            statuses.append(True)
        elif lab.labels[e] != (-1, -1):
            statuses.append(False)
            blocked += e in lab.blocking
        else:
            return False
    if any(a == b for a, b in zip(statuses, statuses[1:])):
        return False
    if s.kind == "cycle":
        if statuses[0] == statuses[-1]:
            return False
        return blocked >= 1
    free_end = m.partner(verts[0]) is None or m.partner(verts[-1]) is None
    return blocked >= 2 or (blocked >= 1 and free_end)


# ---------------------------------------------------------------------------
# dominance


def is_dominant(inst: Instance, m: Matching) -> bool:
    """Popular and not extendable by an augmenting path in G_M."""
    popular, _ = is_popular_structure(inst, m)
    if not popular:
        return False
    rg = _RestrictedGraph(inst, m)
    if inst.kind == "marriage":
        return not _augmenting_bfs(rg)
    return _max_matching_size(rg) <= len(m)


def _augmenting_bfs(rg):
    free = [u for u in rg.inst.vertices if rg.partner[u] is None]
    for f in free:
        seen = {f}
        stack = [f]
        while stack:
            u = stack.pop()
            for v, _ in rg.adj[u]:
                w = rg.partner[v]
                if w is None:
                    if v != f:
                        return True
                    continue
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return False


def _max_matching_size(rg):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(rg.inst.vertices)
    for u, nbrs in rg.adj.items():
        for v, _ in nbrs:
            g.add_edge(u, v)
    for u, v in rg.m.edges:
        g.add_edge(u, v)
    return len(nx.max_weight_matching(g, maxcardinality=True, weight=None))


# ---------------------------------------------------------------------------
# witnesses


def verify_witness(
    inst: Instance, m: Matching, w: Witness
) -> tuple[bool, list[tuple]]:
    """Check a claimed witness; returns the violated constraints."""
    inst.require_marriage("witness verification")
    missing = [u for u in inst.vertices if u not in w]
    if missing:
        raise ValueError(f"witness is missing vertices: {missing}")
    wt = weighting(inst, m)
    bad: list[tuple] = []
    for u in inst.vertices:
        if w[u] not in (-1, 0, 1):
            bad.append(("value", u))
    total = sum(w[u] for u in inst.vertices)
    if total != 0:
        bad.append(("sum", total))
    for u in inst.vertices:
        if w[u] < wt.loop[u]:
            bad.append(("vertex", u))
    for u, v in inst.edges:
        if w[u] + w[v] < wt.edge[(u, v)]:
            bad.append(("edge", u, v))
    return not bad, bad


def find_witness_small(inst: Instance, m: Matching, bound: int = 24) -> Witness | None:
    """Backtracking witness search for instances of at most ``bound`` vertices.

    Unmatched vertices are pinned to zero and each matching edge carries
    opposite values, so the search space is one trit per matching edge.
    Matching edges are tried in descending order of endpoint degree.
    """
    inst.require_marriage("the witness search")
    if len(inst.vertices) > bound:
        raise ValueError(f"instance exceeds the {bound} vertex witness bound")
    wt = weighting(inst, m)

    edges = sorted(
        m.edges,
        key=lambda e: (-max(inst.degree(e[0]), inst.degree(e[1])), e),
    )
    var_of = {}
    for i, (a, b) in enumerate(edges):
        var_of[a] = (i, 1)
        var_of[b] = (i, -1)

    checks_at: list[list[tuple]] = [[] for _ in edges]
    for e in inst.edges:
        if e in m or wt.edge[e] == -2:
            continue
        u, v = e
        need = wt.edge[e]
        vu = var_of.get(u)
        vv = var_of.get(v)
        if vu is None and vv is None:
            if 0 < need:
                return None
            continue
        if vu is None or vv is None:
            i, sign = vv if vu is None else vu
            checks_at[i].append((i, sign, None, 0, need))
        else:
            i, si = vu
            j, sj = vv
            if i == j:
                if si + sj != 0:
                    raise AssertionError("endpoints share a matching edge")
                continue
            hi = max(i, j)
            checks_at[hi].append((i, si, j, sj, need))

    vals = [0] * len(edges)

    def ok(i: int) -> bool:
        for vi, si, vj, sj, need in checks_at[i]:
            s = vals[vi] * si + (0 if vj is None else vals[vj] * sj)
            if s < need:
                return False
        return True

    def go(i: int) -> bool:
        if i == len(edges):
            return True
        for t in (0, 1, -1):
            vals[i] = t
            if ok(i) and go(i + 1):
                return True
        vals[i] = 0
        return False

    if not go(0):
        return None
    w: Witness = {u: 0 for u in inst.vertices}
    for i, (a, b) in enumerate(edges):
        w[a] = vals[i]
        w[b] = -vals[i]
    return w
