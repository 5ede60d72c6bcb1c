"""Constrained proposals, the three-copy expansion, and dominant matchings.

``gale_shapley`` runs the deferred-acceptance loop with side A proposing.
Free proposers are processed lowest id first and each walks down its list,
so runs are fully deterministic.  Without constraints the output is the
proposer-optimal stable matching.  Constraints can forbid proposals, impose
responder cutoffs, and seed a starting matching; a seeded pair dissolves
only when the responder receives an offer it prefers, and the dumped
proposer then starts proposing from the top of its list.  With a seed the
stability guarantee is the seeded protocol itself, not stability in
general; the two seeded runs used by the transformation algorithms are
stable by construction and the tests check exactly those.

``build_gprime`` materializes the bidirected view of a marriage instance as
an ordinary marriage instance on three vertices per original vertex: the
outgoing copy ``u+`` ranks the incoming copies of u's neighbors in u's
order and its own dummy ``d(u)`` last; the incoming copy ``u-`` ranks the
dummy first and then the outgoing copies; the dummy prefers ``u+`` to
``u-``.  Each original edge (a,b) appears as (a+,b-) and (a-,b+).  Stable
matchings of the expansion project to dominant matchings of the original,
and which copy of a vertex is matched encodes its witness value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _gs
from .model import Instance, Matching

__all__ = [
    "ProposalConstraints",
    "GPrime",
    "gale_shapley",
    "build_gprime",
    "solve_dominant",
    "stable_vertex_set",
]


@dataclass(frozen=True)
class ProposalConstraints:
    """Seed matching plus rejection rules for a proposal run.

    Each rule is a triple ``(proposer, responder, min_acceptable_rank)``:

    * ``(p, r, None)``: r rejects p outright.
    * ``(None, r, k)``: r rejects every proposer it ranks worse than k
      (ranks are 1-based, 1 is r's favorite).
    * ``(p, r, k)``: r rejects p if it ranks p worse than k.
    """

    seed: Matching | None = None
    forbidden: frozenset[tuple[str | None, str, int | None]] = field(
        default_factory=frozenset
    )


def _compile_constraints(inst: Instance, view: _gs.BipartiteView, c: ProposalConstraints):
    skip: set[int] = set()
    cutoff: dict[int, int] = {}
    for rule in sorted(c.forbidden, key=repr):
        p, r, k = rule
        if r not in view.resp_index:
            raise ValueError(f"rule responder {r!r} is not a responding vertex")
        ri = view.resp_index[r]
        if p is None:
            if k is None:
                raise ValueError("rule (None, r, None) is meaningless")
            cutoff[ri] = min(cutoff.get(ri, _gs.BIG), max(k, 0))
            continue
        if p not in view.prop_index:
            raise ValueError(f"rule proposer {p!r} is not a proposing vertex")
        if not inst.has_edge(p, r):
            raise ValueError(f"rule pair ({p!r}, {r!r}) is not an edge")
        if k is not None and inst.ranks.rank(r, p) <= k:
            continue
        pi = view.prop_index[p]
        pos = view.off[pi] + inst.prefs[p].index(r)
        skip.add(pos)

    seeds: list[tuple[int, int]] = []
    if c.seed is not None:
        if c.seed.instance is not inst and c.seed.instance != inst:
            raise ValueError("seed matching belongs to a different instance")
        for a, b in c.seed.edges:
            seeds.append((view.prop_index[a], view.resp_index[b]))
    return frozenset(skip), cutoff, seeds


def gale_shapley(inst: Instance, c: ProposalConstraints | None = None) -> Matching:
    """Deferred acceptance with side A proposing, honoring ``c``.

    Unconstrained, the result is the proposer-optimal stable matching.  With
    rejection rules it is stable in the instance with the forbidden
    proposals removed, and proposer-optimal there.
    """
    view = _gs.compile_view(inst)
    if c is None:
        res = _gs.run_proposals(view)
    else:
        skip, cutoff, seeds = _compile_constraints(inst, view, c)
        res = _gs.run_proposals(view, cutoff=cutoff or None, skip_abs=skip or None, seeds=seeds or None)
    pairs = [
        (view.prop_ids[p], view.resp_ids[r])
        for p, r in enumerate(res.prop_partner)
        if r >= 0
    ]
    return Matching(inst, pairs)


@dataclass(frozen=True)
class GPrime:
    """The expansion instance plus maps back to the original.

    ``edge_origin`` sends each expansion edge between copies of two distinct
    original vertices to ``(original_edge, sign)`` where sign "+" means the
    edge uses the first endpoint's outgoing copy.  Dummy edges do not appear
    in the map.
    """

    original: Instance
    instance: Instance
    plus: dict[str, str]
    minus: dict[str, str]
    dummy: dict[str, str]
    edge_origin: dict[tuple[str, str], tuple[tuple[str, str], str]]

    def project(self, m_exp: Matching) -> Matching:
        """The original-graph matching encoded by an expansion matching."""
        pairs = [self.edge_origin[e][0] for e in m_exp.edges if e in self.edge_origin]
        return Matching(self.original, pairs)

    def witness(self, m_exp: Matching) -> dict[str, int]:
        """+1 / -1 / 0 per original vertex by which copy is matched."""
        w: dict[str, int] = {}
        for u in self.original.vertices:
            if self._copy_matched(m_exp, self.plus[u], u):
                w[u] = 1
            elif self._copy_matched(m_exp, self.minus[u], u):
                w[u] = -1
            else:
                w[u] = 0
        return w

    def _copy_matched(self, m_exp: Matching, copy: str, u: str) -> bool:
        p = m_exp.partner(copy)
        return p is not None and p != self.dummy[u]


def build_gprime(inst: Instance) -> GPrime:
    """Three-copy expansion of a marriage instance (cached on the instance)."""
    inst.require_marriage("the expansion")
    cached = getattr(inst, "_gprime", None)
    if cached is not None:
        return cached

    plus = {u: f"{u}+" for u in inst.vertices}
    minus = {u: f"{u}-" for u in inst.vertices}
    dummy = {u: f"d({u})" for u in inst.vertices}

    a_orig = inst.side_a()
    b_orig = inst.side_b()
    vertices: list[str] = []
    side: dict[str, str] = {}
    for a in a_orig:
        vertices += [plus[a], minus[a]]
        side[plus[a]] = side[minus[a]] = "A"
    for b in b_orig:
        vertices.append(dummy[b])
        side[dummy[b]] = "A"
    for b in b_orig:
        vertices += [plus[b], minus[b]]
        side[plus[b]] = side[minus[b]] = "B"
    for a in a_orig:
        vertices.append(dummy[a])
        side[dummy[a]] = "B"

    prefs: dict[str, list[str]] = {}
    for u in inst.vertices:
        nbrs = inst.prefs[u]
        prefs[plus[u]] = [minus[v] for v in nbrs] + [dummy[u]]
        prefs[minus[u]] = [dummy[u]] + [plus[v] for v in nbrs]
        prefs[dummy[u]] = [plus[u], minus[u]]

    gpi = Instance("marriage", vertices, prefs, side)

    edge_origin: dict[tuple[str, str], tuple[tuple[str, str], str]] = {}
    for a, b in inst.edges:
        e_plus = gpi.canonical_edge(plus[a], minus[b])
        e_minus = gpi.canonical_edge(minus[a], plus[b])
        edge_origin[e_plus] = ((a, b), "+")
        edge_origin[e_minus] = ((a, b), "-")

    gp = GPrime(inst, gpi, plus, minus, dummy, edge_origin)
    inst._gprime = gp
    return gp


def solve_dominant(inst: Instance) -> tuple[Matching, dict[str, int]]:
    """A dominant matching and its witness, via the expansion.

    The proposal run on the expansion yields its proposer-optimal stable
    matching; projecting gives a dominant matching of the original
    instance, and the matched copies give the witness values.
    """
    gp = build_gprime(inst)
    m_exp = gale_shapley(gp.instance)
    return gp.project(m_exp), gp.witness(m_exp)


def stable_vertex_set(inst: Instance) -> frozenset[str]:
    """The vertex set covered by every stable matching."""
    return gale_shapley(inst).matched_vertices()
