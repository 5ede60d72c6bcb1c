"""Int-array proposal kernel shared by the solvers.

A marriage instance is compiled once into CSR-style arrays: proposers are the
A-side vertices, responders the B-side.  ``adj`` holds each proposer's
choices in preference order and ``crossrank`` the proposer's 0-based rank in
the responder's own list, so acceptance is a single integer comparison.

Free proposers are processed lowest id first (a priority queue), each walking
down its list until accepted or exhausted.  Constrained runs support

  * per-slot skips (a responder refuses one proposer outright),
  * responder cutoffs (only proposers ranked strictly better than the cutoff
    are acceptable),
  * start offsets (a proposer begins partway down its list), and
  * a seed matching (seeded pairs start matched; a dumped seeded proposer
    restarts from the top of its list).

The pure-Python functions are the reference semantics.  ``probe_edges``
additionally has a numba twin (one batched sweep, state reset in-kernel)
that the classifier uses on large inputs; the two are differentially tested.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass

from .model import Instance

BIG = 1 << 30

_NO_NUMBA = bool(os.environ.get("POPMATCH_NO_NUMBA"))


@dataclass
class BipartiteView:
    """Compiled CSR form of a marriage instance (proposers = side A)."""

    prop_ids: list[str]
    resp_ids: list[str]
    prop_index: dict[str, int]
    resp_index: dict[str, int]
    off: list[int]          # len P+1, slice bounds into adj
    adj: list[int]          # responder ids, preference order per proposer
    crossrank: list[int]    # proposer's 0-based rank in the responder's list
    resp_deg: list[int]


def compile_view(inst: Instance) -> BipartiteView:
    inst.require_marriage("the proposal engine")
    cached = getattr(inst, "_prop_view", None)
    if cached is not None:
        return cached
    prop_ids = list(inst.side_a())
    resp_ids = list(inst.side_b())
    prop_index = {v: i for i, v in enumerate(prop_ids)}
    resp_index = {v: i for i, v in enumerate(resp_ids)}
    rank_in_resp: dict[tuple[str, str], int] = {}
    for r in resp_ids:
        for k, p in enumerate(inst.prefs[r]):
            rank_in_resp[(r, p)] = k
    off = [0]
    adj: list[int] = []
    crossrank: list[int] = []
    for p in prop_ids:
        for r in inst.prefs[p]:
            adj.append(resp_index[r])
            crossrank.append(rank_in_resp[(r, p)])
        off.append(len(adj))
    view = BipartiteView(
        prop_ids=prop_ids,
        resp_ids=resp_ids,
        prop_index=prop_index,
        resp_index=resp_index,
        off=off,
        adj=adj,
        crossrank=crossrank,
        resp_deg=[inst.degree(r) for r in resp_ids],
    )
    inst._prop_view = view  # instances are immutable, so the view is too
    return view


@dataclass
class ProposalResult:
    prop_partner: list[int]   # responder id or -1
    resp_partner: list[int]   # proposer id or -1
    cur_rank: list[int]       # crossrank of the held proposer, BIG if free
    accept_pos: list[int]     # absolute accepted slot, or end of list
    proposals: int


def run_proposals(
    view: BipartiteView,
    start_rel: dict[int, int] | None = None,
    cutoff: dict[int, int] | None = None,
    skip_abs: frozenset[int] | None = None,
    seeds: list[tuple[int, int]] | None = None,
) -> ProposalResult:
    """Reference implementation of the constrained proposal loop."""
    off, adj, crossrank = view.off, view.adj, view.crossrank
    P = len(view.prop_ids)
    R = len(view.resp_ids)
    prop_partner = [-1] * P
    resp_partner = [-1] * R
    cur_rank = [BIG] * R
    cut = [BIG] * R
    if cutoff:
        for r, k in cutoff.items():
            cut[r] = k
    nxt = [off[p] + (start_rel.get(p, 0) if start_rel else 0) for p in range(P)]
    accept_pos = [off[p + 1] for p in range(P)]
    seeded: set[int] = set()
    if seeds:
        for p, r in seeds:
            k = None
            for pos in range(off[p], off[p + 1]):
                if adj[pos] == r:
                    k = pos
                    break
            if k is None:
                raise ValueError("seed pair is not an adjacency")
            prop_partner[p] = r
            resp_partner[r] = p
            cur_rank[r] = crossrank[k]
            accept_pos[p] = k
            seeded.add(p)

    heap = [p for p in range(P) if p not in seeded]
    heapq.heapify(heap)
    proposals = 0
    skip = skip_abs or frozenset()

    while heap:
        p = heapq.heappop(heap)
        pos = nxt[p]
        end = off[p + 1]
        while pos < end:
            proposals += 1
            if pos in skip:
                pos += 1
                continue
            r = adj[pos]
            cr = crossrank[pos]
            if cr >= cut[r] or cr >= cur_rank[r]:
                pos += 1
                continue
            old = resp_partner[r]
            if old >= 0:
                prop_partner[old] = -1
                accept_pos[old] = off[old + 1]
                heapq.heappush(heap, old)
            resp_partner[r] = p
            cur_rank[r] = cr
            prop_partner[p] = r
            accept_pos[p] = pos
            break
        nxt[p] = pos
        if pos == end:
            prop_partner[p] = -1
            accept_pos[p] = end

    return ProposalResult(prop_partner, resp_partner, cur_rank, accept_pos, proposals)


def output_is_stable(view: BipartiteView, res: ProposalResult) -> bool:
    """Stability of a run's output against the FULL lists (constraints ignored).

    A blocking pair must have the proposer preferring the responder to its
    assignment, so scanning each proposer's prefix up to its accepted slot
    covers all candidates.
    """
    off, adj, crossrank = view.off, view.adj, view.crossrank
    for p in range(len(view.prop_ids)):
        for pos in range(off[p], res.accept_pos[p]):
            if crossrank[pos] < res.cur_rank[adj[pos]]:
                return False
    return True


# -- batched per-edge probe ------------------------------------------------
#
# Input arrays, one entry per probed edge (a, b) of the ORIGINAL graph, all
# referring to the compiled expansion view:
#   e_aplus, e_aminus, e_dbresp : proposer id of a+, proposer id of a-,
#                                 responder id of d(a)
#   e_bplus, e_bminus           : responder ids of b+ and b-
#   e_start                     : relative start slot for a+  (skip b and all
#                                 better choices)
#   e_posb                      : slot of a- in b+'s list = b's original rank
#                                 of a (0-based)
#   e_degb                      : original degree of b
#
# A probe accepts when the run's output is stable against the full expansion,
# a- is matched to d(a) or unmatched, b+ holds a strictly worse neighbor than
# a (and not d(b)), and a+ sits strictly below b.  Returns the first
# accepting edge index, or -1.


def probe_edges_python(
    view: BipartiteView,
    e_aplus,
    e_aminus,
    e_dbresp,
    e_bplus,
    e_bminus,
    e_start,
    e_posb,
    e_degb,
    counter: list[int] | None = None,
) -> int:
    off = view.off
    for i in range(len(e_aplus)):
        res = run_proposals(
            view,
            start_rel={e_aplus[i]: e_start[i]},
            cutoff={e_bminus[i]: 1},
        )
        if counter is not None:
            counter[0] += 1
        if not output_is_stable(view, res):
            continue
        am = e_aminus[i]
        am_match = res.prop_partner[am]
        if am_match >= 0 and am_match != e_dbresp[i]:
            continue
        brank = res.cur_rank[e_bplus[i]]
        if not (e_posb[i] < brank < e_degb[i]):
            continue
        ap = e_aplus[i]
        if res.prop_partner[ap] >= 0 and res.accept_pos[ap] - off[ap] <= e_start[i] - 1:
            continue
        return i
    return -1


_nb_probe = None


def get_numba_probe():
    """The compiled batch probe, or None when numba is unavailable/disabled."""
    global _nb_probe
    if _NO_NUMBA:
        return None
    if _nb_probe is not None:
        return _nb_probe
    try:
        import numba
        import numpy as np  # noqa: F401  (needed by callers building arrays)
    except ImportError:
        return None

    @numba.njit(cache=True)
    def kernel(
        off,
        adj,
        crossrank,
        R,
        e_aplus,
        e_aminus,
        e_dbresp,
        e_bplus,
        e_bminus,
        e_start,
        e_posb,
        e_degb,
    ):  # pragma: no cover - exercised via differential tests
        P = off.shape[0] - 1
        prop_partner = -np.ones(P, dtype=np.int64)
        resp_partner = -np.ones(R, dtype=np.int64)
        cur_rank = np.full(R, BIG, dtype=np.int64)
        nxt = np.zeros(P, dtype=np.int64)
        accept_pos = np.zeros(P, dtype=np.int64)
        heap = np.zeros(P + 1, dtype=np.int64)

        for i in range(e_aplus.shape[0]):
            # reset state
            for p in range(P):
                prop_partner[p] = -1
                nxt[p] = off[p]
                accept_pos[p] = off[p + 1]
            for r in range(R):
                resp_partner[r] = -1
                cur_rank[r] = BIG
            ap = e_aplus[i]
            bm = e_bminus[i]
            nxt[ap] = off[ap] + e_start[i]

            # ascending fill is already a valid min-heap
            hs = P
            for p in range(P):
                heap[p] = p

            while hs > 0:
                p = heap[0]
                hs -= 1
                heap[0] = heap[hs]
                j = 0
                while True:
                    l = 2 * j + 1
                    if l >= hs:
                        break
                    if l + 1 < hs and heap[l + 1] < heap[l]:
                        l += 1
                    if heap[l] < heap[j]:
                        tmp = heap[j]
                        heap[j] = heap[l]
                        heap[l] = tmp
                        j = l
                    else:
                        break

                pos = nxt[p]
                end = off[p + 1]
                while pos < end:
                    r = adj[pos]
                    cr = crossrank[pos]
                    if r == bm and cr >= 1:
                        pos += 1
                        continue
                    if cr >= cur_rank[r]:
                        pos += 1
                        continue
                    old = resp_partner[r]
                    if old >= 0:
                        prop_partner[old] = -1
                        accept_pos[old] = off[old + 1]
                        heap[hs] = old
                        j = hs
                        hs += 1
                        while j > 0:
                            par = (j - 1) // 2
                            if heap[j] < heap[par]:
                                tmp = heap[j]
                                heap[j] = heap[par]
                                heap[par] = tmp
                                j = par
                            else:
                                break
                    resp_partner[r] = p
                    cur_rank[r] = cr
                    prop_partner[p] = r
                    accept_pos[p] = pos
                    break
                nxt[p] = pos
                if pos == end:
                    prop_partner[p] = -1
                    accept_pos[p] = end

            # acceptance checks
            stable = True
            for p in range(P):
                for pos in range(off[p], accept_pos[p]):
                    if crossrank[pos] < cur_rank[adj[pos]]:
                        stable = False
                        break
                if not stable:
                    break
            if not stable:
                continue
            am = e_aminus[i]
            amm = prop_partner[am]
            if amm >= 0 and amm != e_dbresp[i]:
                continue
            brank = cur_rank[e_bplus[i]]
            if brank <= e_posb[i] or brank >= e_degb[i]:
                continue
            if prop_partner[ap] >= 0 and accept_pos[ap] - off[ap] <= e_start[i] - 1:
                continue
            return i
        return -1

    _nb_probe = kernel
    return _nb_probe
