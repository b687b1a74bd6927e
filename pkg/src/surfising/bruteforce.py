"""Brute-force oracles: even-set enumeration, perfect matchings, direct spin
sums.  Slow and obviously correct; everything else is validated against these."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .embedding import EmbeddedGraph
from .polyring import MultiPoly

MAX_EDGES = 24
MAX_SPIN_VERTICES = 20


def _edge_vertex_masks(graph: EmbeddedGraph):
    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    masks = []
    for eid in graph.edge_order:
        e = graph.edges[eid]
        masks.append((1 << vindex[e.u]) | (1 << vindex[e.v]))
    return masks


def even_subsets(graph: EmbeddedGraph):
    """Bitmasks (over edge_order) of all even edge subsets."""
    m = len(graph.edge_order)
    if m > MAX_EDGES:
        raise ValueError(f"too many edges for brute force ({m} > {MAX_EDGES})")
    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    # incremental vertex-degree parities via a gray-code walk
    out = [0]
    parity = 0  # bitset of odd-degree vertices
    edge_bits = []
    for eid in graph.edge_order:
        e = graph.edges[eid]
        edge_bits.append((1 << vindex[e.u]) | (1 << vindex[e.v]))
    gray_prev = 0
    for k in range(1, 1 << m):
        gray = k ^ (k >> 1)
        changed = (gray ^ gray_prev).bit_length() - 1
        gray_prev = gray
        parity ^= edge_bits[changed]
        if parity == 0:
            out.append(gray)
    return out


def brute_even_sets(graph: EmbeddedGraph) -> MultiPoly:
    """Exact even-set generating function over all 2^|E| subsets."""
    eids = list(graph.edge_order)
    terms = {}
    for mask in even_subsets(graph):
        key = tuple(sorted((eids[i], 1) for i in range(len(eids)) if mask >> i & 1))
        terms[key] = terms.get(key, 0.0) + 1.0
    return MultiPoly(terms, None)


def brute_even_set_counts(graph: EmbeddedGraph):
    """Number of even sets of each size (univariate specialization oracle)."""
    m = len(graph.edge_order)
    counts = np.zeros(m + 1, dtype=np.int64)
    for mask in even_subsets(graph):
        counts[bin(mask).count("1")] += 1
    return counts


def brute_perfect_matchings(graph: EmbeddedGraph) -> MultiPoly:
    """Exact perfect-matching generating function."""
    if len(graph.vertex_order) % 2:
        return MultiPoly.zero(None)
    if len(graph.edge_order) > MAX_EDGES:
        raise ValueError("too many edges for brute force")
    incident: dict = {v: [] for v in graph.vertex_order}
    for eid in graph.edge_order:
        e = graph.edges[eid]
        incident[e.u].append(eid)
        incident[e.v].append(eid)
    order = list(graph.vertex_order)
    terms: dict = {}

    def rec(covered: frozenset, chosen: tuple):
        free = [v for v in order if v not in covered]
        if not free:
            key = tuple(sorted((eid, 1) for eid in chosen))
            terms[key] = terms.get(key, 0.0) + 1.0
            return
        v = free[0]
        for eid in incident[v]:
            e = graph.edges[eid]
            w = e.v if e.u == v else e.u
            if w in covered or w == v:
                continue
            rec(covered | {v, w}, chosen + (eid,))

    rec(frozenset(), ())
    return MultiPoly(terms, None)


def brute_ising(graph: EmbeddedGraph, couplings, beta: float) -> float:
    """Exact spin-configuration sum of the Ising partition function."""
    nv = len(graph.vertex_order)
    if nv > MAX_SPIN_VERTICES:
        raise ValueError(f"too many vertices for brute force ({nv})")
    if isinstance(couplings, (int, float)):
        couplings = {eid: float(couplings) for eid in graph.edge_order}
    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    pairs = [(vindex[graph.edges[eid].u], vindex[graph.edges[eid].v],
              beta * couplings[eid]) for eid in graph.edge_order]
    total = 0.0
    for config in range(1 << nv):
        energy = 0.0
        for iu, iv, bj in pairs:
            su = 1 if config >> iu & 1 else -1
            sv = 1 if config >> iv & 1 else -1
            energy += bj * su * sv
        total += math.exp(energy)
    return total
