"""Prime reduced cycles, their drawn rotations and self-intersections, and the
F2 quadratic forms that tie rotation parities to homology classes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .embedding import DirEdge, EmbeddedGraph
from .geometry import count_polyline_crossings

ROT_RESIDUAL_TOL = 1e-6


def _token(o: DirEdge):
    return (str(o[0]), 0 if o[1] else 1)


@dataclass(frozen=True)
class PrimeReducedCycle:
    """Circular sequence of directed edges, no immediate backtrack, not a power."""

    seq: tuple

    def __len__(self):
        return len(self.seq)

    def edges(self):
        return [o[0] for o in self.seq]

    def is_edge_simple(self) -> bool:
        eids = self.edges()
        return len(set(eids)) == len(eids)

    def inverse(self) -> "PrimeReducedCycle":
        return PrimeReducedCycle(tuple((o[0], not o[1]) for o in reversed(self.seq)))

    def canonical(self) -> "PrimeReducedCycle":
        return PrimeReducedCycle(_canonical_seq(self.seq))

    def dump(self) -> str:
        return " ".join(f"{o[0]}{'+' if o[1] else '-'}" for o in self.seq)


def _rotations(seq):
    n = len(seq)
    for k in range(n):
        yield seq[k:] + seq[:k]


def _canonical_seq(seq):
    inv = tuple((o[0], not o[1]) for o in reversed(seq))
    best = None
    for cand in list(_rotations(tuple(seq))) + list(_rotations(inv)):
        key = tuple(_token(o) for o in cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def _is_proper_power(seq) -> bool:
    n = len(seq)
    for d in range(1, n):
        if n % d == 0 and seq[d:] + seq[:d] == seq:
            return True
    return False


def _validate_cycle(graph: EmbeddedGraph, seq) -> None:
    n = len(seq)
    for i in range(n):
        o, o2 = seq[i], seq[(i + 1) % n]
        if graph.head(o) != graph.tail(o2):
            raise ValueError("directed edges are not consecutive")
        if o2 == graph.reverse(o):
            raise ValueError("cycle backtracks")
    if _is_proper_power(tuple(seq)):
        raise ValueError("cycle is a proper power")


def cycle(graph: EmbeddedGraph, seq) -> PrimeReducedCycle:
    """Checked constructor from a list of (edge id, forward) pairs."""
    seq = tuple((str(e), bool(f)) for e, f in seq)
    _validate_cycle(graph, seq)
    return PrimeReducedCycle(seq).canonical()


def enumerate_prime_reduced_cycles(graph: EmbeddedGraph, max_len: int):
    """All prime reduced cycle classes of length <= max_len, one canonical
    representative per inverse-pair class, sorted deterministically."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    dirs = graph.dirs()
    out_of = {}
    for o in dirs:
        v = graph.head(o)
        out_of.setdefault(v, [])
    for o2 in dirs:
        out_of.setdefault(graph.tail(o2), []).append(o2)

    found = set()

    def extend(walk, start):
        head = graph.head(walk[-1])
        for o2 in out_of.get(head, []):
            if o2 == graph.reverse(walk[-1]):
                continue
            if _token(o2) < _token(start):
                continue  # the minimal directed edge of the class starts the walk
            if graph.head(o2) == graph.tail(start) and start != graph.reverse(o2):
                cand = tuple(walk) + (o2,)
                if not _is_proper_power(cand):
                    found.add(_canonical_seq(cand))
            if len(walk) + 1 < max_len:
                extend(walk + [o2], start)

    for o in dirs:
        # length-1 cycles need a loop; loops are rejected at load time
        extend([o], o)

    cycles = [PrimeReducedCycle(seq) for seq in found]
    cycles.sort(key=lambda p: (len(p), tuple(_token(o) for o in p.seq)))
    return cycles


# -- rotation numbers ----------------------------------------------------------


def _total_turning(graph: EmbeddedGraph, p: PrimeReducedCycle) -> float:
    total = 0.0
    n = len(p.seq)
    for i in range(n):
        o, o2 = p.seq[i], p.seq[(i + 1) % n]
        total += graph.dir_turning(o)
        total += graph.transition_angle(o, o2)
    return total


def rot0(graph: EmbeddedGraph, p: PrimeReducedCycle) -> int:
    """Mod-2 turning number of the drawn cycle (whole-curve tangent winding)."""
    total = _total_turning(graph, p)
    k = total / (2.0 * math.pi)
    if abs(k - round(k)) > ROT_RESIDUAL_TOL:
        raise ValueError(f"turning {total} is not a multiple of 2*pi "
                         f"(residual {abs(k - round(k)):.2e}); drawing inconsistent")
    return int(round(k)) % 2


def cycle_crossing_vector(graph: EmbeddedGraph, p: PrimeReducedCycle) -> np.ndarray:
    r = np.zeros(2 * graph.genus, dtype=int)
    for o in p.seq:
        r += graph.r_vector(o[0])
    return r


def rot_s(graph: EmbeddedGraph, p: PrimeReducedCycle, s) -> int:
    s = np.asarray(s, dtype=int) % 2
    if s.shape != (2 * graph.genus,):
        raise ValueError("spin index has wrong length")
    sr = int(np.dot(s, cycle_crossing_vector(graph, p))) % 2
    return (rot0(graph, p) + sr) % 2


# -- self-intersections --------------------------------------------------------


def _vertex_chords(graph: EmbeddedGraph, p: PrimeReducedCycle):
    """Chords of the track-resolved diagrams, grouped per vertex.

    The k-th traversal of an edge runs on track k, offset to the left of the
    stored polyline direction; at the polyline start the tracks appear in
    ascending anticlockwise order, at the end descending.
    """
    n = len(p.seq)
    mult: dict = {}
    track = []
    for o in p.seq:
        mult[o[0]] = mult.get(o[0], 0) + 1
        track.append(mult[o[0]])

    slot_index = {}
    for v in graph.vertex_order:
        slots = []
        for eid, end in graph.vertex_rotation(v):
            m = mult.get(eid, 0)
            if m == 0:
                continue
            order = range(1, m + 1) if end == 0 else range(m, 0, -1)
            for t in order:
                slot_index[(v, eid, end, t)] = (v, len(slots))
                slots.append(t)

    chords: dict = {}
    for i in range(n):
        o, o2 = p.seq[i], p.seq[(i + 1) % n]
        v = graph.head(o)
        end_in = (o[0], 1 if o[1] else 0)
        end_out = (o2[0], 0 if o2[1] else 1)
        _, a = slot_index[(v, end_in[0], end_in[1], track[i])]
        _, b = slot_index[(v, end_out[0], end_out[1], track[(i + 1) % n])]
        chords.setdefault(v, []).append((a, b))
    return chords, {v: sum(1 for key in slot_index if key[0] == v) for v in chords}, mult


def _interleaved(a, b, c, d, size) -> bool:
    """Whether chords {a,b} and {c,d} interleave in a cyclic order of `size` slots."""
    def between(x, lo, hi):
        return (x - lo) % size < (hi - lo) % size

    inside = sum(1 for x in (c, d) if x != a and x != b and between(x, a, b))
    return inside == 1


def self_intersections(graph: EmbeddedGraph, p: PrimeReducedCycle,
                       include_bridge_squares: bool = True) -> int:
    """Crossing chord pairs at vertices (tracks resolve repeated edges) plus,
    by default, crossings of the drawn strands away from vertices (bridge
    squares).

    With include_bridge_squares=False this is the self-intersection count of
    the cycle on the surface itself, which is what the rotation-vs-form
    identity consumes; the drawn-curve count (default) is the one Whitney's
    parity law sees.
    """
    chords, sizes, mult = _vertex_chords(graph, p)
    total = 0
    for v, cs in chords.items():
        size = sizes[v]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                a, b = cs[i]
                c, d = cs[j]
                if _interleaved(a, b, c, d, size):
                    total += 1
    if include_bridge_squares:
        eids = sorted(mult)
        for i, e1 in enumerate(eids):
            for e2 in eids[i + 1:]:
                geom = count_polyline_crossings(graph.edges[e1].polyline,
                                                graph.edges[e2].polyline)
                if geom:
                    total += mult[e1] * mult[e2] * geom
    return total


# -- even-set decomposition ------------------------------------------------------


def decompose_even_set(graph: EmbeddedGraph, edge_ids):
    """Edge-disjoint prime reduced cycles covering an even set, stitched from
    the nested non-crossing pairing at every vertex; one representative per
    inverse-pair class."""
    edge_ids = [str(e) for e in edge_ids]
    eset = set(edge_ids)
    if len(eset) != len(edge_ids):
        raise ValueError("edge set contains duplicates")
    deg: dict = {}
    for eid in eset:
        e = graph.edges[eid]
        deg[e.u] = deg.get(e.u, 0) + 1
        deg[e.v] = deg.get(e.v, 0) + 1
    if any(d % 2 for d in deg.values()):
        raise ValueError("edge set is not even")

    # rainbow pairing: linearize the cyclic end order at the lowest end,
    # then match first-with-last
    partner: dict = {}
    for v in deg:
        ends = [(eid, end) for eid, end in graph.vertex_rotation(v) if eid in eset]
        if not ends:
            continue
        start = min(range(len(ends)), key=lambda i: (str(ends[i][0]), ends[i][1]))
        lin = ends[start:] + ends[:start]
        k = len(lin)
        for i in range(k // 2):
            a, b = lin[i], lin[k - 1 - i]
            partner[(v, a)] = b
            partner[(v, b)] = a

    unused = set(eset)
    cycles = []
    while unused:
        eid = min(unused)
        o = (eid, True)
        seq = []
        while True:
            seq.append(o)
            unused.discard(o[0])
            v = graph.head(o)
            end_in = (o[0], 1 if o[1] else 0)
            nxt_eid, nxt_end = partner[(v, end_in)]
            o = (nxt_eid, nxt_end == 0)
            if o == seq[0]:
                break
        _validate_cycle(graph, seq)
        cycles.append(PrimeReducedCycle(tuple(seq)).canonical())
    cycles.sort(key=lambda p: tuple(_token(o) for o in p.seq))
    return cycles


def noncrossing_pairing_chords(graph: EmbeddedGraph, cycles) -> bool:
    """True when the chord diagrams of a decomposition have no crossing pair
    at any vertex (chords of different cycles share one diagram per vertex).

    Decompositions traverse each edge at most once, so slots are plain ends
    of the union edge set in rotation order.
    """
    union = set()
    for p in cycles:
        for o in p.seq:
            if o[0] in union:
                raise ValueError("cycles are not edge-disjoint")
            union.add(o[0])
    slot: dict = {}
    sizes: dict = {}
    for v in graph.vertex_order:
        ends = [(eid, end) for eid, end in graph.vertex_rotation(v) if eid in union]
        for i, ee in enumerate(ends):
            slot[(v, ee)] = i
        if ends:
            sizes[v] = len(ends)
    per_vertex: dict = {}
    for p in cycles:
        n = len(p.seq)
        for i in range(n):
            o, o2 = p.seq[i], p.seq[(i + 1) % n]
            v = graph.head(o)
            a = slot[(v, (o[0], 1 if o[1] else 0))]
            b = slot[(v, (o2[0], 0 if o2[1] else 1))]
            per_vertex.setdefault(v, []).append((a, b))
    for v, cs in per_vertex.items():
        size = sizes[v]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                a, b = cs[i]
                c, d = cs[j]
                if _interleaved(a, b, c, d, size):
                    return False
    return True


# -- quadratic forms and the Arf invariant ----------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """q_s(h) = s.h + sum_i h_{2i-1} h_{2i} on F2^{2g}."""

    s: tuple

    @property
    def genus(self) -> int:
        return len(self.s) // 2

    def value(self, h) -> int:
        h = np.asarray(h, dtype=int) % 2
        s = np.asarray(self.s, dtype=int)
        if h.shape != s.shape:
            raise ValueError("argument has wrong length")
        q0 = sum(int(h[2 * i]) * int(h[2 * i + 1]) for i in range(self.genus))
        return (int(np.dot(s, h)) + q0) % 2

    def __call__(self, h) -> int:
        return self.value(h)

    def table(self):
        g2 = len(self.s)
        return {h: self.value(h) for h in product((0, 1), repeat=g2)}


def quadratic_form(s) -> QuadraticForm:
    s = tuple(int(x) % 2 for x in s)
    if len(s) % 2:
        raise ValueError("spin index must have even length 2g")
    return QuadraticForm(s)


def arf(q: QuadraticForm) -> int:
    """Arf invariant via the symplectic basis: sum q(a_i) q(b_i) mod 2."""
    g = q.genus
    total = 0
    for i in range(g):
        a = [0] * (2 * g)
        b = [0] * (2 * g)
        a[2 * i] = 1
        b[2 * i + 1] = 1
        total += q.value(a) * q.value(b)
    return total % 2


def spin_indices(genus: int):
    """All 2^{2g} spin indices in deterministic order."""
    return [tuple(s) for s in product((0, 1), repeat=2 * genus)]


def check_rotation_identity(graph: EmbeddedGraph, p: PrimeReducedCycle, s) -> bool:
    """rot_s(p) == 1 + surface self-intersections(p) + q_s([p])  (mod 2), for
    edge-simple cycles (the surface count excludes bridge-square crossings;
    those are the q_0 part)."""
    if not p.is_edge_simple():
        raise ValueError("cycle traverses an edge twice")
    q = quadratic_form(s)
    h = cycle_crossing_vector(graph, p) % 2
    lhs = rot_s(graph, p, s)
    rhs = (1 + self_intersections(graph, p, include_bridge_squares=False)
           + q.value(h)) % 2
    return lhs == rhs
