"""Kasteleyn-Pfaffian dimer machinery: Pfaffians of skew adjacency matrices,
planar Kasteleyn orientations, the 4^g signed combination on surfaces, and
Kasteleyn curvature / flatness / weight normalization for bipartite graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .bruteforce import brute_perfect_matchings
from .cycles import arf, quadratic_form
from .embedding import EmbeddedGraph
from .polyring import MultiPoly, max_coeff_diff, poly_mul


# -- Pfaffian --------------------------------------------------------------------


def _is_zero(x) -> bool:
    if isinstance(x, MultiPoly):
        return x.is_zero()
    return abs(x) < 1e-14


def pfaffian(matrix):
    """Pfaffian by expansion along the first remaining row, memoized over
    index subsets; entries may be numbers or MultiPoly."""
    a = [list(row) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n % 2:
        raise ValueError("Pfaffian needs even dimension")
    for i in range(n):
        for j in range(i, n):
            lhs, rhs = a[i][j], a[j][i]
            if isinstance(lhs, MultiPoly) or isinstance(rhs, MultiPoly):
                if not _is_zero(lhs + rhs):
                    raise ValueError("matrix is not skew-symmetric")
            elif abs(lhs + rhs) > 1e-9 * max(1.0, abs(lhs)):
                raise ValueError("matrix is not skew-symmetric")
    if n == 0:
        return 1.0

    cache = {}

    def rec(indices):
        if not indices:
            return 1.0
        if indices in cache:
            return cache[indices]
        i = indices[0]
        rest = indices[1:]
        total = None
        for pos, j in enumerate(rest):
            entry = a[i][j]
            if _is_zero(entry):
                continue
            sub = rec(tuple(x for x in rest if x != j))
            term = entry * sub if not isinstance(sub, float) or sub != 1.0 else entry
            if pos % 2 == 1:
                term = -term
            total = term if total is None else total + term
        if total is None:
            total = MultiPoly.zero() if isinstance(a[i][i], MultiPoly) else 0.0
        cache[indices] = total
        return total

    return rec(tuple(range(n)))


# -- orientations -----------------------------------------------------------------


@dataclass(frozen=True)
class Orientation:
    """Per-edge direction: True keeps the stored (u -> v) direction."""

    forward: dict

    def arrow(self, graph: EmbeddedGraph, eid):
        e = graph.edges[eid]
        return (e.u, e.v) if self.forward[eid] else (e.v, e.u)

    def reversed_on(self, edge_ids) -> "Orientation":
        flipped = dict(self.forward)
        for eid in edge_ids:
            flipped[eid] = not flipped[eid]
        return Orientation(flipped)


def skew_adjacency(graph: EmbeddedGraph, orientation: Orientation):
    """|V| x |V| skew matrix of MultiPoly: entry (i,j) sums +-x_e over edges."""
    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    n = len(vindex)
    a = [[MultiPoly.zero() for _ in range(n)] for _ in range(n)]
    for eid in graph.edge_order:
        t, h = orientation.arrow(graph, eid)
        i, j = vindex[t], vindex[h]
        x = MultiPoly.variable(eid)
        a[i][j] = a[i][j] + x
        a[j][i] = a[j][i] - x
    return a


def _matchings(graph: EmbeddedGraph):
    poly = brute_perfect_matchings(graph)
    return [tuple(v for v, _ in key) for key in sorted(poly.terms)]


def _matching_sign(graph: EmbeddedGraph, orientation: Orientation, matching) -> int:
    """Sign of the matching's term in Pf A(G, D)."""
    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    pairs = []
    for eid in matching:
        t, h = orientation.arrow(graph, eid)
        i, j = vindex[t], vindex[h]
        sign_e = 1 if i < j else -1
        pairs.append((min(i, j), max(i, j), sign_e))
    pairs.sort()
    seq = []
    for i, j, _ in pairs:
        seq.extend((i, j))
    parity = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                parity ^= 1
    sign = -1 if parity else 1
    for _, _, se in pairs:
        sign *= se
    return sign


def faces_of(graph: EmbeddedGraph):
    return graph.bounded_faces()


def face_odd_clockwise(graph: EmbeddedGraph, orientation: Orientation, face) -> bool:
    """Whether the (anticlockwise-traced) face has an odd number of edges
    oriented with its clockwise traversal."""
    clockwise = 0
    for eid, fwd in face:
        t, _h = orientation.arrow(graph, eid)
        anticlock_tail = graph.tail((eid, fwd))
        if t != anticlock_tail:  # oriented against the anticlockwise trace
            clockwise += 1
    return clockwise % 2 == 1


def find_kasteleyn_orientation(graph: EmbeddedGraph) -> Orientation:
    """Planar Kasteleyn orientation: spanning tree oriented arbitrarily, then
    non-tree edges fixed face by face along the dual tree."""
    if graph.genus != 0:
        raise ValueError("planar construction needs genus 0")
    tree: set = set()
    seen = {graph.vertex_order[0]}
    changed = True
    while changed:
        changed = False
        for eid in graph.edge_order:
            e = graph.edges[eid]
            if eid in tree:
                continue
            if (e.u in seen) != (e.v in seen):
                tree.add(eid)
                seen |= {e.u, e.v}
                changed = True
    if seen != set(graph.vertex_order):
        raise ValueError("graph is not connected")

    forward = {eid: True for eid in graph.edge_order}
    faces = faces_of(graph)
    face_of_edge: dict = {}
    for fi, face in enumerate(faces):
        for eid, _ in face:
            face_of_edge.setdefault(eid, []).append(fi)
    # dual graph on bounded faces; the outer face is the implicit root
    remaining = {eid for eid in graph.edge_order if eid not in tree}
    fixed: set = set()
    done_faces: set = set()
    while len(done_faces) < len(faces):
        progressed = False
        for fi, face in enumerate(faces):
            if fi in done_faces:
                continue
            open_edges = [eid for eid, _ in face if eid in remaining and eid not in fixed]
            if len(open_edges) > 1:
                continue
            orientation = Orientation(dict(forward))
            if open_edges:
                eid = open_edges[0]
                if not face_odd_clockwise(graph, orientation, face):
                    forward[eid] = not forward[eid]
                fixed.add(eid)
            elif not face_odd_clockwise(graph, orientation, face):
                raise AssertionError("face parity unfixable; dual order broken")
            done_faces.add(fi)
            progressed = True
        if not progressed:
            raise AssertionError("dual-tree elimination stalled")
    return Orientation(forward)


# -- the 4^g combination -----------------------------------------------------------


@dataclass
class CombinationReport:
    base: Orientation
    coefficients: dict          # bridge subset (tuple of 0/1) -> signed rational
    polynomial: MultiPoly
    residual: float
    used_default_signs: bool


def _crossing_class(graph: EmbeddedGraph, matching) -> tuple:
    r = np.zeros(2 * graph.genus, dtype=int)
    for eid in matching:
        r += graph.r_vector(eid)
    return tuple(int(x) % 2 for x in r)


def _find_base_orientation(graph: EmbeddedGraph, matchings) -> Orientation:
    """Smallest orientation whose matching sign on crossing class h equals
    (-1)^{q_0(h)}; the default Arf coefficients then reproduce P exactly.
    Falls back to any class-constant orientation (the +- coefficient search
    copes with those)."""
    eids = list(graph.edge_order)
    classes = [_crossing_class(graph, m) for m in matchings]
    q0 = quadratic_form((0,) * 2 * graph.genus)
    fallback = None
    for mask in range(1 << len(eids)):
        forward = {eid: not (mask >> i & 1) for i, eid in enumerate(eids)}
        orientation = Orientation(forward)
        per_class: dict = {}
        ok = True
        for m, cls in zip(matchings, classes):
            sgn = _matching_sign(graph, orientation, m)
            if per_class.setdefault(cls, sgn) != sgn:
                ok = False
                break
        if not ok:
            continue
        if fallback is None:
            fallback = orientation
        if all(sgn == (-1 if q0.value(cls) else 1) for cls, sgn in per_class.items()):
            return orientation
    if fallback is not None:
        return fallback
    raise ValueError("no class-coherent base orientation exists")


def dimer_pfaffian_combination(graph: EmbeddedGraph,
                               orientations=None, coefficients=None,
                               tol: float = 1e-9) -> CombinationReport:
    """P(G, x) as a signed combination of 4^g Pfaffians.

    Orientations default to a searched base twisted by reversing all edges
    that cross each subset of the 2g bridges; coefficients default to
    2^{-g} (-1)^{Arf(q_s)} and fall back to a sign search, which is reported.
    """
    g = graph.genus
    matchings = _matchings(graph)
    target = brute_perfect_matchings(graph)
    subsets = list(product((0, 1), repeat=2 * g))
    if len(graph.vertex_order) % 2 or not matchings:
        # odd vertex count or no matchings: the combination is identically 0
        zero = MultiPoly.zero()
        residual = max_coeff_diff(zero, target)
        coeffs = coefficients or {sub: 2.0 ** (-g) for sub in subsets}
        return CombinationReport(Orientation({eid: True for eid in graph.edge_order}),
                                 dict(coeffs), zero, residual, coefficients is None)

    if orientations is None:
        base = _find_base_orientation(graph, matchings)
        orientations = {}
        for sub in subsets:
            flip = [eid for eid in graph.edge_order
                    if sum(graph.r_vector(eid)[i] for i in range(2 * g) if sub[i]) % 2]
            orientations[sub] = base.reversed_on(flip)
    else:
        base = orientations[subsets[0]]

    pfaffians = {sub: pfaffian(skew_adjacency(graph, d))
                 for sub, d in orientations.items()}

    def combine(coeffs):
        total = MultiPoly.zero()
        for sub in subsets:
            total = total + coeffs[sub] * pfaffians[sub]
        return total

    if coefficients is not None:
        poly = combine(coefficients)
        residual = max_coeff_diff(poly, target)
        if residual > tol:
            raise ArithmeticError(f"combination misses brute force by {residual:.2e}")
        return CombinationReport(base, dict(coefficients), poly, residual, False)

    scale = 2.0 ** (-g)
    default = {sub: scale * (-1 if arf(quadratic_form(sub)) else 1) for sub in subsets}
    poly = combine(default)
    residual = max_coeff_diff(poly, target)
    if residual <= tol:
        return CombinationReport(base, default, poly, residual, True)
    for signs in product((1, -1), repeat=len(subsets)):
        coeffs = {sub: scale * sg for sub, sg in zip(subsets, signs)}
        poly = combine(coeffs)
        residual = max_coeff_diff(poly, target)
        if residual <= tol:
            return CombinationReport(base, coeffs, poly, residual, False)
    raise ArithmeticError("no +-2^{-g} coefficient assignment matches brute force")


# -- Kasteleyn curvature and flatness ------------------------------------------------


def _require_bipartition(graph: EmbeddedGraph):
    if not graph.bipartition:
        raise ValueError("operation needs a bipartite graph with declared colours")


def _in_plus(graph: EmbeddedGraph, o) -> bool:
    """Whether a traversed edge agrees with the black-to-white reference
    orientation."""
    return graph.bipartition[graph.tail(o)] == "black"


def kasteleyn_curvature(graph: EmbeddedGraph, weights, oriented_cycle) -> complex:
    """c(C) = (-1)^{|C|/2+1} * prod_{C+} w / prod_{C-} w for an oriented cycle
    given as consecutive directed edges."""
    _require_bipartition(graph)
    n = len(oriented_cycle)
    num, den = 1.0 + 0j, 1.0 + 0j
    for idx, o in enumerate(oriented_cycle):
        o2 = oriented_cycle[(idx + 1) % n]
        if graph.head(o) != graph.tail(o2):
            raise ValueError("cycle edges are not consecutive")
        w = complex(weights[o[0]])
        if _in_plus(graph, o):
            num *= w
        else:
            if w == 0:
                raise ZeroDivisionError(f"zero weight on a C- edge {o[0]}")
            den *= w
    return (-1.0) ** (n // 2 + 1) * num / den


def is_kasteleyn_flat(graph: EmbeddedGraph, weights, tol: float = 1e-9) -> bool:
    """Curvature 1 on every bounded face."""
    _require_bipartition(graph)
    for face in faces_of(graph):
        if abs(kasteleyn_curvature(graph, weights, face) - 1.0) > tol:
            return False
    return True


def _orient_symmetric_difference(graph: EmbeddedGraph, m_edges, n_edges):
    """M delta N as an oriented cycle whose M-edges run black to white."""
    diff = set(m_edges) ^ set(n_edges)
    if not diff:
        raise ValueError("matchings coincide")
    incident: dict = {}
    for eid in diff:
        e = graph.edges[eid]
        incident.setdefault(e.u, []).append(eid)
        incident.setdefault(e.v, []).append(eid)
    if any(len(v) != 2 for v in incident.values()):
        raise ValueError("symmetric difference is not a disjoint cycle union")
    start = min(e for e in diff if e in set(m_edges))
    e0 = graph.edges[start]
    tail = e0.u if graph.bipartition[e0.u] == "black" else e0.v
    cycle = [(start, e0.u == tail)]
    used = {start}
    while True:
        o = cycle[-1]
        v = graph.head(o)
        nxt = [eid for eid in incident[v] if eid != o[0]]
        if not nxt:
            raise ValueError("symmetric difference does not close up")
        eid = nxt[0]
        if eid in used:
            break
        e = graph.edges[eid]
        cycle.append((eid, e.u == v))
        used.add(eid)
    if used != diff:
        raise ValueError("symmetric difference is not a single cycle")
    return cycle


def matching_coefficient(graph: EmbeddedGraph, weights, matching) -> complex:
    """t(M): the coefficient of prod_{e in M} x_e in det(D_B(w)) (black rows
    before white columns, ascending ids within colour)."""
    _require_bipartition(graph)
    blacks = [v for v in graph.vertex_order if graph.bipartition[v] == "black"]
    whites = [v for v in graph.vertex_order if graph.bipartition[v] == "white"]
    blacks.sort(key=str)
    whites.sort(key=str)
    windex = {w: i for i, w in enumerate(whites)}
    perm = [None] * len(blacks)
    weight = 1.0 + 0j
    for eid in matching:
        e = graph.edges[eid]
        b, w = (e.u, e.v) if graph.bipartition[e.u] == "black" else (e.v, e.u)
        perm[blacks.index(b)] = windex[w]
        weight *= complex(weights[eid])
    if any(p is None for p in perm):
        raise ValueError("matching does not cover every black vertex")
    parity = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                parity ^= 1
    return (-1 if parity else 1) * weight


def check_prop_two(graph: EmbeddedGraph, weights, m_edges, n_edges,
                   tol: float = 1e-9) -> bool:
    """t(M)/t(N) equals the curvature of M delta N oriented along M."""
    cycle = _orient_symmetric_difference(graph, m_edges, n_edges)
    for o in cycle:
        if o[0] in set(m_edges) and not _in_plus(graph, o):
            raise AssertionError("orientation does not follow M's edges")
    ratio = matching_coefficient(graph, weights, m_edges) / \
        matching_coefficient(graph, weights, n_edges)
    return abs(ratio - kasteleyn_curvature(graph, weights, cycle)) <= tol


def normalize_to_simple_flat(graph: EmbeddedGraph, weights, tol: float = 1e-9):
    """Vertex multiplications driving a Kasteleyn-flat weight function with
    +-1 cycle curvatures to +-1 edge weights (tree edges become exactly 1).

    Returns (new_weights, vertex_factors); raises when some fundamental-cycle
    curvature is not +-1.
    """
    _require_bipartition(graph)
    adjacency: dict = {v: [] for v in graph.vertex_order}
    for eid in graph.edge_order:
        e = graph.edges[eid]
        adjacency[e.u].append((e.v, eid))
        adjacency[e.v].append((e.u, eid))
    root = graph.vertex_order[0]
    parent = {root: (None, None)}
    order = [root]
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w, eid in adjacency[v]:
            if w not in parent:
                parent[w] = (v, eid)
                order.append(w)
                queue.append(w)
    if len(order) != len(graph.vertex_order):
        raise ValueError("graph is not connected")
    factors = {v: 1.0 + 0j for v in graph.vertex_order}
    new_w = {eid: complex(weights[eid]) for eid in graph.edge_order}

    def apply_factor(v, c):
        factors[v] *= c
        for _w, eid in adjacency[v]:
            new_w[eid] *= c

    for v in order[1:]:
        _p, eid = parent[v]
        apply_factor(v, 1.0 / new_w[eid])

    tree_edges = {parent[v][1] for v in order[1:]}
    for eid in graph.edge_order:
        if eid in tree_edges:
            continue
        w = new_w[eid]
        if min(abs(w - 1.0), abs(w + 1.0)) > tol:
            raise ValueError(
                f"non-tree edge {eid} normalizes to {w}; some cycle curvature "
                "is outside {1,-1}")
        new_w[eid] = 1.0 if abs(w - 1.0) < abs(w + 1.0) else -1.0
    for eid in tree_edges:
        new_w[eid] = 1.0
    return new_w, factors
