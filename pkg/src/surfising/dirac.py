"""Directed transition graphs, the squared transition matrix with dual-length
substitution, its row relation to the discrete Dirac matrix, and the finite
fermionic-expansion / regularized-determinant identities."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddedGraph
from .geometry import base_polygon
from .transition import TransitionMatrix, build_delta


@dataclass
class TransitionGraph:
    """Vertices are directed edges, split by the colour they point at; arcs
    join consecutive directed edges.  The reduced arc set drops reversals."""

    graph: EmbeddedGraph
    dirs: list
    white_dirs: list     # black -> white
    black_dirs: list     # white -> black
    arcs: list
    arcs_reduced: list

    def is_bipartite_between_colour_classes(self) -> bool:
        white = set(self.white_dirs)
        for o, o2 in self.arcs:
            if (o in white) == (o2 in white):
                return False
        return True


def build_transition_graph(graph: EmbeddedGraph) -> TransitionGraph:
    if not graph.bipartition:
        raise ValueError("transition graph needs a declared bipartition")
    dirs = graph.dirs()
    white_dirs = [o for o in dirs if graph.bipartition[graph.head(o)] == "white"]
    black_dirs = [o for o in dirs if graph.bipartition[graph.head(o)] == "black"]
    arcs = []
    arcs_reduced = []
    for o in dirs:
        for o2 in dirs:
            if graph.head(o) != graph.tail(o2):
                continue
            arcs.append((o, o2))
            if o2 != graph.reverse(o):
                arcs_reduced.append((o, o2))
    return TransitionGraph(graph=graph, dirs=dirs, white_dirs=white_dirs,
                           black_dirs=black_dirs, arcs=arcs,
                           arcs_reduced=arcs_reduced)


@dataclass
class DiracMatrices:
    """delta2: squared transition entries with (x_e)^2 -> dual length, indexed
    by directed edges; dirac: vertex-indexed matrix l(e*) e^{i angle}."""

    graph: EmbeddedGraph
    s: tuple
    dirs: list
    delta2: np.ndarray
    dirac: np.ndarray
    vertex_index: dict


def _cone_points(genus: int):
    return base_polygon(genus) if genus > 0 else []


def build_delta2(graph: EmbeddedGraph, s, dual_lengths=None,
                 criticality_tol: float = 1e-6,
                 require_critical: bool = True) -> DiracMatrices:
    """Square every entry of the full transition matrix and substitute dual
    lengths for the squared variables; build the companion Dirac matrix.

    Preconditions: bipartite, critical embedding, dual lengths known, no
    parallel edges, no vertex at the cone point of the polygon model.
    require_critical=False skips the criticality gate (negative controls only).
    """
    from .embedding import is_critical_embedding

    if not graph.bipartition:
        raise ValueError("build_delta2 needs a bipartite graph")
    if require_critical:
        ok, diag = is_critical_embedding(graph, criticality_tol)
        if not ok:
            raise ValueError(f"embedding is not critical: {diag['violation']}")
    for p in _cone_points(graph.genus):
        for v, c in graph.vertex_coords.items():
            if math.dist(p, c) < 1e-6:
                raise ValueError(f"vertex {v} sits at a conical singularity")
    seen_pairs = set()
    for eid in graph.edge_order:
        e = graph.edges[eid]
        key = frozenset((e.u, e.v))
        if key in seen_pairs:
            raise ValueError("parallel edges are not supported here")
        seen_pairs.add(key)

    if dual_lengths is None:
        dual_lengths = {}
        for eid in graph.edge_order:
            if graph.edges[eid].dual_length is None:
                raise ValueError(f"edge {eid} has no dual length")
            dual_lengths[eid] = graph.edges[eid].dual_length

    delta = build_delta(graph, s)
    n = delta.size
    d2 = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(delta.rows):
        for j, phase in row:
            d2[i, j] = phase * phase * dual_lengths[delta.variables[j]]

    vindex = {v: i for i, v in enumerate(graph.vertex_order)}
    nv = len(vindex)
    dirac = np.zeros((nv, nv), dtype=complex)
    for eid in graph.edge_order:
        e = graph.edges[eid]
        for o in ((eid, True), (eid, False)):
            t, h = graph.tail(o), graph.head(o)
            angle = graph.dir_first_angle(o)
            dirac[vindex[t], vindex[h]] = dual_lengths[eid] * cmath.exp(1j * angle)
    return DiracMatrices(graph=graph, s=delta.s, dirs=delta.dirs,
                         delta2=d2, dirac=dirac, vertex_index=vindex)


@dataclass
class ProportionalityReport:
    ok: bool
    constants: dict          # directed edge -> c(w^o)
    max_pair_spread: float   # rows of delta2 entering one vertex
    max_dirac_spread: float  # delta2 row vs c * dirac row
    detail: str = ""


def check_row_proportionality(dm: DiracMatrices,
                              dirac_side: DiracMatrices | None = None,
                              tol: float = 1e-9) -> ProportionalityReport:
    """Rows of delta2 entering one vertex must be complex multiples of each
    other, and every row a multiple of the Dirac row of its head vertex.

    Passing a second DiracMatrices compares dm.delta2 against the other
    drawing's Dirac matrix (the mismatch control).
    """
    other = dirac_side if dirac_side is not None else dm
    graph = dm.graph
    constants = {}
    max_dirac = 0.0
    for i, o in enumerate(dm.dirs):
        head = graph.head(o)
        hrow = other.dirac[other.vertex_index[head]]
        ratios = []
        for j, o2 in enumerate(dm.dirs):
            val = dm.delta2[i, j]
            if val == 0:
                continue
            ref = hrow[other.vertex_index[graph.head(o2)]]
            if abs(ref) < 1e-15:
                ratios = None
                break
            ratios.append(val / ref)
        if ratios is None:
            max_dirac = math.inf
            constants[o] = 0j
            continue
        if not ratios:
            constants[o] = 0j
            continue
        c = ratios[0]
        constants[o] = c
        for r in ratios[1:]:
            max_dirac = max(max_dirac, abs(r - c))

    max_pair = 0.0
    by_head: dict = {}
    for i, o in enumerate(dm.dirs):
        by_head.setdefault(graph.head(o), []).append(i)
    for head, rows in by_head.items():
        for a_i in rows:
            for b_i in rows:
                if a_i >= b_i:
                    continue
                ra, rb = dm.delta2[a_i], dm.delta2[b_i]
                support = np.flatnonzero((np.abs(ra) > 1e-15) & (np.abs(rb) > 1e-15))
                if len(support) < 2:
                    continue
                ratio = ra[support] / rb[support]
                max_pair = max(max_pair, float(np.abs(ratio - ratio[0]).max()))

    ok = max_pair <= tol and max_dirac <= tol
    detail = "" if ok else (
        f"pair spread {max_pair:.2e}, dirac spread {max_dirac:.2e}")
    return ProportionalityReport(ok=ok, constants=constants,
                                 max_pair_spread=max_pair,
                                 max_dirac_spread=max_dirac, detail=detail)


def reconstruct_delta2_from_dirac(dm: DiracMatrices, constants: dict) -> np.ndarray:
    """Rebuild delta2 from the Dirac matrix by the three row operations:
    duplicate the head-vertex row once per entering directed edge, scale it by
    c(w^o), and pad with zero entries onto the directed-edge columns."""
    graph = dm.graph
    n = len(dm.dirs)
    out = np.zeros((n, n), dtype=complex)
    for i, o in enumerate(dm.dirs):
        head = graph.head(o)
        c = constants[o]
        for j, o2 in enumerate(dm.dirs):
            if graph.tail(o2) != head:
                continue
            out[i, j] = c * dm.dirac[dm.vertex_index[head],
                                     dm.vertex_index[graph.head(o2)]]
    return out


# -- finite fermionic identities ---------------------------------------------------


def exterior_power_traces(a: np.ndarray):
    """tr of all exterior powers via Newton's identities on power traces."""
    n = a.shape[0]
    powers = []
    m = np.eye(n, dtype=complex)
    for _ in range(n):
        m = m @ a
        powers.append(np.trace(m))
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        acc = 0j
        for j in range(1, k + 1):
            term = powers[j - 1] * e[k - j]
            acc += term if j % 2 == 1 else -term
        e.append(acc / k)
    return e


def fermionic_expansion_check(a, tol: float = 1e-9):
    """det(I - A) against the alternating sum of exterior-power traces.

    Returns (ok, alternating_sum, determinant).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    e = exterior_power_traces(a)
    lhs = sum((-1) ** k * e[k] for k in range(len(e)))
    rhs = np.linalg.det(np.eye(a.shape[0]) - a)
    scale = max(1.0, abs(rhs))
    return abs(lhs - rhs) <= tol * scale, lhs, rhs


def regularized_det_finite(t, eps: float = 1e-8) -> complex:
    """Product of the nonzero eigenvalues, i.e. exp(-zeta_T'(0)) for the
    finite spectral zeta function."""
    t = np.asarray(t, dtype=complex)
    eigenvalues = np.linalg.eigvals(t)
    log_sum = 0j
    for lam in eigenvalues:
        if abs(lam) > eps:
            log_sum += cmath.log(lam)
    return cmath.exp(log_sum)
