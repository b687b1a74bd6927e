"""Spin-indexed transition matrices over directed edges.

Entry at (o, o') for consecutive directed edges: a unit-modulus phase times
the edge variable of o'.  The phase is exp(i * bend / 2) for the vertex
transition bend, times (-1)^{s . r(edge(o))} for the homological twist, times
exp(i * pi * kappa(o)) with kappa in {0, -3/4, +3/4} for a bridge traversal of
o (sign = travel direction against the anticlockwise boundary).  The reversal
transition gets bend +pi by convention; it is dropped in the reduced matrix
and only ever squared elsewhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .embedding import DirEdge, EmbeddedGraph

TURN_UNIT = 1.5 * math.pi  # net polyline turning of a single bridge traversal


class NormalFormError(ValueError):
    """Drawing is not in the normal form the transition phases assume."""


def kappa(graph: EmbeddedGraph, o: DirEdge) -> float:
    """0 for an edge inside the polygon, +3/4 / -3/4 for a single bridge
    traversal with/against the anticlockwise boundary."""
    crossings = graph.dir_crossings(o)
    if not crossings:
        return 0.0
    if len(crossings) > 1:
        raise NormalFormError(
            f"directed edge {o[0]} traverses more than one bridge; "
            "drawing not in normal form")
    return 0.75 if crossings[0] > 0 else -0.75


def check_turning_normal_form(graph: EmbeddedGraph, tol: float = 1e-9) -> None:
    """Require every edge's net turning to equal 2*pi*kappa mod 4*pi, which is
    what makes the constant kappa phases reproduce drawn rotations."""
    for eid in graph.edge_order:
        o = (eid, True)
        target = 2.0 * math.pi * kappa(graph, o)
        diff = (graph.dir_turning(o) - target) % (4.0 * math.pi)
        if min(diff, 4.0 * math.pi - diff) > tol:
            raise NormalFormError(
                f"edge {eid}: net turning {graph.dir_turning(o):.6f} is not "
                f"{target:.6f} mod 4*pi; drawing not in normal form")


@dataclass
class TransitionMatrix:
    """Sparse 2|E| x 2|E| array of phases; entry (i, j) carries variable of dir j."""

    graph: EmbeddedGraph
    s: tuple
    dirs: list            # directed edges, fixed order
    index: dict           # DirEdge -> row/col index
    rows: list            # rows[i] = list of (j, phase), reversal included
    reversal: list        # reversal[i] = (j, phase) for the backtrack transition
    variables: list       # variables[j] = edge id of dir j

    @property
    def size(self) -> int:
        return len(self.dirs)

    def entry_phase(self, o: DirEdge, o2: DirEdge) -> complex:
        i, j = self.index[o], self.index[o2]
        for jj, ph in self.rows[i]:
            if jj == j:
                return ph
        return 0j

    def dense_phases(self, include_reversal: bool = True) -> np.ndarray:
        """Phase matrix with every variable set to 1."""
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for i, row in enumerate(self.rows):
            for j, ph in row:
                out[i, j] = ph
        if not include_reversal:
            for i, rv in enumerate(self.reversal):
                if rv is not None:
                    out[i, rv[0]] = 0.0
        return out

    def transition_weight(self, o: DirEdge, o2: DirEdge) -> complex:
        """Phase of the transition o -> o2 (zero when not consecutive)."""
        return self.entry_phase(o, o2)


def build_delta(graph: EmbeddedGraph, s, phase_sign: int = 1) -> TransitionMatrix:
    """Full transition matrix for spin index s (reversal entries included).

    phase_sign=-1 conjugates the bridge phase factors globally (the alternate
    reading of the kappa multiplier); the default matches the bundled
    drawings.
    """
    if phase_sign not in (1, -1):
        raise ValueError("phase_sign must be +1 or -1")
    g2 = 2 * graph.genus
    s = tuple(int(x) % 2 for x in np.atleast_1d(np.asarray(s, dtype=int))) if g2 else ()
    if len(s) != g2:
        raise ValueError(f"spin index must have length {g2}")
    dirs = graph.dirs()
    index = {o: i for i, o in enumerate(dirs)}
    svec = np.array(s, dtype=int)

    twist = {}
    for o in dirs:
        r = graph.r_vector(o[0])
        twist[o] = (-1.0) ** (int(np.dot(svec, r)) % 2) if g2 else 1.0

    rows = [[] for _ in dirs]
    reversal: list = [None] * len(dirs)
    for o in dirs:
        i = index[o]
        base = twist[o] * cmath.exp(1j * math.pi * kappa(graph, o) * phase_sign)
        head = graph.head(o)
        for o2 in dirs:
            if graph.tail(o2) != head:
                continue
            bend = graph.transition_angle(o, o2)
            phase = base * cmath.exp(0.5j * bend)
            j = index[o2]
            rows[i].append((j, phase))
            if o2 == graph.reverse(o):
                reversal[i] = (j, phase)
    return TransitionMatrix(graph=graph, s=s, dirs=dirs, index=index,
                            rows=rows, reversal=reversal,
                            variables=[o[0] for o in dirs])


def build_delta_prime(delta: TransitionMatrix) -> TransitionMatrix:
    """Same matrix with the reversal transitions zeroed."""
    rows = []
    for i, row in enumerate(delta.rows):
        rv = delta.reversal[i]
        if rv is None:
            rows.append(list(row))
        else:
            rows.append([(j, ph) for j, ph in row if j != rv[0]])
    return TransitionMatrix(graph=delta.graph, s=delta.s, dirs=delta.dirs,
                            index=delta.index, rows=rows,
                            reversal=[None] * len(delta.dirs),
                            variables=list(delta.variables))
