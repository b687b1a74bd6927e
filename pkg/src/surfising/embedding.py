"""Graphs drawn on the genus-g polygon-with-bridges planar model.

A document supplies vertex coordinates inside the base 4g-gon and, per edge, a
planar polyline together with the ordered list of signed bridge indices it
traverses.  Loading validates every declared crossing against the drawing and
precomputes the quantities the rest of the pipeline consumes: per-edge net
turning, crossing-count vectors, and the angular rotation system at each
vertex.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import (
    base_polygon,
    circumcircle_fit,
    clip_polyline_outside,
    direction,
    point_in_convex_polygon,
    point_in_polygon_general,
    polygon_signed_area,
    polyline_turning,
    segment_crossings_with_polygon,
    wrap_angle,
)

EPS_ANGLE = 1e-9

# A directed edge: (edge id, True for the stored u->v direction).
DirEdge = tuple


class EmbeddingError(ValueError):
    """Document violates an EmbeddedGraph invariant."""


@dataclass(frozen=True)
class Edge:
    id: str
    u: object
    v: object
    polyline: tuple
    crossings: tuple  # signed bridge indices, in polyline order
    weight: object = None
    dual_length: float | None = None
    # derived at load time
    turning: float = 0.0
    r: tuple = ()

    def endpoint(self, end: int):
        return self.u if end == 0 else self.v


@dataclass(frozen=True)
class EmbeddedGraph:
    genus: int
    vertex_coords: dict
    edges: dict
    bipartition: dict | None = None
    vertex_order: tuple = ()
    edge_order: tuple = ()

    # -- basic structure ----------------------------------------------------

    def edge(self, eid) -> Edge:
        return self.edges[eid]

    def incident_ends(self, vid):
        """All (edge_id, end) pairs at a vertex, end 0 = polyline start."""
        out = []
        for eid in self.edge_order:
            e = self.edges[eid]
            if e.u == vid:
                out.append((eid, 0))
            if e.v == vid:
                out.append((eid, 1))
        return out

    def degree(self, vid) -> int:
        return len(self.incident_ends(vid))

    def end_angle(self, eid, end) -> float:
        """Direction of the first drawn segment leaving the vertex at this end."""
        pts = self.edges[eid].polyline
        if end == 0:
            return direction(pts[0], pts[1])
        return direction(pts[-1], pts[-2])

    def vertex_rotation(self, vid):
        """Incident ends sorted anticlockwise by angle."""
        ends = self.incident_ends(vid)
        ends.sort(key=lambda ee: self.end_angle(*ee))
        angles = [self.end_angle(*ee) for ee in ends]
        for a, b in zip(angles, angles[1:]):
            if abs(a - b) < EPS_ANGLE:
                raise EmbeddingError(f"coincident edge directions at vertex {vid}")
        return ends

    # -- directed edges -------------------------------------------------------

    def dirs(self):
        """All 2|E| directed edges, deterministic order."""
        out = []
        for eid in self.edge_order:
            out.append((eid, True))
            out.append((eid, False))
        return out

    def tail(self, o: DirEdge):
        e = self.edges[o[0]]
        return e.u if o[1] else e.v

    def head(self, o: DirEdge):
        e = self.edges[o[0]]
        return e.v if o[1] else e.u

    def reverse(self, o: DirEdge) -> DirEdge:
        return (o[0], not o[1])

    def dir_polyline(self, o: DirEdge):
        pts = self.edges[o[0]].polyline
        return pts if o[1] else tuple(reversed(pts))

    def dir_first_angle(self, o: DirEdge) -> float:
        pts = self.dir_polyline(o)
        return direction(pts[0], pts[1])

    def dir_last_angle(self, o: DirEdge) -> float:
        pts = self.dir_polyline(o)
        return direction(pts[-2], pts[-1])

    def dir_turning(self, o: DirEdge) -> float:
        t = self.edges[o[0]].turning
        return t if o[1] else -t

    def dir_crossings(self, o: DirEdge):
        c = self.edges[o[0]].crossings
        return c if o[1] else tuple(-x for x in reversed(c))

    def transition_angle(self, o: DirEdge, o2: DirEdge) -> float:
        """Signed bend from the last segment of o to the first of o2, in (-pi, pi].

        The reversal transition is assigned +pi by convention; it only ever
        enters squared quantities.
        """
        if self.head(o) != self.tail(o2):
            raise EmbeddingError("transition between non-consecutive directed edges")
        if o2 == self.reverse(o):
            return math.pi
        return wrap_angle(self.dir_first_angle(o2) - self.dir_last_angle(o))

    def r_vector(self, eid) -> np.ndarray:
        return np.array(self.edges[eid].r, dtype=int)

    # -- faces (rotation system) ---------------------------------------------

    def faces(self):
        """Faces as dart cycles via the rotation system (anticlockwise bounded faces).

        Each face is a list of directed edges; for a crossing-free planar
        drawing bounded faces come out anticlockwise and the outer face
        clockwise.
        """
        rotations = {v: self.vertex_rotation(v) for v in self.vertex_order}
        next_at = {}
        for v, ends in rotations.items():
            k = len(ends)
            for i, ee in enumerate(ends):
                next_at[(v, ee)] = ends[(i - 1) % k]  # clockwise neighbour

        def dart_end(o: DirEdge):
            # the (edge, end) token sitting at the tail of o
            return (o[0], 0 if o[1] else 1)

        def next_dart(o: DirEdge) -> DirEdge:
            v = self.head(o)
            rev = self.reverse(o)
            eid, end = next_at[(v, dart_end(rev))]
            return (eid, end == 0)

        seen = set()
        faces = []
        for o in self.dirs():
            if o in seen:
                continue
            face = []
            cur = o
            while cur not in seen:
                seen.add(cur)
                face.append(cur)
                cur = next_dart(cur)
            faces.append(face)
        return faces

    def bounded_faces(self):
        """Faces with positive signed area (planar crossing-free drawings only).

        Areas are taken along the full drawn boundary so bent edges count.
        """
        if any(self.edges[eid].crossings for eid in self.edge_order):
            raise EmbeddingError("face geometry requires a bridge-free drawing")
        out = []
        for face in self.faces():
            boundary = []
            for o in face:
                boundary.extend(self.dir_polyline(o)[:-1])
            if polygon_signed_area(boundary) > 0:
                out.append(face)
        return out


# -- bridge bookkeeping -------------------------------------------------------


def bridge_sides(genus: int):
    """Map 0-based polygon side index -> (bridge index 1..2g, is_low_side)."""
    out = {}
    for i in range(1, genus + 1):
        a = 4 * (i - 1)  # 0-based index of side z_{4(i-1)+1}
        out[a] = (2 * i - 1, True)
        out[(a + 2) % (4 * genus)] = (2 * i - 1, False)
        out[(a + 1) % (4 * genus)] = (2 * i, True)
        out[(a + 3) % (4 * genus)] = (2 * i, False)
    return out


def _measure_crossings(polyline, genus: int):
    """Signed bridge traversal sequence of a polyline, computed from the drawing."""
    if genus == 0:
        return []
    poly = base_polygon(genus)
    side_map = bridge_sides(genus)
    events = []  # (point index, t, side, outward)
    for i in range(len(polyline) - 1):
        for t, side, outward in segment_crossings_with_polygon(
                polyline[i], polyline[i + 1], poly):
            events.append((i, t, side, outward))
    crossings = []
    pending = None
    for _i, _t, side, outward in events:
        if outward:
            if pending is not None:
                raise EmbeddingError("polyline exits the base polygon twice in a row")
            pending = side
        else:
            if pending is None:
                raise EmbeddingError("polyline enters the base polygon without leaving")
            b_out, low_out = side_map[pending]
            b_in, low_in = side_map[side]
            if b_out != b_in:
                raise EmbeddingError(
                    f"excursion exits bridge {b_out} side but re-enters bridge {b_in} side")
            if low_out == low_in:
                raise EmbeddingError("excursion re-enters through the side it left")
            crossings.append(b_out if low_out else -b_out)
            pending = None
    if pending is not None:
        raise EmbeddingError("polyline ends outside the base polygon")
    return crossings


# -- loading -------------------------------------------------------------------


def load_embedded_graph(document) -> EmbeddedGraph:
    """Build a validated EmbeddedGraph from a JSON document (dict, str or path).

    Every invariant violation raises EmbeddingError; nothing is repaired
    silently.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError:
            with open(document) as fh:
                doc = json.load(fh)
    elif hasattr(document, "read"):
        doc = json.load(document)
    elif hasattr(document, "open"):  # pathlib.Path
        with open(document) as fh:
            doc = json.load(fh)
    else:
        doc = document

    try:
        genus = int(doc["genus"])
        raw_vertices = doc["vertices"]
        raw_edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise EmbeddingError(f"document missing required field: {exc}") from exc
    if genus < 0:
        raise EmbeddingError("genus must be nonnegative")

    poly = base_polygon(genus) if genus > 0 else None
    coords = {}
    order = []
    for rv in raw_vertices:
        vid = rv["id"]
        if vid in coords:
            raise EmbeddingError(f"duplicate vertex id {vid}")
        p = (float(rv["x"]), float(rv["y"]))
        if poly is not None and point_in_convex_polygon(p, poly) <= 0:
            raise EmbeddingError(f"vertex {vid} not strictly inside the base polygon")
        coords[vid] = p
        order.append(vid)

    edges = {}
    eorder = []
    for re_ in raw_edges:
        eid = str(re_["id"])
        if eid in edges:
            raise EmbeddingError(f"duplicate edge id {eid}")
        u, v = re_["u"], re_["v"]
        if u not in coords or v not in coords:
            raise EmbeddingError(f"edge {eid} references unknown vertex")
        if u == v:
            raise EmbeddingError(f"edge {eid} is a loop; loops are not supported")
        pts = tuple((float(x), float(y)) for x, y in re_["polyline"])
        if len(pts) < 2:
            raise EmbeddingError(f"edge {eid} polyline needs at least two points")
        if math.dist(pts[0], coords[u]) > 1e-9 or math.dist(pts[-1], coords[v]) > 1e-9:
            raise EmbeddingError(f"edge {eid} polyline does not join its endpoints")
        for a, b in zip(pts, pts[1:]):
            if math.dist(a, b) < 1e-12:
                raise EmbeddingError(f"edge {eid} has a zero-length segment")
        declared = [int(c) for c in re_.get("crossings", [])]
        if genus == 0 and declared:
            raise EmbeddingError(f"edge {eid} declares crossings on a genus-0 document")
        for c in declared:
            if c == 0 or abs(c) > 2 * genus:
                raise EmbeddingError(f"edge {eid} declares invalid bridge index {c}")
        measured = _measure_crossings(pts, genus)
        if measured != declared:
            raise EmbeddingError(
                f"edge {eid}: declared crossings {declared} do not match drawing {measured}")
        r = [0] * (2 * genus)
        for c in declared:
            r[abs(c) - 1] += 1
        edges[eid] = Edge(
            id=eid, u=u, v=v, polyline=pts, crossings=tuple(declared),
            weight=re_.get("weight"),
            dual_length=(float(re_["dual_length"]) if re_.get("dual_length") is not None
                         else None),
            turning=polyline_turning(pts), r=tuple(r),
        )
        eorder.append(eid)

    bipartition = None
    if doc.get("bipartition"):
        bp = doc["bipartition"]
        bipartition = {}
        for vid in bp.get("white", []):
            bipartition[vid] = "white"
        for vid in bp.get("black", []):
            if vid in bipartition:
                raise EmbeddingError(f"vertex {vid} declared both white and black")
            bipartition[vid] = "black"
        missing = set(coords) - set(bipartition)
        if missing:
            raise EmbeddingError(f"bipartition misses vertices {sorted(map(str, missing))}")
        for e in edges.values():
            if bipartition[e.u] == bipartition[e.v]:
                raise EmbeddingError(f"edge {e.id} joins two {bipartition[e.u]} vertices")

    graph = EmbeddedGraph(
        genus=genus, vertex_coords=coords, edges=edges, bipartition=bipartition,
        vertex_order=tuple(order), edge_order=tuple(eorder),
    )
    # rotation system must be well defined
    for vid in order:
        graph.vertex_rotation(vid)
    return graph


def to_document(graph: EmbeddedGraph) -> dict:
    """Serialize back to the JSON document shape."""
    doc = {
        "genus": graph.genus,
        "vertices": [{"id": vid, "x": graph.vertex_coords[vid][0],
                      "y": graph.vertex_coords[vid][1]} for vid in graph.vertex_order],
        "edges": [],
    }
    for eid in graph.edge_order:
        e = graph.edges[eid]
        rec = {"id": e.id, "u": e.u, "v": e.v,
               "polyline": [[x, y] for x, y in e.polyline],
               "crossings": list(e.crossings)}
        if e.weight is not None:
            rec["weight"] = e.weight
        if e.dual_length is not None:
            rec["dual_length"] = e.dual_length
        doc["edges"].append(rec)
    if graph.bipartition:
        doc["bipartition"] = {
            "white": [v for v in graph.vertex_order if graph.bipartition[v] == "white"],
            "black": [v for v in graph.vertex_order if graph.bipartition[v] == "black"],
        }
    return doc


# -- homology ------------------------------------------------------------------


def crossing_vector(graph: EmbeddedGraph, edge_ids: Iterable) -> np.ndarray:
    """Componentwise bridge-traversal counts of an edge set (length 2g)."""
    r = np.zeros(2 * graph.genus, dtype=int)
    for eid in edge_ids:
        eid = str(eid)
        if eid not in graph.edges:
            raise KeyError(f"unknown edge id {eid}")
        r += graph.r_vector(eid)
    return r


def is_even_set(graph: EmbeddedGraph, edge_ids) -> bool:
    deg: dict = {}
    for eid in edge_ids:
        e = graph.edges[str(eid)]
        deg[e.u] = deg.get(e.u, 0) + 1
        deg[e.v] = deg.get(e.v, 0) + 1
    return all(d % 2 == 0 for d in deg.values())


def homology_class(graph: EmbeddedGraph, edge_ids) -> np.ndarray:
    """F2 homology coordinates (basis a_1,b_1,...,a_g,b_g) of an even edge set."""
    edge_ids = [str(e) for e in edge_ids]
    if not is_even_set(graph, edge_ids):
        raise ValueError("edge set is not even")
    return crossing_vector(graph, edge_ids) % 2


# -- criticality ----------------------------------------------------------------


def is_critical_embedding(graph: EmbeddedGraph, tol: float = 1e-6):
    """Whether every face is cyclic with a common circumradius and interior center.

    Returns (flag, diagnostics).  diagnostics["faces"] lists per-face radius
    data; on failure diagnostics["violation"] names the first offending face.
    """
    faces = graph.bounded_faces()
    if not faces:
        raise EmbeddingError("no bounded faces to check")
    diag = {"faces": [], "violation": None}
    radii = []
    ok = True
    for face in faces:
        cycle = [graph.tail(o) for o in face]
        pts = [graph.vertex_coords[v] for v in cycle]
        center, radius, spread = circumcircle_fit(pts)
        inside = point_in_polygon_general(center, pts, eps=tol)
        entry = {"vertices": cycle, "radius": radius, "spread": spread,
                 "center": center, "center_inside": inside}
        diag["faces"].append(entry)
        radii.append(radius)
        if ok and (spread > tol or not inside):
            ok = False
            reason = "not cyclic" if spread > tol else "circumcenter outside face"
            diag["violation"] = {"face": cycle, "reason": reason, "spread": spread}
    if ok:
        rspread = max(radii) - min(radii)
        diag["radius_spread"] = rspread
        if rspread > tol:
            ok = False
            diag["violation"] = {"face": None, "reason": "radii differ across faces",
                                 "spread": rspread}
    return ok, diag
