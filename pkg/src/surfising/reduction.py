"""Degree reduction to {2,4}: odd degrees fixed by parallel 3-paths carrying
variable 0, high even degrees by vertex splits whose new edge carries
variable 1.  The drawing is updated locally with exact-turning surgery so the
reduced graph stays in normal form."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .embedding import EmbeddedGraph, load_embedded_graph, to_document
from .geometry import direction, unit, wrap_angle


@dataclass
class ReducedGraphMap:
    graph: EmbeddedGraph
    zero_edges: set
    one_edges: set
    edge_map: dict  # kept edge id in G' -> original edge id (identity here)


def _offset_polyline(points, delta: float):
    """Miter offset to the left; segment directions (hence bends and the net
    turning) are preserved exactly."""
    pts = list(points)
    normals = []
    for i in range(len(pts) - 1):
        d = direction(pts[i], pts[i + 1])
        normals.append(unit(d + math.pi / 2.0))
    out = [(pts[0][0] + delta * normals[0][0], pts[0][1] + delta * normals[0][1])]
    for i in range(1, len(pts) - 1):
        nx = normals[i - 1][0] + normals[i][0]
        ny = normals[i - 1][1] + normals[i][1]
        norm = math.hypot(nx, ny)
        nx, ny = nx / norm, ny / norm
        scale = delta / (nx * normals[i][0] + ny * normals[i][1])
        out.append((pts[i][0] + scale * nx, pts[i][1] + scale * ny))
    out.append((pts[-1][0] + delta * normals[-1][0], pts[-1][1] + delta * normals[-1][1]))
    return out


def _pair_odd_vertices(graph: EmbeddedGraph):
    """Edge set with odd degree exactly at the odd-degree vertices of the
    graph (XOR of tree paths between consecutive odd vertices)."""
    adjacency: dict = {v: [] for v in graph.vertex_order}
    for eid in graph.edge_order:
        e = graph.edges[eid]
        adjacency[e.u].append((e.v, eid))
        adjacency[e.v].append((e.u, eid))
    parent: dict = {}
    for root in graph.vertex_order:
        if root in parent:
            continue
        parent[root] = (None, None)
        stack = [root]
        while stack:
            v = stack.pop()
            for w, eid in adjacency[v]:
                if w not in parent:
                    parent[w] = (v, eid)
                    stack.append(w)

    def tree_path(v):
        path = []
        while parent[v][0] is not None:
            path.append(parent[v][1])
            v = parent[v][0]
        return v, path

    odd = [v for v in graph.vertex_order if graph.degree(v) % 2 == 1]
    chosen: set = set()
    by_root: dict = {}
    for v in odd:
        root, path = tree_path(v)
        by_root.setdefault(root, []).append(path)
    for root, paths in by_root.items():
        if len(paths) % 2:
            raise AssertionError("odd number of odd-degree vertices in a component")
        for path in paths:
            chosen ^= set(path)
    return chosen


def _min_incident_segment(doc_edges, vid, coords):
    best = math.inf
    for rec in doc_edges:
        pts = rec["polyline"]
        if rec["u"] == vid:
            best = min(best, math.dist(pts[0], pts[1]))
        if rec["v"] == vid:
            best = min(best, math.dist(pts[-1], pts[-2]))
    for w, p in coords.items():
        if w != vid:
            best = min(best, math.dist(p, coords[vid]))
    return best


def _retarget(polyline, at_end: int, new_pt):
    """Move one endpoint of a polyline to new_pt through a paired-bend tail
    (+psi then -psi), preserving the net turning and the final direction."""
    pts = [tuple(p) for p in polyline]
    if at_end == 0:
        pts = list(reversed(pts))
    d0 = direction(pts[-2], pts[-1])
    seg = math.dist(pts[-2], pts[-1])
    t = 0.35 * seg
    w1 = (pts[-1][0] - t * math.cos(d0), pts[-1][1] - t * math.sin(d0))
    s = 0.35 * math.dist(pts[-1], new_pt) + 1e-6
    m = (new_pt[0] - s * math.cos(d0), new_pt[1] - s * math.sin(d0))
    out = pts[:-1] + [w1, m, new_pt]
    if at_end == 0:
        out = list(reversed(out))
    return out


def reduce_degrees(graph: EmbeddedGraph) -> ReducedGraphMap:
    """Rebuild the graph so every degree is 2 or 4.

    Step 1 pairs odd-degree vertices: for each edge of the pairing set, a
    length-3 path is added alongside it (miter-offset shadow polyline); the
    three new edges go to Z.  Step 2 repeatedly splits an even degree > 4 off
    into a new degree-4 vertex joined by a splitting edge (goes to O), taking
    three angularly consecutive ends.  Always succeeds on finite graphs.
    """
    doc = to_document(graph)
    degrees = {v: graph.degree(v) for v in graph.vertex_order}
    if all(d in (2, 4) for d in degrees.values()):
        return ReducedGraphMap(graph=graph, zero_edges=set(), one_edges=set(),
                               edge_map={eid: eid for eid in graph.edge_order})

    coords = {v["id"]: (v["x"], v["y"]) for v in doc["vertices"]}
    next_vid = [0]

    def fresh_vertex():
        while f"r{next_vid[0]}" in coords:
            next_vid[0] += 1
        vid = f"r{next_vid[0]}"
        next_vid[0] += 1
        return vid

    zero_edges: set = set()
    one_edges: set = set()

    # Step 1: odd degrees. The connector stubs attach a little way along the
    # shadow so they leave the vertex at a skew angle (host direction plus
    # atan(1/2)), which keeps them clear of axis-aligned neighbours.
    for k, host_eid in enumerate(sorted(_pair_odd_vertices(graph))):
        host = graph.edges[host_eid]
        delta = 2e-4 * min(math.dist(a, b) for a, b in
                           zip(host.polyline, host.polyline[1:]))
        shadow = _offset_polyline(host.polyline, delta)
        d_first = direction(shadow[0], shadow[1])
        d_last = direction(shadow[-1], shadow[-2])
        a_pt = (shadow[0][0] + 2 * delta * math.cos(d_first),
                shadow[0][1] + 2 * delta * math.sin(d_first))
        b_pt = (shadow[-1][0] + 2 * delta * math.cos(d_last),
                shadow[-1][1] + 2 * delta * math.sin(d_last))
        trimmed = [a_pt] + shadow[1:-1] + [b_pt]
        a_id, b_id = fresh_vertex(), fresh_vertex()
        coords[a_id] = a_pt
        coords[b_id] = b_pt
        doc["vertices"].append({"id": a_id, "x": a_pt[0], "y": a_pt[1]})
        doc["vertices"].append({"id": b_id, "x": b_pt[0], "y": b_pt[1]})
        za, zb, zc = f"z{3 * k}", f"z{3 * k + 1}", f"z{3 * k + 2}"
        doc["edges"].append({"id": za, "u": host.u, "v": a_id,
                             "polyline": [list(coords[host.u]), list(a_pt)],
                             "crossings": []})
        doc["edges"].append({"id": zb, "u": a_id, "v": b_id,
                             "polyline": [list(p) for p in trimmed],
                             "crossings": list(host.crossings)})
        doc["edges"].append({"id": zc, "u": b_id, "v": host.v,
                             "polyline": [list(b_pt), list(coords[host.v])],
                             "crossings": []})
        zero_edges |= {za, zb, zc}

    work = load_embedded_graph(doc)

    # Step 2: even degrees > 4
    split_count = 0
    while True:
        over = [v for v in work.vertex_order if work.degree(v) > 4]
        if not over:
            break
        v = over[0]
        rotation = work.vertex_rotation(v)
        angles = [work.end_angle(*ee) for ee in rotation]
        k = len(rotation)
        # three consecutive ends with the smallest angular span
        best_i, best_span = 0, math.inf
        for i in range(k):
            span = (angles[(i + 2) % k] - angles[i]) % (2.0 * math.pi)
            if span < best_span:
                best_i, best_span = i, span
        chosen = [rotation[(best_i + t) % k] for t in range(3)]
        bisector = angles[best_i] + best_span / 2.0

        clearance = _min_incident_segment(doc["edges"], v, coords)
        step = clearance / 6.0
        new_v = fresh_vertex()
        new_pt = (coords[v][0] + step * math.cos(bisector),
                  coords[v][1] + step * math.sin(bisector))
        coords[new_v] = new_pt
        doc["vertices"].append({"id": new_v, "x": new_pt[0], "y": new_pt[1]})

        chosen_keys = {(str(eid), end) for eid, end in chosen}
        for rec in doc["edges"]:
            for end, vertex_key in ((0, "u"), (1, "v")):
                if rec[vertex_key] == v and (rec["id"], end) in chosen_keys:
                    rec["polyline"] = [list(p) for p in
                                       _retarget(rec["polyline"], end, new_pt)]
                    rec[vertex_key] = new_v
        oid = f"o{split_count}"
        split_count += 1
        doc["edges"].append({"id": oid, "u": new_v, "v": v,
                             "polyline": [list(new_pt), list(coords[v])],
                             "crossings": []})
        one_edges.add(oid)
        work = load_embedded_graph(doc)

    bad = {v: work.degree(v) for v in work.vertex_order
           if work.degree(v) not in (2, 4)}
    if bad:
        raise AssertionError(f"reduction left degrees {bad}")
    return ReducedGraphMap(graph=work, zero_edges=zero_edges, one_edges=one_edges,
                           edge_map={eid: eid for eid in graph.edge_order})
