"""Canonical fixture drawings on the 4g-gon-with-bridges model.

Bridge-crossing edges are routed as: a straight exit leg through the bridge's
lower glued side, a circular detour arc outside the polygon, and an entry leg
back in through the upper glued side, finished by a waypoint that pins the
final approach direction.  The construction guarantees a net polyline turning
of exactly +3*pi/2 for the forward (anticlockwise) traversal, which is what
makes the constant +-3/4 phase factors of the transition matrices agree with
drawing-derived rotation numbers.  Strands sharing a bridge are nested by exit
position; strands of the two bridges of one handle cross exactly once, outside
the polygon.  Everything is validated numerically at build time.
"""

from __future__ import annotations

import json
import math
from importlib import resources

from .embedding import EmbeddedGraph, load_embedded_graph
from .geometry import (
    TWO_PI,
    base_polygon,
    count_polyline_crossings,
    clip_polyline_outside,
    direction,
    polyline_turning,
    unit,
    wrap_angle,
)

TARGET_TURN = 1.5 * math.pi


def _side_point(genus: int, side: int, frac: float):
    """Point at parameter frac along 1-indexed polygon side `side`."""
    poly = base_polygon(genus)
    a = poly[side - 1]
    b = poly[side % (4 * genus)]
    return (a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1]))


def _ray_circle(p, theta, radius):
    """Farther intersection of the ray p + s*u(theta) with the circle |x| = radius."""
    ux, uy = unit(theta)
    px, py = p
    b = px * ux + py * uy
    c = px * px + py * py - radius * radius
    disc = b * b - c
    if disc <= 0:
        raise ValueError("ray misses the detour circle")
    s = -b + math.sqrt(disc)
    return (px + s * ux, py + s * uy)


def route_bridge_edge(genus: int, a_pt, b_pt, bridge: int, *,
                      exit_frac: float = 0.7, entry_frac: float | None = None,
                      radius: float = 1.18, w_dist: float = 0.07,
                      pre_dist: float | None = None, arc_steps: int = 24):
    """Polyline for an edge from a_pt to b_pt traversing `bridge` anticlockwise.

    The route is: straight exit leg from a_pt through the bridge's low side,
    a circular arc at `radius`, an entry leg back in through the high side
    aimed at a pre-waypoint near b_pt, and a final hook through the waypoint
    w = b_pt - w_dist * u(exit_dir - pi/2), which pins the approach direction
    the +3*pi/2 net turning demands.  Returns (polyline, [bridge]); the
    turning is asserted, not assumed.
    """
    if not (1 <= bridge <= 2 * genus):
        raise ValueError(f"no bridge {bridge} at genus {genus}")
    handle = (bridge + 1) // 2
    low_side = 4 * (handle - 1) + (1 if bridge % 2 == 1 else 2)
    high_side = low_side + 2
    if entry_frac is None:
        entry_frac = 1.0 - exit_frac

    e_pt = _side_point(genus, low_side, exit_frac)
    delta1 = direction(a_pt, e_pt)
    c0 = _ray_circle(a_pt, delta1, radius)
    phi0 = math.atan2(c0[1], c0[0])

    q_pt = _side_point(genus, high_side, entry_frac)
    w_pt = (b_pt[0] - w_dist * math.cos(delta1 - math.pi / 2),
            b_pt[1] - w_dist * math.sin(delta1 - math.pi / 2))
    if pre_dist is None:
        aim = w_pt
        tail = [w_pt, b_pt]
    else:
        psi = direction(b_pt, q_pt)
        pre_pt = (b_pt[0] + pre_dist * math.cos(psi), b_pt[1] + pre_dist * math.sin(psi))
        aim = pre_pt
        tail = [pre_pt, w_pt, b_pt]
    c1 = _ray_circle(aim, direction(aim, q_pt), radius)
    phi1 = math.atan2(c1[1], c1[0])

    sweep = (phi1 - phi0) % TWO_PI
    pts = [a_pt]
    for k in range(arc_steps + 1):
        pts.append((radius * math.cos(phi0 + sweep * k / arc_steps),
                    radius * math.sin(phi0 + sweep * k / arc_steps)))
    pts += tail

    turn = polyline_turning(pts)
    if abs(turn - TARGET_TURN) > 1e-9:
        raise ValueError(
            f"bridge detour turning {turn:.6f} != {TARGET_TURN:.6f}; "
            f"adjust exit_frac/radius/w_dist (bridge {bridge})")
    return pts, [bridge]


def arc_edge(a_pt, b_pt, sagitta: float, steps: int = 8):
    """Bowed polyline between two points (for parallel planar edges)."""
    ax, ay = a_pt
    bx, by = b_pt
    dx, dy = bx - ax, by - ay
    length = math.hypot(dx, dy)
    nx, ny = -dy / length, dx / length
    pts = []
    for k in range(steps + 1):
        t = k / steps
        bulge = sagitta * 4.0 * t * (1.0 - t)
        pts.append((ax + t * dx + bulge * nx, ay + t * dy + bulge * ny))
    return pts


def _doc(genus, vertices, edges, bipartition=None):
    doc = {
        "genus": genus,
        "vertices": [{"id": vid, "x": x, "y": y} for vid, (x, y) in vertices],
        "edges": [],
    }
    for rec in edges:
        eid, u, v, pts, crossings = rec[:5]
        entry = {"id": eid, "u": u, "v": v,
                 "polyline": [[x, y] for x, y in pts], "crossings": list(crossings)}
        if len(rec) > 5 and rec[5] is not None:
            entry["dual_length"] = rec[5]
        doc["edges"].append(entry)
    if bipartition:
        doc["bipartition"] = bipartition
    return doc


def validate_canonical(doc, freeform_turning: bool = False) -> EmbeddedGraph:
    """Load a document and check the extra normal-form guarantees of this generator:

    - net turning of every edge is 0 (no crossing) or +3*pi/2 (one + crossing);
    - no two edge drawings cross inside the base polygon;
    - outside the polygon, two edges cross exactly once when they traverse the
      two bridges of one handle, and never otherwise.
    """
    graph = load_embedded_graph(doc)
    g = graph.genus
    for eid in graph.edge_order:
        e = graph.edges[eid]
        if len(e.crossings) > 1:
            raise ValueError(f"edge {eid}: more than one bridge traversal")
        if not freeform_turning:
            target = 0.0 if not e.crossings else math.copysign(TARGET_TURN, e.crossings[0])
            if abs(e.turning - target) > 1e-9:
                raise ValueError(f"edge {eid}: net turning {e.turning:.6f}, expected {target:.6f}")
    if g == 0:
        return graph
    poly = base_polygon(g)
    ids = list(graph.edge_order)
    for i, e1 in enumerate(ids):
        for e2 in ids[i + 1:]:
            p1, p2 = graph.edges[e1].polyline, graph.edges[e2].polyline
            total = count_polyline_crossings(p1, p2)
            out1 = clip_polyline_outside(p1, poly)
            out2 = clip_polyline_outside(p2, poly)
            outside = sum(count_polyline_crossings(s1, s2) for s1 in out1 for s2 in out2)
            c1, c2 = graph.edges[e1].crossings, graph.edges[e2].crossings
            partner = (c1 and c2 and abs(c1[0]) != abs(c2[0])
                       and (abs(c1[0]) + 1) // 2 == (abs(c2[0]) + 1) // 2)
            want = 1 if partner else 0
            if outside != want or total != outside:
                raise ValueError(
                    f"edges {e1},{e2}: {total} crossings ({outside} outside), expected {want}")
    return graph


# ---------------------------------------------------------------------------
# Planar fixtures
# ---------------------------------------------------------------------------


def make_triangle():
    vs = [(0, (0.0, 0.0)), (1, (1.0, 0.0)), (2, (0.4, 0.9))]
    pos = dict(vs)
    es = [("e1", 0, 1, [pos[0], pos[1]], []),
          ("e2", 1, 2, [pos[1], pos[2]], []),
          ("e3", 2, 0, [pos[2], pos[0]], [])]
    return _doc(0, vs, es)


def make_k4():
    vs = [(0, (0.0, 0.0)), (1, (2.0, 0.0)), (2, (1.0, 1.8)), (3, (1.0, 0.62))]
    pos = dict(vs)
    pairs = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    es = [(f"e{k+1}", u, v, [pos[u], pos[v]], []) for k, (u, v) in enumerate(pairs)]
    return _doc(0, vs, es)


def make_two_squares():
    vs = [(0, (0.0, 0.0)), (1, (1.0, 0.0)), (2, (1.0, 1.0)), (3, (0.0, 1.0)),
          (4, (2.0, 0.0)), (5, (2.0, 1.0))]
    pos = dict(vs)
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5), (5, 2)]
    es = [(f"e{k+1}", u, v, [pos[u], pos[v]], []) for k, (u, v) in enumerate(pairs)]
    return _doc(0, vs, es)


def make_theta():
    a, b = (0.0, 0.0), (2.0, 0.0)
    vs = [(0, a), (1, b)]
    es = [("e1", 0, 1, [a, b], []),
          ("e2", 0, 1, arc_edge(a, b, 0.5), []),
          ("e3", 0, 1, arc_edge(a, b, -0.5), [])]
    return _doc(0, vs, es)


def make_five_parallel():
    a, b = (0.0, 0.0), (2.0, 0.0)
    vs = [(0, a), (1, b)]
    es = [("e1", 0, 1, [a, b], []),
          ("e2", 0, 1, arc_edge(a, b, 0.35), []),
          ("e3", 0, 1, arc_edge(a, b, 0.7), []),
          ("e4", 0, 1, arc_edge(a, b, -0.35), []),
          ("e5", 0, 1, arc_edge(a, b, -0.7), [])]
    return _doc(0, vs, es)


def make_flower(petals: int = 3):
    """`petals` triangles sharing one center vertex (center degree 2*petals)."""
    vs = [(0, (0.0, 0.0))]
    es = []
    pos = {0: (0.0, 0.0)}
    k = 1
    for p in range(petals):
        theta = TWO_PI * p / petals + math.pi / 2
        a = unit(theta - 0.45)
        b = unit(theta + 0.45)
        ia, ib = k, k + 1
        vs += [(ia, a), (ib, b)]
        pos[ia], pos[ib] = a, b
        es += [(f"e{3*p+1}", 0, ia, [pos[0], a], []),
               (f"e{3*p+2}", ia, ib, [a, b], []),
               (f"e{3*p+3}", ib, 0, [b, pos[0]], [])]
        k += 2
    return _doc(0, vs, es)


def make_figure_eight():
    """Two nested triangles sharing a degree-4 vertex, end order a,c,d,b."""
    w = (0.0, 0.0)
    t1r, t1l = (1.5, 0.3), (-1.5, 0.3)
    t2r, t2l = (0.5, 0.2), (-0.5, 0.2)
    vs = [(0, w), (1, t1r), (2, t1l), (3, t2r), (4, t2l)]
    es = [("a", 0, 1, [w, t1r], []),
          ("t1", 1, 2, [t1r, t1l], []),
          ("b", 2, 0, [t1l, w], []),
          ("c", 0, 3, [w, t2r], []),
          ("t2", 3, 4, [t2r, t2l], []),
          ("d", 4, 0, [t2l, w], [])]
    return _doc(0, vs, es)


def make_square_patch(nx: int = 3, ny: int = 3, *, bipartite: bool = True,
                      dual_length: float = 1.0):
    """nx-by-ny vertex patch of the unit square lattice (planar, isoradial)."""
    vs = []
    pos = {}
    for j in range(ny):
        for i in range(nx):
            vid = j * nx + i
            pos[vid] = (float(i), float(j))
            vs.append((vid, pos[vid]))
    es = []
    k = 1
    for j in range(ny):
        for i in range(nx):
            vid = j * nx + i
            if i + 1 < nx:
                es.append((f"e{k}", vid, vid + 1, [pos[vid], pos[vid + 1]], [], dual_length))
                k += 1
            if j + 1 < ny:
                es.append((f"e{k}", vid, vid + nx, [pos[vid], pos[vid + nx]], [], dual_length))
                k += 1
    bip = None
    if bipartite:
        bip = {"black": [j * nx + i for j in range(ny) for i in range(nx) if (i + j) % 2 == 0],
               "white": [j * nx + i for j in range(ny) for i in range(nx) if (i + j) % 2 == 1]}
    return _doc(0, vs, es, bip)


# ---------------------------------------------------------------------------
# Surface fixtures
# ---------------------------------------------------------------------------


def make_torus_grid(n: int = 2, m: int = 2, *, spread: float = 0.74):
    """n-by-m toroidal grid drawn in the genus-1 square; rows wrap bridge 1,
    columns wrap bridge 2.

    Bridge-1 detour arcs run at radii above all bridge-2 arcs, so each pair of
    wrapping row/column strands crosses exactly once (the row strand's entry
    leg across the column strand's arc).
    """
    ur, uc = unit(math.pi / 4), unit(3 * math.pi / 4)
    pos = {}
    vs = []
    for j in range(m):
        for i in range(n):
            fr = ((i + 0.5) / n - 0.5) * spread
            fc = ((j + 0.5) / m - 0.5) * spread
            p = (fr * ur[0] + fc * uc[0], fr * ur[1] + fc * uc[1])
            vid = j * n + i
            pos[vid] = p
            vs.append((vid, p))
    es = []
    names = {}

    def vid(i, j):
        return (j % m) * n + (i % n)

    k = 1
    # Exit fracs sit high on the side so each wrapping strand arrives at its
    # target vertex through the angular gap that faces its entry side (the
    # +3*pi/2 turning forces the approach direction to be the exit direction
    # rotated by -pi/2).  Entry fracs and radii follow the rainbow nesting of
    # the band: boundary-nested strands get nested radii.
    row_exit = [0.58 + 0.30 * (j + 0.5) / m for j in range(m)]
    row_entry = [0.62 - 0.40 * (j + 0.5) / m for j in range(m)]
    row_radius = [1.46 - 0.06 * j for j in range(m)]
    col_exit = [0.52 + 0.30 * (n - 1 - i + 0.5) / n for i in range(n)]
    col_entry = [0.66 - 0.40 * (n - 1 - i + 0.5) / n for i in range(n)]
    col_radius = [1.18 - 0.06 * (n - 1 - i) for i in range(n)]
    for j in range(m):
        for i in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            eid = f"e{k}"
            names[("h", i, j)] = eid
            if i + 1 < n:
                es.append((eid, a, b, [pos[a], pos[b]], []))
            else:
                pts, cr = route_bridge_edge(1, pos[a], pos[b], 1,
                                            exit_frac=row_exit[j],
                                            entry_frac=row_entry[j],
                                            radius=row_radius[j],
                                            w_dist=0.05, pre_dist=0.12)
                es.append((eid, a, b, pts, cr))
            k += 1
    for j in range(m):
        for i in range(n):
            a, b = vid(i, j), vid(i, j + 1)
            eid = f"e{k}"
            names[("v", i, j)] = eid
            if j + 1 < m:
                es.append((eid, a, b, [pos[a], pos[b]], []))
            else:
                pts, cr = route_bridge_edge(1, pos[a], pos[b], 2,
                                            exit_frac=col_exit[i],
                                            entry_frac=col_entry[i],
                                            radius=col_radius[i],
                                            w_dist=0.05, pre_dist=0.12)
                es.append((eid, a, b, pts, cr))
            k += 1
    bip = None
    if n % 2 == 0 and m % 2 == 0:
        bip = {"black": [j * n + i for j in range(m) for i in range(n) if (i + j) % 2 == 0],
               "white": [j * n + i for j in range(m) for i in range(n) if (i + j) % 2 == 1]}
    doc = _doc(1, vs, es, bip)
    doc["edge_names"] = {f"{kind},{i},{j}": eid for (kind, i, j), eid in names.items()}
    return doc


def make_genus2_bouquet():
    """Two vertices joined by one plain edge and one edge over each of the
    four bridges of the genus-2 octagon.

    Each vertex owns four consecutive polygon sides (u: z7,z8,z1,z2 and
    v: z3..z6), which is what makes the ten in-polygon legs drawable without
    crossings; edges through bridges 3 and 4 are therefore routed from v.
    """
    u, v = (0.24, -0.02), (-0.24, 0.03)
    vs = [(0, u), (1, v)]
    es = [("e0", 0, 1, [u, v], [])]
    p1, c1 = route_bridge_edge(2, u, v, 1, exit_frac=0.62, radius=1.21, w_dist=0.05)
    es.append(("e1", 0, 1, p1, c1))
    p2, c2 = route_bridge_edge(2, u, v, 2, exit_frac=0.62, radius=1.27, w_dist=0.05)
    es.append(("e2", 0, 1, p2, c2))
    p3, c3 = route_bridge_edge(2, v, u, 3, exit_frac=0.62, radius=1.33, w_dist=0.05)
    es.append(("e3", 1, 0, p3, c3))
    p4, c4 = route_bridge_edge(2, v, u, 4, exit_frac=0.62, radius=1.39, w_dist=0.05)
    es.append(("e4", 1, 0, p4, c4))
    return _doc(2, vs, es)


# ---------------------------------------------------------------------------
# Bundled corpus
# ---------------------------------------------------------------------------

BUNDLED = {
    "triangle": make_triangle,
    "k4": make_k4,
    "theta": make_theta,
    "two_squares": make_two_squares,
    "torus_2x2": lambda: make_torus_grid(2, 2),
    "torus_3x3": lambda: make_torus_grid(3, 3),
    "genus2_bouquet": make_genus2_bouquet,
}


def fixture_document(name: str) -> dict:
    """Bundled fixture document by name (from package data when present)."""
    try:
        path = resources.files("surfising").joinpath(f"data/{name}.json")
        with path.open() as fh:
            return json.load(fh)
    except FileNotFoundError:
        if name in BUNDLED:
            return BUNDLED[name]()
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(BUNDLED)}")


def load_fixture(name: str) -> EmbeddedGraph:
    return load_embedded_graph(fixture_document(name))


def write_bundled(directory) -> list:
    """Regenerate the bundled fixture JSON files."""
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, builder in BUNDLED.items():
        doc = builder()
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


if __name__ == "__main__":  # regenerate package data
    import os

    here = os.path.dirname(__file__)
    for p in write_bundled(os.path.join(here, "data")):
        print(p)
