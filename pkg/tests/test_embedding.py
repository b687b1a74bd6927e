import copy
import json
import math
import random

import numpy as np
import pytest

from surfising.embedding import (
    EmbeddingError,
    crossing_vector,
    homology_class,
    is_critical_embedding,
    load_embedded_graph,
    to_document,
)
from surfising.fixtures import (
    fixture_document,
    make_square_patch,
    make_torus_grid,
    make_triangle,
    validate_canonical,
)


def test_triangle_loads(triangle):
    assert triangle.genus == 0
    assert len(triangle.vertex_order) == 3
    assert len(triangle.edge_order) == 3
    assert all(not triangle.edges[e].crossings for e in triangle.edge_order)


def test_bogus_crossing_rejected():
    doc = make_triangle()
    doc["genus"] = 1
    doc["edges"][0]["crossings"] = [1]  # polyline never leaves the polygon
    with pytest.raises(EmbeddingError):
        load_embedded_graph(doc)


def test_crossings_must_match_drawing():
    doc = make_torus_grid(2, 2)
    bridge_edge = next(e for e in doc["edges"] if e["crossings"])
    bridge_edge["crossings"] = []
    with pytest.raises(EmbeddingError):
        load_embedded_graph(doc)


def test_torus22_crossing_totals(torus22):
    total = crossing_vector(torus22, torus22.edge_order)
    assert total.tolist() == [2, 2]


def test_nonbipartite_edge_rejected():
    doc = make_triangle()
    doc["bipartition"] = {"white": [0, 2], "black": [1]}
    with pytest.raises(EmbeddingError):
        load_embedded_graph(doc)  # odd cycle cannot be bipartite


def test_loop_rejected():
    doc = make_triangle()
    doc["edges"][0]["v"] = doc["edges"][0]["u"]
    with pytest.raises(EmbeddingError):
        load_embedded_graph(doc)


def test_document_roundtrip(torus22):
    doc = to_document(torus22)
    again = load_embedded_graph(json.dumps(doc))
    assert again.edge_order == torus22.edge_order
    assert again.edges["e3"].crossings == torus22.edges["e3"].crossings


# -- crossing vectors / homology ------------------------------------------------


def test_crossing_vector_empty(torus22):
    assert crossing_vector(torus22, []).tolist() == [0, 0]


def test_crossing_vector_unknown_edge(torus22):
    with pytest.raises(KeyError):
        crossing_vector(torus22, ["nope"])


def test_contractible_square_zero_vector(torus22, torus22_names):
    names = torus22_names
    square = [names[("h", "0", "0")], names[("v", "1", "0")],
              names[("h", "0", "1")], names[("v", "0", "0")]]
    assert crossing_vector(torus22, square).tolist() == [0, 0]
    assert homology_class(torus22, square).tolist() == [0, 0]


def test_meridian_row_class(torus22, torus22_names):
    names = torus22_names
    row0 = [names[("h", "0", "0")], names[("h", "1", "0")]]
    assert crossing_vector(torus22, row0).tolist() == [1, 0]
    assert homology_class(torus22, row0).tolist() == [1, 0]
    both_rows = row0 + [names[("h", "0", "1")], names[("h", "1", "1")]]
    assert crossing_vector(torus22, both_rows).tolist() == [2, 0]
    assert homology_class(torus22, both_rows).tolist() == [0, 0]


def test_column_class(torus22, torus22_names):
    names = torus22_names
    col0 = [names[("v", "0", "0")], names[("v", "0", "1")]]
    assert homology_class(torus22, col0).tolist() == [0, 1]


def test_homology_requires_even(torus22, torus22_names):
    with pytest.raises(ValueError):
        homology_class(torus22, [torus22_names[("h", "0", "0")]])


def test_homology_additive_on_symmetric_difference(torus22, torus22_names):
    names = torus22_names
    row0 = {names[("h", "0", "0")], names[("h", "1", "0")]}
    col0 = {names[("v", "0", "0")], names[("v", "0", "1")]}
    sym = row0 ^ col0
    lhs = homology_class(torus22, sym)
    rhs = (homology_class(torus22, row0) + homology_class(torus22, col0)) % 2
    assert lhs.tolist() == rhs.tolist()


def test_crossing_vector_additive(torus22):
    eids = list(torus22.edge_order)
    a, b = eids[:3], eids[3:]
    total = crossing_vector(torus22, a) + crossing_vector(torus22, b)
    assert crossing_vector(torus22, eids).tolist() == total.tolist()


# -- criticality -----------------------------------------------------------------


def test_square_patch_is_critical(patch33):
    ok, diag = is_critical_embedding(patch33, 1e-6)
    assert ok
    radius = diag["faces"][0]["radius"]
    assert abs(radius - math.sqrt(2) / 2) < 1e-9


def test_criticality_invariant_under_rigid_motion():
    doc = make_square_patch(3, 3)
    angle, dx, dy = 0.7, 2.5, -1.25
    c, s = math.cos(angle), math.sin(angle)

    def move(p):
        return [c * p[0] - s * p[1] + dx, s * p[0] + c * p[1] + dy]

    for v in doc["vertices"]:
        v["x"], v["y"] = move((v["x"], v["y"]))
    for e in doc["edges"]:
        e["polyline"] = [move(p) for p in e["polyline"]]
    ok, _ = is_critical_embedding(load_embedded_graph(doc), 1e-6)
    assert ok


def test_uniform_rectangles_are_critical():
    doc = make_square_patch(3, 3)
    for v in doc["vertices"]:
        v["x"] *= 2.0
    for e in doc["edges"]:
        e["polyline"] = [[x * 2.0, y] for x, y in e["polyline"]]
    ok, _ = is_critical_embedding(load_embedded_graph(doc), 1e-6)
    assert ok  # congruent rectangular faces share one circumradius


def test_perturbed_patch_not_critical():
    doc = make_square_patch(3, 3)
    victim = doc["vertices"][4]  # interior vertex
    victim["x"] += 0.3
    for e in doc["edges"]:
        coords = {v["id"]: (v["x"], v["y"]) for v in doc["vertices"]}
        e["polyline"] = [list(coords[e["u"]]), list(coords[e["v"]])]
    ok, diag = is_critical_embedding(load_embedded_graph(doc), 1e-6)
    assert not ok
    assert diag["violation"] is not None
    assert diag["violation"]["spread"] > 1e-6


def test_degenerate_face_errors():
    doc = {
        "genus": 0,
        "vertices": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 1.0, "y": 0.0},
                     {"id": 2, "x": 2.0, "y": 0.0}, {"id": 3, "x": 1.0, "y": -0.9}],
        "edges": [
            {"id": "a", "u": 0, "v": 1, "polyline": [[0, 0], [1, 0]], "crossings": []},
            {"id": "b", "u": 1, "v": 2, "polyline": [[1, 0], [2, 0]], "crossings": []},
            {"id": "c", "u": 2, "v": 0, "polyline": [[2, 0], [1.0, 0.9], [0, 0]],
             "crossings": []},
            {"id": "d", "u": 0, "v": 3, "polyline": [[0, 0], [1.0, -0.9]],
             "crossings": []},
            {"id": "e", "u": 3, "v": 2, "polyline": [[1.0, -0.9], [2, 0]],
             "crossings": []},
        ],
    }
    graph = load_embedded_graph(doc)
    with pytest.raises(ValueError, match="degenerate|collinear"):
        is_critical_embedding(graph, 1e-6)
