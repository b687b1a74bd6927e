import itertools
import math

import numpy as np
import pytest

from surfising.cycles import (
    PrimeReducedCycle,
    arf,
    check_rotation_identity,
    cycle,
    cycle_crossing_vector,
    decompose_even_set,
    enumerate_prime_reduced_cycles,
    noncrossing_pairing_chords,
    quadratic_form,
    rot0,
    rot_s,
    self_intersections,
    spin_indices,
)
from surfising.bruteforce import even_subsets
from surfising.embedding import load_embedded_graph


# -- enumeration ------------------------------------------------------------------


def test_triangle_single_class(triangle):
    cycles = enumerate_prime_reduced_cycles(triangle, 3)
    assert len(cycles) == 1
    assert len(cycles[0]) == 3


def test_single_edge_no_cycles():
    doc = {"genus": 0,
           "vertices": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}],
           "edges": [{"id": "e", "u": 0, "v": 1,
                      "polyline": [[0, 0], [1, 0]], "crossings": []}]}
    graph = load_embedded_graph(doc)
    assert enumerate_prime_reduced_cycles(graph, 6) == []


def test_theta_three_two_cycles(theta):
    cycles = enumerate_prime_reduced_cycles(theta, 2)
    assert len(cycles) == 3
    assert all(len(p) == 2 for p in cycles)


def test_no_rotations_or_inverses_among_representatives(torus22):
    cycles = enumerate_prime_reduced_cycles(torus22, 5)
    seen = set()
    for p in cycles:
        for variant in (p, p.inverse()):
            seq = variant.seq
            for k in range(len(seq)):
                seen_key = seq[k:] + seq[:k]
                assert seen_key not in seen
                seen.add(seen_key)


def test_enumeration_complete_against_naive(theta):
    # naive: all closed non-backtracking walks by brute force over products
    dirs = theta.dirs()
    naive = set()
    for length in (2, 3, 4):
        for walk in itertools.product(dirs, repeat=length):
            ok = True
            for i in range(length):
                o, o2 = walk[i], walk[(i + 1) % length]
                if theta.head(o) != theta.tail(o2) or o2 == theta.reverse(o):
                    ok = False
                    break
            if not ok:
                continue
            p = PrimeReducedCycle(tuple(walk))
            try:
                canonical = cycle(theta, walk)
            except ValueError:
                continue  # proper power
            naive.add(canonical.seq)
    ours = {p.seq for p in enumerate_prime_reduced_cycles(theta, 4)}
    assert ours == naive


# -- decomposition -----------------------------------------------------------------


def test_decompose_triangle(triangle):
    out = decompose_even_set(triangle, triangle.edge_order)
    assert len(out) == 1
    assert len(out[0]) == 3


def test_decompose_two_disjoint_squares(patch33):
    # two opposite corner cells of the 3x3-vertex patch share no edge
    faces = patch33.bounded_faces()
    f0 = {o[0] for o in faces[0]}
    disjoint = next({o[0] for o in f} for f in faces[1:]
                    if not ({o[0] for o in f} & f0))
    out = decompose_even_set(patch33, sorted(f0 | disjoint))
    assert len(out) == 2
    assert {len(p) for p in out} == {4}


def test_decompose_figure_eight_noncrossing(figure_eight):
    even = list(figure_eight.edge_order)
    out = decompose_even_set(figure_eight, even)
    covered = sorted(e for p in out for e in p.edges())
    assert covered == sorted(even)
    assert all(p.is_edge_simple() for p in out)
    assert noncrossing_pairing_chords(figure_eight, out)


def test_decompose_rejects_odd_set(triangle):
    with pytest.raises(ValueError):
        decompose_even_set(triangle, [triangle.edge_order[0]])


def test_decompose_every_even_set(torus22):
    eids = list(torus22.edge_order)
    for mask in even_subsets(torus22):
        if mask == 0:
            continue
        subset = [eids[i] for i in range(len(eids)) if mask >> i & 1]
        out = decompose_even_set(torus22, subset)
        covered = sorted(e for p in out for e in p.edges())
        assert covered == sorted(subset)
        assert noncrossing_pairing_chords(torus22, out)


# -- rotations and self-intersections ------------------------------------------------


def test_rot0_convex_polygon(triangle):
    p = enumerate_prime_reduced_cycles(triangle, 3)[0]
    assert rot0(triangle, p) == 1


def test_figure_eight_rot_and_selfint(figure_eight):
    p = cycle(figure_eight, [("a", True), ("t1", True), ("b", True),
                             ("c", True), ("t2", True), ("d", True)])
    assert self_intersections(figure_eight, p) == 1
    assert rot0(figure_eight, p) == 0


def test_rot0_equals_inverse(torus22):
    for p in enumerate_prime_reduced_cycles(torus22, 5):
        assert rot0(torus22, p) == rot0(torus22, p.inverse())


def test_rot_s_reduces_to_rot0(torus22):
    for p in enumerate_prime_reduced_cycles(torus22, 4):
        assert rot_s(torus22, p, (0, 0)) == rot0(torus22, p)


def test_rot_s_contractible_unchanged(torus22, torus22_names):
    names = torus22_names
    square = cycle(torus22, [(names[("h", "0", "0")], True),
                             (names[("v", "1", "0")], True),
                             (names[("h", "0", "1")], False),
                             (names[("v", "0", "0")], False)])
    assert (cycle_crossing_vector(torus22, square) % 2).tolist() == [0, 0]
    for s in spin_indices(1):
        assert rot_s(torus22, square, s) == rot0(torus22, square)


def test_rot_s_meridian_shift(torus22, torus22_names):
    names = torus22_names
    row = cycle(torus22, [(names[("h", "0", "0")], True),
                          (names[("h", "1", "0")], True)])
    assert cycle_crossing_vector(torus22, row).tolist() == [1, 0]
    assert rot_s(torus22, row, (1, 0)) == (rot0(torus22, row) + 1) % 2


def test_bridge_pair_cycle_counts_square_crossing(torus22):
    # cycles through one wrapping row edge and one wrapping column edge cross
    # themselves inside the bridge square: the drawn-curve count exceeds the
    # surface count by exactly r_1(p) * r_2(p)
    found = 0
    for p in enumerate_prime_reduced_cycles(torus22, 6):
        r = cycle_crossing_vector(torus22, p)
        drawn = self_intersections(torus22, p)
        surface = self_intersections(torus22, p, include_bridge_squares=False)
        assert drawn - surface == r[0] * r[1]
        if r[0] * r[1] % 2 == 1:
            found += 1
    assert found > 0


def test_whitney_identity_all_fixtures(triangle, k4, theta, two_squares,
                                       torus22, bouquet):
    for graph in (triangle, k4, theta, two_squares, torus22, bouquet):
        for p in enumerate_prime_reduced_cycles(graph, 6):
            assert rot0(graph, p) == (1 + self_intersections(graph, p)) % 2


# -- quadratic forms -----------------------------------------------------------------


def test_q0_basis_values_and_arf_genus1():
    q = quadratic_form((0, 0))
    assert q((1, 0)) == 0 and q((0, 1)) == 0
    assert arf(q) == 0


def test_q11_arf_one():
    q = quadratic_form((1, 1))
    assert q((1, 0)) == 1 and q((0, 1)) == 1
    assert arf(q) == 1


@pytest.mark.parametrize("genus", [1, 2])
def test_polarization_identity_exhaustive(genus):
    def dot(x, y):
        return sum(x[2 * i] * y[2 * i + 1] + x[2 * i + 1] * y[2 * i]
                   for i in range(genus)) % 2

    for s in spin_indices(genus):
        q = quadratic_form(s)
        for x in spin_indices(genus):
            for y in spin_indices(genus):
                z = tuple((a + b) % 2 for a, b in zip(x, y))
                assert q(z) == (q(x) + q(y) + dot(x, y)) % 2


@pytest.mark.parametrize("genus", [1, 2])
def test_forms_distinct_and_exhaustive(genus):
    tables = {tuple(sorted(quadratic_form(s).table().items()))
              for s in spin_indices(genus)}
    assert len(tables) == 4 ** genus


@pytest.mark.parametrize("genus", [1, 2])
def test_arf_matches_gauss_sum_oracle(genus):
    # democratic definition: sum_h (-1)^{q(h)} = +-2^g, Arf = [sign < 0]
    for s in spin_indices(genus):
        q = quadratic_form(s)
        gauss = sum((-1) ** q(h) for h in spin_indices(genus))
        assert abs(gauss) == 2 ** genus
        assert arf(q) == (1 if gauss < 0 else 0)


# -- the rotation identity -------------------------------------------------------------


def test_rotation_identity_contractible(triangle):
    p = enumerate_prime_reduced_cycles(triangle, 3)[0]
    assert check_rotation_identity(triangle, p, ())


def test_rotation_identity_figure_eight(figure_eight):
    p = cycle(figure_eight, [("a", True), ("t1", True), ("b", True),
                             ("c", True), ("t2", True), ("d", True)])
    assert check_rotation_identity(figure_eight, p, ())


def test_rotation_identity_torus_all_spins(torus22):
    count = 0
    for p in enumerate_prime_reduced_cycles(torus22, 8):
        if not p.is_edge_simple():
            continue
        for s in spin_indices(1):
            assert check_rotation_identity(torus22, p, s)
        count += 1
    assert count > 10


def test_rotation_identity_rejects_edge_reuse(theta):
    reused = next(p for p in enumerate_prime_reduced_cycles(theta, 4)
                  if not p.is_edge_simple())
    with pytest.raises(ValueError):
        check_rotation_identity(theta, reused, ())


def test_form_well_defined_on_homologous_sets(torus22, torus22_names):
    # two homologous even sets get the same value from the rotation sum
    names = torus22_names
    row0 = [names[("h", "0", "0")], names[("h", "1", "0")]]
    row1 = [names[("h", "0", "1")], names[("h", "1", "1")]]

    def q_prime(graph, eset, s):
        total = 0
        for p in decompose_even_set(graph, eset):
            total += 1 + rot_s(graph, p, s)
        return total % 2

    for s in spin_indices(1):
        assert q_prime(torus22, row0, s) == q_prime(torus22, row1, s)
        # and the value is the closed form on the class
        q = quadratic_form(s)
        assert q_prime(torus22, row0, s) == q((1, 0))
