import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfising.polyring import (
    MultiPoly,
    graded_sqrt,
    max_coeff_diff,
    poly_eval,
    poly_mul,
    render,
    snap_to_integers,
    substitute,
)


def x(name, c=1.0, cap=None):
    return MultiPoly.variable(name, c, cap)


def test_mul_basic():
    p = MultiPoly.constant(1) + x("x1")
    q = MultiPoly.constant(1) + x("x2")
    prod = poly_mul(p, q, None)
    assert prod.coefficient({}) == 1
    assert prod.coefficient({"x1": 1}) == 1
    assert prod.coefficient({"x2": 1}) == 1
    assert prod.coefficient({"x1": 1, "x2": 1}) == 1


def test_mul_cap_drops_square():
    p = MultiPoly.constant(1) + x("x1")
    prod = poly_mul(p, p, 1)
    assert prod.coefficient({}) == 1
    assert prod.coefficient({"x1": 1}) == 2
    assert prod.coefficient({"x1": 2}) == 0


sparse_polys = st.builds(
    lambda entries: MultiPoly(
        {tuple(sorted({f"x{v}": e for v, e in term}.items())): c
         for term, c in entries},
    ),
    st.lists(
        st.tuples(
            st.lists(st.tuples(st.integers(0, 4), st.integers(1, 3)),
                     min_size=0, max_size=3, unique_by=lambda t: t[0]),
            st.complex_numbers(max_magnitude=5, allow_nan=False,
                               allow_infinity=False),
        ),
        min_size=0, max_size=5,
    ),
)


@given(sparse_polys, sparse_polys)
@settings(max_examples=100, deadline=None)
def test_mul_commutative(p, q):
    assert max_coeff_diff(poly_mul(p, q), poly_mul(q, p)) == 0


@given(sparse_polys, sparse_polys, sparse_polys)
@settings(max_examples=60, deadline=None)
def test_mul_associative_distributive(p, q, r):
    lhs = poly_mul(poly_mul(p, q), r)
    rhs = poly_mul(p, poly_mul(q, r))
    scale = max((abs(c) for c in lhs.terms.values()), default=1.0)
    assert max_coeff_diff(lhs, rhs) <= 1e-12 * max(1.0, scale)
    assert max_coeff_diff(poly_mul(p, q + r), poly_mul(p, q) + poly_mul(p, r)) \
        <= 1e-12 * max(1.0, scale)


@given(sparse_polys, st.integers(2, 6))
@settings(max_examples=60, deadline=None)
def test_truncation_coherence(p, cap):
    q = x("x0") + x("x1", 2.0)
    full = poly_mul(p, q, cap)
    smaller = cap - 1
    assert full.truncate(smaller) == poly_mul(p, q, smaller)


def test_graded_sqrt_trivial():
    one = MultiPoly.constant(1, 4)
    assert graded_sqrt(one, 4) == one


def test_graded_sqrt_perfect_square():
    f = MultiPoly.constant(1, 4) + x("x1", cap=4) + x("x2", cap=4)
    assert graded_sqrt(poly_mul(f, f, 4), 4) == f


@given(sparse_polys)
@settings(max_examples=80, deadline=None)
def test_graded_sqrt_roundtrip(p):
    cap = 6
    f = (MultiPoly.constant(1) + p - MultiPoly.constant(p.constant_term())) \
        .truncate(cap)
    square = poly_mul(f, f, cap)
    root = graded_sqrt(square, cap)
    scale = max((abs(c) for c in f.terms.values()), default=1.0)
    assert max_coeff_diff(root, f) <= 1e-9 * max(1.0, scale ** 2)


def test_graded_sqrt_needs_unit_constant():
    with pytest.raises(ValueError):
        graded_sqrt(x("x1"), 3)


def test_eval_examples():
    p = MultiPoly.constant(1) + MultiPoly.monomial({"x1": 1, "x2": 1, "x3": 1})
    assert poly_eval(p, {"x1": 1, "x2": 1, "x3": 1}) == 2
    assert poly_eval(p, {"x1": 0, "x2": 0, "x3": 0}) == p.constant_term()
    with pytest.raises(KeyError):
        poly_eval(p, {"x1": 1})


def test_snap_and_render():
    p = MultiPoly({(): 1.0 + 1e-12, (("x1", 1),): 2.0 - 3e-13})
    snapped, residual = snap_to_integers(p)
    assert residual < 1e-11
    assert render(snapped) == "1 + 2*x1"


def test_substitute_renames():
    p = MultiPoly.monomial({"a": 2, "b": 1}, 3.0)
    q = substitute(p, {"a": "x"})
    assert q.coefficient({"x": 2, "b": 1}) == 3.0
