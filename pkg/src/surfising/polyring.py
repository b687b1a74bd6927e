"""Sparse multivariate polynomials with complex coefficients and a total-degree cap.

Terms are stored as ``{exponent_key: coefficient}`` where an exponent key is a
sorted tuple of ``(variable, power)`` pairs with strictly positive integer
powers.  Variables are plain strings (edge ids).  All ring operations drop
terms above the cap and clean coefficients below ``eps_zero``, so a polynomial
truncated at degree D is always exactly the degree-≤D window of the untruncated
result.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Mapping

EPS_ZERO = 1e-10

ExpKey = tuple  # tuple of (str, int) pairs, sorted by variable


def _key_degree(key: ExpKey) -> int:
    return sum(p for _, p in key)


def _merge_keys(a: ExpKey, b: ExpKey) -> ExpKey:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, p in b:
        d[v] = d.get(v, 0) + p
    return tuple(sorted(d.items()))


def _grlex(key: ExpKey):
    # graded-lexicographic sort key: total degree first, then variable/exponent order
    return (_key_degree(key), key)


class MultiPoly:
    """Immutable sparse polynomial. Use module functions or operators."""

    __slots__ = ("terms", "cap")

    def __init__(self, terms: Mapping[ExpKey, complex] | None = None,
                 cap: int | None = None, *, _clean: bool = True):
        if terms is None:
            terms = {}
        if _clean:
            cleaned = {}
            for key, c in terms.items():
                if cap is not None and _key_degree(key) > cap:
                    continue
                if abs(c) < EPS_ZERO:
                    continue
                cleaned[key] = complex(c)
            terms = cleaned
        self.terms = dict(terms)
        self.cap = cap

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(c: complex, cap: int | None = None) -> "MultiPoly":
        return MultiPoly({(): complex(c)}, cap)

    @staticmethod
    def zero(cap: int | None = None) -> "MultiPoly":
        return MultiPoly({}, cap)

    @staticmethod
    def variable(name: str, coeff: complex = 1.0, cap: int | None = None) -> "MultiPoly":
        return MultiPoly({((name, 1),): complex(coeff)}, cap)

    @staticmethod
    def monomial(powers: Mapping[str, int], coeff: complex = 1.0,
                 cap: int | None = None) -> "MultiPoly":
        key = tuple(sorted((v, p) for v, p in powers.items() if p > 0))
        return MultiPoly({key: complex(coeff)}, cap)

    # -- queries -----------------------------------------------------------

    def degree(self) -> int:
        return max((_key_degree(k) for k in self.terms), default=0)

    def variables(self) -> set:
        out = set()
        for key in self.terms:
            for v, _ in key:
                out.add(v)
        return out

    def constant_term(self) -> complex:
        return self.terms.get((), 0j)

    def coefficient(self, powers: Mapping[str, int]) -> complex:
        key = tuple(sorted((v, p) for v, p in powers.items() if p > 0))
        return self.terms.get(key, 0j)

    def graded_part(self, d: int) -> "MultiPoly":
        return MultiPoly({k: c for k, c in self.terms.items() if _key_degree(k) == d},
                         self.cap, _clean=False)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "MultiPoly":
        other = _coerce(other, self.cap)
        cap = _min_cap(self.cap, other.cap)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return MultiPoly(out, cap)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({k: -c for k, c in self.terms.items()}, self.cap, _clean=False)

    def __sub__(self, other) -> "MultiPoly":
        return self + (-_coerce(other, self.cap))

    def __rsub__(self, other) -> "MultiPoly":
        return _coerce(other, self.cap) + (-self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, float, complex)):
            return MultiPoly({k: c * other for k, c in self.terms.items()}, self.cap)
        return poly_mul(self, other, _min_cap(self.cap, other.cap))

    __rmul__ = __mul__

    def truncate(self, cap: int | None) -> "MultiPoly":
        if cap is None:
            return MultiPoly(self.terms, None, _clean=False)
        return MultiPoly({k: c for k, c in self.terms.items() if _key_degree(k) <= cap}, cap,
                         _clean=False)

    # -- rendering ---------------------------------------------------------

    def __repr__(self):
        return f"MultiPoly({render(self)!r}, cap={self.cap})"


def _coerce(x, cap) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    return MultiPoly.constant(x, cap)


def _min_cap(a: int | None, b: int | None):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def poly_mul(p: MultiPoly, q: MultiPoly, cap: int | None = None) -> MultiPoly:
    """Product of p and q with every term of total degree > cap dropped."""
    if cap is None:
        cap = _min_cap(p.cap, q.cap)
    out: dict = {}
    if len(p.terms) > len(q.terms):
        p, q = q, p
    for ka, ca in p.terms.items():
        da = _key_degree(ka)
        for kb, cb in q.terms.items():
            if cap is not None and da + _key_degree(kb) > cap:
                continue
            k = _merge_keys(ka, kb)
            out[k] = out.get(k, 0j) + ca * cb
    return MultiPoly(out, cap)


def graded_sqrt(p: MultiPoly, cap: int | None = None) -> MultiPoly:
    """Square root F of p with F(0)=1, via the graded recursion 2 F_d = p_d - sum F_k F_{d-k}.

    Requires constant term 1 (within EPS_ZERO).
    """
    if cap is None:
        cap = p.cap
    if cap is None:
        cap = p.degree()
    if abs(p.constant_term() - 1.0) > EPS_ZERO:
        raise ValueError(f"graded_sqrt requires constant term 1, got {p.constant_term()}")
    parts: list[dict] = [{(): 1.0 + 0j}]
    for d in range(1, cap + 1):
        acc: dict = {}
        for k, c in p.graded_part(d).terms.items():
            acc[k] = acc.get(k, 0j) + c
        for k1 in range(1, d):
            k2 = d - k1
            if k2 < k1:
                break
            factor = 1.0 if k1 == k2 else 2.0
            for ka, ca in parts[k1].items():
                for kb, cb in parts[k2].items():
                    k = _merge_keys(ka, kb)
                    acc[k] = acc.get(k, 0j) - factor * ca * cb
        parts.append({k: c / 2.0 for k, c in acc.items() if abs(c) > EPS_ZERO / 2})
    out: dict = {}
    for part in parts:
        for k, c in part.items():
            out[k] = c
    return MultiPoly(out, cap)


def poly_eval(p: MultiPoly, assignment: Mapping[str, complex]) -> complex:
    """Evaluate p at the given variable assignment; every variable must be covered."""
    missing = p.variables() - set(assignment)
    if missing:
        raise KeyError(f"missing variables in assignment: {sorted(missing)}")
    total = 0j
    for key, c in p.terms.items():
        val = c
        for v, e in key:
            val *= assignment[v] ** e
        total += val
    return total


def substitute(p: MultiPoly, mapping: Mapping[str, str]) -> MultiPoly:
    """Rename variables of p through mapping (variables not mapped are kept)."""
    out: dict = {}
    for key, c in p.terms.items():
        d: dict = {}
        for v, e in key:
            w = mapping.get(v, v)
            d[w] = d.get(w, 0) + e
        k = tuple(sorted(d.items()))
        out[k] = out.get(k, 0j) + c
    return MultiPoly(out, p.cap)


def snap_to_integers(p: MultiPoly) -> tuple[MultiPoly, float]:
    """Round every coefficient to the nearest integer; return (snapped, max residual)."""
    out: dict = {}
    residual = 0.0
    for key, c in p.terms.items():
        n = round(c.real)
        residual = max(residual, abs(c - n))
        if n != 0:
            out[key] = complex(n)
    return MultiPoly(out, p.cap, _clean=False), residual


def max_coeff_diff(p: MultiPoly, q: MultiPoly) -> float:
    """Largest absolute coefficient difference between two polynomials."""
    keys = set(p.terms) | set(q.terms)
    return max((abs(p.terms.get(k, 0j) - q.terms.get(k, 0j)) for k in keys), default=0.0)


def _fmt_complex(c: complex, digits: int = 12) -> str:
    re, im = c.real, c.imag
    if abs(im) < EPS_ZERO:
        if abs(re - round(re)) < EPS_ZERO:
            return str(int(round(re)))
        return f"{re:.{digits}g}"
    return f"({re:.{digits}g}{im:+.{digits}g}i)"


def render(p: MultiPoly, integer_snap: bool = False) -> str:
    """Text form, terms in graded-lex order. With integer_snap, coefficients print as ints."""
    if not p.terms:
        return "0"
    pieces = []
    for key in sorted(p.terms, key=_grlex):
        c = p.terms[key]
        if integer_snap:
            c = complex(round(c.real))
            if c == 0:
                continue
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in key)
        if not mono:
            pieces.append(_fmt_complex(c))
        elif c == 1:
            pieces.append(mono)
        elif c == -1:
            pieces.append(f"-{mono}")
        else:
            pieces.append(f"{_fmt_complex(c)}*{mono}")
    out = " + ".join(pieces)
    return out.replace("+ -", "- ")
