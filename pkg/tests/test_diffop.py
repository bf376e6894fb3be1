from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from _support import CTX, polynomials, static_polynomials
from ncsym.diffop import (DiffOp, DivisionError, ckv_operator, compose, covariant_schrodinger,
                          first_order_symmetries, format_diffop, free_schrodinger, higher_symmetries,
                          is_symmetry, laplacian_lightcone, lightcone_reduce, parse_diffop, reduce_ckt_symbol,
                          relift_symbol, right_divide, solve_flat_ckt, symbol_space_equal)
from ncsym.expr import chart
from ncsym.field import QI
from ncsym.geometry import GeometryError, flat_spacetime, make_vomega_spacetime
from ncsym.phase import SymTensor, solve_sk_tensors
from ncsym.symmetry import solve_sk_vectors

COORDS = ("t", "x", "y", "z")
OPCTX = chart(3, momenta=False)
FLAT = flat_spacetime()


@st.composite
def operators(draw, max_order=2, ctx=CTX):
    terms = {}
    for _ in range(draw(st.integers(0, 3))):
        alpha = tuple(draw(st.integers(0, 1 if k else max_order)) for k in range(4))
        if sum(alpha) > max_order:
            continue
        terms[alpha] = draw(polynomials(max_terms=2, max_deg=2, complex_coeffs=True))
    return DiffOp(ctx, COORDS, terms)


def op(text, ctx=CTX):
    return parse_diffop(text, ctx, COORDS)


def test_composition_normal_orders():
    assert compose(op("dx"), op("x")) == op("x*dx + 1")
    assert compose(op("dx^2"), op("x^2")) == op("x^2*dx^2 + 4*x*dx + 2")


@given(operators(), operators(), polynomials(max_terms=3, max_deg=3))
def test_composition_acts_as_composition(P, Q, f):
    assert compose(P, Q).apply(f) == P.apply(Q.apply(f))


@given(operators(max_order=1), operators(max_order=1), operators(max_order=1))
def test_composition_is_associative(P, Q, R):
    assert compose(compose(P, Q), R) == compose(P, compose(Q, R))


@given(operators(max_order=3))
def test_right_division_reconstruction(P):
    L = free_schrodinger(CTX)
    q, r = right_divide(P, L)
    assert compose(q, L) + r == P
    assert all(a[0] == 0 for a in r.terms)


@given(static_polynomials(max_terms=2), st.lists(static_polynomials(max_terms=2), min_size=3, max_size=3),
       operators(max_order=2))
def test_right_division_by_covariant_operator(V, A, P):
    L = covariant_schrodinger(V, A)
    q, r = right_divide(P, L)
    assert compose(q, L) + r == P
    assert all(a[0] == 0 for a in r.terms)


def test_division_preconditions():
    with pytest.raises(DivisionError):
        right_divide(op("dx"), op("t*dt"))
    with pytest.raises(DivisionError):
        right_divide(op("dx"), op("dt^2"))


def test_symmetry_certificates():
    L = free_schrodinger(CTX)
    cert = is_symmetry(op("x"), L)
    assert not cert.holds and cert.reconstructs()
    assert cert.residual == op("m^-1*dx")
    good = is_symmetry(op("t*dx - i*m*x"), L)
    assert good.holds and good.reconstructs()


@given(static_polynomials(max_terms=2), st.lists(static_polynomials(max_terms=2), min_size=3, max_size=3))
def test_covariant_operator_lower_order_terms(V, A):
    L = covariant_schrodinger(V, A)
    div = sum((a.diff(c) for a, c in zip(A, ("x", "y", "z"))), CTX.zero())
    sq = sum((a * a for a in A), CTX.zero())
    m = CTX.var("m")
    expect = div * QI(0, 1) / 2 - m * sq / 2 - m * V
    assert L.part(0).terms.get((0, 0, 0, 0), CTX.zero()) == expect
    first = L.part(1)
    for j, c in enumerate(("x", "y", "z")):
        alpha = tuple(1 if k == j + 1 else 0 for k in range(4))
        assert first.terms.get(alpha, CTX.zero()) == A[j] * QI(0, 1)


def test_time_dependent_operator_rejected():
    with pytest.raises(GeometryError):
        covariant_schrodinger(CTX.parse("t"), [CTX.zero()] * 3)


@given(operators())
def test_format_parse_round_trip(P):
    assert parse_diffop(format_diffop(P), CTX, COORDS) == P


def _vector_symbols(vectors):
    return [SymTensor(COORDS, 1, {(a,): X[a] for a in range(4)}) for X in vectors]


@pytest.mark.parametrize("V, Omega", [("0", "0"), ("z", "0"), ("-x^2", "x")])
def test_first_order_symbols_equal_sk_vectors(V, Omega):
    S = make_vomega_spacetime(CTX.parse(V), CTX.parse(Omega))
    A = [S.A[a] for a in range(1, 4)]
    sol = first_order_symmetries(S.V, A, 3)
    B = solve_sk_vectors(S, 3)
    assert sol.dim == B.dim
    assert symbol_space_equal(sol.symbols(), _vector_symbols(B.vectors))
    L = covariant_schrodinger(S.V, A)
    assert all(is_symmetry(D, L).holds for D in sol.operators)


def test_free_symmetries_order_one_and_two():
    one = higher_symmetries(1, 3)
    assert one.dim == 12
    sk1 = solve_sk_tensors(FLAT, 1, 3)
    assert symbol_space_equal([relift_symbol(T, CTX) for T in one.symbols()], sk1.tensors)
    two = higher_symmetries(2, 2)
    sk2 = solve_sk_tensors(FLAT, 2, 2)
    assert two.dim == sk2.dim == 70
    assert symbol_space_equal([relift_symbol(T, CTX) for T in two.symbols()], sk2.tensors)
    L = free_schrodinger(OPCTX)
    assert all(is_symmetry(D, L).holds for D in two.operators)


@pytest.mark.parametrize("rank, deg, expected", [(1, 2, 12), (2, 2, 70)])
def test_light_cone_reduction_pathway(rank, deg, expected):
    ckt = solve_flat_ckt(5, rank, deg)
    reduced = [reduce_ckt_symbol(T, CTX) for T in ckt.tensors]
    sk = solve_sk_tensors(FLAT, rank, deg if rank > 1 else 3)
    assert sk.dim == expected
    assert symbol_space_equal(reduced, sk.tensors)


def test_light_cone_laplacian_reduces_to_schrodinger():
    coords = ("xp", "xm", "x", "y", "z")
    from ncsym.diffop import ckt_context

    lc = ckt_context(coords)
    target = chart(3, momenta=False)
    reduced = lightcone_reduce(laplacian_lightcone(lc, coords), target)
    expect = free_schrodinger(target).scale(target.var("m") * 2)
    assert reduced == expect


def test_conformal_killing_vectors():
    assert solve_flat_ckt(4, 1, 2, kind="minkowski").dim == 15
    assert solve_flat_ckt(4, 1, 3, kind="euclidean").dim == 15
    ckt = solve_flat_ckt(5, 1, 2)
    assert ckt.dim == 13
    target = chart(3, momenta=False)
    L = free_schrodinger(target)
    from ncsym.diffop import ckt_context

    lc = ckt_context(ckt.coords)
    for T in ckt.tensors:
        D = lightcone_reduce(ckv_operator(T, lc), target)
        assert is_symmetry(D, L).holds
