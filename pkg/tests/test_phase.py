from __future__ import annotations

import sympy as sp
from hypothesis import given, strategies as st

from _support import (CTX, R_SYM, SYMS, harmonic_polynomials, polynomials, static_polynomials,
                      sympy_sk_quotient, to_sympy)
from ncsym.geometry import flat_spacetime, make_vomega_spacetime
from ncsym.phase import (SymTensor, conserved_quantity, geodesic_residual, geodesic_spray, hamiltonian,
                         hamiltonian_vector_field, lrl_family, poisson, same_tensor_span, schouten_bracket,
                         solve_killing_tensors, solve_sk_tensors, solve_sk_tensors_schouten, sym_product,
                         tensor_span, hamiltonian_multiples, quotient_dimension)
from ncsym.symmetry import same_span, solve_killing_vectors, solve_sk_vectors

COORDS = ("t", "x", "y", "z")
PHASE = ("t", "x", "y", "pt", "px", "py")
FLAT = flat_spacetime()
LINEAR = make_vomega_spacetime(CTX.parse("z"), CTX.zero())
KEPLER = make_vomega_spacetime(CTX.parse("r^-1"), CTX.zero())
MIXED = make_vomega_spacetime(CTX.parse("-x^2"), CTX.parse("x"))

phase_polys = polynomials(variables=PHASE, max_terms=3, max_deg=2)


def test_poisson_sign_convention():
    assert poisson(CTX.parse("px"), CTX.parse("x"), COORDS) == CTX.one()
    assert poisson(CTX.parse("x"), CTX.parse("px"), COORDS) == -CTX.one()


@given(phase_polys, phase_polys, phase_polys)
def test_poisson_jacobi_identity(f, g, h):
    j = poisson(f, poisson(g, h, COORDS), COORDS) + poisson(g, poisson(h, f, COORDS), COORDS) \
        + poisson(h, poisson(f, g, COORDS), COORDS)
    assert j.is_zero()


@given(phase_polys, phase_polys, phase_polys)
def test_poisson_antisymmetry_and_leibniz(f, g, h):
    assert (poisson(f, g, COORDS) + poisson(g, f, COORDS)).is_zero()
    assert poisson(f * g, h, COORDS) == f * poisson(g, h, COORDS) + g * poisson(f, h, COORDS)


def test_poisson_with_radicals_against_sympy():
    f, g = CTX.parse("px*x*r^-1 + py^2"), CTX.parse("px^2/2 + r^-1")
    ps = {c: SYMS["p" + c] for c in COORDS}
    expect = sum(sp.diff(to_sympy(f), ps[c]) * sp.diff(to_sympy(g), SYMS[c])
                 - sp.diff(to_sympy(f), SYMS[c]) * sp.diff(to_sympy(g), ps[c]) for c in COORDS)
    assert sp.simplify(to_sympy(poisson(f, g, COORDS)) - expect) == 0


def test_flat_hamiltonian():
    assert hamiltonian(FLAT) == CTX.parse("(px^2 + py^2 + pz^2)/2 - pt")


def test_spray_equals_hamiltonian_vector_field_examples():
    for S in (FLAT, LINEAR, KEPLER, MIXED):
        assert geodesic_spray(S) == hamiltonian_vector_field(hamiltonian(S), S.coords)
        assert all(r.is_zero() for r in geodesic_residual(S))


@given(static_polynomials(max_deg=2), harmonic_polynomials())
def test_spray_equals_hamiltonian_vector_field_random(V, Omega):
    S = make_vomega_spacetime(V, Omega)
    assert geodesic_spray(S) == hamiltonian_vector_field(hamiltonian(S), S.coords)
    assert all(r.is_zero() for r in geodesic_residual(S))


def test_lrl_quantities_are_conserved():
    H = hamiltonian(KEPLER)
    for T in lrl_family(KEPLER):
        Q = conserved_quantity(T)
        assert poisson(Q, H, COORDS).is_zero()
        # independent check in sympy
        ps = {c: SYMS["p" + c] for c in COORDS}
        qs, hs = to_sympy(Q), to_sympy(H)
        br = sum(sp.diff(qs, ps[c]) * sp.diff(hs, SYMS[c]) - sp.diff(qs, SYMS[c]) * sp.diff(hs, ps[c])
                 for c in COORDS)
        assert sp.simplify(br) == 0


def test_lrl_radial_term_form():
    for l, T in enumerate(lrl_family(KEPLER)):
        assert sp.simplify(to_sympy(T.chi[0].comp[()]) - SYMS["xyz"[l]] / R_SYM) == 0


def test_kepler_killing_tensors_contain_lrl():
    sol = solve_killing_tensors(KEPLER, 2, 1)
    assert sol.dim == 8
    H = hamiltonian(KEPLER)
    for T in sol.tensors:
        assert poisson(conserved_quantity(T), H, COORDS).is_zero()
    base = tensor_span([T.comp for T in sol.tensors])
    for L in lrl_family(KEPLER):
        assert tensor_span([T.comp for T in sol.tensors] + [L.comp]).dim == base.dim
    assert solve_killing_tensors(KEPLER, 2, 2).dim == 14


def test_rank_one_tensors_match_vector_solvers():
    K = solve_killing_tensors(FLAT, 1, 2)
    assert K.dim == 10
    as_vectors = [tuple(T.comp[(a,)] for a in range(4)) for T in K.tensors]
    assert same_span(as_vectors, solve_killing_vectors(FLAT, 2).vectors)
    SK = solve_sk_tensors(FLAT, 1, 3)
    assert SK.dim == 12
    assert same_span([tuple(T.comp[(a,)] for a in range(4)) for T in SK.tensors],
                     solve_sk_vectors(FLAT, 3).vectors)


def test_schouten_path_agrees():
    for rank, deg in ((1, 3), (2, 2)):
        a = solve_sk_tensors(FLAT, rank, deg)
        b = solve_sk_tensors_schouten(FLAT, rank, deg)
        assert a.dim == b.dim and same_tensor_span(a.tensors, b.tensors)
    assert solve_sk_tensors(FLAT, 2, 2).dim == 70


def _rand_tensor(draw, rank):
    from ncsym.phase import sorted_indices

    comp = {idx: draw(polynomials(max_terms=2, max_deg=1)) for idx in sorted_indices(4, rank)}
    return SymTensor(COORDS, rank, comp)


@given(st.data())
def test_schouten_bracket_hat_is_poisson_bracket(data):
    A = _rand_tensor(data.draw, data.draw(st.integers(1, 2)))
    B = _rand_tensor(data.draw, data.draw(st.integers(0, 2)))
    assert schouten_bracket(A, B).to_poly() == poisson(A.to_poly(), B.to_poly(), COORDS)
    assert sym_product(A, B).to_poly() == A.to_poly() * B.to_poly()


@given(st.data())
def test_symmetric_tensor_polynomial_round_trip(data):
    rank = data.draw(st.integers(0, 3))
    T = _rand_tensor(data.draw, rank)
    assert SymTensor.from_poly(T.to_poly(), COORDS, rank).comp == T.comp


# Frozen from sympy_sk_quotient (degrees 3 and 4 take about a minute there).
SK_QUOTIENT_ORACLE = {2: (70, 55), 3: (97, 62), 4: (133, 63)}


def test_sk_quotient_matches_sympy_live():
    sol = solve_sk_tensors(FLAT, 2, 2)
    assert (sol.dim, quotient_dimension(FLAT, sol, 2)) == sympy_sk_quotient(2)


def test_sk_quotient_matches_frozen_oracle_and_saturates():
    for d, expected in SK_QUOTIENT_ORACLE.items():
        sol = solve_sk_tensors(FLAT, 2, d)
        assert (sol.dim, quotient_dimension(FLAT, sol, d)) == expected
    sol = solve_sk_tensors(FLAT, 2, 5)
    assert quotient_dimension(FLAT, sol, 5) == 63


def test_hamiltonian_multiples_are_solutions():
    sol = solve_sk_tensors(FLAT, 2, 3)
    span = sol.top_span()
    triv = tensor_span([T.comp for T in hamiltonian_multiples(FLAT, 3)])
    assert triv.issubspace(span)
