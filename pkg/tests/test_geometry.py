from __future__ import annotations

import itertools

import pytest
import sympy as sp
from hypothesis import given

from _support import CTX, SYMS, harmonic_polynomials, polynomials, static_polynomials, to_sympy
from ncsym.geometry import (GeometryError, check_field_equations, check_trautman, connection,
                            covariant_derivative_h, covariant_derivative_theta, flat_spacetime,
                            galilean_data, make_spacetime, make_vomega_spacetime, ricci, riemann,
                            spacetime_from_config, vomega_connection)
from ncsym.parse import ParseError
from ncsym.tensor import TensorField

COORDS = ("t", "x", "y", "z")
KEPLER = make_vomega_spacetime(CTX.parse("r^-1"), CTX.zero())


def _sympy_gamma(V, Omega):
    """Connection of a (V, Omega) spacetime written out by hand (index 0 = t)."""
    X = [SYMS[c] for c in COORDS]
    G = {}
    for a, b, c in itertools.product(range(4), repeat=3):
        G[(a, b, c)] = sp.Integer(0)
    for i in range(1, 4):
        G[(i, 0, 0)] = sp.diff(V, X[i])
        for j in range(1, 4):
            val = sum(sp.LeviCivita(i, j, k) * sp.diff(Omega, X[k]) for k in range(1, 4))
            G[(i, j, 0)] = G[(i, 0, j)] = val
    return G, X


def _sympy_riemann(G, X):
    R = {}
    for a, b, c, d in itertools.product(range(4), repeat=4):
        acc = sp.diff(G[(a, d, b)], X[c]) - sp.diff(G[(a, c, b)], X[d])
        for e in range(4):
            acc += G[(a, c, e)] * G[(e, d, b)] - G[(a, d, e)] * G[(e, c, b)]
        R[(a, b, c, d)] = sp.simplify(acc)
    return R


def test_flat_connection_and_curvature_vanish():
    S = flat_spacetime()
    assert connection(S).is_zero()
    assert riemann(S).is_zero()
    assert check_trautman(S)


def test_linear_potential_is_flat():
    S = make_vomega_spacetime(CTX.parse("z"), CTX.zero())
    G = connection(S)
    assert G[3, 0, 0] == CTX.one()
    assert sum(1 for v in G.comp.values() if not v.is_zero()) == 1
    assert riemann(S).is_zero()


def test_kepler_connection_against_sympy():
    G = connection(KEPLER)
    Gs, X = _sympy_gamma(1 / sp.sqrt(SYMS["x"] ** 2 + SYMS["y"] ** 2 + SYMS["z"] ** 2), 0)
    for key, v in G.comp.items():
        assert sp.simplify(to_sympy(v) - Gs[key]) == 0
    # frozen: Gamma^x_tt = -x / r^3
    assert str(G[1, 0, 0]) == "-x*r*rho^-2"
    assert ricci(KEPLER).is_zero()


@pytest.mark.parametrize("V, Omega", [("-x^2", "x"), ("x*y + z^3", "y^2"), ("0", "x*y*z")])
def test_riemann_against_sympy(V, Omega):
    S = make_vomega_spacetime(CTX.parse(V), CTX.parse(Omega))
    Gs, X = _sympy_gamma(to_sympy(CTX.parse(V)), to_sympy(CTX.parse(Omega)))
    Rs = _sympy_riemann(Gs, X)
    R = riemann(S)
    for key, v in R.comp.items():
        assert sp.expand(to_sympy(v) - Rs[key]) == 0


@given(static_polynomials(max_deg=2), static_polynomials(max_deg=2))
def test_connection_matches_displayed_components(V, Omega):
    S = make_vomega_spacetime(V, Omega)
    assert connection(S) == vomega_connection(V, Omega)


@given(static_polynomials(max_deg=2), harmonic_polynomials(), polynomials(max_deg=2))
def test_gauge_invariance(V, Omega, chi):
    S = make_vomega_spacetime(V, Omega)
    assert connection(S.gauge_shift(chi)) == connection(S)


@given(static_polynomials(max_deg=3), static_polynomials(max_deg=3))
def test_first_bianchi_identity(V, Omega):
    R = riemann(make_vomega_spacetime(V, Omega))
    for a, b, c, d in itertools.product(range(4), repeat=4):
        assert (R[a, b, c, d] + R[a, c, d, b] + R[a, d, b, c]).is_zero()


@given(static_polynomials(max_deg=3), static_polynomials(max_deg=3))
def test_compatibility_and_trautman(V, Omega):
    S = make_vomega_spacetime(V, Omega)
    assert covariant_derivative_h(S).is_zero()
    assert covariant_derivative_theta(S).is_zero()
    laplacian = sum((Omega.diff(v, 2) for v in ("x", "y", "z")), CTX.zero())
    # dF = 0 exactly when Omega is harmonic
    assert check_trautman(S) == laplacian.is_zero()
    assert (S.A is not None) == laplacian.is_zero()


def test_non_closed_two_form_violates_trautman():
    coords, h, theta, U = galilean_data(CTX, 3)
    F = TensorField.zeros(CTX, coords, 0, 2)
    F.comp[(0, 2)] = CTX.parse("x")
    F.comp[(2, 0)] = CTX.parse("-x")
    S = make_spacetime(CTX, _rows(h), _list(theta), _list(U), F=F)
    assert not check_trautman(S)


def test_field_equations():
    assert check_field_equations(KEPLER, CTX.zero(), CTX.one()).is_zero()
    # Laplacian of V plus twice |grad Omega|^2 vanishes: -2 + 2 = 0
    vacuum = make_vomega_spacetime(CTX.parse("-x^2"), CTX.parse("x"))
    assert check_field_equations(vacuum, CTX.zero(), CTX.one()).is_zero()
    S = make_vomega_spacetime(CTX.parse("x^2"), CTX.zero())
    res = check_field_equations(S, CTX.one(), CTX.one())
    assert str(res[0, 0]) == "-4*pi + 2"


def test_time_dependent_potential_rejected():
    with pytest.raises(GeometryError):
        make_vomega_spacetime(CTX.parse("t*x"), CTX.zero())


def test_config_formats():
    S = spacetime_from_config("[spacetime]\nV = z\n")
    assert riemann(S).is_zero() and S.V == CTX.parse("z")
    S2 = spacetime_from_config("[spacetime]\ndimension = 2\n")
    assert S2.d == 2 and connection(S2).is_zero()
    text = "[spacetime]\nh = 0,0,0,0; 0,1,0,0; 0,0,1,0; 0,0,0,1\ntheta = 1,0,0,0\nU = 1,0,0,0\nA = -z,0,0,0\n"
    S3 = spacetime_from_config(text)
    assert connection(S3) == connection(make_vomega_spacetime(CTX.parse("z"), CTX.zero()))
    with pytest.raises(GeometryError):
        spacetime_from_config("[spacetime]\ntheta = 1,0\n")
    with pytest.raises(GeometryError):
        spacetime_from_config("[other]\n")
    with pytest.raises(ParseError):
        spacetime_from_config("[spacetime]\nV = (z\n")
    with pytest.raises(ParseError):
        spacetime_from_config("not an ini file")


def test_invalid_galilean_data_rejected():
    coords, h, theta, U = galilean_data(CTX, 3)
    with pytest.raises(GeometryError):
        make_spacetime(CTX, _rows(h), _list(theta), [v * 2 for v in _list(U)])
    with pytest.raises(GeometryError):
        make_spacetime(CTX, _rows(h), [CTX.one(), CTX.one(), CTX.zero(), CTX.zero()], _list(U))


def _rows(h):
    return [[h[a, b] for b in range(4)] for a in range(4)]


def _list(v):
    return [v[a] for a in range(4)]
