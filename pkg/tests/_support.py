"""Shared strategies and the sympy bridge used as an independent oracle."""

from __future__ import annotations

import sympy as sp
from hypothesis import strategies as st

from ncsym.expr import chart
from ncsym.field import QI

CTX = chart(3)
SPACE = ("x", "y", "z")
SYMS = {n: sp.Symbol(n) for n in CTX.names}
SX, SY, SZ = SYMS["x"], SYMS["y"], SYMS["z"]
R_SYM = sp.sqrt(SX ** 2 + SY ** 2 + SZ ** 2)


def to_sympy(e) -> sp.Expr:
    """Translate an exact expression to sympy (r and rho expanded)."""
    text = str(e).replace("^", "**")
    loc = dict(SYMS)
    loc.update({"i": sp.I, "r": R_SYM, "rho": R_SYM ** 2})
    return sp.sympify(text, locals=loc)


def sympy_zero(expr) -> bool:
    return sp.simplify(sp.expand(expr)) == 0


small_int = st.integers(min_value=-3, max_value=3)
small_qi = st.builds(lambda a, b, d: QI(a) / d + QI(0, b), small_int, small_int, st.integers(1, 3))


@st.composite
def polynomials(draw, ctx=CTX, variables=("t", "x", "y", "z"), max_terms=4, max_deg=2, complex_coeffs=False):
    """Random polynomial with a few monomials of small degree."""
    n = draw(st.integers(0, max_terms))
    acc = ctx.zero()
    for _ in range(n):
        mono = [0] * ctx.nvars
        for v in variables:
            mono[ctx.index(v)] = draw(st.integers(0, max_deg))
        c = draw(small_qi) if complex_coeffs else QI(draw(small_int))
        acc = acc + ctx.monomial(tuple(mono), c)
    return acc


@st.composite
def static_polynomials(draw, **kw):
    return draw(polynomials(variables=SPACE, **kw))


HARMONIC = ["x", "y", "z", "x*y", "y*z", "x*z", "x^2 - y^2", "y^2 - z^2", "x*y*z", "x^3 - 3*x*y^2",
            "z^3 - 3*z*x^2", "x^2*y - y^3/3"]


@st.composite
def harmonic_polynomials(draw):
    """Random combination of harmonic polynomials (closed magnetic two-forms)."""
    picks = draw(st.lists(st.tuples(st.sampled_from(HARMONIC), small_int), max_size=3))
    acc = CTX.zero()
    for text, c in picks:
        acc = acc + CTX.parse(text) * QI(c)
    return acc


COORD_SYMS = [SYMS[c] for c in ("t", "x", "y", "z")]


def sympy_vomega_gamma(V, Omega):
    """Connection of a (V, Omega) spacetime written out by hand (index 0 = t)."""
    X = COORD_SYMS
    G = {(a, b, c): sp.Integer(0) for a in range(4) for b in range(4) for c in range(4)}
    for i in range(1, 4):
        G[(i, 0, 0)] = sp.diff(V, X[i])
        for j in range(1, 4):
            val = sum(sp.LeviCivita(i, j, k) * sp.diff(Omega, X[k]) for k in range(1, 4))
            G[(i, j, 0)] = G[(i, 0, j)] = val
    return G


def sympy_sch_member(vec, V, Omega, expanded=False) -> bool:
    """Does the vector (sympy components) conformally and projectively preserve the structure?

    Conformal: L_X h = f h and L_X theta = g theta; projective:
    L_X Gamma^a_bc = (delta^a_b phi_c + delta^a_c phi_b) / 2; unless ``expanded``
    also f + g = 0.
    """
    X = COORD_SYMS
    G = sympy_vomega_gamma(V, Omega)
    zero = lambda e: sp.simplify(sp.expand(e)) == 0  # noqa: E731
    # theta = dt
    g = sp.diff(vec[0], X[0])
    if not all(zero(sp.diff(vec[0], X[i])) for i in range(1, 4)):
        return False
    # h = delta^ij: (L_X h)^ij = -(d_j X^i + d_i X^j), (L_X h)^ti = -d_i X^t
    f = -2 * sp.diff(vec[1], X[1])
    for i in range(1, 4):
        for j in range(1, 4):
            lh = -(sp.diff(vec[i], X[j]) + sp.diff(vec[j], X[i]))
            if not zero(lh - (f if i == j else 0)):
                return False
    if not expanded and not zero(f + g):
        return False

    def LG(a, b, c):
        acc = sp.diff(vec[a], X[b], X[c])
        for d in range(4):
            acc += vec[d] * sp.diff(G[(a, b, c)], X[d]) - G[(d, b, c)] * sp.diff(vec[a], X[d])
            acc += G[(a, d, c)] * sp.diff(vec[d], X[b]) + G[(a, b, d)] * sp.diff(vec[d], X[c])
        return acc

    phi = [LG(0, 0, 0)] + [2 * LG(0, 0, c) for c in range(1, 4)]
    for a in range(4):
        for b in range(4):
            for c in range(4):
                rhs = ((phi[c] if a == b else 0) + (phi[b] if a == c else 0)) / 2
                if not zero(LG(a, b, c) - rhs):
                    return False
    return True


def vec_to_sympy(X):
    return [to_sympy(c) for c in X]


def sympy_sk_quotient(d: int) -> tuple:
    """Independent count of flat rank-2 SK tensors of degree d: (all, modulo G h)."""
    import itertools
    from sympy.polys.matrices import DomainMatrix

    X = sp.symbols("t x y z")
    P = sp.symbols("pt px py pz")

    def mons(k):
        return [sp.Mul(*c) for j in range(k + 1) for c in itertools.combinations_with_replacement(X, j)]

    cols, top = [], []

    def gen(r, deg, is_top=False):
        acc = 0
        for pm in (sp.Mul(*c) for c in itertools.combinations_with_replacement(P, r)):
            for mm in mons(deg):
                c = sp.Symbol(f"c{len(cols)}")
                cols.append(c)
                if is_top:
                    top.append(sp.expand(pm * mm))
                acc += c * pm * mm
        return acc

    H = (P[1] ** 2 + P[2] ** 2 + P[3] ** 2) / 2 - P[0]
    Q = gen(2, d, True) + gen(1, d + 1) + gen(0, d + 2)
    F = gen(1, d) + gen(0, d + 1)
    br = sum(sp.diff(Q, P[a]) * sp.diff(H, X[a]) - sp.diff(Q, X[a]) * sp.diff(H, P[a]) for a in range(4))
    idx = {c: i for i, c in enumerate(cols)}
    rows = []
    for coeff in sp.Poly(sp.expand(br - F * H), *X, *P).coeffs():
        row = [sp.QQ(0)] * len(cols)
        for c, v in coeff.as_coefficients_dict().items():
            row[idx[c]] = sp.QQ(int(sp.numer(v)), int(sp.denom(v)))
        rows.append(row)
    N = DomainMatrix(rows, (len(rows), len(cols)), sp.QQ).nullspace().to_Matrix()
    sol = N[:, list(range(len(top)))]
    triv = sp.Matrix([[1 if m in [sp.expand(p ** 2 * g) for p in P[1:]] else 0 for m in top] for g in mons(d)])
    return sol.rank(), sp.Matrix.vstack(sol, triv).rank() - triv.rank()
