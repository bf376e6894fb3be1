"""Symmetry vector fields of Newton-Cartan spacetimes by polynomial ansatz.

Every solver sets up the defining Lie-derivative equations with unknown
polynomial components, turns them into exact linear rows and returns the
solution space in canonical (reduced echelon) form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .expr import Expr
from .field import QI
from .geometry import GeometryError, NCSpacetime, connection
from .linear import (LinearSystem, Span, Unknowns, linear_combination, nullspace,
                     split_solutions, vectorize)
from .tensor import TensorField, lie_bracket, lie_derivative, lie_derivative_connection, levi_civita


@dataclass
class VectorFieldBasis:
    """Canonical basis of a solution space of vector fields.

    ``data[k]`` holds the auxiliary functions (e.g. ``f``, ``g``, ``phi``,
    ``chi0``) solved together with ``vectors[k]``; ``extra`` holds solutions
    whose vector part vanishes.
    """

    coords: tuple
    vectors: list
    label: str = ""
    deg: int = 0
    data: list = field(default_factory=list)
    extra: list = field(default_factory=list)

    def __len__(self):
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def span(self) -> Span:
        return vector_span(self.vectors)

    def __str__(self):
        return "\n".join(format_vector(v, self.coords) for v in self.vectors)


def format_vector(X, coords) -> str:
    parts = [f"({c})*d{n}" for c, n in zip(X, coords) if not c.is_zero()]
    return " + ".join(parts) or "0"


def vector_span(vectors) -> Span:
    return Span(vectorize([list(v) for v in vectors]))


def same_span(A, B) -> bool:
    """Exact equality of the spans of two families of vector fields."""
    vecs = vectorize([list(v) for v in A] + [list(v) for v in B])
    return Span(vecs[:len(A)]) == Span(vecs[len(A):])


def span_contains(vectors, X) -> bool:
    vecs = vectorize([list(v) for v in vectors] + [list(X)])
    return Span(vecs[:-1]).contains(vecs[-1])


# Ansatz plumbing ---------------------------------------------------------------

class _Problem:
    def __init__(self, S: NCSpacetime, deg: int, radical_aux: bool = False):
        self.S = S
        self.ctx = S.ctx
        self.coords = S.coords
        self.deg = deg
        self.unk = Unknowns()
        self.sys = LinearSystem(self.unk)
        n = len(self.coords)
        self.X = [self.unk.ansatz(self.ctx, self.coords, deg, ("X", a)) for a in range(n)]
        self.primary = set(range(len(self.unk)))
        self.aux: dict = {}
        self.radical_aux = radical_aux

    def function(self, name, deg=None):
        deg = self.deg if deg is None else deg
        factors = None
        if self.radical_aux:
            factors = [self.ctx.one(), self.ctx.r() * self.ctx.rho_inv(1)]
        e = self.unk.ansatz(self.ctx, self.coords, deg, name, factors=factors)
        self.aux[name] = e
        return e

    def add(self, tensor_or_list):
        if isinstance(tensor_or_list, TensorField):
            for v in tensor_or_list.comp.values():
                self.sys.add(v)
        else:
            for v in tensor_or_list:
                self.sys.add(v)

    def solve(self, label) -> VectorFieldBasis:
        basis = nullspace(self.sys)
        rows, kernel = split_solutions(basis, self.primary)
        vectors = [tuple(x.evaluate(r) for x in self.X) for r in rows]
        data = [{k: e.evaluate(r) for k, e in self.aux.items()} for r in rows]
        extra = [{k: e.evaluate(r) for k, e in self.aux.items()} for r in kernel]
        return VectorFieldBasis(self.coords, vectors, label, self.deg, data, extra)


def _require_vomega(S: NCSpacetime):
    if not S.is_vomega:
        raise GeometryError("solver requires a spacetime built from (V, Omega)")


def _conformal_equations(P: _Problem, f, g):
    S = P.S
    P.add(lie_derivative(P.X, S.h) - S.h.map(lambda v: f * v))
    P.add(lie_derivative(P.X, S.theta) - S.theta.map(lambda v: g * v))


def _projective_equations(P: _Problem, f, g):
    """L_X Gamma = delta_(b phi_c) together with the variation of nabla h = 0, nabla theta = 0."""
    S = P.S
    n = len(P.coords)
    phi = [P.function(("phi", a)) for a in range(n)]
    gamma = connection(S)
    LG = lie_derivative_connection(P.X, gamma)
    half = QI(1) / 2
    for a, b, c in itertools.product(range(n), repeat=3):
        eq = LG[a, b, c]
        if a == b:
            eq = eq - phi[c] * half
        if a == c:
            eq = eq - phi[b] * half
        P.sys.add(eq)
    # first-order variation of nabla h = 0 with delta h = f h, delta Gamma = delta_(b phi_c)
    for a, b, c in itertools.product(range(n), repeat=3):
        eq = f.diff(P.coords[c]) * S.h[a, b] + phi[c] * S.h[a, b]
        acc = eq
        for d in range(n):
            if a == c and not S.h[d, b].is_zero():
                acc = acc + phi[d] * S.h[d, b] * half
            if b == c and not S.h[a, d].is_zero():
                acc = acc + phi[d] * S.h[a, d] * half
        P.sys.add(acc)
    # and of nabla theta = 0 with delta theta = g theta
    for c, a in itertools.product(range(n), repeat=2):
        eq = g.diff(P.coords[c]) * S.theta[a] - (phi[a] * S.theta[c] + phi[c] * S.theta[a]) * half
        P.sys.add(eq + g * _nabla_theta(S, gamma, c, a))


def _nabla_theta(S, gamma, c, a):
    acc = S.theta[a].diff(S.coords[c])
    for d in range(len(S.coords)):
        acc = acc - gamma[d, c, a] * S.theta[d]
    return acc


# Solvers ------------------------------------------------------------------------

def solve_expanded_sch(S: NCSpacetime, deg: int = 3, *, require_vomega: bool = True) -> VectorFieldBasis:
    """Conformal on (h, theta), projective on the connection; no f + g condition."""
    if require_vomega:
        _require_vomega(S)
    P = _Problem(S, deg)
    f, g = P.function("f"), P.function("g")
    _conformal_equations(P, f, g)
    _projective_equations(P, f, g)
    return P.solve("expanded-sch")


def solve_sk_vectors(S: NCSpacetime, deg: int = 3, *, require_vomega: bool = True) -> VectorFieldBasis:
    """Schrodinger-Killing vectors: the expanded system plus f + g = 0."""
    if require_vomega:
        _require_vomega(S)
    P = _Problem(S, deg)
    f, g = P.function("f"), P.function("g")
    _conformal_equations(P, f, g)
    _projective_equations(P, f, g)
    P.sys.add(f + g)
    return P.solve("sk-vectors")


def solve_cgal(S: NCSpacetime, deg: int = 2) -> VectorFieldBasis:
    """Truncation of the conformal Galilean algebra: only L_X h = f h, L_X theta = g theta."""
    P = _Problem(S, deg)
    f, g = P.function("f"), P.function("g")
    _conformal_equations(P, f, g)
    return P.solve("cgal")


def solve_killing_vectors(S: NCSpacetime, deg: int = 2) -> VectorFieldBasis:
    """Killing vectors: L_X h = 0 and the two potential equations with chi0.

    ``chi0`` is allowed an extra r^-1 branch when the potential involves r.
    """
    if S.A is None:
        raise GeometryError("Killing vectors need an explicit potential one-form A")
    radical = any(not S.A[a].is_polynomial() for a in range(len(S.coords)))
    P = _Problem(S, deg, radical_aux=radical)
    chi = P.function("chi0", deg + 1)
    coords, n = P.coords, len(P.coords)
    P.add(lie_derivative(P.X, S.h))
    LU = lie_derivative(P.X, S.U)
    LA = lie_derivative(P.X, S.A)
    dchi = [chi.diff(c) for c in coords]
    for a in range(n):
        eq = LU[a]
        for b in range(n):
            if not S.h[a, b].is_zero():
                eq = eq - LA[b] * S.h[a, b] + dchi[b] * S.h[a, b]
        P.sys.add(eq)
    eq = None
    for a in range(n):
        if not S.U[a].is_zero():
            t = (LA[a] - dchi[a]) * S.U[a]
            eq = t if eq is None else eq + t
    P.sys.add(eq)
    return P.solve("killing-vectors")


def sk_equations(X, V: Expr, Omega: Expr) -> list:
    """Residuals of the component equations SK1-SK4 on a (V, Omega) spacetime."""
    t, xs = "t", ("x", "y", "z")
    out = []
    Xt, Xs = X[0], X[1:]
    dV = [V.diff(c) for c in xs]
    dO = [Omega.diff(c) for c in xs]
    dtXt = Xt.diff(t)
    for i in range(3):
        out.append(Xt.diff(xs[i]))
    for i in range(3):
        for j in range(i, 3):
            eq = Xs[j].diff(xs[i]) + Xs[i].diff(xs[j])
            if i == j:
                eq = eq - dtXt
            out.append(eq)
    for i in range(3):
        eq = Xs[i].diff(t, 2) + dV[i] * dtXt * 2
        for j in range(3):
            eq = eq + Xs[j] * V.diff(xs[j]).diff(xs[i]) - Xs[i].diff(xs[j]) * dV[j]
            for k in range(3):
                e = levi_civita(i, j, k)
                if e:
                    eq = eq + dO[k] * Xs[j].diff(t) * (2 * e)
        out.append(eq)
    for k in range(3):
        eq = dO[k] * dtXt * 2
        for j in range(3):
            eq = eq + Xs[j] * Omega.diff(xs[j]).diff(xs[k]) * 2
            eq = eq + Xs[j].diff(xs[k]) * dO[j] - Xs[k].diff(xs[j]) * dO[j]
            for i in range(3):
                e = levi_civita(i, j, k)
                if e:
                    eq = eq + Xs[i].diff(xs[j]).diff(t) * e
        out.append(eq)
    return out


def solve_sk_components(V: Expr, Omega: Expr, deg: int = 3) -> VectorFieldBasis:
    """Independent path: solve the explicit component equations SK1-SK4."""
    ctx = V.ctx
    coords = ("t", "x", "y", "z")
    unk = Unknowns()
    X = [unk.ansatz(ctx, coords, deg, ("X", a)) for a in range(4)]
    sys = LinearSystem(unk)
    sys.add(sk_equations(X, V, Omega))
    basis = nullspace(sys)
    rows, _ = split_solutions(basis, range(len(unk)))
    vectors = [tuple(x.evaluate(r) for x in X) for r in rows]
    return VectorFieldBasis(coords, vectors, "sk-components", deg)


# Lie algebra services ------------------------------------------------------------

def bracket(X, Y, coords) -> tuple:
    return tuple(lie_bracket(X, Y, coords))


def closure_check(B: VectorFieldBasis):
    """``(True, None)`` if [B, B] lies in span(B), else ``(False, (i, j))``."""
    vs = B.vectors
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            br = bracket(vs[i], vs[j], B.coords)
            if not span_contains(vs, br):
                return False, (i, j)
    return True, None


def structure_constants(B: VectorFieldBasis) -> dict:
    """``c[(i, j)] = [c^k]`` with [X_i, X_j] = sum_k c^k X_k (i < j, zero rows omitted)."""
    vs = B.vectors
    out = {}
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            br = bracket(vs[i], vs[j], B.coords)
            flat = vectorize([list(v) for v in vs] + [list(br)])
            coeffs = linear_combination(flat[:-1], flat[-1])
            if coeffs is None:
                raise ValueError(f"bracket of generators {i} and {j} leaves the span")
            if any(coeffs):
                out[(i, j)] = coeffs
    return out


def jacobi_residuals(B: VectorFieldBasis) -> list:
    """Triples (i, j, k) whose Jacobi sum fails to vanish (expected empty)."""
    vs, coords = B.vectors, B.coords
    bad = []
    for i, j, k in itertools.combinations(range(len(vs)), 3):
        a = bracket(vs[i], bracket(vs[j], vs[k], coords), coords)
        b = bracket(vs[j], bracket(vs[k], vs[i], coords), coords)
        c = bracket(vs[k], bracket(vs[i], vs[j], coords), coords)
        if any(not (p + q + r).is_zero() for p, q, r in zip(a, b, c)):
            bad.append((i, j, k))
    return bad


def check_conformal(S: NCSpacetime, X):
    """Return ``(f, g)`` with L_X h = f h and L_X theta = g theta, or None.

    ``f`` and ``g`` are recovered by exact division against a nonzero
    component of ``h`` and ``theta``.
    """
    Lh = lie_derivative(X, S.h)
    Lth = lie_derivative(X, S.theta)
    f = g = None
    for k, v in S.h.comp.items():
        if v == S.ctx.one():
            f = Lh[k]
            break
    for k, v in S.theta.comp.items():
        if v == S.ctx.one():
            g = Lth[k]
            break
    if f is None or g is None:
        raise GeometryError("no unit component to divide by")
    if Lh != S.h.map(lambda v: v * f) or Lth != S.theta.map(lambda v: v * g):
        return None
    return f, g
