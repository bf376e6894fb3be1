"""Hamiltonian formalism on the cotangent bundle: Poisson brackets, the
geodesic spray, Killing tensors and Schrodinger-Killing tensors.

Phase-space functions are ordinary :class:`Expr` values over a context that
registers momenta ``p<coord>``; a rank-n symmetric tensor is identified with
the homogeneous momentum polynomial ``X^{a1..an} p_a1 .. p_an``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial

from .expr import Context, Expr
from .field import QI
from .geometry import GeometryError, NCSpacetime, connection
from .linear import LinearSystem, Unknowns, monomials, nullspace, split_solutions, vectorize, Span


def momentum(coord: str) -> str:
    return "p" + coord


def _momenta(ctx: Context, coords) -> tuple:
    names = tuple(momentum(c) for c in coords)
    for n in names:
        if n not in ctx:
            raise GeometryError(f"context lacks momentum variable {n!r}")
    return names


def poisson(f, g, coords) -> Expr:
    """{f, g} = sum_a (d f/d p_a  d g/d x^a - d f/d x^a  d g/d p_a)."""
    acc = None
    for c in coords:
        p = momentum(c)
        t = f.diff(p) * g.diff(c) - f.diff(c) * g.diff(p)
        acc = t if acc is None else acc + t
    return acc


def canonical_momenta(S: NCSpacetime) -> list:
    """Pi_a = p_a + A_a."""
    ps = _momenta(S.ctx, S.coords)
    if S.A is None:
        raise GeometryError("phase-space constructions need an explicit potential A")
    return [S.ctx.var(p) + S.A[a] for a, p in enumerate(ps)]


def hamiltonian(S: NCSpacetime) -> Expr:
    """H = 1/2 h^ab Pi_a Pi_b - U^a Pi_a."""
    Pi = canonical_momenta(S)
    n = len(S.coords)
    half = QI(1) / 2
    acc = S.ctx.zero()
    for a in range(n):
        for b in range(n):
            if not S.h[a, b].is_zero():
                acc = acc + S.h[a, b] * Pi[a] * Pi[b] * half
        if not S.U[a].is_zero():
            acc = acc - S.U[a] * Pi[a]
    return acc


@dataclass
class PhaseVectorField:
    """Components along d/dx^a (``x``) and d/dp_a (``p``)."""

    coords: tuple
    x: list
    p: list

    def __call__(self, fn: Expr) -> Expr:
        acc = fn.ctx.zero()
        for c, comp in zip(self.coords, self.x):
            acc = acc + comp * fn.diff(c)
        for c, comp in zip(self.coords, self.p):
            acc = acc + comp * fn.diff(momentum(c))
        return acc

    def __eq__(self, other):
        return all(a == b for a, b in zip(self.x + self.p, other.x + other.p))


def hamiltonian_vector_field(H: Expr, coords) -> PhaseVectorField:
    """The derivation g -> {g, H}."""
    return PhaseVectorField(tuple(coords),
                            [-H.diff(momentum(c)) for c in coords],
                            [H.diff(c) for c in coords])


def geodesic_spray(S: NCSpacetime) -> PhaseVectorField:
    """The spray assembled term by term from (h, U, A)."""
    ctx, coords = S.ctx, S.coords
    n = len(coords)
    Pi = canonical_momenta(S)
    half = QI(1) / 2
    pcomp = []
    for a in range(n):
        ca = coords[a]
        acc = ctx.zero()
        for c in range(n):
            for d in range(n):
                dh = S.h[c, d].diff(ca)
                if not dh.is_zero():
                    acc = acc + dh * Pi[c] * Pi[d] * half
                if not S.h[c, d].is_zero():
                    acc = acc + S.h[c, d] * Pi[c] * S.A[d].diff(ca)
        for b in range(n):
            acc = acc - S.U[b].diff(ca) * Pi[b] - S.U[b] * S.A[b].diff(ca)
        pcomp.append(acc)
    xcomp = []
    for a in range(n):
        acc = S.U[a]
        for b in range(n):
            if not S.h[a, b].is_zero():
                acc = acc - S.h[a, b] * Pi[b]
        xcomp.append(acc)
    return PhaseVectorField(tuple(coords), xcomp, pcomp)


def geodesic_residual(S: NCSpacetime) -> list:
    """G(G x^a) + Gamma^a_bc v^b v^c with v^a = G x^a; zero when the spray projects to geodesics."""
    G = geodesic_spray(S)
    gamma = connection(S)
    n = len(S.coords)
    v = [G(S.ctx.var(c)) for c in S.coords]
    out = []
    for a in range(n):
        acc = G(v[a])
        for b in range(n):
            for c in range(n):
                if not gamma[a, b, c].is_zero():
                    acc = acc + gamma[a, b, c] * v[b] * v[c]
        out.append(acc)
    return out


# Symmetric tensors ---------------------------------------------------------------

def _multinomial(idx) -> int:
    out = factorial(len(idx))
    for k in set(idx):
        out //= factorial(idx.count(k))
    return out


def sorted_indices(n: int, rank: int):
    return list(itertools.combinations_with_replacement(range(n), rank))


@dataclass
class SymTensor:
    """Totally symmetric contravariant tensor; ``comp`` keyed by sorted index tuples.

    ``chi`` and ``f`` hold the lower-order terms and conformal factors
    (each a SymTensor of the stated rank) when the tensor comes from a
    solver.
    """

    coords: tuple
    rank: int
    comp: dict
    chi: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)

    def __getitem__(self, idx):
        return self.comp[tuple(sorted(idx))]

    @classmethod
    def from_poly(cls, P: Expr, coords, rank: int) -> "SymTensor":
        """Components of a homogeneous momentum polynomial of degree ``rank``."""
        ps = [momentum(c) for c in coords]
        comp = {}
        for idx in sorted_indices(len(coords), rank):
            e = P
            for a in set(idx):
                e = e.coeff(ps[a], idx.count(a))
            for a in set(range(len(coords))) - set(idx):
                e = e.coeff(ps[a], 0)
            comp[idx] = e * QI(1, 0) / _multinomial(idx)
        return cls(tuple(coords), rank, comp)

    def to_poly(self) -> Expr:
        ctx = next(iter(self.comp.values())).ctx
        acc = ctx.zero()
        for idx, c in self.comp.items():
            if c.is_zero():
                continue
            mono = ctx.one()
            for a in idx:
                mono = mono * ctx.var(momentum(self.coords[a]))
            acc = acc + c * mono * _multinomial(idx)
        return acc

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comp.values())

    def __str__(self):
        lines = []
        for idx, c in sorted(self.comp.items()):
            if not c.is_zero():
                lines.append(f"[{''.join(self.coords[a] for a in idx)}] = {c}")
        return "\n".join(lines) or "0"


def homogeneous_part(P: Expr, coords, degree: int) -> Expr:
    """Terms of total momentum degree ``degree``."""
    ctx = P.ctx
    js = [ctx.index(momentum(c)) for c in coords]
    parts = {}
    from .expr import Expr as _E
    for eps, k, p in P.parts():
        q = {e: c for e, c in p.items() if sum(e[j] for j in js) == degree}
        if q:
            parts[eps] = (k, q)
    return _E(ctx, parts)


def momentum_degree(P: Expr, coords) -> int:
    ctx = P.ctx
    js = [ctx.index(momentum(c)) for c in coords]
    degs = [sum(e[j] for j in js) for _, _, p in P.parts() for e in p]
    return max(degs) if degs else -1


# Component Schouten calculus (independent of the Poisson bracket) --------------

def sym_product(A: SymTensor, B: SymTensor) -> SymTensor:
    """Symmetrized tensor product with unit weight: (A B)^(a1..a_{k+l})."""
    k, l = A.rank, B.rank
    n = len(A.coords)
    norm = comb(k + l, k)
    out = {}
    for idx in sorted_indices(n, k + l):
        acc = None
        for S in itertools.combinations(range(k + l), k):
            rest = tuple(idx[j] for j in range(k + l) if j not in S)
            t = A[tuple(idx[j] for j in S)] * B[rest]
            acc = t if acc is None else acc + t
        out[idx] = acc * (QI(1) / norm)
    return SymTensor(A.coords, k + l, out)


def schouten_bracket(X: SymTensor, Y: SymTensor) -> SymTensor:
    """Symmetric Schouten-Nijenhuis bracket in components.

    [X, Y]^{a..} = k X^{b(a..} d_b Y^{..)} - l Y^{b(..} d_b X^{..)}, so that
    the momentum polynomial of [X, Y] equals {X^, Y^}; for vectors this is
    the Lie bracket.
    """
    k, l = X.rank, Y.rank
    coords = X.coords
    n = len(coords)
    if k == 0 and l == 0:
        zero = next(iter(X.comp.values())) * 0
        return SymTensor(coords, 0, {(): zero})
    rank = k + l - 1
    out = {}
    for idx in sorted_indices(n, rank):
        acc = None
        if k >= 1:
            norm = comb(rank, k - 1)
            for S in itertools.combinations(range(rank), k - 1):
                rest = tuple(idx[j] for j in range(rank) if j not in S)
                xi = tuple(idx[j] for j in S)
                for b in range(n):
                    t = X[(b,) + xi] * Y[rest].diff(coords[b]) * (QI(k) / norm)
                    acc = t if acc is None else acc + t
        if l >= 1:
            norm = comb(rank, l - 1)
            for S in itertools.combinations(range(rank), l - 1):
                rest = tuple(idx[j] for j in range(rank) if j not in S)
                yi = tuple(idx[j] for j in S)
                for b in range(n):
                    t = Y[(b,) + yi] * X[rest].diff(coords[b]) * (QI(-l) / norm)
                    acc = t if acc is None else acc + t
        out[idx] = acc
    return SymTensor(coords, rank, out)


def tensor_of(S: NCSpacetime, which: str) -> SymTensor:
    n = len(S.coords)
    if which == "h":
        return SymTensor(S.coords, 2, {idx: S.h[idx] for idx in sorted_indices(n, 2)})
    if which == "U":
        return SymTensor(S.coords, 1, {(a,): S.U[a] for a in range(n)})
    raise ValueError(which)


# Solvers ---------------------------------------------------------------------------

def _tensor_ansatz(unk: Unknowns, ctx, coords, rank: int, deg: int, label, factors=None) -> SymTensor:
    return SymTensor(tuple(coords), rank, {
        idx: unk.ansatz(ctx, coords, deg, (label, idx), factors=factors)
        for idx in sorted_indices(len(coords), rank)})


def _poly_of(T: SymTensor, ctx):
    acc = None
    for idx, c in T.comp.items():
        mono = ctx.one()
        for a in idx:
            mono = mono * ctx.var(momentum(T.coords[a]))
        t = c * (mono * _multinomial(idx))
        acc = t if acc is None else acc + t
    return acc


def _evaluate(T: SymTensor, sol) -> SymTensor:
    return SymTensor(T.coords, T.rank, {k: v.evaluate(sol) for k, v in T.comp.items()})


@dataclass
class TensorSolution:
    """Solution space of a tensor problem: canonical basis of the top tensor."""

    rank: int
    tensors: list
    kernel: list
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.tensors)

    def top_span(self) -> Span:
        return tensor_span([t.comp for t in self.tensors])


def tensor_span(comps) -> Span:
    keys = sorted(comps[0]) if comps else []
    return Span(vectorize([[c[k] for k in keys] for c in comps]))


def same_tensor_span(A, B) -> bool:
    keys = sorted(A[0].comp) if A else (sorted(B[0].comp) if B else [])
    fam = [[t.comp[k] for k in keys] for t in A] + [[t.comp[k] for k in keys] for t in B]
    vecs = vectorize(fam)
    return Span(vecs[:len(A)]) == Span(vecs[len(A):])


def _chi_degree(deg: int, rank: int, m: int) -> int:
    return deg + (rank - m)


def _radical(S: NCSpacetime) -> bool:
    return S.A is not None and any(not S.A[a].is_polynomial() for a in range(len(S.coords)))


def _setup(S, rank, deg, with_f):
    ctx, coords = S.ctx, S.coords
    _momenta(ctx, coords)
    unk = Unknowns()
    X = _tensor_ansatz(unk, ctx, coords, rank, deg, "X")
    primary = set(range(len(unk)))
    radical = _radical(S)
    chis = {}
    for m in range(rank - 1, -1, -1):
        factors = [ctx.one(), ctx.r() * ctx.rho_inv(1)] if (radical and m == 0) else None
        chis[m] = _tensor_ansatz(unk, ctx, coords, m, _chi_degree(deg, rank, m), ("chi", m), factors)
    fs = {}
    if with_f:
        for m in range(rank):
            fs[m] = _tensor_ansatz(unk, ctx, coords, m, _chi_degree(deg, rank, m + 1), ("f", m))
    return unk, X, chis, fs, primary


def _finish(sys, unk, X, chis, fs, primary, rank, label) -> TensorSolution:
    basis = nullspace(sys)
    rows, kernel = split_solutions(basis, primary)
    out = []
    for r in rows:
        T = _evaluate(X, r)
        T.chi = {m: _evaluate(c, r) for m, c in chis.items()}
        T.f = {m: _evaluate(c, r) for m, c in fs.items()}
        out.append(T)
    ker = []
    for r in kernel:
        ker.append(({m: _evaluate(c, r) for m, c in chis.items()}, {m: _evaluate(c, r) for m, c in fs.items()}))
    return TensorSolution(rank, out, ker, label)


def conserved_quantity(T: SymTensor) -> Expr:
    """X^ + sum_m chi_m^ for a solver output."""
    Q = T.to_poly()
    for c in T.chi.values():
        Q = Q + c.to_poly()
    return Q


def solve_killing_tensors(S: NCSpacetime, rank: int, deg: int = 2) -> TensorSolution:
    """All (X, chi_{n-1..0}) of bounded degree with {X^ + sum chi_m^, H} = 0."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    H = hamiltonian(S)
    unk, X, chis, fs, primary = _setup(S, rank, deg, with_f=False)
    ctx = S.ctx
    Q = _poly_of(X, ctx)
    for c in chis.values():
        Q = Q + _poly_of(c, ctx)
    sys = LinearSystem(unk)
    sys.add(poisson(Q, H, S.coords))
    return _finish(sys, unk, X, chis, fs, primary, rank, "killing-tensors")


def solve_sk_tensors(S: NCSpacetime, rank: int, deg: int = 2) -> TensorSolution:
    """All (X, chi, f) with {X^ + sum chi_m^, H} = (sum f_m^) H."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    H = hamiltonian(S)
    unk, X, chis, fs, primary = _setup(S, rank, deg, with_f=True)
    ctx = S.ctx
    Q = _poly_of(X, ctx)
    for c in chis.values():
        Q = Q + _poly_of(c, ctx)
    F = None
    for c in fs.values():
        p = _poly_of(c, ctx)
        F = p if F is None else F + p
    sys = LinearSystem(unk)
    sys.add(poisson(Q, H, S.coords) - F * H)
    return _finish(sys, unk, X, chis, fs, primary, rank, "sk-tensors")


def solve_sk_tensors_schouten(S: NCSpacetime, rank: int, deg: int = 2) -> TensorSolution:
    """Same space through the component Schouten equations (A = 0 spacetimes).

    [chi_{k-1}, h] - 2 [chi_k, U] = f_{k-2} h - 2 f_{k-1} U for k = n+1 .. 0,
    with chi_n = X and out-of-range terms zero.
    """
    if S.A is None or not all(S.A[a].is_zero() for a in range(len(S.coords))):
        raise GeometryError("the Schouten form is stated for a vanishing potential")
    unk, X, chis, fs, primary = _setup(S, rank, deg, with_f=True)
    h, U = tensor_of(S, "h"), tensor_of(S, "U")
    level = dict(chis)
    level[rank] = X
    sys = LinearSystem(unk)
    for k in range(rank + 1, -1, -1):
        lhs = None
        if k - 1 in level:
            lhs = schouten_bracket(level[k - 1], h)
        if k in level:
            t = schouten_bracket(level[k], U)
            t = SymTensor(t.coords, t.rank, {i: v * -2 for i, v in t.comp.items()})
            lhs = t if lhs is None else _add(lhs, t)
        rhs = None
        if k - 2 in fs:
            rhs = sym_product(fs[k - 2], h)
        if k - 1 in fs:
            t = sym_product(fs[k - 1], U)
            t = SymTensor(t.coords, t.rank, {i: v * -2 for i, v in t.comp.items()})
            rhs = t if rhs is None else _add(rhs, t)
        if lhs is None:
            continue
        eq = lhs if rhs is None else _add(lhs, SymTensor(rhs.coords, rhs.rank, {i: -v for i, v in rhs.comp.items()}))
        for v in eq.comp.values():
            sys.add(v)
    return _finish(sys, unk, X, chis, fs, primary, rank, "sk-tensors-schouten")


def _add(A: SymTensor, B: SymTensor) -> SymTensor:
    return SymTensor(A.coords, A.rank, {k: v + B.comp[k] for k, v in A.comp.items()})


def lrl_family(S: NCSpacetime) -> list:
    """The three rank-2 tensors X^ij = (l.x) delta^ij - l^(i x^j) with chi0 = l.x / r."""
    ctx, coords = S.ctx, S.coords
    xs = [ctx.var(c) for c in coords[1:]]
    rinv = ctx.r() * ctx.rho_inv(1)
    out = []
    for l in range(3):
        comp = {}
        for idx in sorted_indices(4, 2):
            a, b = idx
            v = ctx.zero()
            if a > 0 and b > 0:
                i, j = a - 1, b - 1
                if i == j:
                    v = v + xs[l]
                if i == l:
                    v = v - xs[j] * (QI(1) / 2)
                if j == l:
                    v = v - xs[i] * (QI(1) / 2)
            comp[idx] = v
        T = SymTensor(coords, 2, comp)
        T.chi = {1: SymTensor(coords, 1, {(a,): ctx.zero() for a in range(4)}),
                 0: SymTensor(coords, 0, {(): xs[l] * rinv})}
        out.append(T)
    return out


def hamiltonian_multiples(S: NCSpacetime, deg: int) -> list:
    """Principal parts G h of the trivial rank-2 solutions Q = 2 G H, deg G <= deg."""
    ctx, coords = S.ctx, S.coords
    h = tensor_of(S, "h")
    return [SymTensor(coords, 2, {k: v * ctx.monomial(mono) for k, v in h.comp.items()})
            for mono in monomials(ctx, coords, deg)]


def quotient_dimension(S: NCSpacetime, sol: TensorSolution, deg: int) -> int:
    """Dimension of a rank-2 solution of degree ``deg`` modulo the multiples of the Hamiltonian."""
    if sol.rank != 2:
        raise ValueError("the quotient is defined for rank 2")
    triv = [T.comp for T in hamiltonian_multiples(S, deg)]
    full = tensor_span([T.comp for T in sol.tensors] + triv).dim
    return full - tensor_span(triv).dim
