"""Linear differential operators with expression coefficients.

A :class:`DiffOp` is ``sum_alpha c_alpha d^alpha`` with coefficients to the
left of the derivatives.  Coefficients may be :class:`Expr` or, while
solving, :class:`LinExpr`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .expr import Context, Expr, chart
from .field import QI
from .geometry import GeometryError
from .linear import (LinExpr, LinearSystem, Span, Unknowns, nullspace, split_solutions,
                     vectorize)
from .phase import SymTensor, _multinomial, sorted_indices


class DivisionError(ValueError):
    pass


def _add_multi(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_multi(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _binom_multi(a, b):
    out = 1
    for x, y in zip(a, b):
        out *= comb(x, y)
    return out


def _below(alpha):
    return itertools.product(*(range(k + 1) for k in alpha))


@dataclass
class DiffOp:
    ctx: Context
    coords: tuple
    terms: dict = field(default_factory=dict)  # multi-index -> coefficient

    def __post_init__(self):
        self.terms = {k: v for k, v in self.terms.items() if not v.is_zero()}

    # construction ------------------------------------------------------------
    @classmethod
    def scalar(cls, e, coords) -> "DiffOp":
        n = len(coords)
        return cls(e.ctx, tuple(coords), {(0,) * n: e})

    @classmethod
    def partial(cls, ctx, coords, name: str, times: int = 1) -> "DiffOp":
        alpha = [0] * len(coords)
        alpha[coords.index(name)] = times
        return cls(ctx, tuple(coords), {tuple(alpha): ctx.one()})

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def part(self, k: int) -> "DiffOp":
        """Terms of exact order ``k``."""
        return DiffOp(self.ctx, self.coords, {a: c for a, c in self.terms.items() if sum(a) == k})

    def __add__(self, other: "DiffOp") -> "DiffOp":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return DiffOp(self.ctx, self.coords, out)

    def __neg__(self):
        return DiffOp(self.ctx, self.coords, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, e) -> "DiffOp":
        """Left multiplication by a scalar."""
        return DiffOp(self.ctx, self.coords, {a: c * e for a, c in self.terms.items()})

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return compose(self, other)

    def apply(self, f: Expr) -> Expr:
        acc = self.ctx.zero()
        for a, c in self.terms.items():
            g = f
            for name, k in zip(self.coords, a):
                if k:
                    g = g.diff(name, k)
            acc = acc + c * g
        return acc

    def evaluate(self, sol) -> "DiffOp":
        return DiffOp(self.ctx, self.coords, {a: (c.evaluate(sol) if isinstance(c, LinExpr) else c)
                                              for a, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self - other).is_zero()

    def __str__(self):
        return format_diffop(self)


def compose(P: DiffOp, Q: DiffOp) -> DiffOp:
    """Normal-ordered product via d^alpha c = sum_gamma C(alpha, gamma) (d^gamma c) d^(alpha - gamma)."""
    coords = P.coords
    out: dict = {}
    cache: dict = {}
    for alpha, pc in P.terms.items():
        for beta, qc in Q.terms.items():
            for gamma in _below(alpha):
                key = (beta, gamma)
                if key not in cache:
                    d = qc
                    for name, k in zip(coords, gamma):
                        if k:
                            d = d.diff(name, k)
                    cache[key] = d
                d = cache[key]
                if d.is_zero():
                    continue
                coef = _binom_multi(alpha, gamma)
                term = pc * d if coef == 1 else pc * d * coef
                mono = _add_multi(_sub_multi(alpha, gamma), beta)
                out[mono] = out[mono] + term if mono in out else term
    return DiffOp(P.ctx, coords, out)


def _time_index(coords, time):
    if time not in coords:
        raise DivisionError(f"no coordinate {time!r} to divide along")
    return coords.index(time)


def right_divide(P: DiffOp, D: DiffOp, time: str = "t"):
    """``(q, r)`` with P = q o D + r and r free of d/dt.

    ``D`` must contain d/dt only through one term ``c d/dt`` with ``c`` an
    invertible constant (a Gaussian rational, possibly times powers of m).
    """
    j = _time_index(D.coords, time)
    lead = [(a, c) for a, c in D.terms.items() if a[j]]
    unit = tuple(1 if k == j else 0 for k in range(len(D.coords)))
    if len(lead) != 1 or lead[0][0] != unit:
        raise DivisionError("divisor must be first order in d/dt with a single d/dt term")
    c = lead[0][1]
    if not c.free_of(*D.coords):
        raise DivisionError("d/dt coefficient of the divisor must be constant")
    try:
        cinv = c.inverse()
    except ZeroDivisionError:
        raise DivisionError("d/dt coefficient of the divisor is not invertible") from None
    rem = DiffOp(P.ctx, P.coords, dict(P.terms))
    quot: dict = {}
    while True:
        timed = [a for a in rem.terms if a[j]]
        if not timed:
            break
        kmax = max(a[j] for a in timed)
        top = sorted(a for a in timed if a[j] == kmax)
        step: dict = {}
        for a in top:
            beta = tuple(v - 1 if k == j else v for k, v in enumerate(a))
            step[beta] = rem.terms[a] * cinv
        q = DiffOp(P.ctx, P.coords, step)
        rem = rem - compose(q, D)
        for b, v in step.items():
            quot[b] = quot[b] + v if b in quot else v
    return DiffOp(P.ctx, P.coords, quot), rem


@dataclass
class SymmetryCertificate:
    """Evidence that ``op`` is a symmetry: divisor o op = quotient o divisor + residual."""

    op: DiffOp
    quotient: DiffOp
    divisor: DiffOp
    residual: DiffOp

    @property
    def holds(self) -> bool:
        return self.residual.is_zero()

    def reconstructs(self) -> bool:
        return compose(self.divisor, self.op) == compose(self.quotient, self.divisor) + self.residual


def is_symmetry(D: DiffOp, L: DiffOp, time: str = "t") -> SymmetryCertificate:
    """Right-divide L o D by L; the certificate's residual is the obstruction."""
    q, r = right_divide(compose(L, D), L, time)
    return SymmetryCertificate(D, q, L, r)


# Schrodinger operators --------------------------------------------------------------

def _m_inv(ctx):
    return ctx.var("m").inverse()


def free_schrodinger(ctx: Context, d: int = 3) -> DiffOp:
    """i d/dt + (1/2m) sum_j d_j^2."""
    coords = ("t", *ctx.spatial) if ctx.spatial else ("t",)
    coords = coords[:d + 1]
    op = DiffOp.partial(ctx, coords, "t").scale(ctx.const(QI(0, 1)))
    half_m = _m_inv(ctx) * (QI(1) / 2)
    for c in coords[1:]:
        op = op + DiffOp.partial(ctx, coords, c, 2).scale(half_m)
    return op


def covariant_schrodinger(V: Expr, A) -> DiffOp:
    """i d_t - (1/2m) sum_j (-i d_j + m A_j)^2 - m V, expanded by composition."""
    ctx = V.ctx
    coords = ("t", *ctx.spatial)
    A = list(A)
    if len(A) != len(ctx.spatial):
        raise GeometryError("A needs one component per spatial coordinate")
    for e in [V, *A]:
        if "t" in e.variables():
            raise GeometryError("V and A must not depend on t")
    m = ctx.var("m")
    i = QI(0, 1)
    op = DiffOp.partial(ctx, coords, "t").scale(ctx.const(i)) - DiffOp.scalar(m * V, coords)
    coef = _m_inv(ctx) * (QI(-1) / 2)
    for j, c in enumerate(ctx.spatial):
        f = DiffOp.partial(ctx, coords, c).scale(ctx.const(-i)) + DiffOp.scalar(m * A[j], coords)
        op = op + compose(f, f).scale(coef)
    return op


# Operator ansatz ---------------------------------------------------------------------

def _ansatz_op(unk: Unknowns, ctx, coords, order: int, degree_of, mpowers_of, label="D") -> DiffOp:
    n = len(coords)
    terms = {}
    m = ctx.var("m")
    for k in range(order + 1):
        for idx in sorted_indices(n, k):
            alpha = [0] * n
            for a in idx:
                alpha[a] += 1
            alpha = tuple(alpha)
            factors = [m ** p for p in mpowers_of(k)]
            terms[alpha] = unk.ansatz(ctx, coords, degree_of(k), (label, alpha), factors=factors)
    return DiffOp(ctx, tuple(coords), terms)


def _symbol_unknowns(op: DiffOp, order: int) -> set:
    out = set()
    for a, c in op.terms.items():
        if sum(a) == order:
            out |= c.unknowns()
    return out


@dataclass
class OperatorSolution:
    """Symmetries with a canonical principal-symbol basis.

    ``operators`` pairs with the symbol basis; ``phases`` are solutions of
    lower order only (e.g. constants), reported separately.
    """

    order: int
    operators: list
    phases: list
    deg: int

    @property
    def dim(self) -> int:
        return len(self.operators)

    def symbols(self) -> list:
        return [principal_symbol(D, self.order) for D in self.operators]


def principal_symbol(D: DiffOp, order: int) -> SymTensor:
    """Order-``order`` part as a symmetric tensor: D = S^{a..} d_a .. + lower."""
    coords = D.coords
    n = len(coords)
    comp = {}
    for idx in sorted_indices(n, order):
        alpha = [0] * n
        for a in idx:
            alpha[a] += 1
        c = D.terms.get(tuple(alpha))
        comp[idx] = (c if c is not None else D.ctx.zero()) * (QI(1) / _multinomial(idx))
    return SymTensor(coords, order, comp)


def _solve_symmetries(L: DiffOp, order: int, degree_of, mpowers_of, deg) -> OperatorSolution:
    ctx, coords = L.ctx, L.coords
    unk = Unknowns()
    D = _ansatz_op(unk, ctx, coords, order, degree_of, mpowers_of)
    _, rem = right_divide(compose(L, D), L)
    sys = LinearSystem(unk)
    for c in rem.terms.values():
        sys.add(c)
    basis = nullspace(sys)
    rows, kernel = split_solutions(basis, _symbol_unknowns(D, order))
    return OperatorSolution(order, [D.evaluate(r) for r in rows], [D.evaluate(r) for r in kernel], deg)


def first_order_symmetries(V: Expr, A, deg: int = 2) -> OperatorSolution:
    """D = S^a d_a + s with Delta^ D = delta Delta^.

    S is polynomial of degree <= deg with m-free coefficients; s has degree
    <= deg + 2 and m-powers 0 and 1.
    """
    L = covariant_schrodinger(V, A)
    return _solve_symmetries(L, 1, lambda k: deg if k == 1 else deg + 2,
                             lambda k: (0,) if k == 1 else (0, 1), deg)


def higher_symmetries(order: int, deg: int, d: int = 3, ctx: Context | None = None) -> OperatorSolution:
    """Symmetries of the free operator up to ``order``: symbol degree <= deg,
    order-k coefficients of degree <= deg + (order - k) with m-powers 0..order-k."""
    if order < 1:
        raise ValueError("order must be at least 1")
    ctx = ctx or chart(d, momenta=False)
    L = free_schrodinger(ctx, d)
    return _solve_symmetries(L, order, lambda k: deg + (order - k),
                             lambda k: tuple(range(order - k + 1)), deg)


def symbol_space_equal(A: list, B: list) -> bool:
    """Exact equality of the spans of two lists of SymTensors of equal rank."""
    if not A and not B:
        return True
    ref = (A or B)[0]
    keys = sorted(ref.comp)
    fam = [[t.comp[k] for k in keys] for t in A] + [[t.comp[k] for k in keys] for t in B]
    vecs = vectorize(fam)
    return Span(vecs[:len(A)]) == Span(vecs[len(A):])


def relift_symbol(T: SymTensor, ctx: Context) -> SymTensor:
    """Move a symbol into another context with the same coordinate names."""
    return SymTensor(T.coords, T.rank, {k: v.lift(ctx) for k, v in T.comp.items()})


# Conformal Killing tensors and the light-cone reduction ---------------------------------

LIGHTCONE_PLUS = "xp"
LIGHTCONE_MINUS = "xm"


def flat_metric(kind: str, N: int):
    """Inverse metric g^{mu nu} and coordinate names for a flat N-dimensional space.

    ``lightcone`` uses (x^+, x^-, x^1..x^{N-2}) with g_{ij} = delta_ij,
    g_{+-} = -1, whose inverse has g^{+-} = -1.
    """
    if kind == "euclidean":
        coords = tuple(f"w{k}" for k in range(N))
        g = {(a, a): 1 for a in range(N)}
    elif kind == "minkowski":
        coords = tuple(f"w{k}" for k in range(N))
        g = {(a, a): (-1 if a == 0 else 1) for a in range(N)}
    elif kind == "lightcone":
        spatial = ("x", "y", "z")[:N - 2] if N - 2 <= 3 else tuple(f"x{k}" for k in range(1, N - 1))
        coords = (LIGHTCONE_PLUS, LIGHTCONE_MINUS, *spatial)
        g = {(0, 1): -1, (1, 0): -1}
        for a in range(2, N):
            g[(a, a)] = 1
    else:
        raise ValueError(f"unknown metric kind {kind!r}")
    return coords, g


def ckt_context(coords) -> Context:
    return Context(tuple(coords) + tuple("p" + c for c in coords))


@dataclass
class CKTSolution:
    coords: tuple
    rank: int
    tensors: list
    k: list

    @property
    def dim(self) -> int:
        return len(self.tensors)


def solve_flat_ckt(N: int, rank: int, deg: int, kind: str = "lightcone",
                   minus_independent: bool | None = None, graded: bool | None = None) -> CKTSolution:
    """Polynomial conformal Killing tensors of a flat metric.

    Solves g^{mu nu} P_mu d_nu S^ = g^ k^ on momentum polynomials (S^ of
    degree ``rank`` in P, k^ of degree rank - 1).  For the light-cone metric
    the components may be required x^- independent; ``graded`` then lets a
    component with q minus-indices have degree deg + q (the truncation that
    matches lower-order terms of the reduced tensors).
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    coords, g = flat_metric(kind, N)
    lightcone = kind == "lightcone"
    if minus_independent is None:
        minus_independent = lightcone
    if graded is None:
        graded = lightcone
    ctx = ckt_context(coords)
    vars_ = [c for c in coords if not (minus_independent and c == LIGHTCONE_MINUS)]
    unk = Unknowns()
    P = [ctx.var("p" + c) for c in coords]
    S = {}
    for idx in sorted_indices(N, rank):
        q = idx.count(1) if (graded and lightcone) else 0
        S[idx] = unk.ansatz(ctx, vars_, deg + q, ("S", idx))
    primary = set(range(len(unk)))
    K = {}
    for idx in sorted_indices(N, rank - 1):
        q = idx.count(1) if (graded and lightcone) else 0
        K[idx] = unk.ansatz(ctx, vars_, deg + q, ("k", idx))

    def hat(T):
        acc = None
        for idx, c in T.items():
            mono = ctx.one()
            for a in idx:
                mono = mono * P[a]
            t = c * (mono * _multinomial(idx))
            acc = t if acc is None else acc + t
        return acc

    Sh, Kh = hat(S), hat(K)
    lhs = None
    for (mu, nu), v in g.items():
        t = Sh.diff(coords[nu]) * (P[mu] * v)
        lhs = t if lhs is None else lhs + t
    gh = None
    for (mu, nu), v in g.items():
        t = P[mu] * P[nu] * v
        gh = t if gh is None else gh + t
    sys = LinearSystem(unk)
    sys.add(lhs - Kh * gh)
    basis = nullspace(sys)
    rows, kernel = split_solutions(basis, primary)
    tensors = [SymTensor(coords, rank, {k: v.evaluate(r) for k, v in S.items()}) for r in rows]
    ks = [SymTensor(coords, rank - 1, {k: v.evaluate(r) for k, v in K.items()}) for r in rows]
    return CKTSolution(coords, rank, tensors, ks)


def reduce_ckt_symbol(T: SymTensor, target: Context) -> SymTensor:
    """Keep the components without minus indices, renaming x^+ -> t."""
    coords = T.coords
    keep = [a for a, c in enumerate(coords) if c != LIGHTCONE_MINUS]
    names = ["t" if coords[a] == LIGHTCONE_PLUS else coords[a] for a in keep]
    order = sorted(range(len(keep)), key=lambda j: (names[j] != "t", j))
    new_coords = tuple(names[j] for j in order)
    pos = {keep[j]: new_idx for new_idx, j in enumerate(order)}
    rename = {LIGHTCONE_PLUS: "t"}
    comp = {}
    for idx, v in T.comp.items():
        if any(a not in pos for a in idx):
            continue
        comp[tuple(sorted(pos[a] for a in idx))] = v.lift(target, rename)
    return SymTensor(new_coords, T.rank, comp)


def lightcone_reduce(D: DiffOp, target: Context) -> DiffOp:
    """Conjugate by exp(-i m x^-): d_- -> -i m, x^+ -> t, d_+ -> d_t.

    The coefficients must not depend on x^-.
    """
    coords = D.coords
    if LIGHTCONE_MINUS not in coords or LIGHTCONE_PLUS not in coords:
        raise GeometryError("operator is not written in light-cone coordinates")
    jm = coords.index(LIGHTCONE_MINUS)
    for c in D.terms.values():
        if LIGHTCONE_MINUS in c.variables():
            raise GeometryError("coefficients depend on x^-; the reduction needs d_- D = 0")
    keep = [a for a in range(len(coords)) if a != jm]
    names = ["t" if coords[a] == LIGHTCONE_PLUS else coords[a] for a in keep]
    order = sorted(range(len(keep)), key=lambda j: (names[j] != "t", j))
    new_coords = tuple(names[j] for j in order)
    rename = {LIGHTCONE_PLUS: "t"}
    factor = target.const(QI(0, -1)) * target.var("m")
    out: dict = {}
    for alpha, c in D.terms.items():
        e = c.lift(target, rename) * (factor ** alpha[jm])
        beta = tuple(alpha[keep[j]] for j in order)
        out[beta] = out[beta] + e if beta in out else e
    return DiffOp(target, new_coords, out)


def laplacian_lightcone(ctx: Context, coords) -> DiffOp:
    """delta^{ij} d_i d_j - 2 d_+ d_-."""
    n = len(coords)
    op = DiffOp(ctx, tuple(coords), {})
    jp, jm = coords.index(LIGHTCONE_PLUS), coords.index(LIGHTCONE_MINUS)
    alpha = [0] * n
    alpha[jp] = alpha[jm] = 1
    op = op + DiffOp(ctx, tuple(coords), {tuple(alpha): ctx.const(-2)})
    for c in coords:
        if c not in (LIGHTCONE_PLUS, LIGHTCONE_MINUS):
            op = op + DiffOp.partial(ctx, coords, c, 2)
    return op


def ckv_operator(V: SymTensor, ctx: Context) -> DiffOp:
    """First-order Laplacian symmetry V^mu d_mu + (N - 2)/(2N) d_mu V^mu of a conformal Killing vector."""
    coords = V.coords
    N = len(coords)
    terms = {}
    div = ctx.zero()
    for a, c in enumerate(coords):
        alpha = tuple(1 if k == a else 0 for k in range(N))
        e = V.comp[(a,)].lift(ctx)
        terms[alpha] = e
        div = div + e.diff(c)
    terms[(0,) * N] = div * (QI(N - 2) / (2 * N))
    return DiffOp(ctx, tuple(coords), terms)


# Text format ---------------------------------------------------------------------------

def format_diffop(D: DiffOp) -> str:
    if D.is_zero():
        return "0"
    chunks = []
    for alpha in sorted(D.terms, key=lambda a: (-sum(a), tuple(-x for x in a))):
        c = D.terms[alpha]
        ds = []
        for name, k in zip(D.coords, alpha):
            if k == 1:
                ds.append("d" + name)
            elif k:
                ds.append(f"d{name}^{k}")
        cs = str(c)
        chunks.append(f"({cs})" + ("*" + "*".join(ds) if ds else ""))
    return " + ".join(chunks)


def parse_diffop(text: str, ctx: Context, coords) -> DiffOp:
    """Parse operator text where ``d<coord>`` tokens are derivatives.

    Derivative tokens must stand to the right of all coefficients in each
    product (normal order), e.g. ``x*dx - i*m*x^2 + 1/2*dx^2``.
    """
    from .parse import ParseError, parse

    dnames = {"d" + c: c for c in coords}
    ext = ctx.extend(list(dnames))
    tokens = {n: ext.var(n) for n in dnames}
    e = parse(text, ext, tokens)
    out: dict = {}
    didx = [ext.index(n) for n in dnames]
    for eps, k, p in e.parts():
        for mono, c in p.items():
            alpha = tuple(mono[j] for j in didx)
            rest = list(mono)
            for j in didx:
                rest[j] = 0
            coef = Expr(ext, {eps: (k, {tuple(rest): c})}).lift(ctx)
            if any(v < 0 for v in alpha):
                raise ParseError("negative power of a derivative", 0, text)
            out[alpha] = out[alpha] + coef if alpha in out else coef
    return DiffOp(ctx, tuple(coords), out)
