"""Linear systems in ansatz coefficients and their exact solution spaces.

Unknowns are integer column indices.  A :class:`LinExpr` is a linear form
``sum_u u * e_u`` with :class:`Expr` coefficients; an equation ``L = 0`` must
hold identically in every variable, so after clearing ``rho`` denominators
each numerator monomial (and each power of ``r``) gives one scalar row.
Elimination is sparse Gauss-Jordan over Q(i) and always ends in reduced
row-echelon form, which makes solution bases canonical.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .expr import Context, Expr, _pmul
from .field import ONE, QI, ZERO

CONST = -1  # column of the inhomogeneous part


class InconsistentSystem(ValueError):
    """A constant nonzero equation survived elimination."""


class LinExpr:
    """Linear form in unknowns with expression coefficients (``CONST`` = 1)."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping[int, Expr] | None = None):
        self.ctx = ctx
        self.terms = {u: e for u, e in (terms or {}).items() if not e.is_zero()}

    @classmethod
    def const(cls, e: Expr) -> "LinExpr":
        return cls(e.ctx, {CONST: e})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, Expr):
            other = LinExpr.const(other)
        elif isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, LinExpr):
            return NotImplemented
        out = dict(self.terms)
        for u, e in other.terms.items():
            out[u] = out[u] + e if u in out else e
        return LinExpr(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr(self.ctx, {u: -e for u, e in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LinExpr):
            if set(other.terms) <= {CONST}:
                other = other.terms.get(CONST, self.ctx.zero())
            elif set(self.terms) <= {CONST}:
                return other * self.terms.get(CONST, self.ctx.zero())
            else:
                raise TypeError("product of two non-constant linear forms is not linear")
        if isinstance(other, Expr) or isinstance(other, (int, QI)) or hasattr(other, "numerator"):
            return LinExpr(self.ctx, {u: e * other for u, e in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def diff(self, name: str, times: int = 1) -> "LinExpr":
        return LinExpr(self.ctx, {u: e.diff(name, times) for u, e in self.terms.items()})

    def subs(self, values) -> "LinExpr":
        return LinExpr(self.ctx, {u: e.subs(values) for u, e in self.terms.items()})

    def coeff(self, name: str, power: int) -> "LinExpr":
        return LinExpr(self.ctx, {u: e.coeff(name, power) for u, e in self.terms.items()})

    def lift(self, target: Context, rename=None) -> "LinExpr":
        return LinExpr(target, {u: e.lift(target, rename) for u, e in self.terms.items()})

    def evaluate(self, assignment: Mapping[int, QI]) -> Expr:
        """Substitute numeric values for the unknowns (missing ones are 0)."""
        out = self.terms.get(CONST, self.ctx.zero())
        for u, e in self.terms.items():
            if u == CONST:
                continue
            c = assignment.get(u)
            if c:
                out = out + e * c
        return out

    def unknowns(self) -> set:
        return set(self.terms) - {CONST}

    def free_of(self, *names) -> bool:
        return all(e.free_of(*names) for e in self.terms.values())

    def __repr__(self):
        inner = ", ".join(f"u{u}: {e}" for u, e in sorted(self.terms.items()))
        return f"LinExpr({{{inner}}})"


def as_linexpr(x, ctx: Context) -> LinExpr:
    if isinstance(x, LinExpr):
        return x
    if isinstance(x, Expr):
        return LinExpr.const(x)
    return LinExpr.const(ctx.const(x))


def monomials(ctx: Context, variables: Sequence[str], deg: int, mindeg: int = 0) -> list:
    """Exponent tuples of total degree in ``[mindeg, deg]`` in ``variables``."""
    idx = [ctx.index(v) for v in variables]
    out = []
    for total in range(mindeg, deg + 1):
        for combo in itertools.combinations_with_replacement(range(len(idx)), total):
            e = [0] * ctx.nvars
            for c in combo:
                e[idx[c]] += 1
            out.append(tuple(e))
    return out


@dataclass
class Unknowns:
    """Allocator of unknown columns, remembering a label per column."""

    labels: list = field(default_factory=list)

    def new(self, label: Hashable) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def __len__(self):
        return len(self.labels)

    def ansatz(self, ctx: Context, variables: Sequence[str], deg: int, label: Hashable = "",
               factors: Iterable[Expr] | None = None, mindeg: int = 0) -> LinExpr:
        """General polynomial of degree <= deg, optionally times each of ``factors``."""
        factors = list(factors) if factors is not None else [ctx.one()]
        terms = {}
        for f in factors:
            for mono in monomials(ctx, variables, deg, mindeg):
                u = self.new((label, mono, str(f)))
                terms[u] = ctx.monomial(mono) * f
        return LinExpr(ctx, terms)


@dataclass
class LinearSystem:
    """Unknown count plus equations that must vanish identically."""

    unknowns: Unknowns
    equations: list = field(default_factory=list)

    def add(self, eq) -> None:
        if isinstance(eq, LinExpr):
            if not eq.is_zero():
                self.equations.append(eq)
        elif isinstance(eq, Expr):
            if not eq.is_zero():
                self.equations.append(LinExpr.const(eq))
        else:
            for e in eq:
                self.add(e)

    def rows(self):
        for eq in self.equations:
            yield from coefficient_rows(eq)


def coefficient_rows(eq: LinExpr) -> list:
    """Scalar rows ``{column: coefficient}`` expressing ``eq == 0``."""
    ctx = eq.ctx
    kmax: dict = {}
    for e in eq.terms.values():
        for eps, k, _ in e.parts():
            kmax[eps] = max(kmax.get(eps, 0), k)
    rows: dict = {}
    for u, e in eq.terms.items():
        for eps, k, p in e.parts():
            shift = kmax[eps] - k
            num = p if not shift else _pmul(p, ctx.rho_power(shift))
            for mono, c in num.items():
                row = rows.setdefault((eps, mono), {})
                old = row.get(u)
                nv = c if old is None else old + c
                if nv:
                    row[u] = nv
                else:
                    row.pop(u, None)
    return [r for r in rows.values() if r]


class Eliminator:
    """Incremental sparse Gauss-Jordan elimination over Q(i).

    Columns are compared through ``order`` (default: the integers themselves
    with ``CONST`` last), so the final reduced echelon form is canonical.
    """

    def __init__(self, ncols: int | None = None):
        self.pivots: dict = {}  # pivot column -> normalized row
        self.birth: dict = {}  # pivot column -> insertion counter
        self.ncols = ncols
        self._final = False

    @staticmethod
    def _key(c):
        return (1, 0) if c == CONST else (0, c)

    def add_row(self, row: Mapping) -> bool:
        """Reduce and insert a row; returns True when the rank grew."""
        row = {c: v for c, v in row.items() if v}
        pivots, birth = self.pivots, self.birth
        heap = [(birth[c], c) for c in row if c in pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            v = row.get(c)
            if v is None:
                continue
            for cc, pv in pivots[c].items():
                old = row.get(cc)
                if old is None:
                    row[cc] = -(v * pv)
                    if cc in pivots:
                        heapq.heappush(heap, (birth[cc], cc))
                else:
                    nv = old - v * pv
                    if nv:
                        row[cc] = nv
                    else:
                        del row[cc]
        if not row:
            return False
        lead = min(row, key=self._key)
        inv = row[lead].inverse()
        if not inv.is_one():
            row = {c: v * inv for c, v in row.items()}
        row[lead] = ONE
        pivots[lead] = row
        birth[lead] = len(birth)
        self._final = False
        return True

    def add_rows(self, rows: Iterable[Mapping]) -> None:
        for r in rows:
            self.add_row(r)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self) -> dict:
        """Back-substitute so every pivot column is clear in the other rows."""
        if self._final:
            return self.pivots
        order = sorted(self.pivots, key=self._key, reverse=True)
        done = set()
        for c in order:
            row = self.pivots[c]
            for cc in [x for x in row if x != c and x in done]:
                v = row.get(cc)
                if v is None:
                    continue
                for k2, pv in self.pivots[cc].items():
                    old = row.get(k2)
                    nv = -(v * pv) if old is None else old - v * pv
                    if nv:
                        row[k2] = nv
                    else:
                        row.pop(k2, None)
            done.add(c)
        self._final = True
        return self.pivots

    def is_consistent(self) -> bool:
        return CONST not in self.pivots

    def nullspace(self, columns: Iterable[int]) -> list:
        """Canonical basis of the homogeneous solutions over ``columns``."""
        piv = self.reduce()
        cols = sorted(set(columns) - {CONST})
        free = [c for c in cols if c not in piv]
        by_free: dict = {f: {f: ONE} for f in free}
        for p, row in piv.items():
            if p == CONST:
                continue
            for c, v in row.items():
                if c in by_free:
                    by_free[c][p] = -v
        return [by_free[f] for f in free]

    def particular(self) -> dict:
        """Solution with all free unknowns zero (inhomogeneous systems)."""
        piv = self.reduce()
        if CONST in piv:
            raise InconsistentSystem("constant equation 1 = 0 after elimination")
        sol = {}
        for p, row in piv.items():
            v = row.get(CONST)
            if v:
                sol[p] = -v
        return sol


def solve(system: LinearSystem) -> tuple[dict, list]:
    """Return ``(particular, nullspace_basis)``; raises on inconsistency."""
    elim = Eliminator()
    elim.add_rows(system.rows())
    part = elim.particular()
    return part, elim.nullspace(range(len(system.unknowns)))


def nullspace(system: LinearSystem) -> list:
    """Canonical basis of the solution space of a homogeneous system.

    Each basis element is a dict ``{unknown: value}`` (zeros omitted).  Any
    unknown-free equation must vanish, else :class:`InconsistentSystem`.
    """
    elim = Eliminator()
    for row in system.rows():
        elim.add_row(row)
    if not elim.is_consistent():
        raise InconsistentSystem("constant nonzero equation in a homogeneous system")
    return elim.nullspace(range(len(system.unknowns)))


# Spans of expression families -----------------------------------------------


def vectorize(families: Sequence[Sequence[Expr]]) -> list:
    """Flatten tuples of expressions to sparse coordinate vectors.

    All members share one ``rho`` denominator per ``r``-power so that the
    flattening is linear.
    """
    kmax: dict = {}
    for fam in families:
        for e in fam:
            for eps, k, _ in e.parts():
                kmax[eps] = max(kmax.get(eps, 0), k)
    out = []
    for fam in families:
        vec = {}
        for slot, e in enumerate(fam):
            for eps, k, p in e.parts():
                shift = kmax[eps] - k
                num = p if not shift else _pmul(p, e.ctx.rho_power(shift))
                for mono, c in num.items():
                    vec[(slot, eps, mono)] = c
        out.append(vec)
    return out


class Span:
    """Subspace spanned by sparse vectors with hashable, sortable keys."""

    def __init__(self, vectors: Iterable[Mapping], keys: Sequence | None = None):
        vectors = [dict(v) for v in vectors]
        allkeys = set(keys or ())
        for v in vectors:
            allkeys.update(v)
        self.keys = sorted(allkeys, key=_sortable)
        self.col = {k: j for j, k in enumerate(self.keys)}
        self.elim = Eliminator()
        for v in vectors:
            self.elim.add_row({self.col[k]: c for k, c in v.items()})
        self.elim.reduce()

    @property
    def dim(self) -> int:
        return self.elim.rank

    def __len__(self):
        return self.dim

    def rows(self) -> list:
        """Reduced echelon basis, as key-indexed dicts ordered by pivot."""
        piv = self.elim.reduce()
        return [{self.keys[c]: v for c, v in piv[p].items()} for p in sorted(piv)]

    def canonical(self) -> tuple:
        return tuple(tuple(sorted(((_sortable(k), v.re, v.im) for k, v in row.items()))) for row in self.rows())

    def contains(self, vec: Mapping) -> bool:
        if any(k not in self.col for k, c in vec.items() if c):
            return False
        probe = Eliminator()
        probe.pivots = {c: dict(r) for c, r in self.elim.pivots.items()}
        probe.birth = dict(self.elim.birth)
        return not probe.add_row({self.col[k]: c for k, c in vec.items()})

    def coordinates(self, vec: Mapping) -> dict | None:
        """Coefficients of ``vec`` in the reduced basis (None if outside)."""
        if not self.contains(vec):
            return None
        piv = self.elim.reduce()
        return {p: vec.get(self.keys[p], ZERO) for p in sorted(piv) if vec.get(self.keys[p], ZERO)}

    def issubspace(self, other: "Span") -> bool:
        return all(other.contains(r) for r in self.rows())

    def __eq__(self, other):
        if not isinstance(other, Span):
            return NotImplemented
        return self.dim == other.dim and self.issubspace(other)

    def __repr__(self):
        return f"Span(dim={self.dim})"


def _sortable(k):
    if isinstance(k, tuple):
        return tuple(_sortable(x) for x in k)
    if isinstance(k, str):
        return (1, k)
    return (0, k)


def split_solutions(basis: Sequence[Mapping], primary: Iterable[int]) -> tuple[list, list]:
    """Re-express a solution basis so its primary part is in reduced echelon form.

    Returns ``(rows, kernel)``: ``rows`` are full solutions whose restrictions
    to the ``primary`` unknowns form a canonical basis of the projected
    space; ``kernel`` spans the solutions with vanishing primary part.
    """
    primary = sorted(set(primary))
    pos = {u: j for j, u in enumerate(primary)}
    offset = len(primary)
    elim = Eliminator()
    for k, v in enumerate(basis):
        row = {pos[u]: c for u, c in v.items() if u in pos}
        row[offset + k] = ONE
        elim.add_row(row)
    piv = elim.reduce()
    rows, kernel = [], []
    for p in sorted(piv):
        row = piv[p]
        full: dict = {}
        for c, coef in row.items():
            if c >= offset:
                for u, x in basis[c - offset].items():
                    nv = full.get(u, ZERO) + coef * x
                    if nv:
                        full[u] = nv
                    else:
                        full.pop(u, None)
        (rows if p < offset else kernel).append(full)
    return rows, kernel


def linear_combination(vectors: Sequence[Mapping], target: Mapping) -> list | None:
    """Coefficients ``c`` with ``sum c_k vectors[k] == target``, or None."""
    keys: dict = {}
    for k, v in enumerate(vectors):
        for key, c in v.items():
            keys.setdefault(key, {})[k] = c
    for key, c in target.items():
        if c:
            keys.setdefault(key, {})[CONST] = -c
    elim = Eliminator()
    for row in keys.values():
        elim.add_row(row)
    if not elim.is_consistent():
        return None
    sol = elim.particular()
    return [sol.get(k, ZERO) for k in range(len(vectors))]
