"""Component tensors over a chart and the Lie-derivative formulas on them.

Components may be :class:`~ncsym.expr.Expr` or :class:`~ncsym.linear.LinExpr`
(when a vector field is an ansatz), so every formula below only relies on
``+``, ``*`` and ``.diff``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .expr import Context


@dataclass
class TensorField:
    """Components ``comp[(a1.., b1..)]`` of a (up, down) tensor in ``coords``."""

    ctx: Context
    coords: tuple
    up: int
    down: int
    comp: dict
    symmetry: str = ""

    @classmethod
    def zeros(cls, ctx: Context, coords, up: int, down: int, symmetry: str = "") -> "TensorField":
        n = len(coords)
        comp = {idx: ctx.zero() for idx in itertools.product(range(n), repeat=up + down)}
        return cls(ctx, tuple(coords), up, down, comp, symmetry)

    @classmethod
    def build(cls, ctx, coords, up, down, fn, symmetry: str = "") -> "TensorField":
        n = len(coords)
        comp = {idx: fn(*idx) for idx in itertools.product(range(n), repeat=up + down)}
        return cls(ctx, tuple(coords), up, down, comp, symmetry)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.comp[idx]

    def indices(self):
        return itertools.product(range(self.dim), repeat=self.up + self.down)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.comp.values())

    def nonzero(self) -> dict:
        return {k: v for k, v in self.comp.items() if not v.is_zero()}

    def map(self, fn) -> "TensorField":
        return TensorField(self.ctx, self.coords, self.up, self.down,
                           {k: fn(v) for k, v in self.comp.items()}, self.symmetry)

    def __add__(self, other: "TensorField") -> "TensorField":
        return TensorField(self.ctx, self.coords, self.up, self.down,
                           {k: v + other.comp[k] for k, v in self.comp.items()}, self.symmetry)

    def __sub__(self, other: "TensorField") -> "TensorField":
        return TensorField(self.ctx, self.coords, self.up, self.down,
                           {k: v - other.comp[k] for k, v in self.comp.items()}, self.symmetry)

    def scale(self, factor) -> "TensorField":
        return self.map(lambda v: v * factor)

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return (self.up, self.down, self.coords) == (other.up, other.down, other.coords) and all(
            (v - other.comp[k]).is_zero() for k, v in self.comp.items())

    def __str__(self):
        lines = []
        for k, v in sorted(self.nonzero().items()):
            ups = "".join(self.coords[a] for a in k[:self.up])
            downs = "".join(self.coords[a] for a in k[self.up:])
            lines.append(f"[{ups}|{downs}] = {v}")
        return "\n".join(lines) or "0"


def lie_derivative(X, T: TensorField) -> TensorField:
    """Lie derivative of ``T`` along the vector with components ``X``."""
    coords = T.coords
    n = len(coords)
    dX = [[X[a].diff(coords[c]) for a in range(n)] for c in range(n)]  # dX[c][a] = d_c X^a
    out = {}
    for idx in T.indices():
        acc = None
        terms = []
        for c in range(n):
            terms.append(X[c] * T.comp[idx].diff(coords[c]))
        for k in range(T.up):
            for c in range(n):
                src = idx[:k] + (c,) + idx[k + 1:]
                if not T.comp[src].is_zero():
                    terms.append(-(T.comp[src] * dX[c][idx[k]]))
        for k in range(T.up, T.up + T.down):
            for c in range(n):
                src = idx[:k] + (c,) + idx[k + 1:]
                if not T.comp[src].is_zero():
                    terms.append(T.comp[src] * dX[idx[k]][c])
        for t in terms:
            acc = t if acc is None else acc + t
        out[idx] = acc
    return TensorField(T.ctx, coords, T.up, T.down, out)


def lie_derivative_connection(X, gamma: TensorField) -> TensorField:
    """(L_X Gamma)^a_bc including the inhomogeneous second-derivative term."""
    coords = gamma.coords
    n = len(coords)
    dX = [[X[a].diff(coords[c]) for a in range(n)] for c in range(n)]
    out = {}
    for a, b, c in gamma.indices():
        acc = X[a].diff(coords[b]).diff(coords[c])
        for d in range(n):
            acc = acc + X[d] * gamma[a, b, c].diff(coords[d])
            if not gamma[d, b, c].is_zero():
                acc = acc - gamma[d, b, c] * dX[d][a]
            if not gamma[a, d, c].is_zero():
                acc = acc + gamma[a, d, c] * dX[b][d]
            if not gamma[a, b, d].is_zero():
                acc = acc + gamma[a, b, d] * dX[c][d]
        out[(a, b, c)] = acc
    return TensorField(gamma.ctx, coords, 1, 2, out)


def lie_bracket(X, Y, coords) -> list:
    """[X, Y]^a = X^b d_b Y^a - Y^b d_b X^a."""
    n = len(coords)
    out = []
    for a in range(n):
        acc = None
        for b in range(n):
            t = X[b] * Y[a].diff(coords[b]) - Y[b] * X[a].diff(coords[b])
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def levi_civita(i: int, j: int, k: int) -> int:
    """epsilon_ijk with epsilon_123 = +1 (0-based spatial indices)."""
    if len({i, j, k}) < 3:
        return 0
    perm = (i, j, k)
    inversions = sum(1 for p in range(3) for q in range(p + 1, 3) if perm[p] > perm[q])
    return -1 if inversions % 2 else 1
