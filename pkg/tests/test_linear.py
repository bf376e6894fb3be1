from __future__ import annotations

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from _support import CTX
from ncsym.field import QI
from ncsym.linear import (Eliminator, InconsistentSystem, LinExpr, LinearSystem, Span, Unknowns,
                          linear_combination, nullspace, solve, split_solutions)

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-2, 2), min_size=c, max_size=c), min_size=r, max_size=r)))


def _system(rows):
    unk = Unknowns()
    us = [unk.new(k) for k in range(len(rows[0]))]
    sys = LinearSystem(unk)
    for row in rows:
        sys.add(LinExpr(CTX, {u: CTX.const(c) for u, c in zip(us, row)}))
    return sys


@given(matrices)
def test_nullspace_matches_sympy(rows):
    basis = nullspace(_system(rows))
    M = sp.Matrix(rows)
    assert len(basis) == len(M.nullspace())
    for v in basis:
        vec = sp.Matrix([sp.Rational(str(v.get(k, QI(0)))) for k in range(M.cols)])
        assert M * vec == sp.zeros(M.rows, 1)


@given(matrices)
def test_span_is_basis_independent(rows):
    a = Span([{k: QI(c) for k, c in enumerate(r) if c} for r in rows])
    shuffled = list(reversed(rows)) + [[x + y for x, y in zip(rows[0], rows[-1])]]
    b = Span([{k: QI(c) for k, c in enumerate(r) if c} for r in shuffled])
    assert a == b
    assert a.canonical() == b.canonical()
    assert a.dim == sp.Matrix(rows).rank()


def test_inconsistent_system_is_reported():
    unk = Unknowns()
    u = unk.new("u")
    sys = LinearSystem(unk)
    sys.add(LinExpr(CTX, {u: CTX.one()}))
    sys.add(LinExpr(CTX, {u: CTX.one()}) - CTX.one())
    sys.add(LinExpr(CTX, {u: CTX.one()}) - CTX.const(2))
    with pytest.raises(InconsistentSystem):
        solve(sys)


def test_polynomial_identity_generates_coefficient_rows():
    # a + b x + c x^2 == 0 identically forces a = b = c = 0
    unk = Unknowns()
    P = unk.ansatz(CTX, ("x",), 2, "P")
    sys = LinearSystem(unk)
    sys.add(P)
    assert nullspace(sys) == []
    sys2 = LinearSystem(unk)
    sys2.add(P.diff("x", 2))
    assert len(nullspace(sys2)) == 2


def test_split_solutions_separates_kernel():
    # unknowns 0, 1 primary; 2 auxiliary free; 0 = 1
    basis = [{0: QI(1), 1: QI(1), 2: QI(1)}, {2: QI(1)}]
    rows, kernel = split_solutions(basis, [0, 1])
    assert len(rows) == 1 and len(kernel) == 1
    assert set(kernel[0]) == {2}


def test_linear_combination():
    vs = [{"a": QI(1)}, {"b": QI(1)}]
    assert linear_combination(vs, {"a": QI(2), "b": QI(-1)}) == [QI(2), QI(-1)]
    assert linear_combination(vs, {"c": QI(1)}) is None


def test_eliminator_rank():
    e = Eliminator()
    assert e.add_row({0: QI(1), 1: QI(2)})
    assert not e.add_row({0: QI(2), 1: QI(4)})
    assert e.rank == 1
