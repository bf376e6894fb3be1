"""Exact scalar expressions over a registered chart.

An :class:`Expr` is a finite sum

    sum_eps  r^eps * N_eps / rho^k_eps        (eps in {0, 1})

where ``N_eps`` is a Laurent polynomial with Gaussian-rational coefficients,
``rho`` is the sum of squares of the spatial coordinates and ``r`` is the
radical with ``r^2 = rho``.  Numerators are kept coprime to ``rho`` so the
stored form is canonical and ``==`` is structural.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from operator import add
from typing import Iterable, Mapping

from .field import ONE, QI, ZERO

Mono = tuple  # exponent tuple, one entry per context variable
Poly = dict  # Mono -> QI


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class Context:
    """Variable registry shared by every expression built over it.

    ``names`` fixes the variable order (and thereby the monomial order),
    ``spatial`` the coordinates entering ``rho``, ``laurent`` the variables
    allowed to carry negative exponents.
    """

    names: tuple
    spatial: tuple = ()
    laurent: tuple = ()
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ContextError(f"duplicate variable names in {self.names}")
        for n in (*self.spatial, *self.laurent):
            if n not in self.names:
                raise ContextError(f"{n!r} is not a registered variable")
        if set(self.spatial) & set(self.laurent):
            raise ContextError("spatial coordinates cannot be Laurent variables")
        for n in self.names:
            if n in _RESERVED:
                raise ContextError(f"{n!r} is a reserved symbol")
        object.__setattr__(self, "_index", {n: k for k, n in enumerate(self.names)})

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContextError(f"unregistered variable {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    @cached_property
    def spatial_index(self) -> tuple:
        return tuple(self._index[n] for n in self.spatial)

    @cached_property
    def laurent_index(self) -> frozenset:
        return frozenset(self._index[n] for n in self.laurent)

    @cached_property
    def zero_mono(self) -> Mono:
        return (0,) * len(self.names)

    def unit(self, name: str, power: int = 1) -> Mono:
        e = [0] * len(self.names)
        e[self.index(name)] = power
        return tuple(e)

    def rho_power(self, k: int) -> Poly:
        cache = _RHO_CACHE.setdefault(self, {0: {self.zero_mono: ONE}})
        if k not in cache:
            cache[k] = _pmul(self.rho_power(k - 1), self._rho())
        return cache[k]

    def _rho(self) -> Poly:
        if not self.spatial:
            raise ContextError("context has no spatial coordinates; r and rho are undefined")
        out = {}
        for s in self.spatial_index:
            e = [0] * len(self.names)
            e[s] = 2
            out[tuple(e)] = ONE
        return out

    def extend(self, names: Iterable[str] = (), laurent: Iterable[str] = ()) -> "Context":
        names = tuple(n for n in names if n not in self._index)
        return Context(self.names + names, self.spatial, tuple(dict.fromkeys((*self.laurent, *laurent))))

    # Expression constructors -------------------------------------------------

    def var(self, name: str) -> "Expr":
        return Expr._from_poly(self, {self.unit(name): ONE})

    def const(self, c) -> "Expr":
        c = QI.coerce(c)
        return Expr._from_poly(self, {self.zero_mono: c} if c else {})

    def zero(self) -> "Expr":
        return Expr(self, {})

    def one(self) -> "Expr":
        return self.const(1)

    def r(self) -> "Expr":
        self._rho()
        return Expr(self, {1: (0, {self.zero_mono: ONE})})

    def rho(self) -> "Expr":
        return Expr._from_poly(self, dict(self._rho()))

    def rho_inv(self, k: int = 1) -> "Expr":
        self._rho()
        return Expr(self, {0: (k, {self.zero_mono: ONE})}) if k else self.one()

    def monomial(self, mono: Mono, coeff=ONE) -> "Expr":
        coeff = QI.coerce(coeff)
        return Expr._from_poly(self, {tuple(mono): coeff} if coeff else {})

    def parse(self, text: str) -> "Expr":
        from .parse import parse

        return parse(text, self)


_RESERVED = {"i", "r", "rho"}
_RHO_CACHE: dict = {}


def chart(d: int = 3, *, momenta: bool = True, mass: bool = True, extra: Iterable[str] = (),
          laurent: Iterable[str] = ()) -> Context:
    """Standard Galilean chart ``(t, x^1..x^d)``; optionally momenta and ``m``.

    For ``d <= 3`` the spatial coordinates are named ``x, y, z``; otherwise
    ``x1 .. xd``.  Momenta are the coordinate names prefixed with ``p``.
    """
    spatial = coordinate_names(d)
    names = ("t", *spatial)
    if momenta:
        names += tuple("p" + n for n in names)
    lau = list(laurent)
    if mass:
        names += ("m",)
        lau.append("m")
    names += tuple(extra)
    return Context(names, spatial, tuple(lau))


def coordinate_names(d: int) -> tuple:
    if d < 1:
        raise ValueError("spatial dimension must be positive")
    return ("x", "y", "z")[:d] if d <= 3 else tuple(f"x{k}" for k in range(1, d + 1))


# Laurent-polynomial kernels ------------------------------------------------


def _padd(acc: Poly, p: Poly, scale: QI = ONE, shift: Mono | None = None) -> Poly:
    """acc += scale * p * x^shift, in place; returns acc."""
    one = scale.__class__ is QI and scale.is_one()
    for e, c in p.items():
        if shift is not None:
            e = tuple(map(add, e, shift))
        if not one:
            c = c * scale
        old = acc.get(e)
        if old is None:
            acc[e] = c
        else:
            s = old + c
            if s:
                acc[e] = s
            else:
                del acc[e]
    return acc


def _pmul(p: Poly, q: Poly) -> Poly:
    if len(p) > len(q):
        p, q = q, p
    out: Poly = {}
    for e1, c1 in p.items():
        _padd(out, q, c1, e1)
    return out


def _pscale(p: Poly, c: QI) -> Poly:
    if not c:
        return {}
    return {e: v * c for e, v in p.items()}


def _div_rho(ctx: Context, p: Poly) -> Poly | None:
    """Exact quotient p / rho, or None when rho does not divide p."""
    sp = ctx.spatial_index
    x, others = sp[0], sp[1:]
    work = dict(p)
    heap = [(-e[x], e) for e in work if e[x] >= 2]
    heapq.heapify(heap)
    q: Poly = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = work.pop(e, None)
        if c is None:
            continue
        base = list(e)
        base[x] -= 2
        qe = tuple(base)
        q[qe] = c
        for s in others:
            f = list(qe)
            f[s] += 2
            f = tuple(f)
            old = work.get(f)
            nv = -c if old is None else old - c
            if nv:
                if old is None and f[x] >= 2:
                    heapq.heappush(heap, (-f[x], f))
                work[f] = nv
            else:
                work.pop(f, None)
    if work:
        return None
    return q


def _normalize(ctx: Context, k: int, p: Poly):
    while k > 0 and p:
        q = _div_rho(ctx, p)
        if q is None:
            break
        p, k = q, k - 1
    return k, p


def _combine(ctx, a, b):
    """Sum of two (k, poly) parts over a common rho-denominator."""
    (k1, p1), (k2, p2) = a, b
    k = max(k1, k2)
    out = dict(p1) if k1 == k else _pmul(p1, ctx.rho_power(k - k1))
    _padd(out, p2 if k2 == k else _pmul(p2, ctx.rho_power(k - k2)))
    return _normalize(ctx, k, out)


class Expr:
    """Immutable exact expression; see the module docstring for the form."""

    __slots__ = ("ctx", "_parts", "_hash")

    def __init__(self, ctx: Context, parts: Mapping):
        self.ctx = ctx
        self._parts = {eps: kp for eps, kp in parts.items() if kp[1]}
        self._hash = None

    @classmethod
    def _from_poly(cls, ctx, poly, eps=0, k=0):
        if k:
            k, poly = _normalize(ctx, k, poly)
        return cls(ctx, {eps: (k, poly)})

    # structure ---------------------------------------------------------------

    def parts(self):
        """Iterate ``(eps, k, numerator)`` triples (numerators are read-only)."""
        for eps in sorted(self._parts):
            k, p = self._parts[eps]
            yield eps, k, p

    def is_zero(self) -> bool:
        return not self._parts

    def __bool__(self):
        return bool(self._parts)

    def is_polynomial(self) -> bool:
        """True when no r or rho^-k appears."""
        return set(self._parts) <= {0} and all(k == 0 for k, _ in self._parts.values())

    @property
    def poly(self) -> Poly:
        """Numerator of a radical-free expression."""
        if not self.is_polynomial():
            raise ValueError("expression involves r or rho^-k")
        return self._parts[0][1] if self._parts else {}

    def is_constant(self) -> bool:
        if not self.is_polynomial():
            return False
        p = self.poly
        return not p or (len(p) == 1 and self.ctx.zero_mono in p)

    def constant_value(self) -> QI:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.poly.get(self.ctx.zero_mono, ZERO)

    def variables(self) -> set:
        used = set()
        for eps, k, p in self.parts():
            if eps or k:
                used.update(self.ctx.spatial)
            for e in p:
                used.update(self.ctx.names[j] for j, v in enumerate(e) if v)
        return used

    def free_of(self, *names) -> bool:
        return not (self.variables() & set(names))

    def degree(self, name: str) -> int:
        """Largest exponent of a variable in the numerators (-inf as None)."""
        j = self.ctx.index(name)
        degs = [e[j] for _, _, p in self.parts() for e in p]
        return max(degs) if degs else None

    def min_degree(self, name: str) -> int:
        j = self.ctx.index(name)
        degs = [e[j] for _, _, p in self.parts() for e in p]
        return min(degs) if degs else None

    def coeff(self, name: str, power: int) -> "Expr":
        """Collect the terms with ``name^power`` and strip that factor."""
        j = self.ctx.index(name)
        if self.ctx.names[j] in self.ctx.spatial and not self.is_polynomial():
            raise ValueError("coefficient extraction in a spatial variable requires a polynomial")
        parts = {}
        for eps, k, p in self.parts():
            q = {}
            for e, c in p.items():
                if e[j] == power:
                    q[e[:j] + (0,) + e[j + 1:]] = c
            if q:
                parts[eps] = (k, q)
        return Expr(self.ctx, parts)

    def terms(self):
        """Yield ``(coefficient, single-term Expr without coefficient)`` pairs."""
        for eps, k, p in self.parts():
            for e, c in p.items():
                yield c, Expr(self.ctx, {eps: (k, {e: ONE})})

    # arithmetic ---------------------------------------------------------------

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.ctx != self.ctx:
                raise ContextError("expressions live in different contexts")
            return other
        return self.ctx.const(other)

    def __add__(self, other):
        if not isinstance(other, (Expr, int, QI)) and not hasattr(other, "numerator"):
            return NotImplemented
        other = self._coerce(other)
        parts = dict(self._parts)
        for eps, kp in other._parts.items():
            parts[eps] = _combine(self.ctx, parts[eps], kp) if eps in parts else kp
        return Expr(self.ctx, parts)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.ctx, {eps: (k, _pscale(p, -ONE)) for eps, (k, p) in self._parts.items()})

    def __sub__(self, other):
        if not isinstance(other, (Expr, int, QI)) and not hasattr(other, "numerator"):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Expr):
            if other.ctx != self.ctx:
                raise ContextError("expressions live in different contexts")
        elif isinstance(other, (int, QI)) or hasattr(other, "numerator"):
            c = QI.coerce(other)
            return Expr(self.ctx, {eps: (k, _pscale(p, c)) for eps, (k, p) in self._parts.items()})
        else:
            return NotImplemented
        ctx = self.ctx
        out: dict = {}
        for e1, (k1, p1) in self._parts.items():
            for e2, (k2, p2) in other._parts.items():
                prod = _pmul(p1, p2)
                eps, k = e1 + e2, k1 + k2
                if eps == 2:
                    eps = 0
                    if k:
                        k -= 1
                    else:
                        prod = _pmul(prod, ctx.rho_power(1))
                kp = _normalize(ctx, k, prod) if k else (k, prod)
                out[eps] = _combine(ctx, out[eps], kp) if eps in out else kp
        return Expr(ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Expr":
        """Inverse of an invertible single term (constant, Laurent monomial, r, rho)."""
        ctx = self.ctx
        if len(self._parts) != 1:
            raise ZeroDivisionError(f"{self} is not invertible")
        (eps, (k, p)), = self._parts.items()
        if len(p) == 1:
            (e, c), = p.items()
            lau = ctx.laurent_index
            if all(v == 0 or j in lau for j, v in enumerate(e)):
                num = {tuple(-v for v in e): c.inverse()}
                base = Expr(ctx, {0: (0, num)})
                if k:
                    base = base * Expr(ctx, {0: (0, ctx.rho_power(k))})
                if eps:
                    base = base * ctx.r() * ctx.rho_inv(1)
                return base
        if not ctx.spatial or len(p) != len(ctx.spatial):
            raise ZeroDivisionError(f"{self} is not invertible")
        # numerator equal to c*rho
        q = _div_rho(ctx, p)
        if q is not None and len(q) == 1 and ctx.zero_mono in q:
            c = q[ctx.zero_mono]
            inv = ctx.const(c.inverse()) * ctx.rho_inv(1)
            if k:
                inv = inv * Expr(ctx, {0: (0, ctx.rho_power(k))})
            if eps:
                inv = inv * ctx.r() * ctx.rho_inv(1)
            return inv
        raise ZeroDivisionError(f"{self} is not invertible")

    def __truediv__(self, other):
        if isinstance(other, Expr):
            return self * other.inverse()
        return self * QI.coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.ctx == other.ctx and self._parts == other._parts
        if isinstance(other, (int, QI)):
            return self == self.ctx.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((eps, k, frozenset(p.items())) for eps, k, p in self.parts()))
        return self._hash

    # calculus -----------------------------------------------------------------

    def diff(self, name: str, times: int = 1) -> "Expr":
        out = self
        for _ in range(times):
            out = out._diff1(name)
        return out

    def _diff1(self, name: str) -> "Expr":
        ctx = self.ctx
        j = ctx.index(name)
        spatial = name in ctx.spatial
        result: dict = {}
        for eps, (k, p) in self._parts.items():
            dp = _pdiff(p, j)
            if not spatial or (eps == 0 and k == 0):
                kp = (k, dp)
            else:
                # d(P r^eps rho^-k) = r^eps (dP rho + (eps - 2k) x P) / rho^(k+1)
                num = _pmul(dp, ctx.rho_power(1))
                factor = eps - 2 * k
                if factor:
                    _padd(num, p, QI(factor), ctx.unit(name))
                kp = _normalize(ctx, k + 1, num)
            if kp[1]:
                result[eps] = _combine(ctx, result[eps], kp) if eps in result else kp
        return Expr(ctx, result)

    def subs(self, values: Mapping[str, "Expr"]) -> "Expr":
        """Substitute expressions for variables occurring with exponents >= 0."""
        ctx = self.ctx
        idx = {ctx.index(n): v for n, v in values.items()}
        for j in idx:
            if ctx.names[j] in ctx.spatial and not self.is_polynomial():
                raise ValueError("cannot substitute a spatial coordinate under r or rho")
        out = ctx.zero()
        cache: dict = {}
        for eps, k, p in self.parts():
            rest_factor = Expr(ctx, {eps: (k, {ctx.zero_mono: ONE})})
            acc = ctx.zero()
            for e, c in p.items():
                kept = list(e)
                term = None
                for j, v in idx.items():
                    if e[j]:
                        if e[j] < 0:
                            raise ValueError(f"cannot substitute into negative power of {ctx.names[j]}")
                        key = (j, e[j])
                        if key not in cache:
                            cache[key] = v ** e[j]
                        term = cache[key] if term is None else term * cache[key]
                        kept[j] = 0
                mono = Expr(ctx, {0: (0, {tuple(kept): c})})
                acc = acc + (mono if term is None else mono * term)
            out = out + acc * rest_factor
        return out

    def lift(self, target: Context, rename: Mapping[str, str] | None = None) -> "Expr":
        """Re-express in ``target`` (which must register every used variable)."""
        rename = rename or {}
        src = self.ctx
        if target == src and not rename:
            return self
        if any(eps or k for eps, k, _ in self.parts()):
            if tuple(rename.get(n, n) for n in src.spatial) != target.spatial:
                raise ContextError("radical expressions need identical spatial coordinates")
        pos = [target.index(rename.get(n, n)) if rename.get(n, n) in target else None
               for n in src.names]
        parts = {}
        for eps, k, p in self.parts():
            q = {}
            for e, c in p.items():
                f = [0] * target.nvars
                for j, v in enumerate(e):
                    if v:
                        if pos[j] is None:
                            raise ContextError(f"variable {src.names[j]!r} missing from target context")
                        f[pos[j]] += v
                q[tuple(f)] = c
            parts[eps] = (k, q)
        return Expr(target, parts)

    def conjugate(self) -> "Expr":
        return Expr(self.ctx, {eps: (k, {e: c.conjugate() for e, c in p.items()})
                               for eps, (k, p) in self._parts.items()})

    # printing -------------------------------------------------------------------

    def __str__(self):
        from .parse import format_expr

        return format_expr(self)

    def __repr__(self):
        return f"Expr({self})"


def _pdiff(p: Poly, j: int) -> Poly:
    out = {}
    for e, c in p.items():
        v = e[j]
        if v:
            f = e[:j] + (v - 1,) + e[j + 1:]
            out[f] = c * v
    return out


def grlex_key(mono: Mono):
    """Sort key: total degree, then lexicographic in context order."""
    return (sum(mono), mono)
