"""Newton-Cartan spacetimes: compatible connections and curvature."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .expr import Context, Expr, chart, coordinate_names
from .field import QI
from .linear import InconsistentSystem, LinearSystem, Unknowns, solve
from .tensor import TensorField, levi_civita


class GeometryError(ValueError):
    pass


@dataclass
class NCSpacetime:
    """Galilean-chart data ``(h, theta, U, A)`` of a Newton-Cartan spacetime.

    ``F`` overrides ``dA`` when a connection two-form is given directly (e.g.
    to build a non-Newtonian connection).  ``V`` and ``Omega`` are kept for
    spacetimes made by :func:`make_vomega_spacetime`.
    """

    ctx: Context
    coords: tuple
    h: TensorField
    theta: TensorField
    U: TensorField
    A: TensorField | None
    F: TensorField | None = None
    V: Expr | None = None
    Omega: Expr | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def d(self) -> int:
        return len(self.coords) - 1

    @property
    def is_vomega(self) -> bool:
        return self.V is not None

    def check(self) -> None:
        """Raise unless h(theta, .) = 0, d theta = 0, theta(U) = 1."""
        n = len(self.coords)
        for a in range(n):
            s = sum((self.h[a, b] * self.theta[b] for b in range(n)), self.ctx.zero())
            if not s.is_zero():
                raise GeometryError("theta does not lie in the kernel of h")
        for a, b in itertools.combinations(range(n), 2):
            if not (self.theta[b].diff(self.coords[a]) - self.theta[a].diff(self.coords[b])).is_zero():
                raise GeometryError("theta is not closed")
        s = sum((self.theta[a] * self.U[a] for a in range(n)), self.ctx.zero())
        if s != self.ctx.one():
            raise GeometryError("theta(U) != 1")

    def two_form(self) -> TensorField:
        if self.F is not None:
            return self.F
        return exterior_derivative(self.A)

    def gauge_shift(self, chi: Expr) -> "NCSpacetime":
        """Same spacetime with A -> A + d chi."""
        A = self.A.map(lambda v: v)
        for a, c in enumerate(self.coords):
            A.comp[(a,)] = A[a] + chi.diff(c)
        return NCSpacetime(self.ctx, self.coords, self.h, self.theta, self.U, A, self.F, self.V, self.Omega)


def _vec(ctx, coords, values, up=True):
    return TensorField(ctx, tuple(coords), 1 if up else 0, 0 if up else 1,
                       {(a,): v for a, v in enumerate(values)})


def galilean_data(ctx: Context, d: int):
    coords = ("t", *coordinate_names(d))
    h = TensorField.build(ctx, coords, 2, 0, lambda a, b: ctx.one() if a == b and a > 0 else ctx.zero(), "sym")
    theta = _vec(ctx, coords, [ctx.one()] + [ctx.zero()] * d, up=False)
    U = _vec(ctx, coords, [ctx.one()] + [ctx.zero()] * d)
    return coords, h, theta, U


def flat_spacetime(d: int = 3, ctx: Context | None = None) -> NCSpacetime:
    ctx = ctx or chart(d)
    if d == 3:
        return make_vomega_spacetime(ctx.zero(), ctx.zero())
    coords, h, theta, U = galilean_data(ctx, d)
    A = _vec(ctx, coords, [ctx.zero()] * (d + 1), up=False)
    return NCSpacetime(ctx, coords, h, theta, U, A, V=ctx.zero(), Omega=ctx.zero())


def make_spacetime(ctx: Context, h, theta, U, A=None, F=None) -> NCSpacetime:
    """Spacetime from explicit component lists (h as nested list)."""
    d = len(theta) - 1
    coords = ("t", *coordinate_names(d))
    n = d + 1
    hT = TensorField(ctx, coords, 2, 0, {(a, b): h[a][b] for a in range(n) for b in range(n)}, "sym")
    S = NCSpacetime(ctx, coords, hT, _vec(ctx, coords, theta, up=False), _vec(ctx, coords, U),
                    _vec(ctx, coords, A, up=False) if A is not None else None,
                    F=F)
    if A is None and F is None:
        S.A = _vec(ctx, coords, [ctx.zero()] * n, up=False)
    S.check()
    return S


def make_vomega_spacetime(V: Expr, Omega: Expr) -> NCSpacetime:
    """Flat Galilean (h, theta, U = d/dt) with potential V and Coriolis potential Omega.

    The connection two-form is F_ti = d_i V, F_ij = -2 eps_ijk d_k Omega, which
    yields Gamma^i_tt = d_i V and Gamma^i_jt = eps_ijk d_k Omega.
    """
    ctx = V.ctx
    if "t" in V.variables() or "t" in Omega.variables():
        raise GeometryError("V and Omega must not depend on t")
    coords, h, theta, U = galilean_data(ctx, 3)
    spatial = coords[1:]
    F = TensorField.zeros(ctx, coords, 0, 2)
    for i in range(3):
        F.comp[(0, i + 1)] = V.diff(spatial[i])
        F.comp[(i + 1, 0)] = -V.diff(spatial[i])
        for j in range(3):
            acc = ctx.zero()
            for k in range(3):
                e = levi_civita(i, j, k)
                if e:
                    acc = acc + Omega.diff(spatial[k]) * (-2 * e)
            F.comp[(i + 1, j + 1)] = acc
    A = None
    if Omega.is_zero():
        A = _vec(ctx, coords, [-V] + [ctx.zero()] * 3, up=False)
    elif Omega.is_polynomial():
        # a potential exists only when the spatial form is closed (Omega harmonic)
        cand = _vec(ctx, coords, [-V] + _potential_from_spatial_form(F, spatial), up=False)
        if exterior_derivative(cand) == F:
            A = cand
    return NCSpacetime(ctx, coords, h, theta, U, A, F=None if A is not None else F, V=V, Omega=Omega)


def _potential_from_spatial_form(F: TensorField, spatial) -> list:
    """Homotopy-operator primitive A_j = int_0^1 s x^i F_ij(s x) ds (polynomial F)."""
    ctx = F.ctx
    idx = [ctx.index(s) for s in spatial]
    out = []
    for j in range(3):
        acc = ctx.zero()
        for i in range(3):
            f = F[i + 1, j + 1]
            if f.is_zero():
                continue
            xi = ctx.var(spatial[i])
            for c, term in f.terms():
                k = sum(next(iter(term.poly))[q] for q in idx)
                acc = acc + xi * term * (c / QI(k + 2))
        out.append(acc)
    return out


def exterior_derivative(A: TensorField) -> TensorField:
    coords = A.coords
    return TensorField.build(A.ctx, coords, 0, 2,
                             lambda a, b: A[b].diff(coords[a]) - A[a].diff(coords[b]), "anti")


def lower_metric(S: NCSpacetime, max_degree: int = 2) -> TensorField:
    """Solve h^ab h_bc = delta^a_c - theta_c U^a, h_ab U^b = 0 for h_ab.

    Searches polynomial solutions of increasing degree; the solution must be
    unique, otherwise (h, theta, U) is rejected.
    """
    if "h_lower" in S._cache:
        return S._cache["h_lower"]
    ctx, coords = S.ctx, S.coords
    n = len(coords)
    last_err = None
    for deg in range(max_degree + 1):
        unk = Unknowns()
        comp = {}
        for a in range(n):
            for b in range(a, n):
                comp[(a, b)] = comp[(b, a)] = unk.ansatz(ctx, coords, deg, ("h", a, b))
        sys = LinearSystem(unk)
        for a in range(n):
            for c in range(n):
                eq = None
                for b in range(n):
                    t = comp[(b, c)] * S.h[a, b]
                    eq = t if eq is None else eq + t
                rhs = (ctx.one() if a == c else ctx.zero()) - S.theta[c] * S.U[a]
                sys.add(eq - rhs)
            eq = None
            for b in range(n):
                t = comp[(a, b)] * S.U[b]
                eq = t if eq is None else eq + t
            sys.add(eq)
        try:
            part, null = solve(sys)
        except InconsistentSystem as exc:
            last_err = exc
            continue
        if null:
            raise GeometryError("h_ab is not uniquely determined by (h, theta, U)")
        lower = TensorField(ctx, coords, 0, 2, {k: v.evaluate(part) for k, v in comp.items()}, "sym")
        S._cache["h_lower"] = lower
        return lower
    raise GeometryError(f"no polynomial h_ab solves the defining system ({last_err})")


def connection(S: NCSpacetime) -> TensorField:
    """Gamma^a_bc = 1/2 h^ad(d_b h_cd + d_c h_bd - d_d h_bc) + d_(b theta_c) U^a + theta_(b F_c)d h^ad."""
    if "gamma" in S._cache:
        return S._cache["gamma"]
    ctx, coords = S.ctx, S.coords
    n = len(coords)
    hl = lower_metric(S)
    F = S.two_form()
    half = QI(1, 0) / 2
    out = {}
    for a, b, c in itertools.product(range(n), repeat=3):
        acc = ctx.zero()
        for d in range(n):
            if S.h[a, d].is_zero():
                continue
            metric = hl[c, d].diff(coords[b]) + hl[b, d].diff(coords[c]) - hl[b, c].diff(coords[d])
            acc = acc + S.h[a, d] * metric * half
            acc = acc + (S.theta[b] * F[c, d] + S.theta[c] * F[b, d]) * S.h[a, d] * half
        acc = acc + (S.theta[c].diff(coords[b]) + S.theta[b].diff(coords[c])) * S.U[a] * half
        out[(a, b, c)] = acc
    gamma = TensorField(ctx, coords, 1, 2, out, "sym23")
    S._cache["gamma"] = gamma
    return gamma


def vomega_connection(V: Expr, Omega: Expr) -> TensorField:
    """The displayed components Gamma^i_tt = d_i V, Gamma^i_jt = eps_ijk d_k Omega."""
    ctx = V.ctx
    coords = ("t", "x", "y", "z")
    G = TensorField.zeros(ctx, coords, 1, 2, "sym23")
    for i in range(3):
        G.comp[(i + 1, 0, 0)] = V.diff(coords[i + 1])
        for j in range(3):
            acc = ctx.zero()
            for k in range(3):
                e = levi_civita(i, j, k)
                if e:
                    acc = acc + Omega.diff(coords[k + 1]) * e
            G.comp[(i + 1, j + 1, 0)] = acc
            G.comp[(i + 1, 0, j + 1)] = acc
    return G


def riemann(S_or_gamma) -> TensorField:
    """R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb."""
    gamma = connection(S_or_gamma) if isinstance(S_or_gamma, NCSpacetime) else S_or_gamma
    ctx, coords = gamma.ctx, gamma.coords
    n = len(coords)
    out = {}
    for a, b, c, d in itertools.product(range(n), repeat=4):
        acc = gamma[a, d, b].diff(coords[c]) - gamma[a, c, b].diff(coords[d])
        for e in range(n):
            acc = acc + gamma[a, c, e] * gamma[e, d, b] - gamma[a, d, e] * gamma[e, c, b]
        out[(a, b, c, d)] = acc
    return TensorField(ctx, coords, 1, 3, out)


def ricci(S_or_gamma) -> TensorField:
    """R_bd = R^a_bad."""
    R = riemann(S_or_gamma)
    n = R.dim
    return TensorField.build(R.ctx, R.coords, 0, 2,
                             lambda b, d: sum((R[a, b, a, d] for a in range(n)), R.ctx.zero()))


def trautman_tensor(S: NCSpacetime) -> TensorField:
    """h^{a[b} R^{c]}_{(de)a} with weight-one brackets; components [b, c, d, e]."""
    R = riemann(S)
    ctx, n = S.ctx, len(S.coords)
    half = QI(1) / 2

    def sym_r(c, d, e, a):
        return (R[c, d, e, a] + R[c, e, d, a]) * half

    def comp(b, c, d, e):
        acc = ctx.zero()
        for a in range(n):
            acc = acc + S.h[a, b] * sym_r(c, d, e, a) - S.h[a, c] * sym_r(b, d, e, a)
        return acc * half

    return TensorField.build(ctx, S.coords, 2, 2, comp)


def check_trautman(S: NCSpacetime) -> bool:
    return trautman_tensor(S).is_zero()


def check_field_equations(S: NCSpacetime, rho_mass: Expr, G: Expr) -> TensorField:
    """Residual R_ab - 4 pi G rho theta_a theta_b, with ``pi`` an opaque symbol."""
    ctx2 = S.ctx.extend(["pi"])
    Ric = ricci(S)
    pi = ctx2.var("pi")
    k = pi * G.lift(ctx2) * rho_mass.lift(ctx2) * 4
    return TensorField.build(ctx2, S.coords, 0, 2,
                             lambda a, b: Ric[a, b].lift(ctx2) - k * S.theta[a].lift(ctx2) * S.theta[b].lift(ctx2))


def covariant_derivative_h(S: NCSpacetime) -> TensorField:
    """(nabla_c h)^{ab}, components [a, b, c]."""
    G = connection(S)
    ctx, coords, n = S.ctx, S.coords, len(S.coords)

    def comp(a, b, c):
        acc = S.h[a, b].diff(coords[c])
        for d in range(n):
            acc = acc + G[a, c, d] * S.h[d, b] + G[b, c, d] * S.h[a, d]
        return acc

    return TensorField.build(ctx, coords, 2, 1, comp)


def covariant_derivative_theta(S: NCSpacetime) -> TensorField:
    """(nabla_c theta)_a, components [c, a]."""
    G = connection(S)
    ctx, coords, n = S.ctx, S.coords, len(S.coords)

    def comp(c, a):
        acc = S.theta[a].diff(coords[c])
        for d in range(n):
            acc = acc - G[d, c, a] * S.theta[d]
        return acc

    return TensorField.build(ctx, coords, 0, 2, comp)


# Config files -------------------------------------------------------------------

def _split_list(text: str) -> list:
    return [s.strip() for s in text.split(",")]


def spacetime_from_config(text: str, ctx: Context | None = None) -> NCSpacetime:
    """Build a spacetime from an INI-style ``[spacetime]`` section.

    Either ``V`` / ``Omega`` (d = 3 only), or explicit components::

        [spacetime]
        dimension = 3
        h = 0,0,0,0; 0,1,0,0; 0,0,1,0; 0,0,0,1
        theta = 1,0,0,0
        U = 1,0,0,0
        A = 0,0,0,0

    Component strings use the expression grammar.  Parse failures raise
    :class:`~ncsym.parse.ParseError`; inconsistent data raises
    :class:`GeometryError`.
    """
    import configparser

    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        from .parse import ParseError

        raise ParseError(f"malformed config: {exc}", 0, text) from None
    if not cp.has_section("spacetime"):
        raise GeometryError("config has no [spacetime] section")
    sec = cp["spacetime"]
    d = int(sec.get("dimension", "3"))
    ctx = ctx or chart(d)
    explicit = any(k in sec for k in ("h", "theta", "U", "A"))
    if not explicit:
        if d != 3 and "V" not in sec and "Omega" not in sec:
            return flat_spacetime(d, ctx)
        if d != 3:
            raise GeometryError("V/Omega spacetimes require dimension 3")
        return make_vomega_spacetime(ctx.parse(sec.get("V", "0")), ctx.parse(sec.get("Omega", "0")))
    if "V" in sec or "Omega" in sec:
        raise GeometryError("give either V/Omega or explicit components, not both")
    n = d + 1
    _, h0, th0, U0 = galilean_data(ctx, d)
    if "h" in sec:
        rows = [_split_list(r) for r in sec["h"].split(";")]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise GeometryError(f"h must be a {n}x{n} matrix")
        h = [[ctx.parse(c) for c in r] for r in rows]
    else:
        h = [[h0[a, b] for b in range(n)] for a in range(n)]

    def vec(key, default):
        if key not in sec:
            return default
        items = _split_list(sec[key])
        if len(items) != n:
            raise GeometryError(f"{key} must have {n} components")
        return [ctx.parse(c) for c in items]

    theta = vec("theta", [th0[a] for a in range(n)])
    U = vec("U", [U0[a] for a in range(n)])
    A = vec("A", [ctx.zero()] * n)
    return make_spacetime(ctx, h, theta, U, A)
