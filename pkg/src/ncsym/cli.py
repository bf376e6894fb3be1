"""Command-line front end: ``ncsym <command> [options]``.

Exit status: 0 on success, 1 when a solver precondition fails, 2 on a parse
or usage error.  Output is deterministic for identical input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .expr import chart
from .geometry import GeometryError, connection, make_vomega_spacetime, ricci, check_trautman, spacetime_from_config
from .parse import ParseError

EXIT_OK, EXIT_PRECONDITION, EXIT_PARSE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class Report:
    """Ordered key/value records plus a human-readable rendering."""

    command: str
    records: list = field(default_factory=list)
    text: list = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.records.append((key, str(value)))

    def line(self, s: str) -> None:
        self.text.append(s)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            rows = [("command", self.command)] + self.records
            return "\n".join(f"{k} = {v}" for k, v in rows) + "\n"
        return "\n".join(self.text) + "\n"


# Spacetime input -------------------------------------------------------------------

def _spacetime(args):
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if args.V is not None or args.Omega is not None:
            raise UsageError("--config excludes --V/--Omega")
        return spacetime_from_config(text)
    ctx = chart(3)
    V = ctx.parse(args.V or "0")
    Omega = ctx.parse(args.Omega or "0")
    return make_vomega_spacetime(V, Omega)


def _positive(name, value):
    if value is not None and value < 0:
        raise UsageError(f"--{name} must be non-negative")
    return value


# Formatting ----------------------------------------------------------------------

def _vector_report(rep: Report, B, title: str):
    from .symmetry import format_vector

    rep.add("dimension", B.dim)
    rep.add("coordinates", ",".join(B.coords))
    rep.line(f"{title}: {B.dim} generators (degree bound {B.deg})")
    for k, X in enumerate(B.vectors):
        for c, e in zip(B.coords, X):
            if not e.is_zero():
                rep.add(f"generator.{k}.{c}", e)
        rep.line(f"  X{k} = {format_vector(X, B.coords)}")


def _idx(coords, idx) -> str:
    return "".join(coords[a] for a in idx) or "-"


def _tensor_report(rep: Report, sol, title: str):
    rep.add("dimension", len(sol.tensors))
    rep.add("rank", sol.rank)
    rep.line(f"{title}: {len(sol.tensors)} generators (rank {sol.rank})")
    for k, T in enumerate(sol.tensors):
        rep.line(f"  T{k}:")
        for idx, c in sorted(T.comp.items()):
            if not c.is_zero():
                rep.add(f"generator.{k}.X.{_idx(T.coords, idx)}", c)
                rep.line(f"    X[{_idx(T.coords, idx)}] = {c}")
        for m, chi in sorted(T.chi.items(), reverse=True):
            for idx, c in sorted(chi.comp.items()):
                if not c.is_zero():
                    rep.add(f"generator.{k}.chi{m}.{_idx(T.coords, idx)}", c)
                    rep.line(f"    chi{m}[{_idx(T.coords, idx)}] = {c}")


def _operator_report(rep: Report, sol, title: str):
    from .diffop import format_diffop

    rep.add("dimension", sol.dim)
    rep.add("order", sol.order)
    rep.line(f"{title}: {sol.dim} operators of order {sol.order} (plus {len(sol.phases)} lower-order)")
    for k, D in enumerate(sol.operators):
        rep.add(f"generator.{k}", format_diffop(D))
        rep.line(f"  D{k} = {format_diffop(D)}")
    for k, D in enumerate(sol.phases):
        rep.add(f"lower.{k}", format_diffop(D))
        rep.line(f"  lower{k} = {format_diffop(D)}")


# Commands ------------------------------------------------------------------------

def cmd_vectors(args, rep: Report):
    from . import symmetry

    S = _spacetime(args)
    solver = {
        "killing-vectors": (symmetry.solve_killing_vectors, 2, "Killing vectors"),
        "sk-vectors": (symmetry.solve_sk_vectors, 3, "Schrodinger-Killing vectors"),
        "expanded-sch": (symmetry.solve_expanded_sch, 3, "expanded Schrodinger vectors"),
        "cgal": (symmetry.solve_cgal, 2, "conformal Galilean vectors"),
    }[args.command]
    fn, default, title = solver
    deg = args.deg if args.deg is not None else default
    kwargs = {"require_vomega": False} if args.command in ("sk-vectors", "expanded-sch") else {}
    B = fn(S, deg, **kwargs)
    _vector_report(rep, B, title)
    ok, pair = symmetry.closure_check(B)
    rep.add("closed", ok)
    rep.line(f"closed under brackets: {ok}" + ("" if ok else f" (fails for pair {pair})"))


def cmd_tensors(args, rep: Report):
    from . import phase

    S = _spacetime(args)
    rank = args.rank if args.rank is not None else 2
    deg = args.deg if args.deg is not None else 2
    if rank < 1:
        raise UsageError("--rank must be at least 1")
    if args.command == "killing-tensors":
        sol = phase.solve_killing_tensors(S, rank, deg)
        _tensor_report(rep, sol, "Killing tensors")
    else:
        sol = phase.solve_sk_tensors(S, rank, deg)
        _tensor_report(rep, sol, "Schrodinger-Killing tensors")
        if rank == 2:
            q = phase.quotient_dimension(S, sol, deg)
            rep.add("modulo_hamiltonian", q)
            rep.line(f"dimension modulo multiples of H: {q}")
    if rank == 2 and S.d == 3:
        lrl = phase.lrl_family(S)
        sp = phase.tensor_span([T.comp for T in sol.tensors])
        probe = [phase.tensor_span([T.comp for T in sol.tensors] + [L.comp]) for L in lrl]
        n = sum(1 for p in probe if p.dim == sp.dim)
        rep.add("lrl_principal_parts_contained", f"{n}/3")
        rep.line(f"Laplace-Runge-Lenz principal parts contained: {n}/3")


def cmd_symmetries(args, rep: Report):
    from .diffop import first_order_symmetries

    S = _spacetime(args)
    if not S.is_vomega:
        raise UsageError("symmetries needs a V/Omega spacetime")
    ctx = S.ctx
    if args.A is not None:
        parts = [p.strip() for p in args.A.split(",")]
        if len(parts) != 3:
            raise UsageError("--A takes three comma-separated components")
        A = [ctx.parse(p) for p in parts]
    else:
        if S.A is None:
            raise GeometryError("no polynomial potential A for this Omega; pass --A")
        A = [S.A[a] for a in range(1, 4)]
    deg = args.deg if args.deg is not None else 3
    sol = first_order_symmetries(S.V, A, deg)
    _operator_report(rep, sol, "first-order symmetries")


def cmd_higher(args, rep: Report):
    from .diffop import higher_symmetries

    order = args.order if args.order is not None else 2
    deg = args.deg if args.deg is not None else 2
    if order < 1:
        raise UsageError("--order must be at least 1")
    sol = higher_symmetries(order, deg)
    _operator_report(rep, sol, "free Schrodinger symmetries")


def cmd_connection(args, rep: Report):
    S = _spacetime(args)
    G = connection(S)
    coords = S.coords
    rep.line("nonzero connection coefficients:")
    for key in sorted(G.comp):
        e = G.comp[key]
        if not e.is_zero():
            a, b, c = key
            name = f"{coords[a]}_{coords[b]}{coords[c]}"
            rep.add(f"Gamma.{name}", e)
            rep.line(f"  Gamma^{name} = {e}")
    R = ricci(S)
    nz = [(k, e) for k, e in sorted(R.comp.items()) if not e.is_zero()]
    for (a, b), e in nz:
        rep.add(f"Ricci.{coords[a]}{coords[b]}", e)
    rep.line("Ricci: " + ("0" if not nz else ", ".join(f"R_{coords[a]}{coords[b]} = {e}" for (a, b), e in nz)))
    tr = check_trautman(S)
    rep.add("trautman", tr)
    rep.line(f"Trautman condition: {tr}")


def cmd_twistor(args, rep: Report):
    from . import twistor as tw
    from .symmetry import format_vector

    N = args.deg_t if args.deg_t is not None else 2
    coords = ("t", "x", "y", "z")

    def emit(fields, title):
        rep.add("dimension", len(fields))
        rep.line(f"{title}: {len(fields)} generators")
        for k, b in enumerate(fields):
            rep.add(f"generator.{k}", b)
            rep.line(f"  beta{k} = {b}")
            try:
                X = tw.pushforward(b)
            except tw.PushforwardError:
                continue
            rep.add(f"pushforward.{k}", format_vector(X, coords))
            rep.line(f"      -> {format_vector(X, coords)}")
            try:
                vals = tw.dictionary(b)
            except ValueError:
                continue
            entries = [(name, v) for name, v in sorted(vals.items()) if not v.is_zero()]
            for name, v in entries:
                rep.add(f"dictionary.{k}.{name}", v)
            rep.line("      " + ", ".join(f"{name} = {v}" for name, v in entries))

    what = args.what
    if what == "sections":
        B = tw.global_vector_fields(N)
        emit(B.fields, f"global holomorphic vector fields (T-degree <= {N})")
    elif what == "sch":
        fields, _ = tw.expanded_schrodinger_twistor(N)
        emit(fields, "projective vertical lifts closed under brackets")
    elif what == "cga":
        emit([b for _, b, _ in tw.cga_basis()], "conformal Galilean generators")
        for k, v in tw.cga_checks().items():
            rep.add(f"check.{k.replace(' ', '_')}", v)
            rep.line(f"  {k}: {v}")
    elif what == "obstruction":
        bound = args.deg if args.deg is not None else 6
        for b in range(1, bound + 1):
            ok = tw.obstruction_check(b)
            rep.add(f"bound.{b}", "no global connection" if ok else "solution exists")
            rep.line(f"bound {b}: " + ("no global connection" if ok else "solution exists"))


COMMANDS = {
    "killing-vectors": cmd_vectors, "sk-vectors": cmd_vectors, "expanded-sch": cmd_vectors, "cgal": cmd_vectors,
    "killing-tensors": cmd_tensors, "sk-tensors": cmd_tensors,
    "symmetries": cmd_symmetries, "higher-symmetries": cmd_higher,
    "connection": cmd_connection, "twistor": cmd_twistor,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncsym", description="Exact symmetry solvers for Newton-Cartan spacetimes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--V", help="gravitational potential V(x, y, z)")
    common.add_argument("--Omega", help="Coriolis potential Omega(x, y, z)")
    common.add_argument("--A", help="spatial magnetic potential 'Ax, Ay, Az' (symmetries only)")
    common.add_argument("--config", help="spacetime config file ([spacetime] section)")
    common.add_argument("--deg", type=int, help="polynomial degree bound")
    common.add_argument("--rank", type=int, help="tensor rank")
    common.add_argument("--order", type=int, help="operator order")
    common.add_argument("--deg-t", dest="deg_t", type=int, help="degree bound in T for twistor sections")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "twistor":
            p.add_argument("what", choices=("sections", "sch", "cga", "obstruction"))
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    for name in ("deg", "rank", "order", "deg_t"):
        try:
            _positive(name.replace("_", "-"), getattr(args, name))
        except UsageError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_PARSE
    rep = Report(args.command if args.command != "twistor" else f"twistor {args.what}")
    try:
        COMMANDS[args.command](args, rep)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except (GeometryError, ValueError) as exc:
        print(f"precondition failed: {exc}", file=err)
        return EXIT_PRECONDITION
    out.write(rep.render(args.format))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
