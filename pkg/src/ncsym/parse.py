"""Text grammar for expressions: parsing and canonical printing.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' ['+' | '-'] INT)?
    atom   := NUMBER | NAME | '(' expr ')'

Names are the context variables plus ``i``, ``r`` and ``rho``.  Division is
only defined by invertible terms (nonzero constants, Laurent monomials,
``r``, ``rho``).
"""

from __future__ import annotations

import re

from .expr import Context, ContextError, Expr, grlex_key
from .field import QI


class ParseError(ValueError):
    """Malformed input; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context, symbols=None):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.k = 0
        self.symbols = symbols or {}

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                e = e * rhs
            else:
                try:
                    e = e / rhs
                except ZeroDivisionError:
                    raise ParseError("division by a non-invertible expression", tok[2], self.text) from None
        return e

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self):
        base_tok = self.peek()
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
                sign = -1 if self.take()[1] == "-" else 1
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                raise ParseError("exponent must be an integer", tok[2], self.text)
            n = sign * int(tok[1])
            if n < 0:
                try:
                    return base.inverse() ** (-n)
                except ZeroDivisionError:
                    raise ParseError("disallowed negative exponent", base_tok[2], self.text) from None
            return base ** n
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            if "." in val:
                whole, frac = val.split(".")
                return self.ctx.const(QI(int(whole + frac)) / QI(10 ** len(frac)))
            return self.ctx.const(int(val))
        if kind == "name":
            if val in self.symbols:
                return self.symbols[val]
            if val == "i":
                return self.ctx.const(QI(0, 1))
            try:
                if val == "r":
                    return self.ctx.r()
                if val == "rho":
                    return self.ctx.rho()
                return self.ctx.var(val)
            except ContextError as exc:
                raise ParseError(str(exc), pos, self.text) from None
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos, self.text)


def parse(text: str, ctx: Context, symbols: dict | None = None) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr` over ``ctx``.

    ``symbols`` maps extra names to prebuilt expressions (used for
    placeholders such as derivative tokens).
    """
    return _Parser(text, ctx, symbols).parse()


def format_mono(ctx: Context, mono) -> list:
    out = []
    for name, v in zip(ctx.names, mono):
        if v == 1:
            out.append(name)
        elif v:
            out.append(f"{name}^{v}")
    return out


def format_terms(ctx: Context, items) -> str:
    """Join ``(coefficient, [factor strings])`` pairs into a sum."""
    chunks = []
    for c, factors in items:
        neg = False
        if c.im == 0 and c.re < 0:
            neg, c = True, -c
        elif c.re == 0 and c.im < 0:
            neg, c = True, -c
        if c.is_one() and factors:
            body = "*".join(factors)
        else:
            body = "*".join([str(c), *factors])
        chunks.append(("-" if neg else "+", body))
    if not chunks:
        return "0"
    first_sign, first = chunks[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in chunks[1:]:
        s += f" {sign} {body}"
    return s


def format_expr(e: Expr) -> str:
    ctx = e.ctx
    items = []
    for eps, k, p in e.parts():
        suffix = []
        if eps:
            suffix.append("r")
        if k:
            suffix.append(f"rho^-{k}")
        for mono in sorted(p, key=grlex_key, reverse=True):
            items.append((p[mono], format_mono(ctx, mono) + suffix))
    return format_terms(ctx, items)
