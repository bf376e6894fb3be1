"""Gaussian rationals Q(i), the exact coefficient field of every computation."""

from __future__ import annotations

from gmpy2 import mpq

_Z = mpq(0)
_ONE = mpq(1)


def _mk(re, im):
    q = object.__new__(QI)
    q.re = re
    q.im = im
    return q


class QI:
    """An element ``re + im*i`` with ``re, im`` exact rationals.

    Instances are immutable by convention; arithmetic always builds new ones.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            self.re, self.im = re.re, re.im + mpq(im)
            return
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def coerce(x) -> "QI":
        if x.__class__ is QI:
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex numbers are not exact")
        if isinstance(x, float):
            raise TypeError("floating point numbers are not exact")
        return _mk(mpq(x), _Z)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if other.__class__ is not QI:
            try:
                other = QI.coerce(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return _mk(-self.re, -self.im)

    def __add__(self, o):
        if o.__class__ is not QI:
            o = QI.coerce(o)
        return _mk(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if o.__class__ is not QI:
            o = QI.coerce(o)
        return _mk(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return QI.coerce(o) - self

    def __mul__(self, o):
        if o.__class__ is not QI:
            o = QI.coerce(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b:
            if not d:
                return _mk(a * c, _Z)
            return _mk(a * c, a * d)
        if not d:
            return _mk(a * c, b * c)
        return _mk(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "QI":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero")
            return _mk(1 / a, _Z)
        n = a * a + b * b
        return _mk(a / n, -b / n)

    def __truediv__(self, o):
        if o.__class__ is not QI:
            o = QI.coerce(o)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return QI.coerce(o) * self.inverse()

    def conjugate(self) -> "QI":
        return _mk(self.re, -self.im)

    def is_real(self) -> bool:
        return not self.im

    def is_one(self) -> bool:
        return self.re == 1 and not self.im

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"


def _imag_str(v) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


ZERO = _mk(_Z, _Z)
ONE = _mk(_ONE, _Z)
I = _mk(_Z, _ONE)
