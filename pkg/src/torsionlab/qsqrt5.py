"""Exact arithmetic in the field Q(sqrt 5)."""

from fractions import Fraction
import math


def _frac(v):
    return v if isinstance(v, Fraction) else Fraction(v)


class QSqrt5:
    """The number ``a + b sqrt(5)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _frac(a)
        self.b = _frac(b)

    @classmethod
    def coerce(cls, v):
        return v if isinstance(v, QSqrt5) else cls(v, 0)

    def __add__(self, o):
        o = QSqrt5.coerce(o)
        return QSqrt5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt5(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-QSqrt5.coerce(o))

    def __rsub__(self, o):
        return QSqrt5.coerce(o) - self

    def __mul__(self, o):
        o = QSqrt5.coerce(o)
        return QSqrt5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self):
        return QSqrt5(self.a, -self.b)

    def norm(self):
        """Field norm ``a^2 - 5 b^2`` (a rational)."""
        return self.a * self.a - 5 * self.b * self.b

    def __truediv__(self, o):
        o = QSqrt5.coerce(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        num = self * o.conjugate()
        return QSqrt5(num.a / n, num.b / n)

    def __rtruediv__(self, o):
        return QSqrt5.coerce(o) / self

    def sign(self):
        """Exact sign, comparing ``a^2`` with ``5 b^2`` when the terms disagree."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        lhs, rhs = self.a * self.a, 5 * self.b * self.b
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, QSqrt5)):
            o = QSqrt5.coerce(o)
            return self.a == o.a and self.b == o.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, o):
        return (self - o).sign() < 0

    def __le__(self, o):
        return (self - o).sign() <= 0

    def __gt__(self, o):
        return (self - o).sign() > 0

    def __ge__(self, o):
        return (self - o).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(5.0)

    def __repr__(self):
        return f"QSqrt5({self.a}, {self.b})"

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt5"


SQRT5 = QSqrt5(0, 1)
PHI = QSqrt5(Fraction(1, 2), Fraction(1, 2))


def qmin(*vals):
    out = vals[0]
    for v in vals[1:]:
        if v < out:
            out = v
    return out


def qmax(*vals):
    out = vals[0]
    for v in vals[1:]:
        if v > out:
            out = v
    return out
