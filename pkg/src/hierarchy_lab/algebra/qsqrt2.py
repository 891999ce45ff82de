"""Exact arithmetic in the quadratic field Q(sqrt 2).

Elements are ``a + b*sqrt2`` with ``a`` and ``b`` arbitrary-precision
rationals.  Ordering is decided with rational arithmetic only.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from numbers import Rational

__all__ = ["QSqrt2", "SQRT2", "to_float"]

_PREC = 60


def _rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _decimal(x: Fraction) -> decimal.Decimal:
    return decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)


class QSqrt2:
    """Immutable element ``rat_part + surd_part * sqrt(2)``."""

    __slots__ = ("_a", "_b")

    def __init__(self, rat_part=0, surd_part=0):
        object.__setattr__(self, "_a", _rational(rat_part))
        object.__setattr__(self, "_b", _rational(surd_part))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @property
    def rat_part(self) -> Fraction:
        return self._a

    @property
    def surd_part(self) -> Fraction:
        return self._b

    @classmethod
    def sqrt2_power(cls, k: int) -> QSqrt2:
        """Return ``sqrt(2)**k`` for any integer ``k``."""
        half, odd = divmod(k, 2)
        scale = Fraction(2) ** half
        return cls(0, scale) if odd else cls(scale, 0)

    @classmethod
    def parse(cls, text: str) -> QSqrt2:
        from .text import parse_scalar

        return parse_scalar(text)

    # -- coercion ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, QSqrt2):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QSqrt2(other, 0)
        if isinstance(other, Rational):
            return QSqrt2(Fraction(other), 0)
        return None

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self._a + o._a, self._b + o._b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self._a - o._a, self._b - o._b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self._a, self._b, o._a, o._b
        return QSqrt2(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return QSqrt2(-self._a, -self._b)

    def __pos__(self):
        return self

    def conjugate(self) -> QSqrt2:
        return QSqrt2(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - 2*b**2`` (zero only for the zero element)."""
        return self._a * self._a - 2 * self._b * self._b

    def invert(self) -> QSqrt2:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QSqrt2 division by zero")
        return QSqrt2(self._a / n, -self._b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.invert()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.invert()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        result, base = QSqrt2(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order ----------------------------------------------------------------

    def sign(self) -> int:
        a, b = self._a, self._b
        sa, sb = _sign(a), _sign(b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger of a**2 and 2*b**2 wins (never equal)
        return sa if a * a > 2 * b * b else sb

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b

    def __hash__(self):
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return bool(self._a) or bool(self._b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversion -----------------------------------------------------------

    def __float__(self):
        a, b = self._a, self._b
        if b == 0:
            return float(a)
        with decimal.localcontext() as ctx:
            ctx.prec = _PREC
            root2 = decimal.Decimal(2).sqrt()
            if _sign(a) * _sign(b) >= 0:
                value = _decimal(a) + _decimal(b) * root2
            else:
                # conjugate form avoids cancellation
                value = _decimal(self.norm()) / (_decimal(a) - _decimal(b) * root2)
            return float(value)

    def is_rational(self) -> bool:
        return self._b == 0

    def __repr__(self):
        return f"QSqrt2({self})"

    def __str__(self):
        from .text import render_scalar

        return render_scalar(self)


SQRT2 = QSqrt2(0, 1)


def to_float(x) -> float:
    return float(x)
