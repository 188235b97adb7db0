"""Scalar plumbing: exact rationals, the quadratic field Q(sqrt 3), and floats.

Exact paths use :class:`fractions.Fraction` (and plain ints).  A few geometric
constants of the cyclic algebra (the normal ``n``, the basis vector ``v3``,
``w3``, the (u, v) change of coordinates) live in Q(sqrt 3); :class:`Surd`
keeps those exact too.  Floats only appear on numeric sampling paths and are
always compared with an explicit tolerance.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Any

FLOAT_TOL = 1e-12


class Surd:
    """An exact number ``a + b*sqrt(3)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: Any = 0, b: Any = 0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other, 0)
        return None

    def simplify(self):
        """Drop to a Fraction when the irrational part vanishes."""
        return self.a if self.b == 0 else self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) + other
        return Surd(self.a + o.a, self.b + o.b).simplify()

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) - other
        return Surd(self.a - o.a, self.b - o.b).simplify()

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) * other
        return Surd(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a).simplify()

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 3 * self.b * self.b

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) / other
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        q = self * o.conjugate()
        q = q if isinstance(q, Surd) else Surd(q)
        return Surd(q.a / n, q.b / n).simplify()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / float(self)
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return float(self) ** n
        out: Any = Fraction(1)
        for _ in range(n):
            out = out * self
        return out

    def sign(self) -> int:
        # sign of a + b*sqrt3 decided without rounding
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        lhs, rhs = self.a * self.a, 3 * self.b * self.b
        return sa if lhs > rhs else (sb if rhs > lhs else 0)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __lt__(self, other):
        return (self - other).sign() < 0 if self._coerce(other) else float(self) < other

    def __le__(self, other):
        return (self - other).sign() <= 0 if self._coerce(other) else float(self) <= other

    def __gt__(self, other):
        return (self - other).sign() > 0 if self._coerce(other) else float(self) > other

    def __ge__(self, other):
        return (self - other).sign() >= 0 if self._coerce(other) else float(self) >= other

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"Surd({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt3" if self.a else f"{self.b}*sqrt3"


SQRT3 = Surd(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Surd)) and not isinstance(x, bool)


def is_zero(x, tol: float = FLOAT_TOL) -> bool:
    """Exact equality for exact scalars, ``|x| <= tol`` for floats."""
    if is_exact(x):
        return x == 0
    return abs(float(x)) <= tol


def to_float(x) -> float:
    return float(x)


def parse_scalar(value) -> Any:
    """Parse a JSON scalar: int, "num/den" string, decimal string, or float.

    Strings and ints parse to exact Fractions; JSON floats stay floats.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {value!r}") from exc
    if isinstance(value, numbers.Rational):
        return Fraction(value)
    raise ValueError(f"not a scalar: {value!r}")


def format_scalar(x) -> Any:
    """Inverse of :func:`parse_scalar` for JSON output."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, Surd):
        return str(x)
    return float(x)


def rationalize(x: float, max_denominator: int = 10**12) -> Fraction:
    return Fraction(x).limit_denominator(max_denominator)
