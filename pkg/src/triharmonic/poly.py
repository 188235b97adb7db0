"""Exact sparse polynomials in three variables and algebra-valued polynomial fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .algebra import CYCLIC, AlgebraParams, Element, structure_table

Exponent = tuple[int, int, int]
AXES = {"x": 0, "y": 1, "z": 2}


def _axis(axis) -> int:
    return AXES[axis] if isinstance(axis, str) else int(axis)


class TriPoly:
    """Sparse polynomial: exponent triple ``(i, j, k)`` -> coefficient.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their term dicts are.  Coefficients may be any exact ring element
    (Fraction, int, :class:`~triharmonic.scalars.Surd`) or floats.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Exponent, Any] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            if c != 0:
                clean[tuple(e)] = c
        self.terms: dict[Exponent, Any] = clean

    @classmethod
    def const(cls, c: Any) -> "TriPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, axis, coeff: Any = Fraction(1)) -> "TriPoly":
        e = [0, 0, 0]
        e[_axis(axis)] = 1
        return cls({tuple(e): coeff})

    @classmethod
    def linear(cls, coeffs: Sequence[Any], offset: Any = 0) -> "TriPoly":
        """``c0*x + c1*y + c2*z + offset``."""
        t = {(1, 0, 0): coeffs[0], (0, 1, 0): coeffs[1], (0, 0, 1): coeffs[2], (0, 0, 0): offset}
        return cls(t)

    # ring operations
    def __add__(self, other) -> "TriPoly":
        other = _lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "TriPoly":
        return TriPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "TriPoly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "TriPoly":
        return _lift(other) - self

    def __mul__(self, other) -> "TriPoly":
        if not isinstance(other, TriPoly):
            return TriPoly({e: c * other for e, c in self.terms.items()})
        out: dict[Exponent, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
        return TriPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TriPoly":
        out = TriPoly.const(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriPoly):
            try:
                other = _lift(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def diff(self, axis) -> "TriPoly":
        a = _axis(axis)
        out = {}
        for e, c in self.terms.items():
            if e[a]:
                ne = list(e)
                ne[a] -= 1
                out[tuple(ne)] = c * e[a]
        return TriPoly(out)

    def __call__(self, q: Sequence[Any]) -> Any:
        x, y, z = q
        total: Any = 0
        for (i, j, k), c in self.terms.items():
            total = total + c * x**i * y**j * z**k
        return total

    def eval_array(self, pts: np.ndarray) -> np.ndarray:
        """Float evaluation at an ``(n, 3)`` array of points."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[0])
        for (i, j, k), c in self.terms.items():
            out += float(c) * pts[:, 0] ** i * pts[:, 1] ** j * pts[:, 2] ** k
        return out

    def substitute(self, forms: Sequence["TriPoly"]) -> "TriPoly":
        """Replace ``x, y, z`` by the polynomials ``forms[0..2]``."""
        cache: dict[tuple[int, int], TriPoly] = {}

        def pw(a, n):
            if (a, n) not in cache:
                cache[(a, n)] = forms[a] ** n
            return cache[(a, n)]

        out = TriPoly()
        for (i, j, k), c in self.terms.items():
            out = out + pw(0, i) * pw(1, j) * pw(2, k) * c
        return out

    def map_coeffs(self, f) -> "TriPoly":
        return TriPoly({e: f(c) for e, c in self.terms.items()})

    def __repr__(self):
        return f"TriPoly({self.terms!r})"

    def __str__(self):
        return format_poly(self)


def _lift(x) -> TriPoly:
    if isinstance(x, TriPoly):
        return x
    if isinstance(x, (int, float, Fraction)) or hasattr(x, "simplify"):
        return TriPoly.const(x)
    raise TypeError(f"cannot lift {type(x).__name__} to TriPoly")


def format_poly(p: TriPoly) -> str:
    """Human-readable form, e.g. ``-4*x + 4*y + 8*z``; ``0`` for the zero polynomial."""
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.terms, key=lambda e: (-sum(e), tuple(-v for v in e))):
        c = p.terms[e]
        mono = "*".join(
            (v if n == 1 else f"{v}^{n}") for v, n in zip("xyz", e) if n
        )
        neg = _is_negative(c)
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{_fmt_coeff(mag)}*{mono}"
        else:
            body = _fmt_coeff(mag)
        parts.append(("-" if neg else "+", body))
    first_sign, first = parts[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def _is_negative(c) -> bool:
    try:
        return c < 0
    except TypeError:
        return False


def _fmt_coeff(c) -> str:
    s = str(c)
    return f"({s})" if any(ch in s for ch in "+*") or ("/" in s and not isinstance(c, Fraction)) else s


@dataclass(frozen=True)
class PolyField:
    """Algebra-valued polynomial field ``F1*e1 + F2*e2 + F3*e3``."""

    F1: TriPoly
    F2: TriPoly
    F3: TriPoly

    @classmethod
    def of(cls, comps: Iterable[TriPoly]) -> "PolyField":
        a, b, c = comps
        return cls(a, b, c)

    @classmethod
    def constant(cls, u: Element) -> "PolyField":
        return cls.of(TriPoly.const(c) for c in u)

    @classmethod
    def zero(cls) -> "PolyField":
        return cls(TriPoly(), TriPoly(), TriPoly())

    @property
    def components(self) -> tuple[TriPoly, TriPoly, TriPoly]:
        return (self.F1, self.F2, self.F3)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i: int) -> TriPoly:
        return self.components[i]

    def __add__(self, other: "PolyField") -> "PolyField":
        return PolyField.of(a + b for a, b in zip(self, other))

    def __sub__(self, other: "PolyField") -> "PolyField":
        return PolyField.of(a - b for a, b in zip(self, other))

    def __neg__(self) -> "PolyField":
        return PolyField.of(-a for a in self)

    def scale(self, t: Any) -> "PolyField":
        return PolyField.of(a * t for a in self)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self)

    def __call__(self, q: Sequence[Any]) -> Element:
        return Element.of([c(q) for c in self])

    def eval_array(self, pts: np.ndarray) -> np.ndarray:
        return np.stack([c.eval_array(pts) for c in self], axis=1)

    def partial(self, axis) -> "PolyField":
        return PolyField.of(c.diff(axis) for c in self)

    def jacobian(self) -> list[list[TriPoly]]:
        """``J[i][a] = d F_i / d x_a``."""
        return [[c.diff(a) for a in range(3)] for c in self]

    def laplacian(self) -> "PolyField":
        return PolyField.of(laplacian_scalar(c) for c in self)

    def divergence(self) -> TriPoly:
        return self.F1.diff(0) + self.F2.diff(1) + self.F3.diff(2)

    def curl(self) -> "PolyField":
        F1, F2, F3 = self
        return PolyField(
            F3.diff(1) - F2.diff(2),
            F1.diff(2) - F3.diff(0),
            F2.diff(0) - F1.diff(1),
        )

    def dot(self, w: Sequence[Any]) -> TriPoly:
        return self.F1 * w[0] + self.F2 * w[1] + self.F3 * w[2]

    def __str__(self):
        return " ; ".join(f"F{i + 1} = {format_poly(c)}" for i, c in enumerate(self))


def laplacian_scalar(p: TriPoly) -> TriPoly:
    return p.diff(0).diff(0) + p.diff(1).diff(1) + p.diff(2).diff(2)


def field_multiply(F: PolyField, G: PolyField, P: AlgebraParams = CYCLIC) -> PolyField:
    """Pointwise algebra product of two polynomial fields."""
    table = structure_table(P)
    out = [TriPoly(), TriPoly(), TriPoly()]
    for i in range(3):
        if F[i].is_zero():
            continue
        for j in range(3):
            if G[j].is_zero():
                continue
            prod = F[i] * G[j]
            t = table[(i, j)]
            for k in range(3):
                if t[k] != 0:
                    out[k] = out[k] + prod * t[k]
    return PolyField.of(out)


def affine_field(A: Sequence[Sequence[Any]], k: Sequence[Any]) -> PolyField:
    """The field ``q -> A q + k`` with polynomial components."""
    return PolyField.of(TriPoly.linear(A[r], k[r]) for r in range(3))
