"""Arithmetic and geometry of the three-dimensional commutative unital algebras.

An algebra of the family is fixed by six free parameters ``p1..p6``; the
three remaining structure constants ``p7, p8, p9`` are forced by
associativity and are always recomputed.  The identity is ``e1``.  The
cyclic (tricomplex) algebra is the member ``p = (0, 1, 0, 0, 1, 0)``.

Everything here is written over an abstract scalar: pass Fractions for exact
identities, floats for numeric work.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .errors import DegenerateDivisor, NotInPlane, SingularElement
from .scalars import SQRT3, FLOAT_TOL, is_exact, is_zero

Matrix = tuple[tuple[Any, Any, Any], tuple[Any, Any, Any], tuple[Any, Any, Any]]


@dataclass(frozen=True)
class Element:
    """Coordinates ``(c1, c2, c3)`` of ``c1*e1 + c2*e2 + c3*e3``."""

    c1: Any
    c2: Any
    c3: Any

    @classmethod
    def of(cls, coords: Sequence[Any]) -> "Element":
        c1, c2, c3 = coords
        return cls(c1, c2, c3)

    def __iter__(self) -> Iterator[Any]:
        yield self.c1
        yield self.c2
        yield self.c3

    def __getitem__(self, i: int) -> Any:
        return (self.c1, self.c2, self.c3)[i]

    def __add__(self, other: "Element") -> "Element":
        return Element(self.c1 + other.c1, self.c2 + other.c2, self.c3 + other.c3)

    def __sub__(self, other: "Element") -> "Element":
        return Element(self.c1 - other.c1, self.c2 - other.c2, self.c3 - other.c3)

    def __neg__(self) -> "Element":
        return Element(-self.c1, -self.c2, -self.c3)

    def scale(self, t: Any) -> "Element":
        return Element(t * self.c1, t * self.c2, t * self.c3)

    def dot(self, other: "Element") -> Any:
        """Euclidean inner product of coordinate vectors."""
        return self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3

    def coord_sum(self) -> Any:
        return self.c1 + self.c2 + self.c3

    def is_zero(self, tol: float = FLOAT_TOL) -> bool:
        return all(is_zero(c, tol) for c in self)

    def max_abs(self) -> float:
        return max(abs(float(c)) for c in self)

    def to_float(self) -> "Element":
        return Element(float(self.c1), float(self.c2), float(self.c3))


ZERO = Element(0, 0, 0)
E1 = Element(1, 0, 0)
E2 = Element(0, 1, 0)
E3 = Element(0, 0, 1)
BASIS = (E1, E2, E3)


@dataclass(frozen=True)
class AlgebraParams:
    """The six free parameters of one member of the family.

    ``p7``, ``p8`` and ``p9`` are derived properties, never stored.
    """

    p1: Any
    p2: Any
    p3: Any
    p4: Any
    p5: Any
    p6: Any

    @classmethod
    def of(cls, p: Sequence[Any]) -> "AlgebraParams":
        if len(p) != 6:
            raise ValueError(f"expected 6 parameters, got {len(p)}")
        return cls(*p)

    @property
    def free(self) -> tuple[Any, ...]:
        return (self.p1, self.p2, self.p3, self.p4, self.p5, self.p6)

    @property
    def p7(self) -> Any:
        return -self.p1 * self.p4 + self.p2 * self.p3 - self.p2 * self.p6 + self.p4 * self.p4

    @property
    def p8(self) -> Any:
        return self.p2 * self.p5 - self.p3 * self.p4

    @property
    def p9(self) -> Any:
        return -self.p1 * self.p5 + self.p3 * self.p3 - self.p3 * self.p6 + self.p4 * self.p5

    @property
    def all(self) -> tuple[Any, ...]:
        return self.free + (self.p7, self.p8, self.p9)

    def is_cyclic(self) -> bool:
        return self.free == (0, 1, 0, 0, 1, 0)


CYCLIC = AlgebraParams(Fraction(0), Fraction(1), Fraction(0), Fraction(0), Fraction(1), Fraction(0))


def structure_table(P: AlgebraParams, p789: Sequence[Any] | None = None) -> dict[tuple[int, int], Element]:
    """Products ``e_i * e_j`` (0-based indices) from the multiplication table.

    ``p789`` overrides the derived constants; only used to build deliberately
    non-associative tables for testing the associativity check.
    """
    p7, p8, p9 = p789 if p789 is not None else (P.p7, P.p8, P.p9)
    ee = Element(p7, P.p1, P.p2)
    e23 = Element(p8, P.p3, P.p4)
    e33 = Element(p9, P.p5, P.p6)
    table = {
        (0, 0): E1, (0, 1): E2, (0, 2): E3,
        (1, 1): ee, (1, 2): e23, (2, 2): e33,
    }
    for (i, j), v in list(table.items()):
        table[(j, i)] = v
    return table


def _bilinear(a: Element, b: Element, table: dict[tuple[int, int], Element]) -> Element:
    out = [0, 0, 0]
    for i in range(3):
        if is_exact(a[i]) and a[i] == 0:
            continue
        for j in range(3):
            w = a[i] * b[j]
            t = table[(i, j)]
            for k in range(3):
                out[k] = out[k] + w * t[k]
    return Element.of(out)


def multiply(a: Element, b: Element, P: AlgebraParams = CYCLIC) -> Element:
    """Algebra product ``a . b`` under the parameters ``P``."""
    return _bilinear(a, b, structure_table(P))


def cyclic_multiply(a: Element, b: Element) -> Element:
    """Product in the cyclic algebra, written out componentwise."""
    a1, a2, a3 = a
    b1, b2, b3 = b
    return Element(
        a1 * b1 + a2 * b3 + a3 * b2,
        a1 * b2 + a2 * b1 + a3 * b3,
        a1 * b3 + a2 * b2 + a3 * b1,
    )


def power(u: Element, n: int, P: AlgebraParams = CYCLIC) -> Element:
    out = E1
    for _ in range(n):
        out = multiply(out, u, P)
    return out


# -- first fundamental representation ---------------------------------------


def representation(P: AlgebraParams = CYCLIC) -> tuple[Matrix, Matrix, Matrix]:
    """``(R1, R2, R3)``: matrices of multiplication by ``e1, e2, e3``."""
    one, zero = (Fraction(1), Fraction(0)) if is_exact(P.p1) else (1.0, 0.0)
    R1 = ((one, zero, zero), (zero, one, zero), (zero, zero, one))
    R2 = ((zero, P.p7, P.p8), (one, P.p1, P.p3), (zero, P.p2, P.p4))
    R3 = ((zero, P.p8, P.p9), (zero, P.p3, P.p5), (one, P.p4, P.p6))
    return R1, R2, R3


def rep(u: Element, P: AlgebraParams = CYCLIC) -> Matrix:
    """``R(u) = u1*R1 + u2*R2 + u3*R3``."""
    R1, R2, R3 = representation(P)
    return tuple(
        tuple(u.c1 * R1[r][c] + u.c2 * R2[r][c] + u.c3 * R3[r][c] for c in range(3))
        for r in range(3)
    )


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(sum((A[r][k] * B[k][c] for k in range(3)), start=0 * A[0][0]) for c in range(3))
        for r in range(3)
    )


def matvec(A: Matrix, v: Sequence[Any]) -> Element:
    return Element.of([A[r][0] * v[0] + A[r][1] * v[1] + A[r][2] * v[2] for r in range(3)])


def det3(M: Matrix) -> Any:
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def solve_linear(M: Sequence[Sequence[Any]], rhs: Sequence[Any], tol: float = FLOAT_TOL) -> list[Any]:
    """Gaussian elimination with pivoting; exact on exact input.

    Raises ``ZeroDivisionError`` when the matrix is singular.
    """
    n = len(rhs)
    aug = [list(M[r]) + [rhs[r]] for r in range(n)]
    for col in range(n):
        if all(is_exact(aug[r][col]) for r in range(col, n)):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(float(aug[r][col])))
            if abs(float(aug[piv][col])) <= tol:
                piv = None
        if piv is None:
            raise ZeroDivisionError("singular linear system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col] / pv
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] / aug[r][r] for r in range(n)]


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of one verification pass."""

    identity: str
    exact: bool
    max_residual: float
    passed: bool
    details: dict = field(default_factory=dict, compare=False)
    vacuous: bool = False


def associativity_check(P: AlgebraParams, p789: Sequence[Any] | None = None,
                        tol: float = FLOAT_TOL) -> ResidualReport:
    """Check ``(ei.ej).ek == ei.(ej.ek)`` over all 27 basis triples."""
    table = structure_table(P, p789)
    exact = all(is_exact(x) for x in P.free) and (p789 is None or all(is_exact(x) for x in p789))
    worst = 0.0
    failures = []
    for i in range(3):
        for j in range(3):
            for k in range(3):
                left = _bilinear(_bilinear(BASIS[i], BASIS[j], table), BASIS[k], table)
                right = _bilinear(BASIS[i], _bilinear(BASIS[j], BASIS[k], table), table)
                d = left - right
                worst = max(worst, d.max_abs())
                if not d.is_zero(tol):
                    failures.append((i + 1, j + 1, k + 1))
    return ResidualReport(
        identity="associativity",
        exact=exact,
        max_residual=worst,
        passed=not failures,
        details={"triples": 27, "failures": failures},
    )


def homomorphism_check(P: AlgebraParams, pairs: int = 100, seed: int = 0,
                       tol: float = FLOAT_TOL) -> ResidualReport:
    """Spot-check ``R(u.v) == R(u) R(v)`` and ``R(e1) == I`` on random rational pairs."""
    rng = random.Random(seed)
    exact = all(is_exact(x) for x in P.free)
    worst = 0.0
    failures = 0
    ident = rep(E1, P)
    for r in range(3):
        for c in range(3):
            worst = max(worst, abs(float(ident[r][c] - (1 if r == c else 0))))
    for _ in range(pairs):
        u, v = random_element(rng), random_element(rng)
        L = rep(multiply(u, v, P), P)
        R = matmul(rep(u, P), rep(v, P))
        d = max(abs(float(L[r][c] - R[r][c])) for r in range(3) for c in range(3))
        worst = max(worst, d)
        if not all(is_zero(L[r][c] - R[r][c], tol) for r in range(3) for c in range(3)):
            failures += 1
    return ResidualReport(
        identity="representation homomorphism",
        exact=exact,
        max_residual=worst,
        passed=failures == 0 and worst <= (0 if exact else tol),
        details={"pairs": pairs, "failures": failures},
    )


# -- cyclic algebra: regularity and inverse ----------------------------------


def nu(u: Element) -> Any:
    """``x^3 + y^3 + z^3 - 3xyz``; zero exactly on singular elements."""
    x, y, z = u
    return x * x * x + y * y * y + z * z * z - 3 * x * y * z


def invert(u: Element, tol: float = FLOAT_TOL) -> Element:
    """Closed-form inverse in the cyclic algebra."""
    x, y, z = u
    plane = x + y + z
    quad = x * x + y * y + z * z - x * y - y * z - z * x
    zp, zq = is_zero(plane, tol), is_zero(quad, tol)
    if zp or zq:
        factor = "both" if zp and zq else ("plane" if zp else "trisector")
        raise SingularElement(f"{u} is singular ({factor} factor vanishes)", factor)
    n = plane * quad
    return Element((x * x - y * z) / n, (z * z - x * y) / n, (y * y - z * x) / n)


def invert_general(u: Element, P: AlgebraParams = CYCLIC, tol: float = FLOAT_TOL) -> Element:
    """Inverse through the representation: solve ``R(u) w = e1``."""
    R = rep(u, P)
    if is_zero(det3(R), tol):
        raise SingularElement(f"{u} is singular (det R(u) = 0)", "determinant")
    one = Fraction(1) if is_exact(u.c1) else 1.0
    return Element.of(solve_linear(R, [one, 0 * one, 0 * one], tol))


# -- nodal plane, trisector line, V map -----------------------------------------


class Membership(enum.Enum):
    ZERO = "Zero"
    PI = "Pi"
    TRISECTOR = "Trisector"
    NEITHER = "Neither"


def in_plane(u: Element, tol: float = FLOAT_TOL) -> bool:
    return is_zero(u.coord_sum(), tol)


def on_trisector(u: Element, tol: float = FLOAT_TOL) -> bool:
    return is_zero(u.c1 - u.c2, tol) and is_zero(u.c2 - u.c3, tol)


def membership(u: Element, tol: float = FLOAT_TOL) -> Membership:
    """Classify ``u`` against the nodal plane and the trisector line."""
    p, t = in_plane(u, tol), on_trisector(u, tol)
    if p and t:
        return Membership.ZERO
    if p:
        return Membership.PI
    if t:
        return Membership.TRISECTOR
    return Membership.NEITHER


def pi_divide(mu: Element, uprime: Element, tol: float = FLOAT_TOL) -> Element:
    """The unique ``w`` in the nodal plane with ``w . uprime == mu``.

    Solves the reduced system: the first two rows of the product equation
    plus the plane condition ``w1 + w2 + w3 = 0``.
    """
    if uprime.is_zero(tol) or not in_plane(uprime, tol):
        raise DegenerateDivisor(f"divisor {uprime} must be a nonzero element of the plane")
    if not in_plane(mu, tol):
        raise NotInPlane(f"{mu} is not in the nodal plane")
    a1, a2, a3 = uprime
    one = 1 if is_exact(a1) else 1.0
    M = [
        [a1, a3, a2],
        [a2, a1, a3],
        [one, one, one],
    ]
    return Element.of(solve_linear(M, [mu.c1, mu.c2, 0 * mu.c1], tol))


def v_map(u: Element) -> Element:
    """The linear map ``u -> (u3 - u2, u3 - u1, u2 - u1)``."""
    return Element(u.c3 - u.c2, u.c3 - u.c1, u.c2 - u.c1)


def tangential(u: Element) -> Element:
    """Orthogonal projection onto the nodal plane."""
    s = u.coord_sum() / 3
    return Element(u.c1 - s, u.c2 - s, u.c3 - s)


# Constants of the cyclic geometry, exact in Q(sqrt 3).
N = Element(SQRT3 / 3, SQRT3 / 3, SQRT3 / 3)
V1 = Element(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
V2 = Element(Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3))
V3 = Element(Fraction(0), SQRT3 / 3, -SQRT3 / 3)
W2 = v_map(V2)  # = -(e2 + e3)
W3 = v_map(V3)  # = (-2e1 - e2 + e3)/sqrt3
LAMELLAR_NORMAL = Element(1, -1, 1)


def pi_complex_iso(u: Element, tol: float = FLOAT_TOL) -> tuple[Any, Any]:
    """Coordinates ``(a, b)`` with ``u = a*v2 + b*v3`` (``v2 <-> 1``, ``v3 <-> i``)."""
    if not in_plane(u, tol):
        raise NotInPlane(f"{u} is not in the nodal plane")
    # v2 and v3 are orthogonal with squared norm 2/3
    a = u.dot(V2) * Fraction(3, 2)
    b = u.dot(V3) * Fraction(3, 2)
    return _simplify(a), _simplify(b)


def pi_complex_inverse(a: Any, b: Any) -> Element:
    """Inverse of :func:`pi_complex_iso`: ``a*v2 + b*v3``."""
    return Element.of([_simplify(x) for x in (V2.scale(a) + V3.scale(b))])


def _simplify(x):
    return x.simplify() if hasattr(x, "simplify") else x


def random_element(rng: random.Random, lo: int = -5, hi: int = 5, max_den: int = 4) -> Element:
    """Random exact element with small rational coordinates."""
    return Element.of([Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))
                       for _ in range(3)])


def random_params(rng: random.Random, lo: int = -3, hi: int = 3, max_den: int = 4) -> AlgebraParams:
    return AlgebraParams.of([Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))
                             for _ in range(6)])
