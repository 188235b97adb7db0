"""Pre-twisted differentiable functions and their Cauchy-Riemann residuals.

A field ``F`` is differentiable with respect to the pair (algebra, affine map
``phi``) when ``dF_q = F'(q) . dphi_q``.  Every function of the algebra
variable ``u = phi(q)`` built from algebra sums, products, quotients and
exponentials has this property, with ``F'`` the formal derivative in ``u``.
There is no chain rule, so composition is not offered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .algebra import CYCLIC, E1, ZERO, AlgebraParams, Element, invert_general, multiply, rep
from .errors import SingularDenominator, SingularElement
from .harmonic import EQ_A, AffineMap, phi_partials
from .poly import PolyField, affine_field, field_multiply


@dataclass(frozen=True)
class Context:
    """The algebra and affine map a function is differentiated against."""

    params: AlgebraParams = CYCLIC
    phi: AffineMap = EQ_A

    def is_cyclic_eq_a(self) -> bool:
        return self.params.is_cyclic() and self.phi.A == EQ_A.A


DEFAULT_CONTEXT = Context()


class PhiFunction:
    """Base class; subclasses implement :meth:`at` and :meth:`derivative`."""

    ctx: Context

    def at(self, u: Element) -> Element:
        """Value as a function of the algebra variable ``u``."""
        raise NotImplementedError

    def derivative(self) -> "PhiFunction":
        raise NotImplementedError

    def __call__(self, q: Sequence[Any]) -> Element:
        return self.at(self.ctx.phi(q))


def _mul(ctx: Context, a: Element, b: Element) -> Element:
    return multiply(a, b, ctx.params)


@dataclass(frozen=True)
class PhiPoly(PhiFunction):
    """``c0 + c1.u + ... + cm.u^m`` with algebra-valued coefficients."""

    coeffs: tuple[Element, ...]
    ctx: Context = DEFAULT_CONTEXT

    @classmethod
    def of(cls, coeffs: Sequence[Sequence[Any] | Element], ctx: Context = DEFAULT_CONTEXT) -> "PhiPoly":
        return cls(tuple(c if isinstance(c, Element) else Element.of(c) for c in coeffs), ctx)

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.coeffs) if not c.is_zero(0.0)]
        return nz[-1] if nz else -1

    def at(self, u: Element) -> Element:
        if not self.coeffs:
            return ZERO
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = _mul(self.ctx, acc, u) + c
        return acc

    def derivative(self) -> "PhiPoly":
        return PhiPoly(tuple(c.scale(k) for k, c in enumerate(self.coeffs) if k > 0), self.ctx)

    def __add__(self, other: "PhiPoly") -> "PhiPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (ZERO,) * (n - len(other.coeffs))
        return PhiPoly(tuple(x + y for x, y in zip(a, b)), self.ctx)

    def __mul__(self, other: "PhiPoly") -> "PhiPoly":
        if not self.coeffs or not other.coeffs:
            return PhiPoly((), self.ctx)
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + _mul(self.ctx, a, b)
        return PhiPoly(tuple(out), self.ctx)

    def expand(self) -> PolyField:
        """Components as exact polynomials in ``(x, y, z)`` (Horner in the algebra)."""
        u = affine_field(self.ctx.phi.A, self.ctx.phi.k)
        if not self.coeffs:
            return PolyField.zero()
        acc = PolyField.constant(self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            acc = field_multiply(acc, u, self.ctx.params) + PolyField.constant(c)
        return acc


@dataclass(frozen=True)
class PhiRational(PhiFunction):
    """``num(u) / den(u)``, defined where ``den(u)`` is regular."""

    num: PhiPoly
    den: PhiPoly

    @property
    def ctx(self) -> Context:  # type: ignore[override]
        return self.num.ctx

    def at(self, u: Element) -> Element:
        d = self.den.at(u)
        try:
            inv = invert_general(d, self.ctx.params)
        except SingularElement as exc:
            raise SingularDenominator(f"denominator {d} is singular") from exc
        return _mul(self.ctx, self.num.at(u), inv)

    def derivative(self) -> "PhiRational":
        n, d = self.num, self.den
        minus_one = PhiPoly((Element(-1, 0, 0),), n.ctx)
        top = n.derivative() * d + minus_one * n * d.derivative()
        return PhiRational(top, d * d)


TRANSCENDENTAL_KINDS = ("exp", "sin", "cos", "sinh", "cosh")


def matrix_function(kind: str, M: np.ndarray) -> np.ndarray:
    """``f(M)`` for the 3x3 representation matrix ``M``.

    Trigonometric functions come from the exponential of the real block matrix
    ``[[0, -M], [M, 0]]``, whose exponential is ``[[cos M, -sin M], [sin M, cos M]]``.
    """
    if kind == "exp":
        return expm(M)
    if kind in ("sinh", "cosh"):
        ep, em = expm(M), expm(-M)
        return (ep - em) / 2 if kind == "sinh" else (ep + em) / 2
    if kind in ("sin", "cos"):
        n = M.shape[0]
        B = np.zeros((2 * n, 2 * n))
        B[:n, n:] = -M
        B[n:, :n] = M
        E = expm(B)
        return E[n:, :n] if kind == "sin" else E[:n, :n]
    raise ValueError(f"unknown kind {kind!r}")


_DERIVATIVE = {"exp": ("exp", 1), "sin": ("cos", 1), "cos": ("sin", -1),
               "sinh": ("cosh", 1), "cosh": ("sinh", 1)}


@dataclass(frozen=True)
class PhiTranscendental(PhiFunction):
    """``coeff . f(u)`` for ``f`` one of exp, sin, cos, sinh, cosh."""

    kind: str
    coeff: Element = E1
    ctx: Context = DEFAULT_CONTEXT

    def __post_init__(self):
        if self.kind not in TRANSCENDENTAL_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def at(self, u: Element) -> Element:
        M = np.array([[float(v) for v in row] for row in rep(u.to_float(), self.ctx.params)])
        fM = matrix_function(self.kind, M)
        # R(f(u)) c = f(u) . c
        return Element.of([float(v) for v in fM @ np.array([float(c) for c in self.coeff])])

    def derivative(self) -> "PhiTranscendental":
        kind, sign = _DERIVATIVE[self.kind]
        return PhiTranscendental(kind, self.coeff.scale(sign), self.ctx)


def eval_function(F: PhiFunction, q: Sequence[Any]) -> Element:
    return F(q)


def phi_derivative(F: PhiFunction) -> PhiFunction:
    return F.derivative()


def partials(F: PhiFunction, q: Sequence[Any]) -> tuple[Element, Element, Element]:
    """``(F_x, F_y, F_z) = F'(phi(q)) . (phi_x, phi_y, phi_z)``."""
    d = F.derivative()(q)
    return tuple(_mul(F.ctx, d, p) for p in phi_partials(F.ctx.phi))  # type: ignore[return-value]


SECOND_NAMES = ("xx", "yy", "zz", "xy", "xz", "yz")
_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def second_partials(F: PhiFunction, q: Sequence[Any]) -> tuple[Element, ...]:
    """``F_ab = F''(phi(q)) . phi_a . phi_b`` in the order xx, yy, zz, xy, xz, yz."""
    dd = F.derivative().derivative()(q)
    ph = phi_partials(F.ctx.phi)
    return tuple(_mul(F.ctx, dd, _mul(F.ctx, ph[a], ph[b])) for a, b in _PAIRS)


# -- Cauchy-Riemann residuals --------------------------------------------------


CR_ROWS = tuple(f"{pair}{i}" for pair in ("xy", "xz", "yz") for i in (1, 2, 3))
REDUCED_ROWS = ("r1", "r2", "r3", "r4")


def cr_rows(jac: Sequence[Sequence[Any]], P: AlgebraParams, phi: AffineMap) -> list[Any]:
    """The nine rows ``phi_a . F_b - phi_b . F_a`` for (a, b) = (x, y), (x, z), (y, z).

    ``jac[i][a]`` is the partial of component ``i`` along axis ``a``.
    """
    cols = [Element(jac[0][a], jac[1][a], jac[2][a]) for a in range(3)]
    ph = phi_partials(phi)
    rows: list[Any] = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        d = multiply(ph[a], cols[b], P) - multiply(ph[b], cols[a], P)
        rows.extend(d)
    return rows


def reduced_cr_rows(jac: Sequence[Sequence[Any]]) -> list[Any]:
    """Four independent rows for the cyclic algebra with the standard harmonic map."""
    (F1x, F1y, F1z), (F2x, F2y, F2z), (F3x, F3y, F3z) = jac
    return [
        F1x - F1y - F2x + F3y,
        -F1x + F2y + F3x - F3y,
        -F1z - F2x + F3x + F3z,
        F1x + F1z - F2z - F3x,
    ]


@dataclass
class CrReport:
    residuals: tuple[float, ...]  # nine rows, max |.| over probes
    reduced: tuple[float, ...] | None  # four rows, or None outside the cyclic/standard-map case
    max_abs: float
    passed: bool
    exact: bool
    rank_consistent: bool
    probes: int
    first_failure: str | None = None
    vacuous: bool = False
    details: dict = field(default_factory=dict)


Field = PolyField | PhiFunction | Callable[[Sequence[float]], Sequence[float]]


def _fd_jacobian(f: Callable, q: Sequence[float], h: float) -> list[list[float]]:
    J = [[0.0] * 3 for _ in range(3)]
    for a in range(3):
        qp, qm = list(map(float, q)), list(map(float, q))
        qp[a] += h
        qm[a] -= h
        fp, fm = list(f(qp)), list(f(qm))
        for i in range(3):
            J[i][a] = (float(fp[i]) - float(fm[i])) / (2 * h)
    return J


def field_jacobian_fn(F: Field, h: float = 1e-4) -> tuple[Callable, bool, bool]:
    """``(q -> jacobian, exact?, identically zero?)`` for any supported field."""
    if isinstance(F, PhiPoly):
        F = F.expand()
    if isinstance(F, PolyField):
        J = F.jacobian()
        return (lambda q: [[J[i][a](q) for a in range(3)] for i in range(3)]), True, F.is_zero()
    return (lambda q: _fd_jacobian(F, q, h)), False, False


def cr_residual(F: Field, P: AlgebraParams = CYCLIC, phi: AffineMap = EQ_A,
                probes: Sequence[Sequence[Any]] = ((0, 0, 0),), *,
                h: float = 1e-4, tol: float | None = None) -> CrReport:
    """Evaluate the pre-twisted Cauchy-Riemann rows of ``F`` on ``probes``.

    Polynomial input is differentiated exactly (pass rational probes for an
    exact verdict); anything else uses central differences with step ``h``.
    ``tol`` defaults to 0 on the exact path and 1e-6 otherwise.
    """
    jac_fn, exact, vacuous = field_jacobian_fn(F, h)
    if exact and any(isinstance(c, float) for q in probes for c in q):
        exact = False
    if tol is None:
        tol = 0.0 if exact else 1e-6
    with_reduced = P.is_cyclic() and phi.A == EQ_A.A
    worst9 = [0.0] * 9
    worst4 = [0.0] * 4
    rank_ok = True
    first = None
    for q in probes:
        J = jac_fn(q)
        r9 = [abs(float(v)) for v in cr_rows(J, P, phi)]
        worst9 = [max(a, b) for a, b in zip(worst9, r9)]
        if with_reduced:
            r4 = [abs(float(v)) for v in reduced_cr_rows(J)]
            worst4 = [max(a, b) for a, b in zip(worst4, r4)]
            if max(r4) <= tol and max(r9) > tol:
                rank_ok = False
            if first is None and max(r4) > tol:
                first = REDUCED_ROWS[next(i for i, v in enumerate(r4) if v > tol)]
        if first is None and max(r9) > tol:
            first = CR_ROWS[next(i for i, v in enumerate(r9) if v > tol)]
    max_abs = max(worst9 + (worst4 if with_reduced else []))
    return CrReport(
        residuals=tuple(worst9),
        reduced=tuple(worst4) if with_reduced else None,
        max_abs=max_abs,
        passed=max_abs <= tol,
        exact=exact,
        rank_consistent=rank_ok,
        probes=len(probes),
        first_failure=first,
        vacuous=vacuous,
    )


def as_sampler(F: Field) -> Callable[[Sequence[float]], Element]:
    """Float point evaluator for any supported field."""
    if isinstance(F, PolyField):
        return lambda q: F([float(c) for c in q]).to_float()
    return lambda q: Element.of([float(c) for c in F([float(c) for c in q])])


def constant_poly(c: Sequence[Any] | Element, ctx: Context = DEFAULT_CONTEXT) -> PhiPoly:
    return PhiPoly.of([c], ctx)


def phi_power(n: int, ctx: Context = DEFAULT_CONTEXT, coeff: Element = E1) -> PhiPoly:
    """``coeff . phi(q)^n``."""
    zero = Element(Fraction(0), Fraction(0), Fraction(0))
    return PhiPoly(tuple([zero] * n + [coeff]), ctx)

