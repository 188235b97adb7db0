"""Harmonic and lamellar field synthesis, first integrals and the (u, v) picture.

Fields parallel to the nodal plane are written ``F = u*v2 + v*v3`` with ``u``
and ``v`` functions of the rotated coordinates

    zeta = x + y + z,   xi = x - (y + z)/2,   eta = (sqrt3/2)(y - z),

and their lamellar counterparts are ``V = u*w2 + v*w3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .algebra import V2, V3, W2, W3, Element
from .poly import PolyField, TriPoly
from .pretwisted import PhiPoly, reduced_cr_rows
from .scalars import SQRT3

# Types of scalar components accepted by UvField.
Scalar3 = Callable[[float, float, float], float]


def expand(F: PhiPoly) -> PolyField:
    """Exact polynomial components of a polynomial function of ``phi``."""
    return F.expand()


def lamellarize(F: PolyField) -> PolyField:
    """``V = (F3 - F2) e1 + (F3 - F1) e2 + (F2 - F1) e3``."""
    F1, F2, F3 = F
    return PolyField(F3 - F2, F3 - F1, F2 - F1)


def first_integral_check(F: PolyField, w: Sequence[Any]) -> TriPoly:
    """``w . F``; zero iff ``H(q) = w . q`` is constant along trajectories of ``F``."""
    return F.dot(w)


# -- rotated coordinates ------------------------------------------------------

HALF_SQRT3 = SQRT3 / 2

ROTATED_FORMS = (
    TriPoly.linear([1, 1, 1]),
    TriPoly.linear([1, Fraction(-1, 2), Fraction(-1, 2)]),
    TriPoly.linear([0, HALF_SQRT3, -HALF_SQRT3]),
)


def to_rotated(q: Sequence[Any]) -> tuple[Any, Any, Any]:
    """``(x, y, z) -> (zeta, xi, eta)``."""
    return tuple(f(q) for f in ROTATED_FORMS)  # type: ignore[return-value]


def from_rotated(r: Sequence[Any]) -> tuple[Any, Any, Any]:
    """``(zeta, xi, eta) -> (x, y, z)``."""
    zeta, xi, eta = r
    s = SQRT3 * eta
    return ((zeta + 2 * xi) / 3, (zeta - xi + s) / 3, (zeta - xi - s) / 3)


@dataclass(frozen=True)
class UvField:
    """``u`` and ``v`` as polynomials or callables in ``(zeta, xi, eta)``."""

    u: TriPoly | Scalar3
    v: TriPoly | Scalar3

    @property
    def exact(self) -> bool:
        return isinstance(self.u, TriPoly) and isinstance(self.v, TriPoly)

    def in_xyz(self) -> tuple[TriPoly, TriPoly]:
        """``u`` and ``v`` as polynomials in ``(x, y, z)`` (coefficients in Q(sqrt 3))."""
        if not self.exact:
            raise TypeError("callable components have no polynomial form")
        return self.u.substitute(ROTATED_FORMS), self.v.substitute(ROTATED_FORMS)  # type: ignore[union-attr]

    def samplers(self) -> tuple[Callable, Callable]:
        """Float evaluators of ``u`` and ``v`` at points ``(x, y, z)``."""
        def wrap(f):
            if isinstance(f, TriPoly):
                g = f.substitute(ROTATED_FORMS)
                return lambda q: float(g([float(c) for c in q]))
            return lambda q: float(f(*to_rotated([float(c) for c in q])))
        return wrap(self.u), wrap(self.v)


def _combine(u, v, a: Element, b: Element):
    return PolyField.of(u * a[i] + v * b[i] for i in range(3))


def uv_to_field(U: UvField, lamellar: bool = False):
    """``u*v2 + v*v3`` (or ``u*w2 + v*w3`` when ``lamellar``).

    Polynomial input gives a :class:`PolyField`; otherwise a point sampler.
    """
    a, b = (W2, W3) if lamellar else (V2, V3)
    if U.exact:
        u, v = U.in_xyz()
        return _combine(u, v, a, b)
    fu, fv = U.samplers()
    af, bf = a.to_float(), b.to_float()

    def sample(q):
        uq, vq = fu(q), fv(q)
        return Element.of([uq * float(af[i]) + vq * float(bf[i]) for i in range(3)])
    return sample


def field_to_uv(F: Element) -> tuple[Any, Any]:
    """``(u, v)`` of a plane-parallel value: ``u = 3 F1 / 2``, ``v = sqrt3 (F2 - F3) / 2``."""
    u = F.c1 * Fraction(3, 2)
    v = HALF_SQRT3 * (F.c2 - F.c3)
    return u, (v.simplify() if hasattr(v, "simplify") else v)


INVERSE_FORMS = (
    TriPoly.linear([Fraction(1, 3), Fraction(2, 3), 0]),
    TriPoly.linear([Fraction(1, 3), Fraction(-1, 3), SQRT3 / 3]),
    TriPoly.linear([Fraction(1, 3), Fraction(-1, 3), -SQRT3 / 3]),
)


def uv_from_field(F: PolyField) -> UvField:
    """Exact ``(u, v)`` of a plane-parallel polynomial field, in rotated coordinates."""
    u = F.F1 * Fraction(3, 2)
    v = (F.F2 - F.F3) * HALF_SQRT3
    return UvField(u.substitute(INVERSE_FORMS), v.substitute(INVERSE_FORMS))


# -- residual blocks ------------------------------------------------------------

TWO_D_DEFAULT = Fraction(1, 3)


@dataclass
class UvCrReport:
    blocks: dict[str, tuple[float, ...]]  # block -> per-row max |residual|
    max_abs: dict[str, float]
    passed: dict[str, bool]
    exact: bool
    constant: Any
    probes: int
    details: dict = field(default_factory=dict)


def _gradients(U: UvField, h: float):
    """Return ``q -> (grad u, grad v)`` in (x, y, z) and an exactness flag."""
    if U.exact:
        u, v = U.in_xyz()
        gu = [u.diff(a) for a in range(3)]
        gv = [v.diff(a) for a in range(3)]
        return (lambda q: ([g(q) for g in gu], [g(q) for g in gv])), True
    fu, fv = U.samplers()

    def grad(f, q):
        out = []
        for a in range(3):
            qp, qm = list(map(float, q)), list(map(float, q))
            qp[a] += h
            qm[a] -= h
            out.append((f(qp) - f(qm)) / (2 * h))
        return out
    return (lambda q: (grad(fu, q), grad(fv, q))), False


def _dot(g, w):
    return g[0] * w[0] + g[1] * w[1] + g[2] * w[2]


def uv_rows(gu, gv, *, w2: Element = W2, w3: Element = W3, constant: Any = TWO_D_DEFAULT) -> dict[str, list[Any]]:
    """All three residual blocks from the gradients of ``u`` and ``v``.

    ``cr_uv``: the four reduced Cauchy-Riemann rows of ``u*v2 + v*v3``.
    ``lamellar``: divergence and curl of ``u*w2 + v*w3``.
    ``cr_2d``: ``D_w2 u + D_w3 v`` and ``D_w3 u - constant * D_w2 v``.
    """
    # Jacobian of F = u v2 + v v3: J[i][a] = v2_i u_a + v3_i v_a
    J = [[V2[i] * gu[a] + V3[i] * gv[a] for a in range(3)] for i in range(3)]
    cr = reduced_cr_rows(J)
    # V = u w2 + v w3: dV_i/dx_a = w2_i u_a + w3_i v_a
    K = [[w2[i] * gu[a] + w3[i] * gv[a] for a in range(3)] for i in range(3)]
    div = K[0][0] + K[1][1] + K[2][2]
    curl = [K[2][1] - K[1][2], K[0][2] - K[2][0], K[1][0] - K[0][1]]
    two_d = [_dot(gu, w2) + _dot(gv, w3), _dot(gu, w3) - constant * _dot(gv, w2)]
    return {"cr_uv": cr, "lamellar": [div] + curl, "cr_2d": two_d}


def uv_cr_residual(U: UvField, probes: Sequence[Sequence[Any]], *, constant: Any = TWO_D_DEFAULT,
                   w2: Element = W2, h: float = 1e-4, tol: float | None = None) -> UvCrReport:
    """Evaluate the (u, v) Cauchy-Riemann, lamellar and 2D blocks on ``probes``.

    Each block is reported separately; ``tol`` defaults to 0 on the exact path
    (polynomial ``u``, ``v`` at rational probes) and 1e-6 otherwise.
    """
    grads, exact = _gradients(U, h)
    if exact and any(isinstance(c, float) for q in probes for c in q):
        exact = False
    if exact and not isinstance(constant, (int, Fraction)):
        exact = False
    if tol is None:
        tol = 0.0 if exact else 1e-6
    worst: dict[str, list[float]] = {}
    for q in probes:
        gu, gv = grads(q)
        for name, rows in uv_rows(gu, gv, w2=w2, constant=constant).items():
            vals = [abs(float(r)) for r in rows]
            prev = worst.setdefault(name, [0.0] * len(vals))
            worst[name] = [max(a, b) for a, b in zip(prev, vals)]
    blocks = {k: tuple(v) for k, v in worst.items()}
    max_abs = {k: max(v) if v else 0.0 for k, v in blocks.items()}
    return UvCrReport(
        blocks=blocks,
        max_abs=max_abs,
        passed={k: m <= tol for k, m in max_abs.items()},
        exact=exact,
        constant=constant,
        probes=len(probes),
    )


def implied_constant(U: UvField, probes: Sequence[Sequence[Any]], *, w2: Element = W2,
                     h: float = 1e-4, min_denominator: float = 1e-8) -> list[float]:
    """Ratios ``D_w3 u / D_w2 v`` at probes where the denominator is not negligible."""
    grads, _ = _gradients(U, h)
    out = []
    for q in probes:
        gu, gv = grads(q)
        den = float(_dot(gv, w2))
        if abs(den) > min_denominator:
            out.append(float(_dot(gu, W3)) / den)
    return out


def plane_pair(a: Callable[[float, float], float], b: Callable[[float, float], float]) -> UvField:
    """Pair with ``u(q) = a(s, t)``, ``v(q) = b(s, t)`` where ``s = q.w2``, ``t = q.w3``."""
    w2, w3 = W2.to_float(), W3.to_float()

    def lift(f):
        def g(zeta, xi, eta):
            q = from_rotated((zeta, xi, eta))
            s = sum(float(w2[i]) * q[i] for i in range(3))
            t = sum(float(w3[i]) * q[i] for i in range(3))
            return f(s, t)
        return g
    return UvField(lift(a), lift(b))


def plane_pair_poly(a: TriPoly, b: TriPoly) -> UvField:
    """Exact version of :func:`plane_pair`: ``a``, ``b`` are polynomials in ``(s, t)`` (stored as x, y)."""
    # q.w2 and q.w3 written in the rotated coordinates
    back = INVERSE_FORMS
    s = back[0] * W2[0] + back[1] * W2[1] + back[2] * W2[2]
    t = back[0] * W3[0] + back[1] * W3[1] + back[2] * W3[2]
    forms = (s, t, TriPoly())
    return UvField(a.substitute(forms), b.substitute(forms))
