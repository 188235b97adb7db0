"""Affine maps and the phi-harmonicity condition ``phi_x^2 + phi_y^2 + phi_z^2 = 0``.

Given an affine map ``phi(q) = A q + k`` and algebra parameters ``P``, the sum
of the squared (constant) partials of ``phi`` is an algebra element whose
three coefficients are quadratic in ``p1..p6`` and quadratic in the entries of
``A``.  The solvers here look for roots in either set of unknowns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .algebra import CYCLIC, AlgebraParams, Element, multiply
from .errors import NoSolutionFound
from .lm import multistart
from .scalars import is_exact, rationalize


@dataclass(frozen=True)
class AffineMap:
    """``phi(q) = A q + k``; ``A`` is stored row-wise."""

    A: tuple[tuple[Any, Any, Any], ...]
    k: Element = Element(0, 0, 0)

    @classmethod
    def of(cls, A: Sequence[Sequence[Any]], k: Sequence[Any] | Element = (0, 0, 0)) -> "AffineMap":
        rows = tuple(tuple(r) for r in A)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("A must be 3x3")
        return cls(rows, k if isinstance(k, Element) else Element.of(k))

    def __call__(self, q: Sequence[Any]) -> Element:
        return Element.of([
            self.A[r][0] * q[0] + self.A[r][1] * q[1] + self.A[r][2] * q[2] + self.k[r]
            for r in range(3)
        ])

    def row(self, i: int) -> tuple[Any, Any, Any]:
        return self.A[i]

    def column(self, j: int) -> Element:
        return Element(self.A[0][j], self.A[1][j], self.A[2][j])

    def scaled(self, t: Any) -> "AffineMap":
        return AffineMap(tuple(tuple(t * a for a in r) for r in self.A), self.k)

    def with_offset(self, k: Sequence[Any] | Element) -> "AffineMap":
        return AffineMap(self.A, k if isinstance(k, Element) else Element.of(k))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.A for a in r)

    def as_array(self) -> np.ndarray:
        return np.array([[float(a) for a in r] for r in self.A])


EQ_A = AffineMap.of([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
IDENTITY_MAP = AffineMap.of([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def phi_partials(phi: AffineMap) -> tuple[Element, Element, Element]:
    """``(phi_x, phi_y, phi_z)``: the columns of ``A``."""
    return phi.column(0), phi.column(1), phi.column(2)


SECOND_PRODUCT_NAMES = ("xx", "yy", "zz", "xy", "xz", "yz")
_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def second_products(phi: AffineMap, P: AlgebraParams = CYCLIC) -> tuple[Element, ...]:
    """``phi_x^2, phi_y^2, phi_z^2, phi_x phi_y, phi_x phi_z, phi_y phi_z`` by algebra product."""
    cols = phi_partials(phi)
    return tuple(multiply(cols[i], cols[j], P) for i, j in _PAIRS)


def column_product_closed_form(u: Sequence[Any], v: Sequence[Any], P: AlgebraParams) -> Element:
    """Coefficients of ``u . v`` written out with ``p7..p9`` expanded in ``p1..p6``."""
    p1, p2, p3, p4, p5, p6 = P.free
    u1, u2, u3 = u
    v1, v2, v3 = v
    cross = u2 * v3 + u3 * v2
    return Element(
        u1 * v1
        + u2 * v2 * (-p1 * p4 + p2 * p3 - p2 * p6 + p4 * p4)
        + cross * (p2 * p5 - p3 * p4)
        + u3 * v3 * (-p1 * p5 + p3 * p3 - p3 * p6 + p4 * p5),
        u1 * v2 + u2 * v1 + u2 * v2 * p1 + cross * p3 + u3 * v3 * p5,
        u1 * v3 + u3 * v1 + u2 * v2 * p2 + cross * p4 + u3 * v3 * p6,
    )


def second_products_closed_form(phi: AffineMap, P: AlgebraParams = CYCLIC) -> tuple[Element, ...]:
    cols = phi_partials(phi)
    return tuple(column_product_closed_form(cols[i], cols[j], P) for i, j in _PAIRS)


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def harmonicity_residual(phi: AffineMap, P: AlgebraParams = CYCLIC) -> Element:
    """``phi_x^2 + phi_y^2 + phi_z^2`` expressed through the rows of ``A``."""
    A1, A2, A3 = phi.A
    n1, n2, n3 = _dot(A1, A1), _dot(A2, A2), _dot(A3, A3)
    d12, d13, d23 = _dot(A1, A2), _dot(A1, A3), _dot(A2, A3)
    return Element(
        n1 + n2 * P.p7 + n3 * P.p9 + 2 * d23 * P.p8,
        n2 * P.p1 + n3 * P.p5 + 2 * d12 + 2 * d23 * P.p3,
        n2 * P.p2 + n3 * P.p6 + 2 * d13 + 2 * d23 * P.p4,
    )


def is_phi_harmonic(phi: AffineMap, P: AlgebraParams, tol: float = 0.0) -> bool:
    r = harmonicity_residual(phi, P)
    if all(is_exact(c) for c in r):
        return r.is_zero()
    return r.max_abs() <= tol


def system_residual(x: Sequence[Any], phi: AffineMap) -> tuple[Any, ...]:
    """Residuals of the nine-unknown system: three associativity rows, three harmonicity rows."""
    x1, x2, x3, x4, x5, x6, x7, x8, x9 = x
    A1, A2, A3 = phi.A
    n1, n2, n3 = _dot(A1, A1), _dot(A2, A2), _dot(A3, A3)
    d12, d13, d23 = _dot(A1, A2), _dot(A1, A3), _dot(A2, A3)
    return (
        -x1 * x4 + x2 * x3 - x2 * x6 + x4 * x4 - x7,
        x2 * x5 - x3 * x4 - x8,
        -x1 * x5 + x3 * x3 - x3 * x6 + x4 * x5 - x9,
        n2 * x1 + 2 * d23 * x3 + n3 * x5 + 2 * d12,
        n2 * x2 + 2 * d23 * x4 + n3 * x6 + 2 * d13,
        n2 * x7 + 2 * d23 * x8 + n3 * x9 + n1,
    )


# -- solvers --------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 20
    max_iterations: int = 200
    tolerance: float = 1e-10
    seed: int = 0
    box: float = 2.0
    starts: tuple[tuple[float, ...], ...] = ()
    workers: int | None = None

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class Candidate:
    """A certified root of one of the harmonicity systems."""

    values: tuple[float, ...]
    residual: float
    restart_index: int
    iterations: int
    exact_residual: Fraction | None = None
    extra: dict = field(default_factory=dict)

    @property
    def params(self) -> AlgebraParams:
        return AlgebraParams.of(self.values)

    @property
    def matrix(self) -> AffineMap:
        v = self.values
        return AffineMap.of([v[0:3], v[3:6], v[6:9]])


# roots are polished this far below the certification tolerance
POLISH = 1e-4


def _start_points(cfg: SolverConfig, dim: int) -> list[np.ndarray]:
    rng = random.Random(cfg.seed)
    starts = [np.array(s, dtype=float) for s in cfg.starts][: cfg.restarts]
    while len(starts) < cfg.restarts:
        starts.append(np.array([rng.uniform(-cfg.box, cfg.box) for _ in range(dim)]))
    return starts


def _merge(cands: list[Candidate], radius: float) -> list[Candidate]:
    cands = sorted(cands, key=lambda c: (tuple(round(v, 6) for v in c.values), c.restart_index))
    kept: list[Candidate] = []
    for c in cands:
        if any(max(abs(a - b) for a, b in zip(c.values, k.values)) <= radius for k in kept):
            continue
        kept.append(c)
    return kept


def _row_stats(A: np.ndarray):
    n = np.einsum("ij,ij->i", A, A)
    return n, A[0] @ A[1], A[0] @ A[2], A[1] @ A[2]


def params_residual_fn(A: np.ndarray):
    """Residual and Jacobian in ``p1..p6`` for a fixed float matrix ``A``."""
    (n1, n2, n3), d12, d13, d23 = _row_stats(A)

    def fun(p):
        p1, p2, p3, p4, p5, p6 = p
        p7 = -p1 * p4 + p2 * p3 - p2 * p6 + p4 * p4
        p8 = p2 * p5 - p3 * p4
        p9 = -p1 * p5 + p3 * p3 - p3 * p6 + p4 * p5
        return np.array([
            n1 + n2 * p7 + n3 * p9 + 2 * d23 * p8,
            n2 * p1 + n3 * p5 + 2 * d12 + 2 * d23 * p3,
            n2 * p2 + n3 * p6 + 2 * d13 + 2 * d23 * p4,
        ])

    def jac(p):
        p1, p2, p3, p4, p5, p6 = p
        dp7 = np.array([-p4, p3 - p6, p2, -p1 + 2 * p4, 0.0, -p2])
        dp8 = np.array([0.0, p5, -p4, -p3, p2, 0.0])
        dp9 = np.array([-p5, 0.0, 2 * p3 - p6, p5, -p1 + p4, -p3])
        return np.array([
            n2 * dp7 + n3 * dp9 + 2 * d23 * dp8,
            [n2, 0.0, 2 * d23, 0.0, n3, 0.0],
            [0.0, n2, 0.0, 2 * d23, 0.0, n3],
        ])

    return fun, jac


def matrix_residual_fn(P: AlgebraParams):
    """Residual and Jacobian in the nine entries of ``A`` (row-major) for fixed ``P``.

    A fourth row pins ``|A|_F^2 = 1``; the harmonicity residual is homogeneous
    of degree two, so this only removes the scale.
    """
    p1, p2, p3, p4, p5, p6, p7, p8, p9 = (float(v) for v in P.all)

    def fun(a):
        A1, A2, A3 = a[0:3], a[3:6], a[6:9]
        return np.array([
            A1 @ A1 + p7 * (A2 @ A2) + p9 * (A3 @ A3) + 2 * p8 * (A2 @ A3),
            2 * (A1 @ A2) + p1 * (A2 @ A2) + p5 * (A3 @ A3) + 2 * p3 * (A2 @ A3),
            2 * (A1 @ A3) + p2 * (A2 @ A2) + p6 * (A3 @ A3) + 2 * p4 * (A2 @ A3),
            a @ a - 1.0,
        ])

    def jac(a):
        A1, A2, A3 = a[0:3], a[3:6], a[6:9]
        return np.array([
            np.concatenate([2 * A1, 2 * p7 * A2 + 2 * p8 * A3, 2 * p9 * A3 + 2 * p8 * A2]),
            np.concatenate([2 * A2, 2 * A1 + 2 * p1 * A2 + 2 * p3 * A3, 2 * p5 * A3 + 2 * p3 * A2]),
            np.concatenate([2 * A3, 2 * p2 * A2 + 2 * p4 * A3, 2 * A1 + 2 * p6 * A3 + 2 * p4 * A2]),
            2 * a,
        ])

    return fun, jac


def _exact_params_residual(values, phi: AffineMap) -> Fraction:
    P = AlgebraParams.of([rationalize(v) for v in values])
    exact_phi = AffineMap.of([[a if is_exact(a) else rationalize(a) for a in r] for r in phi.A])
    return max(abs(c) for c in harmonicity_residual(exact_phi, P))


def solve_params(phi: AffineMap, cfg: SolverConfig = SolverConfig()) -> list[Candidate]:
    """Algebra parameters making ``phi`` harmonic, from ``cfg.restarts`` LM runs.

    Returns certified, de-duplicated isolated representatives of the
    (generically three-dimensional) solution set.  Raises
    :class:`NoSolutionFound` when no run certifies.
    """
    if phi.is_zero():
        raise ValueError("A must be nonzero")
    fun, jac = params_residual_fn(phi.as_array())
    starts = _start_points(cfg, 6)
    results = multistart(fun, jac, starts, tol=cfg.tolerance * POLISH,
                         max_iterations=cfg.max_iterations, workers=cfg.workers)
    cands = []
    for i, res in enumerate(results):
        if res.residual < cfg.tolerance:
            vals = tuple(float(v) for v in res.x)
            cands.append(Candidate(vals, res.residual, i, res.iterations,
                                   _exact_params_residual(vals, phi)))
    if not cands:
        best = min(r.residual for r in results)
        raise NoSolutionFound(f"no certified parameters in {len(results)} restarts "
                              f"(best residual {best:.3g})", best)
    return _merge(cands, 10 * cfg.tolerance)


MIN_ROW_NORM = 0.1


def solve_matrix(P: AlgebraParams, cfg: SolverConfig = SolverConfig()) -> list[Candidate]:
    """Unit-Frobenius-norm matrices ``A`` making ``P`` phi-harmonic.

    Candidates with a row of norm below 0.1 are rejected as near-degenerate.
    """
    fun, jac = matrix_residual_fn(P)
    starts = _start_points(cfg, 9)
    results = multistart(fun, jac, starts, tol=cfg.tolerance * POLISH,
                         max_iterations=cfg.max_iterations, workers=cfg.workers)
    cands = []
    for i, res in enumerate(results):
        if res.residual >= cfg.tolerance:
            continue
        a = res.x / np.linalg.norm(res.x)
        rows = a.reshape(3, 3)
        if np.min(np.linalg.norm(rows, axis=1)) < MIN_ROW_NORM:
            continue
        vals = tuple(float(v) for v in a)
        exact_P = AlgebraParams.of([v if is_exact(v) else rationalize(v) for v in P.free])
        exact_A = AffineMap.of([[rationalize(v) for v in vals[r * 3:(r + 1) * 3]] for r in range(3)])
        exact = max(abs(c) for c in harmonicity_residual(exact_A, exact_P))
        cands.append(Candidate(vals, float(np.max(np.abs(fun(a)))), i, res.iterations, exact))
    if not cands:
        best = min(r.residual for r in results)
        raise NoSolutionFound(f"no certified matrix in {len(results)} restarts "
                              f"(best residual {best:.3g})", best)
    return _merge(cands, 10 * cfg.tolerance)


def solve_joint(cfg: SolverConfig = SolverConfig(), sweeps: int = 3) -> list[tuple[AffineMap, AlgebraParams, float]]:
    """Pairs ``(A, P)`` found by alternating the two partial solves.

    Each restart begins from a random ``A``; parameters are solved for that
    ``A``, then ``A`` is re-solved for the first parameter candidate, and so
    on for ``sweeps`` rounds.  Only pairs whose harmonicity residual stays
    below the tolerance are returned.
    """
    rng = random.Random(cfg.seed)
    out = []
    for r in range(cfg.restarts):
        A = np.array([rng.uniform(-cfg.box, cfg.box) for _ in range(9)]).reshape(3, 3)
        phi = AffineMap.of(A.tolist())
        P = None
        sub = SolverConfig(restarts=4, max_iterations=cfg.max_iterations,
                           tolerance=cfg.tolerance, seed=cfg.seed + r, box=cfg.box)
        try:
            for _ in range(sweeps):
                P = solve_params(phi, sub)[0].params
                phi = solve_matrix(P, SolverConfig(restarts=4, max_iterations=cfg.max_iterations,
                                                   tolerance=cfg.tolerance, seed=cfg.seed + r,
                                                   starts=(tuple(np.ravel(phi.as_array())
                                                                 / np.linalg.norm(phi.as_array())),)))[0].matrix
        except NoSolutionFound:
            continue
        res = harmonicity_residual(phi, P).max_abs()
        if res < cfg.tolerance:
            out.append((phi, P, res))
    return out
