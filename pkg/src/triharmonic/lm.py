"""Levenberg-Marquardt for small dense residual systems, with multistart."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

ResidualFn = Callable[[np.ndarray], np.ndarray]
JacobianFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class LMResult:
    x: np.ndarray
    residual: float  # infinity norm of the final residual vector
    iterations: int
    converged: bool


def levenberg_marquardt(
    fun: ResidualFn,
    jac: JacobianFn,
    x0: np.ndarray,
    *,
    tol: float = 1e-10,
    max_iterations: int = 200,
    damping: float = 1e-3,
    factor: float = 10.0,
) -> LMResult:
    """Minimize ``|fun(x)|^2`` by damped Gauss-Newton steps.

    The damping term is ``damping * I`` (not scaled by ``diag(J^T J)``) so
    that rank-deficient Jacobians of underdetermined systems still give a
    well-posed step.  Accepted steps divide the damping by ``factor``,
    rejected ones multiply it.  Stops once ``max|r| < tol``.
    """
    x = np.array(x0, dtype=float)
    r = fun(x)
    cost = float(r @ r)
    lam = damping
    n = x.size
    iterations = 0
    while iterations < max_iterations:
        if np.max(np.abs(r)) < tol:
            break
        J = jac(x)
        g = J.T @ r
        H = J.T @ J
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(H + lam * np.eye(n), -g)
            except np.linalg.LinAlgError:
                lam *= factor
                continue
            x_new = x + step
            r_new = fun(x_new)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam / factor, 1e-15)
                accepted = True
                break
            lam *= factor
        if not accepted:
            break
        iterations += 1
    res = float(np.max(np.abs(r)))
    return LMResult(x, res, iterations, res < tol)


def worker_count(requested: int | None = None) -> int:
    """Worker cap: explicit request, else ``TRIHARMONIC_THREADS``, else 1."""
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("TRIHARMONIC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def multistart(
    fun: ResidualFn,
    jac: JacobianFn,
    starts: Sequence[np.ndarray],
    *,
    tol: float,
    max_iterations: int,
    workers: int | None = None,
) -> list[LMResult]:
    """Run one LM solve per start; results keep the order of ``starts``."""

    def run(x0):
        return levenberg_marquardt(fun, jac, x0, tol=tol, max_iterations=max_iterations)

    n = worker_count(workers)
    if n == 1 or len(starts) < 2:
        return [run(s) for s in starts]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(run, starts))
