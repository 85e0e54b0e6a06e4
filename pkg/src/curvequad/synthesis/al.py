"""Augmented-Lagrangian loop for box-constrained problems with equality and
inequality constraints.

The outer loop updates multipliers in the Powell-Hestenes-Rockafellar form;
the inner problems are solved by L-BFGS-B, which handles the box directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import least_squares, minimize

MAX_PENALTY = 1e12


@dataclass
class ALProblem:
    """``min f(z)`` s.t. ``c(z) = 0``, ``g(z) <= 0``, ``lo <= z <= hi``.

    Callables return value and Jacobian (gradient for ``f``).
    """

    objective: Callable
    equality: Callable
    lo: np.ndarray
    hi: np.ndarray
    inequality: Optional[Callable] = None


@dataclass
class ALResult:
    z: np.ndarray
    violation: float
    objective: float
    outer_iters: int
    converged: bool
    lam: np.ndarray
    mu: np.ndarray


def _violation(prob: ALProblem, z):
    c, _ = prob.equality(z)
    v = float(np.max(np.abs(c))) if c.size else 0.0
    if prob.inequality is not None:
        g, _ = prob.inequality(z)
        if g.size:
            v = max(v, float(np.max(g, initial=0.0)))
    return v


def augmented_lagrangian(
    prob: ALProblem,
    z0,
    *,
    rho: float = 10.0,
    growth: float = 10.0,
    max_outer: int = 40,
    max_inner: int = 400,
    tol: float = 1e-10,
    project: Optional[Callable] = None,
) -> ALResult:
    z = np.clip(np.asarray(z0, dtype=float), prob.lo, prob.hi)
    c, _ = prob.equality(z)
    lam = np.zeros(len(c))
    mu = np.zeros(0)
    if prob.inequality is not None:
        mu = np.zeros(len(prob.inequality(z)[0]))
    bounds = list(zip(prob.lo, prob.hi))
    bounds = [(None if not np.isfinite(a) else a, None if not np.isfinite(b) else b) for a, b in bounds]

    def lagrangian(x):
        f, gf = prob.objective(x)
        c, J = prob.equality(x)
        val = f + lam @ c + 0.5 * rho * (c @ c)
        grad = gf + J.T @ (lam + rho * c)
        if prob.inequality is not None:
            g, Jg = prob.inequality(x)
            shifted = np.maximum(0.0, mu + rho * g)
            val += (shifted @ shifted - mu @ mu) / (2 * rho)
            grad = grad + Jg.T @ shifted
        return val, grad

    prev = np.inf
    it = 0
    viol = _violation(prob, z)
    for it in range(1, max_outer + 1):
        sol = minimize(lagrangian, z, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": max_inner, "ftol": 1e-15, "gtol": 1e-12})
        z = sol.x
        if project is not None:
            z = np.clip(project(z), prob.lo, prob.hi)
        c, _ = prob.equality(z)
        lam = lam + rho * c
        if prob.inequality is not None:
            g, _ = prob.inequality(z)
            mu = np.maximum(0.0, mu + rho * g)
        viol = _violation(prob, z)
        if viol <= tol:
            break
        if viol > 0.25 * prev:
            rho = min(rho * growth, MAX_PENALTY)
        prev = viol
    f, _ = prob.objective(z)
    return ALResult(z, viol, float(f), it, viol <= tol, lam, mu)


def feasibility_polish(prob: ALProblem, z0, tol: float = 1e-14, max_nfev: int = 2000):
    """Nearest-feasible refinement by bounded nonlinear least squares."""
    lo = np.asarray(prob.lo, dtype=float)
    hi = np.asarray(prob.hi, dtype=float)
    z0 = np.clip(np.asarray(z0, dtype=float), lo, hi)
    # least_squares needs strict interior starts
    span = np.where(np.isfinite(hi - lo), hi - lo, 1.0)
    z0 = np.minimum(np.maximum(z0, lo + 1e-14 * span), hi - 1e-14 * span)
    z0 = np.where(lo == hi, lo, z0)

    def resid(z):
        c, _ = prob.equality(z)
        if prob.inequality is not None:
            g, _ = prob.inequality(z)
            c = np.concatenate([c, np.maximum(g, 0.0)])
        return c

    def jac(z):
        _, J = prob.equality(z)
        if prob.inequality is not None:
            g, Jg = prob.inequality(z)
            J = np.vstack([J, Jg * (g > 0)[:, None]])
        return J

    free = lo < hi
    if not np.all(free):
        # freeze fixed coordinates
        idx = np.nonzero(free)[0]

        def r2(y):
            z = z0.copy()
            z[idx] = y
            return resid(z)

        def j2(y):
            z = z0.copy()
            z[idx] = y
            return jac(z)[:, idx]

        sol = least_squares(r2, z0[idx], jac=j2, bounds=(lo[idx], hi[idx]), xtol=tol, ftol=tol, gtol=tol,
                            max_nfev=max_nfev, method="trf")
        z = z0.copy()
        z[idx] = sol.x
        return z
    sol = least_squares(resid, z0, jac=jac, bounds=(lo, hi), xtol=tol, ftol=tol, gtol=tol,
                        max_nfev=max_nfev, method="trf")
    return sol.x
