"""Caratheodory pruning and Tchakaloff-style feasible starting rules."""

from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares, nnls

from ..errors import InfeasibleStart, NumericalStall
from ..gauss import QuadratureRule
from ..moments import MeasureSpec, MomentVector
from ..polycore import monomial_exponents, monomial_values
from .common import merge_nodes, pullback_values

PRUNE_RANK_TOL = 1e-10


def _null_direction(A):
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    return Vt[-1], (s[-1] / s[0] if s.size and s[0] > 0 and A.shape[0] >= A.shape[1] else 0.0)


def prune_weights(A, w, rank_tol=PRUNE_RANK_TOL):
    """Drive weights to zero along null directions of ``A`` until
    ``#support <= rank(A)``.

    ``A`` has one column per node. Returns the boolean support mask and the
    new weights; ``A @ w`` is preserved up to rounding.
    """
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float).copy()
    sv = np.linalg.svd(A, compute_uv=False)
    r = int(np.sum(sv > rank_tol * sv[0])) if sv.size and sv[0] > 0 else 0
    alive = np.nonzero(w > 0)[0].tolist()
    while len(alive) > r:
        block = alive[: r + 1]
        c, ratio = _null_direction(A[:, block])
        if ratio > rank_tol:
            c, ratio = _null_direction(A[:, alive])
            block = alive
            if ratio > rank_tol:
                raise NumericalStall(
                    f"no null direction with {len(alive)} nodes and rank {r} (ratio {ratio:.2e})"
                )
        if np.max(c) <= 0:
            c = -c
        pos = c > 0
        wb = w[block]
        theta = np.min(wb[pos] / c[pos])
        wb = wb - theta * c
        hit = np.argmin(np.where(pos, w[block] / np.where(pos, c, 1.0), np.inf))
        wb[hit] = 0.0
        wb[wb < 0] = 0.0
        w[block] = wb
        alive = [i for i in alive if w[i] > 0]
    mask = np.zeros(len(w), dtype=bool)
    mask[alive] = True
    return mask, w


def _rule_matrix(rule: QuadratureRule, strength: int, scale):
    exps = monomial_exponents(rule.ambient_dim, strength)
    return monomial_values(rule.nodes, exps).T / scale[:, None], exps


def caratheodory_prune(
    rule: QuadratureRule,
    m_target: MomentVector | None,
    strength: int,
    merge_tol: float = 1e-12,
    rank_tol: float = PRUNE_RANK_TOL,
) -> QuadratureRule:
    """Reduce a rule to at most ``rank`` nodes while keeping its moments.

    Coincident nodes are merged first. Each step walks along a null vector
    of the node-moment matrix until one weight reaches zero, so all weights
    stay nonnegative and every moment of degree ``<= strength`` is preserved.
    ``m_target`` only supplies the row scaling; pass ``None`` to use the
    rule's own moments.
    """
    P, W, T = merge_nodes(rule.nodes, rule.weights, merge_tol, rule.parameter_values)
    merged = QuadratureRule(P, W, strength, rule.provenance, T, dict(rule.meta))
    exps = monomial_exponents(merged.ambient_dim, strength)
    if m_target is not None:
        ref = np.array([m_target[a] for a in exps])
    else:
        ref = merged.weights @ monomial_values(merged.nodes, exps)
    scale = np.maximum(1.0, np.abs(ref))
    A = monomial_values(merged.nodes, exps).T / scale[:, None]
    sv = np.linalg.svd(A, compute_uv=False)
    r = int(np.sum(sv > rank_tol * sv[0]))
    if merged.size <= r:
        return merged
    mask, w = prune_weights(A, merged.weights, rank_tol)
    T2 = merged.parameter_values[mask] if merged.parameter_values is not None else None
    out = QuadratureRule(merged.nodes[mask], w[mask], strength, "pruned", T2, dict(merged.meta))
    out.meta["pruned_from"] = merged.size
    out.meta["rank"] = r
    return out


# ---------------------------------------------------------------------------
# starting rules


def discretize_parameter_measure(nu: MeasureSpec, panels: int = 8, order: int = 24):
    """Positive discrete measure on the line matching ``nu``'s smooth moments.

    Densities use composite Gauss-Legendre rules; atoms are returned as is.
    """
    if nu.kind == "atoms":
        return np.asarray(nu.locations, dtype=float), np.asarray(nu.weights, dtype=float)
    if nu.kind != "density":
        raise ValueError("only atoms and densities can be discretized")
    x, w = np.polynomial.legendre.leggauss(order)
    cuts = nu.breakpoints()
    edges = np.concatenate(
        [np.linspace(a, b, panels + 1)[:-1] for a, b in zip(cuts[:-1], cuts[1:])] + [[cuts[-1]]]
    )
    T, Wt = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        h, c = 0.5 * (b - a), 0.5 * (a + b)
        T.append(c + h * x)
        Wt.append(h * w)
    T, Wt = np.concatenate(T), np.concatenate(Wt)
    Wt = Wt * nu.density(T)
    keep = Wt > 0
    return T[keep], Wt[keep]


def parameter_start(curve, nu: MeasureSpec, m_target: MomentVector, strength: int, pole_margin: float):
    """Pruned discretization of ``nu`` pushed onto ``curve``."""
    t, w = discretize_parameter_measure(nu)
    for z in curve.Z:
        keep = np.abs(t - z) > pole_margin
        t, w = t[keep], w[keep]
    rule = QuadratureRule(curve(t), w, strength, "pruned", parameter_values=t)
    return caratheodory_prune(rule, m_target, strength)


def nnls_start(design, m_target_vec, scale):
    """Sparse nonnegative weights with ``design @ w ~ m`` (rows scaled)."""
    A = design / scale[:, None]
    b = m_target_vec / scale
    w, res = nnls(A, b, maxiter=50 * A.shape[1])
    return w, res


def grid_parameter_start(curve, m_target: MomentVector, strength: int, cfg):
    """Starting rule from raw moments: NNLS on a parameter grid, then polish."""
    lo, hi = cfg.search_interval
    grid = np.linspace(lo, hi, cfg.max_nodes_init)
    for z in curve.Z:
        grid = grid[np.abs(grid - z) > cfg.pole_margin]
    exps = monomial_exponents(curve.n, strength)
    m = np.array([m_target[a] for a in exps])
    scale = np.maximum(1.0, np.abs(m))
    Phi = pullback_values(curve, grid, exps).T
    w, _ = nnls_start(Phi, m, scale)
    sel = w > 0
    t0, w0 = grid[sel], w[sel]
    if not len(t0):
        raise InfeasibleStart("NNLS found no nonnegative combination of grid nodes")
    comps = curve.components(t0)
    lo_b = np.array([c[0] + cfg.pole_margin for c in comps] + [0.0] * len(w0))
    hi_b = np.array([c[1] - cfg.pole_margin for c in comps] + [np.inf] * len(w0))
    lo_b[: len(t0)] = np.maximum(lo_b[: len(t0)], lo)
    hi_b[: len(t0)] = np.minimum(hi_b[: len(t0)], hi)

    def resid(z):
        k = len(z) // 2
        return (pullback_values(curve, z[:k], exps).T @ z[k:] - m) / scale

    sol = least_squares(resid, np.concatenate([t0, w0]), bounds=(lo_b, hi_b), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    k = len(t0)
    t1, w1 = sol.x[:k], sol.x[k:]
    P, W, T = merge_nodes(curve(t1), w1, cfg.merge_tol, t1)
    keep = W > cfg.weight_drop_tol * max(1.0, abs(m_target.mass))
    rule = QuadratureRule(P[keep], W[keep], strength, "pruned", T[keep])
    err = np.max(np.abs(resid(np.concatenate([rule.parameter_values, rule.weights]))))
    if err > 1e-6:
        raise InfeasibleStart(f"could not match target moments from the grid (residual {err:.2e})")
    return caratheodory_prune(rule, m_target, strength)
