"""Stationarity diagnostics for synthesized rules.

For a rational curve the Lagrangian of ``min sum h(t_i)`` subject to the
moment equations is stationary when ``H(t_i) = 0`` and
``H'(t_i) = -h'(t_i) / w_i``, with ``H = sum lam_a phi^a``. For a plane
curve stationarity of ``min sum w_i`` says ``G(x_i) = 1`` and that the level
sets of ``G`` and ``F`` are tangent at every node.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from ..curves import PlaneCurve, RationalCurve
from ..errors import RankDeficientFit
from ..gauss import QuadratureRule
from ..polycore import Polynomial, monomial_exponents, real_roots
from .common import IntervalCount, KKTReport, pullback_values
from .nlp import penalty_h

FIT_RANK_TOL = 1e-10


def _lstsq(A, b, strict):
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > FIT_RANK_TOL * sv[0])) if sv.size and sv[0] > 0 else 0
    deficient = rank < A.shape[1]
    if deficient and strict:
        raise RankDeficientFit(f"multiplier system has rank {rank} < {A.shape[1]} unknowns")
    lam = np.linalg.lstsq(A, b, rcond=FIT_RANK_TOL)[0]
    return lam, rank, deficient


def _H_polynomial(curve: RationalCurve, exps, lam, strength):
    """``phi0^k * H`` as a polynomial in ``t``; ``k = 0`` for polynomial curves."""
    k = 0 if curve.is_polynomial else strength
    scale0 = float(curve.phi0.coeffs[0]) if curve.is_polynomial else 1.0
    out = Polynomial([0.0])
    for a, l in zip(exps, lam):
        term = Polynomial([l])
        for p, e in zip(curve.phi, a):
            term = term * (p / scale0) ** e
        if k:
            term = term * curve.phi0 ** (k - sum(a))
        out = out + term
    return out, k


def _h_minimizer(lo, hi, Z):
    def dh(t):
        return penalty_h(np.array([t]), Z)[1][0]

    a = lo + 1e-9 * max(1.0, abs(lo)) if np.isfinite(lo) else None
    b = hi - 1e-9 * max(1.0, abs(hi)) if np.isfinite(hi) else None
    # widen unbounded ends until h' changes sign
    if a is None:
        a = (b if b is not None else 0.0) - 1.0
        while dh(a) > 0:
            a = 2 * a - 1.0
    if b is None:
        b = a + 1.0
        while dh(b) < 0:
            b = 2 * b + 1.0
    # h' -> -inf at a pole on the left and +inf at a pole on the right
    fa, fb = dh(a), dh(b)
    if fa > 0 or fb < 0:
        return 0.5 * (a + b)
    return brentq(dh, a, b, xtol=1e-14)


def _cap(left, right):
    total = left + right
    if total % 2:
        return (total + 1) // 2, "odd: ceil(#T/2)"
    if left % 2:
        return total // 2 + 1, "even, odd halves: #T/2 + 1"
    return total // 2, "even, even halves: #T/2"


def _sign_pattern(curve, H, dH, t_nodes, margin=1e-8):
    Z = curve.Z
    cuts = (-np.inf,) + tuple(Z) + (np.inf,)
    roots = [r for r, _ in real_roots(H)] if H.degree >= 1 else []
    roots = [r for r in roots if all(abs(r - z) > margin for z in Z)]
    rows = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        y = _h_minimizer(lo, hi, Z)
        inside = [r for r in roots if lo < r < hi]
        left = [r for r in inside if r < y]
        right = [r for r in inside if r >= y]
        # a root can host a node only if H' has the sign opposite to h'
        cand = sum(1 for r in left if dH(r) >= 0) + sum(1 for r in right if dH(r) <= 0)
        cap, rule = _cap(len(left), len(right))
        nodes = int(np.sum((t_nodes > lo) & (t_nodes < hi)))
        rows.append(IntervalCount(float(lo), float(hi), float(y), len(inside), len(left), len(right),
                                  cand, cap, nodes, rule))
    return rows, roots


def _node_factor(H, t_nodes):
    """Monic product over the roots of ``H`` that coincide with nodes.

    Complex roots are searched so a double root, which rounding may split
    off the real axis, still matches its node.
    """
    c = np.trim_zeros(np.asarray(H.coeffs, dtype=float), "b")
    roots = np.roots(c[::-1]) if c.size > 1 else np.empty(0)
    matched = []
    for t in t_nodes:
        if roots.size == 0:
            break
        i = int(np.argmin(np.abs(roots - t)))
        if abs(roots[i] - t) <= 1e-6 * max(1.0, abs(t)):
            matched.append(float(t))
            roots = np.delete(roots, i)
    return Polynomial.from_roots(matched) if matched else None


def kkt_rational(rule: QuadratureRule, curve: RationalCurve, strength: int, strict: bool = False) -> KKTReport:
    if rule.parameter_values is None:
        raise ValueError("rational KKT analysis needs the nodes' parameter values")
    t, w = rule.parameter_values, rule.weights
    exps = monomial_exponents(curve.n, strength)
    Phi, dPhi = pullback_values(curve, t, exps, derivative=True)
    _, dh = penalty_h(t, curve.Z)
    A = np.vstack([Phi, dPhi])
    b = np.concatenate([np.zeros(len(t)), -dh / w])
    lam, rank, deficient = _lstsq(A, b, strict)
    norm = float(np.max(np.abs(lam))) or 1.0
    H_vals = np.abs(Phi @ lam) / norm
    grad = np.abs(dPhi @ lam + dh / w)
    Hp, k = _H_polynomial(curve, exps, lam, strength)
    dHp = Hp.deriv()
    if k:
        # sign of H' at a root of phi0^k H equals sign of (phi0^k H)' / phi0^k
        def dH(r):
            return dHp(r) / curve.phi0(r) ** k
    else:
        dH = dHp
    rows, roots = _sign_pattern(curve, Hp, dH, t)
    consistent = np.array([dH(ti) * di <= 0 for ti, di in zip(t, dh)])
    return KKTReport(
        setting="rational",
        lam=lam,
        H_values=H_vals,
        gradient_residuals=grad,
        H=Hp,
        H_denominator_power=k,
        node_factor=_node_factor(Hp, t),
        sign_pattern=rows,
        sign_consistent=consistent,
        rank_deficient=deficient,
        fit_rank=rank,
        unknowns=len(exps),
    )


def kkt_plane(rule: QuadratureRule, c: PlaneCurve, strength: int, strict: bool = False) -> KKTReport:
    P, w = rule.nodes, rule.weights
    exps = monomial_exponents(2, strength, min_degree=1)
    E = np.asarray(exps)
    ea, eb = E[:, 0], E[:, 1]
    x, y = P[:, 0:1], P[:, 1:2]
    V = x**ea * y**eb
    Vx = ea * x ** np.maximum(ea - 1, 0) * y**eb
    Vy = eb * x**ea * y ** np.maximum(eb - 1, 0)
    gF = c.F.gradient(P)
    nF = np.linalg.norm(gF, axis=1)
    tau = np.column_stack([-gF[:, 1], gF[:, 0]]) / np.where(nF > 0, nF, 1.0)[:, None]
    A = np.vstack([V, tau[:, :1] * Vx + tau[:, 1:] * Vy])
    b = np.concatenate([np.ones(len(w)), np.zeros(len(w))])
    lam, rank, deficient = _lstsq(A, b, strict)
    gG = np.column_stack([Vx @ lam, Vy @ lam])
    nG = np.linalg.norm(gG, axis=1)
    cross = np.abs(gG[:, 0] * gF[:, 1] - gG[:, 1] * gF[:, 0])
    denom = nG * nF
    ang = np.where(denom > 1e-300, np.arcsin(np.clip(cross / np.where(denom > 0, denom, 1.0), 0, 1)), 0.0)
    return KKTReport(
        setting="plane",
        lam=lam,
        H_values=np.abs(V @ lam - 1.0),
        gradient_residuals=ang,
        rank_deficient=deficient,
        fit_rank=rank,
        unknowns=len(exps),
    )


def kkt_analyze(rule: QuadratureRule, curve, strength: int = None, strict: bool = False) -> KKTReport:
    """Fit the multipliers of ``rule`` and report stationarity residuals.

    Parameters
    ----------
    rule : QuadratureRule
    curve : RationalCurve or PlaneCurve
    strength : int, optional
        Defaults to ``rule.strength``.
    strict : bool
        Raise :class:`RankDeficientFit` instead of flagging an
        underdetermined multiplier system.
    """
    strength = rule.strength if strength is None else strength
    if isinstance(curve, PlaneCurve):
        return kkt_plane(rule, curve, strength, strict)
    return kkt_rational(rule, curve, strength, strict)
