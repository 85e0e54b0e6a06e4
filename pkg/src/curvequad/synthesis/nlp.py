"""Penalized node placement on rational and plane curves.

Both solvers share one pattern. A feasible start comes from a pruned
discretization. The penalized program is solved by an augmented Lagrangian
and polished to full precision. Nodes are then eliminated one at a time, by
driving the smallest weights to zero inside the feasible set, until the
target count is met or no node can be removed.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.optimize import minimize

from ..bounds import (
    BoundReport,
    SOURCES,
    caratheodory_bound,
    plane_bound,
    rational_even_bound,
    rational_odd_bound,
)
from ..curves import PlaneCurve, RationalCurve, nearest_curve_point, plane_curve_points, project_to_curve
from ..errors import InfeasibleStart, MassCorrectionNegative, NumericalStall
from ..gauss import QuadratureRule
from ..moments import MeasureSpec, MomentVector
from ..polycore import monomial_exponents, monomial_values
from .al import ALProblem, augmented_lagrangian, feasibility_polish
from .common import NLPConfig, SynthesisResult, merge_nodes, pullback_values
from .prune import caratheodory_prune, grid_parameter_start, nnls_start, parameter_start
from .pullback import moment_residual


def penalty_h(t, Z):
    """``h(t) = t^2 + sum 1/(t - z)^2`` and its derivative."""
    t = np.asarray(t, dtype=float)
    h = t**2
    dh = 2 * t
    for z in Z:
        h = h + 1.0 / (t - z) ** 2
        dh = dh - 2.0 / (t - z) ** 3
    return h, dh


# ---------------------------------------------------------------------------
# fixed-size models


class _RationalModel:
    """Variables ``z = (t_1..t_N, w_1..w_N)``."""

    def __init__(self, curve: RationalCurve, m_target: MomentVector, strength: int, cfg: NLPConfig,
                 t_hint=()):
        self.curve = curve
        self.exps = monomial_exponents(curve.n, strength)
        self.m = np.array([m_target[a] for a in self.exps])
        self.scale = np.maximum(1.0, np.abs(self.m))
        self.mass = max(abs(m_target.mass), 1e-300)
        self.cfg = cfg
        self.Z = curve.Z
        self.Q = self._whitening(t_hint)

    def _whitening(self, t_hint):
        # the monomials pull back to badly scaled and sometimes dependent
        # functions (xy = 1 on (1/t, t)); constrain coordinates in a basis
        # that is orthonormal over samples near the nodes instead
        t_hint = np.asarray(t_hint, dtype=float)
        if t_hint.size:
            lo, hi = float(t_hint.min()), float(t_hint.max())
            pad = max(0.5 * (hi - lo), 0.1 * max(1.0, abs(lo), abs(hi)))
            lo, hi = lo - pad, hi + pad
        else:
            lo, hi = self.cfg.search_interval
        margin = self.cfg.pole_margin
        cuts = [lo] + [z for z in self.Z if lo < z < hi] + [hi]
        k = 4 * len(self.exps)
        u = 0.5 * (1 - np.cos(np.pi * (np.arange(k) + 0.5) / k))
        ts = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            a1 = a + margin if a in self.Z else a
            b1 = b - margin if b in self.Z else b
            if b1 > a1:
                ts.append(a1 + (b1 - a1) * u)
        ts = np.concatenate(ts)
        Phi = pullback_values(self.curve, ts, self.exps).T / self.scale[:, None]
        U, sv, _ = np.linalg.svd(Phi, full_matrices=False)
        r = int(np.sum(sv > 1e-10 * sv[0]))
        return np.sqrt(len(ts)) * U[:, :r].T / sv[:r, None]

    def split(self, z):
        N = len(z) // 2
        return z[:N], z[N:]

    def residual(self, z):
        t, w = self.split(z)
        return (pullback_values(self.curve, t, self.exps).T @ w - self.m) / self.scale

    def equality(self, z):
        t, w = self.split(z)
        Phi, dPhi = pullback_values(self.curve, t, self.exps, derivative=True)
        c = (Phi.T @ w - self.m) / self.scale
        J = np.hstack([(dPhi * w[:, None]).T, Phi.T]) / self.scale[:, None]
        return self.Q @ c, self.Q @ J

    def objective(self, z):
        t, w = self.split(z)
        h, dh = penalty_h(t, self.Z)
        return float(h.sum()), np.concatenate([dh, np.zeros_like(w)])

    def bounds(self, z):
        t, w = self.split(z)
        lo_s, hi_s = self.cfg.search_interval
        cap = max(abs(lo_s), abs(hi_s), 2.0 * float(np.max(np.abs(t), initial=0.0)))
        lo, hi = [], []
        for a, b in self.curve.components(t):
            lo.append(max(a + self.cfg.pole_margin, -cap))
            hi.append(min(b - self.cfg.pole_margin, cap))
        N = len(t)
        return np.array(lo + [0.0] * N), np.array(hi + [np.inf] * N)

    def problem(self, z, objective=None):
        lo, hi = self.bounds(z)
        return ALProblem(objective or self.objective, self.equality, lo, hi)

    def weight_index(self, z, j):
        return len(z) // 2 + j

    def remove(self, z, j):
        t, w = self.split(z)
        keep = np.arange(len(t)) != j
        return np.concatenate([t[keep], w[keep]])

    def canonical(self, z):
        t, w = self.split(z)
        P, W, T = merge_nodes(self.curve(t), w, self.cfg.merge_tol, t)
        keep = W > self.cfg.weight_drop_tol * self.mass
        return np.concatenate([T[keep], W[keep]])

    def rule(self, z, strength, provenance="nlp-rational"):
        t, w = self.split(z)
        return QuadratureRule(self.curve(t), w, strength, provenance, t)

    def project(self, z):
        return z


class _PlaneModel:
    """Variables ``z = (x_1..x_N, y_1..y_N, w_1..w_N)``; the mass row is free."""

    def __init__(self, c: PlaneCurve, m_target: MomentVector, strength: int, cfg: NLPConfig,
                 radius: float, with_mass: bool = False):
        self.c = c
        self.exps = monomial_exponents(2, strength, min_degree=0 if with_mass else 1)
        self.m = np.array([m_target[a] for a in self.exps])
        self.scale = np.maximum(1.0, np.abs(self.m))
        self.mass = max(abs(m_target.mass), 1e-300)
        self.cfg = cfg
        self.R = float(radius)
        self.fscale = max(abs(v) for v in c.F.terms.values())
        self.Fx, self.Fy = c.F.partial(0), c.F.partial(1)
        E = np.asarray(self.exps)
        self.ea, self.eb = E[:, 0], E[:, 1]

    def split(self, z):
        N = len(z) // 3
        return z[:N], z[N:2 * N], z[2 * N:]

    def _powers(self, x, y):
        top = int(max(self.ea.max(), self.eb.max()))
        px = x[:, None] ** np.arange(top + 1)
        py = y[:, None] ** np.arange(top + 1)
        return px, py

    def equality(self, z):
        x, y, w = self.split(z)
        N = len(x)
        px, py = self._powers(x, y)
        V = px[:, self.ea] * py[:, self.eb]
        Vx = self.ea * px[:, np.maximum(self.ea - 1, 0)] * py[:, self.eb]
        Vy = self.eb * px[:, self.ea] * py[:, np.maximum(self.eb - 1, 0)]
        cm = (V.T @ w - self.m) / self.scale
        Jm = np.hstack([(Vx * w[:, None]).T, (Vy * w[:, None]).T, V.T]) / self.scale[:, None]
        P = np.column_stack([x, y])
        cf = self.c.F(P) / self.fscale
        Jf = np.hstack([np.diag(self.Fx(P)), np.diag(self.Fy(P)), np.zeros((N, N))]) / self.fscale
        return np.concatenate([cm, cf]), np.vstack([Jm, Jf])

    def inequality(self, z):
        x, y, w = self.split(z)
        N = len(x)
        g = (x**2 + y**2) / self.R**2 - 1.0
        J = np.hstack([np.diag(2 * x), np.diag(2 * y), np.zeros((N, N))]) / self.R**2
        return g, J

    def objective(self, z):
        x, y, w = self.split(z)
        g = np.concatenate([np.zeros(2 * len(x)), np.ones(len(x))]) / self.mass
        return float(w.sum()) / self.mass, g

    def bounds(self, z):
        N = len(z) // 3
        lo = np.concatenate([np.full(2 * N, -self.R), np.zeros(N)])
        hi = np.concatenate([np.full(2 * N, self.R), np.full(N, np.inf)])
        return lo, hi

    def problem(self, z, objective=None):
        lo, hi = self.bounds(z)
        return ALProblem(objective or self.objective, self.equality, lo, hi, self.inequality)

    def weight_index(self, z, j):
        return 2 * (len(z) // 3) + j

    def remove(self, z, j):
        x, y, w = self.split(z)
        keep = np.arange(len(x)) != j
        return np.concatenate([x[keep], y[keep], w[keep]])

    def canonical(self, z):
        x, y, w = self.split(z)
        P, W, _ = merge_nodes(np.column_stack([x, y]), w, self.cfg.merge_tol)
        keep = W > self.cfg.weight_drop_tol * self.mass
        P, W = P[keep], W[keep]
        return np.concatenate([P[:, 0], P[:, 1], W])

    def rule(self, z, strength, provenance="nlp-plane"):
        x, y, w = self.split(z)
        return QuadratureRule(np.column_stack([x, y]), w, strength, provenance)

    def project(self, z):
        x, y, w = self.split(z)
        P = project_to_curve(self.c, np.column_stack([x, y]), iters=3)
        return np.concatenate([P[:, 0], P[:, 1], w])


# ---------------------------------------------------------------------------
# shared driver


def _max_violation(model, z):
    c = model.residual(z) if hasattr(model, "residual") else model.equality(z)[0]
    return float(np.max(np.abs(c))) if c.size else 0.0


def _solve(model, z, cfg, objective=None):
    prob = model.problem(z, objective)
    res = augmented_lagrangian(
        prob, z, rho=cfg.initial_penalty, growth=cfg.penalty_growth,
        max_outer=cfg.max_outer_iters, max_inner=cfg.max_inner_iters,
        tol=cfg.constraint_tol, project=model.project,
    )
    z = feasibility_polish(prob, res.z)
    return z


def _polish_canonical(model, z, cfg):
    """Merge and drop, then restore feasibility; repeat until the size is stable."""
    for _ in range(10):
        n_before = len(z)
        z = model.canonical(z)
        z = feasibility_polish(model.problem(z), z)
        if len(z) == n_before:
            break
    return z


def _weights(model, z):
    return model.split(z)[-1]


def _eliminate(model, z, target, cfg, messages):
    """Remove nodes while the remaining ones can stay exact.

    Each candidate (smallest weight first) is deleted and the others are
    re-fitted by bounded Gauss-Newton. If that fails, the candidate's weight
    is driven to zero inside the feasible set by the augmented Lagrangian.
    """
    tol = cfg.exactness_tol
    while True:
        w = _weights(model, z)
        N = len(w)
        if N <= 1 or (N <= target and not cfg.reduce_below_target):
            return z
        removed = None
        order = np.argsort(w)[: cfg.max_removal_tries]
        for j in order:
            cand = model.remove(z, j)
            cand = feasibility_polish(model.problem(cand), cand)
            if _max_violation(model, cand) <= 0.1 * tol:
                removed = cand
                break
        if removed is None:
            for j in order:
                k = model.weight_index(z, j)

                def obj(v, k=k):
                    g = np.zeros_like(v)
                    g[k] = 1.0 / model.mass
                    return float(v[k]) / model.mass, g

                cand = _solve(model, z, cfg, obj)
                if cand[k] > 1e3 * cfg.weight_drop_tol * model.mass:
                    continue
                cand = model.remove(cand, j)
                cand = feasibility_polish(model.problem(cand), cand)
                if _max_violation(model, cand) <= 0.1 * tol:
                    removed = cand
                    break
        if removed is None or not np.all(_weights(model, removed) > 0):
            messages.append(f"no removable node at N={N}")
            return z
        z = _polish_canonical(model, removed, cfg)
        messages.append(f"eliminated a node: {N} -> {len(_weights(model, z))}")


def _sqp_refine(model, z, cfg):
    """Local SLSQP solve from a feasible point; the AL loop stalls on thin
    feasible manifolds where this converges in a few hundred steps."""
    prob = model.problem(z)
    if len(prob.equality(z)[0]) >= len(z):
        # no freedom left once the constraints hold; SLSQP also rejects this shape
        return z

    def eq(v):
        return prob.equality(v)[0]

    def eq_jac(v):
        return prob.equality(v)[1]

    cons = [{"type": "eq", "fun": eq, "jac": eq_jac}]
    if prob.inequality is not None:
        cons.append({"type": "ineq", "fun": lambda v: -prob.inequality(v)[0],
                     "jac": lambda v: -prob.inequality(v)[1]})
    bounds = [(a if np.isfinite(a) else None, b if np.isfinite(b) else None) for a, b in zip(prob.lo, prob.hi)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = minimize(lambda v: prob.objective(v)[0], z, jac=lambda v: prob.objective(v)[1],
                       method="SLSQP", bounds=bounds, constraints=cons,
                       options={"maxiter": 5 * cfg.max_inner_iters, "ftol": 1e-16})
    return feasibility_polish(prob, sol.x)


def _accept(model, cand, f0, cfg):
    return (_max_violation(model, cand) <= 0.1 * cfg.exactness_tol
            and np.all(_weights(model, cand) > 0)
            and model.objective(cand)[0] <= f0 + 1e-12 * abs(f0))


def _optimize(model, z, cfg, messages):
    """Penalized solve then SQP refinement; each kept only if it ends feasible
    and does not raise the objective."""
    f0 = model.objective(z)[0]
    improved = False
    try:
        cand = _polish_canonical(model, _solve(model, z, cfg), cfg)
        if _accept(model, cand, f0, cfg):
            z, f0, improved = cand, model.objective(cand)[0], True
    except (ValueError, np.linalg.LinAlgError) as exc:
        messages.append(f"penalized solve failed: {exc}")
    for _ in range(4):
        try:
            cand = _polish_canonical(model, _sqp_refine(model, z, cfg), cfg)
        except (ValueError, np.linalg.LinAlgError) as exc:
            messages.append(f"SQP refinement failed: {exc}")
            break
        if not _accept(model, cand, f0, cfg):
            break
        f1 = model.objective(cand)[0]
        shrunk = len(cand) < len(z)
        z, improved = cand, True
        if shrunk:
            messages.append(f"nodes coalesced during refinement: now {len(_weights(model, z))}")
        elif f0 - f1 <= 1e-13 * abs(f0):
            break
        f0 = f1
    if not improved:
        messages.append("penalized solve did not reach a better feasible point; kept the previous rule")
    return z


def _finish(model, z, cfg, strength, target, messages):
    z = _polish_canonical(model, z, cfg)
    z = _eliminate(model, z, target, cfg, messages)
    z = _optimize(model, z, cfg, messages)
    if len(_weights(model, z)) > target:
        z = _eliminate(model, z, target, cfg, messages)
        z = _optimize(model, z, cfg, messages)
    return z


def _target_row(setting, value, strength, params, size):
    row = BoundReport(setting, "upper", value, strength, params, SOURCES[setting])
    return row, size, size <= value


# ---------------------------------------------------------------------------
# rational curves


def rational_target(curve: RationalCurve, strength: int) -> tuple:
    D, p = curve.degree, curve.p_real_zeros
    if strength % 2:
        return "rational-odd", rational_odd_bound(D, strength, p), {"D": D, "p": p}
    return "rational-even", rational_even_bound(D, strength, p), {"D": D, "p": p}


def nlp_rational(curve: RationalCurve, m_target: MomentVector, strength: int, cfg: NLPConfig = None,
                 *, nu: MeasureSpec = None, init: QuadratureRule = None) -> SynthesisResult:
    """Minimize ``sum h(t_i)`` over exact rules on a rational curve.

    Parameters
    ----------
    curve : RationalCurve
    m_target : MomentVector
        Moments of degree ``<= strength`` on the curve.
    strength : int
    cfg : NLPConfig, optional
    nu : MeasureSpec, optional
        Parameter measure behind ``m_target``; gives a better start than
        the NNLS grid search.
    init : QuadratureRule, optional
        Feasible start carrying ``parameter_values``.
    """
    cfg = cfg or NLPConfig()
    messages = []
    if init is not None:
        start = caratheodory_prune(init, m_target, strength)
    elif nu is not None:
        start = parameter_start(curve, nu, m_target, strength, cfg.pole_margin)
    else:
        start = grid_parameter_start(curve, m_target, strength, cfg)
    start_res = moment_residual(start, m_target, strength)
    if start_res > 1e-6:
        raise InfeasibleStart(f"starting rule misses the target moments by {start_res:.2e}")
    fallback = QuadratureRule(start.nodes, start.weights, strength, "pruned", start.parameter_values)

    setting, target, params = rational_target(curve, strength)
    model = _RationalModel(curve, m_target, strength, cfg, start.parameter_values)
    z0 = np.concatenate([start.parameter_values, start.weights])
    try:
        z = _finish(model, z0, cfg, strength, target, messages)
        rule = model.rule(z, strength)
        res = moment_residual(rule, m_target, strength)
        converged = res <= cfg.exactness_tol
    except (NumericalStall, ValueError, np.linalg.LinAlgError) as exc:
        messages.append(f"solver failed: {exc}")
        rule, res, converged = None, np.inf, False

    result = _assemble(rule, res, converged, fallback, m_target, strength, messages)
    result.target_nodes = target
    result.target_met = result.rule.size <= target
    result.bound_check.append(_target_row(setting, target, strength, params, result.rule.size))
    result.bound_check.append(_target_row("caratheodory", caratheodory_bound(curve.n, strength), strength,
                                          {"n": curve.n}, result.rule.size))
    if converged and result.rule.size > target:
        messages.append(f"target {target} not met ({result.rule.size} nodes)")
    return result


def _assemble(rule, res, converged, fallback, m_target, strength, messages):
    if converged:
        return SynthesisResult(rule, res, True, fallback=fallback, messages=messages)
    fres = moment_residual(fallback, m_target, strength)
    messages.append("returning the pruned starting rule")
    out = SynthesisResult(fallback, fres, False, fallback=fallback, messages=messages)
    out.partial = rule
    return out


# ---------------------------------------------------------------------------
# plane curves


def support_radius_estimate(m_target: MomentVector, strength: int) -> float:
    """``max_k E[(x^2+y^2)^k]^(1/2k)`` from the available even moments."""
    from math import comb

    mass = m_target.mass
    if not mass > 0:
        return 1.0
    best = 0.0
    for k in range(1, strength // 2 + 1):
        val = sum(comb(k, j) * m_target[(2 * j, 2 * k - 2 * j)] for j in range(k + 1)) / mass
        if val > 0:
            best = max(best, val ** (1.0 / (2 * k)))
    return best or 1.0


def plane_start(c: PlaneCurve, m_target: MomentVector, strength: int, cfg: NLPConfig) -> QuadratureRule:
    """NNLS over sampled curve points, polished and pruned."""
    radius = 1.5 * support_radius_estimate(m_target, strength) + 0.5
    for _ in range(4):
        pts = plane_curve_points(c, radius, n_lines=max(16, cfg.max_nodes_init // 4))
        if len(pts) >= 2:
            break
        radius *= 2
    if len(pts) == 0:
        raise InfeasibleStart("no real curve points near the support")
    exps = monomial_exponents(2, strength)
    m = np.array([m_target[a] for a in exps])
    scale = np.maximum(1.0, np.abs(m))
    w, _ = nnls_start(monomial_values(pts, exps).T, m, scale)
    sel = w > 0
    if not np.any(sel):
        raise InfeasibleStart("NNLS found no nonnegative combination of curve points")
    model = _PlaneModel(c, m_target, strength, cfg, radius=max(2 * radius, 1.0), with_mass=True)
    z = np.concatenate([pts[sel, 0], pts[sel, 1], w[sel]])
    z = feasibility_polish(model.problem(z), z)
    z = model.canonical(z)
    rule = model.rule(z, strength, "pruned")
    return caratheodory_prune(rule, m_target, strength)


def nlp_plane(c: PlaneCurve, m_target: MomentVector, strength: int, cfg: NLPConfig = None,
              *, init: QuadratureRule = None) -> SynthesisResult:
    """Minimize ``sum w_i`` over rules on ``F = 0`` matching moments of degree 1..strength.

    The mass row is left free while optimizing. The missing mass is put on
    one extra node at the origin, or at the curve point nearest to it, and
    the rule is re-polished against all moments when that node is not the
    origin.
    """
    cfg = cfg or NLPConfig()
    messages = []
    start = caratheodory_prune(init, m_target, strength) if init is not None else plane_start(c, m_target, strength, cfg)
    start_res = moment_residual(start, m_target, strength)
    if start_res > 1e-6:
        raise InfeasibleStart(f"starting rule misses the target moments by {start_res:.2e}")
    fallback = QuadratureRule(start.nodes, start.weights, strength, "pruned")
    R = cfg.disk_radius or 2.0 * float(np.max(np.hypot(start.nodes[:, 0], start.nodes[:, 1])))
    R = max(R, 1e-8)
    if np.max(np.hypot(start.nodes[:, 0], start.nodes[:, 1])) > R:
        raise InfeasibleStart(f"disk radius {R} excludes the starting rule")

    t = c.t_places
    d = c.d
    if strength % 2:
        target = plane_bound(d, strength, t)
        params = {"d": d, "t": t}
    else:
        target = plane_bound(d, strength + 1, t)
        params = {"d": d, "t": t, "note": "even strength served by the next odd bound"}

    model = _PlaneModel(c, m_target, strength, cfg, R)
    z0 = np.concatenate([start.nodes[:, 0], start.nodes[:, 1], start.weights])
    try:
        # keep one slot for the mass-correction node
        z = _finish(model, z0, cfg, strength, max(target - 1, 1), messages)
        z = _mass_correction(c, model, z, m_target, strength, cfg, R, messages)
        rule = model.rule(z, strength)
        res = moment_residual(rule, m_target, strength)
        converged = res <= cfg.exactness_tol
    except (NumericalStall, ValueError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, MassCorrectionNegative):
            raise
        messages.append(f"solver failed: {exc}")
        rule, res, converged = None, np.inf, False

    result = _assemble(rule, res, converged, fallback, m_target, strength, messages)
    result.target_nodes = target
    result.target_met = result.rule.size <= target
    result.bound_check.append(_target_row("plane", target, strength, params, result.rule.size))
    result.bound_check.append(_target_row("caratheodory", caratheodory_bound(2, strength), strength,
                                          {"n": 2}, result.rule.size))
    return result


def _mass_correction(c, model, z, m_target, strength, cfg, R, messages):
    x, y, w = model.split(z)
    rem = m_target.mass - w.sum()
    tol = 1e-9 * max(1.0, abs(m_target.mass))
    if rem < -tol:
        raise MassCorrectionNegative(f"rule carries {w.sum():.17g} > mass {m_target.mass:.17g}")
    if rem <= tol:
        messages.append("no mass correction needed")
        return z
    p = nearest_curve_point(c, (0.0, 0.0), radius=R)
    z = np.concatenate([np.append(x, p[0]), np.append(y, p[1]), np.append(w, rem)])
    if np.hypot(*p) == 0.0:
        messages.append(f"mass {rem:.3e} placed at the origin")
        return z
    messages.append(f"mass {rem:.3e} placed at curve point ({p[0]:.6g}, {p[1]:.6g}); re-polishing")
    full = _PlaneModel(c, m_target, strength, cfg, max(R, 1.01 * float(np.hypot(*p))), with_mass=True)
    return _polish_canonical(full, z, cfg)


__all__ = [
    "nlp_plane",
    "nlp_rational",
    "penalty_h",
    "plane_start",
    "rational_target",
    "support_radius_estimate",
]
