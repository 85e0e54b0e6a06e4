"""Reference scenarios, runnable end to end with ``curvequad bench``."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bounds import lower_bound, upper_bounds
from .curves import PlaneCurve, RationalCurve
from .gauss import gauss_rule_for_measure
from .moments import MeasureSpec, atom_moments, curve_moments
from .polycore import Polynomial
from .synthesis import NLPConfig, caratheodory_prune, kkt_analyze, nlp_plane, nlp_rational, pullback_gauss
from .gauss import QuadratureRule
from .verify import check_exactness


@dataclass
class BenchRow:
    name: str
    nodes: int
    target: object
    residual: float
    seconds: float
    ok: bool
    note: str = ""

    def to_json(self):
        return dict(vars(self))


def circle_uniform_moments(strength: int, r: float = 1.0):
    """Moments of the normalized arc-length measure on the circle.

    Equispaced points integrate trigonometric polynomials of degree below
    their count exactly, so ``strength + 1`` of them give exact moments.
    """
    n = 2 * strength + 2
    th = 2 * np.pi * np.arange(n) / n
    return atom_moments(r * np.column_stack([np.cos(th), np.sin(th)]), np.full(n, 1.0 / n), strength)


def inverse_curve():
    """``t -> (1/t, t)``: ``phi0 = t``, one real pole at ``t = 0``."""
    return RationalCurve(Polynomial([0.0, 1.0]), (Polynomial([1.0]), Polynomial([0.0, 0.0, 1.0])))


def separated_atoms(rng, count, lo=-1.0, hi=1.0, min_gap=0.1):
    while True:
        t = np.sort(rng.uniform(lo, hi, count))
        if count == 1 or np.min(np.diff(t)) >= min_gap:
            return t


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def scenarios(seed):
    rng = np.random.default_rng(seed)

    def gauss_uniform():
        nu = MeasureSpec.uniform(-1, 1)
        rule = gauss_rule_for_measure(nu, 19)
        res = check_exactness(rule, curve_moments(nu, None, 19), 19).max_residual
        return rule.size, 10, res, rule.size == 10 and res <= 1e-9, ""

    def pullback(s):
        def run():
            curve = RationalCurve.monomial(1, 2, 3)
            nu = MeasureSpec.uniform(0, 1)
            r = pullback_gauss(curve, nu, 2 * s - 1)
            lb = lower_bound(3, 2 * s - 1).value
            res = check_exactness(r.rule, curve_moments(nu, curve, 2 * s - 1), 2 * s - 1).max_residual
            return r.rule.size, lb, res, r.rule.size == lb and res <= 1e-8, "lower bound met with equality"
        return run

    def prune():
        t = rng.uniform(-1, 1, 100)
        w = rng.uniform(0.1, 1.0, 100)
        X = np.column_stack([t, t**2])
        rule = QuadratureRule(X, w, 3, "pruned", t)
        m = atom_moments(X, w, 3)
        out = caratheodory_prune(rule, m, 3)
        res = check_exactness(out, m, 3).max_residual
        return out.size, 7, res, out.size <= 7 and res <= 1e-9, "from 100 atoms"

    def circle():
        m = circle_uniform_moments(3)
        r = nlp_plane(PlaneCurve.circle(), m, 3, NLPConfig())
        k = kkt_analyze(r.rule, PlaneCurve.circle(), 3)
        ok = r.converged and r.rule.size <= 4 and r.residual <= 1e-6 and k.max_gradient <= 1e-4
        return r.rule.size, 4, r.residual, ok, f"tangency {k.max_gradient:.1e} rad"

    def rational():
        curve = inverse_curve()
        nu = MeasureSpec.uniform(1, 2)
        cfg = NLPConfig()
        m = curve_moments(nu, curve, 3)
        r = nlp_rational(curve, m, 3, cfg, nu=nu)
        dist = float(np.min(np.abs(r.rule.parameter_values)))
        ok = r.converged and r.rule.size <= 5 and dist >= cfg.pole_margin
        return r.rule.size, 5, r.residual, ok, f"min |t| = {dist:.3f}"

    def hyperbola():
        curve = inverse_curve()
        nu = MeasureSpec.uniform(1, 2)
        m = curve_moments(nu, curve, 3)  # (1/t, t) traces xy = 1
        r = nlp_plane(PlaneCurve.hyperbola(), m, 3, NLPConfig())
        bound = upper_bounds("plane", 3, d=2, t=2)[0].value
        return r.rule.size, bound, r.residual, r.residual <= 1e-6, "count reported, not asserted"

    def table():
        rows = {}
        for s, d in ((3, 3), (9, 9)):
            vals = {b.setting: b.value for b in upper_bounds("xd", s, d=d)}
            rows[(s, d)] = (vals["zalar-baseline"], vals["rational-odd"], vals["xd-curve"])
        ok = rows[(3, 3)] == (4, 5, 5) and rows[(9, 9)] == (40, 41, 28)
        return 0, "4/5/5 40/41/28", 0.0, ok, f"{rows[(3, 3)]} {rows[(9, 9)]}"

    out = [("gauss-uniform-19", gauss_uniform)]
    out += [(f"pullback-twisted-cubic-s{s}", pullback(s)) for s in (1, 2, 3, 4)]
    out += [("prune-parabola", prune), ("nlp-circle", circle), ("nlp-inverse", rational),
            ("nlp-hyperbola", hyperbola), ("bounds-table", table)]
    return out


def run_bench(seed: int = 20240601, only=None) -> list:
    rows = []
    for name, fn in scenarios(seed):
        if only and name not in only:
            continue
        (nodes, target, res, ok, note), secs = _timed(fn)
        rows.append(BenchRow(name, int(nodes), target, float(res), secs, bool(ok), note))
    return rows
