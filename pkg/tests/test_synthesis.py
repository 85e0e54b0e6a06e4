"""Rule synthesis: pullback, pruning, penalized solvers and stationarity checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvequad.bench import circle_uniform_moments, inverse_curve
from curvequad.bounds import lower_bound
from curvequad.curves import PlaneCurve, RationalCurve
from curvequad.errors import InfeasibleStart, NotPolynomialParametrization
from curvequad.gauss import QuadratureRule, gauss_rule_for_measure
from curvequad.moments import MeasureSpec, atom_moments, curve_moments
from curvequad.polycore import monomial_exponents
from curvequad.synthesis import (
    NLPConfig,
    caratheodory_prune,
    kkt_analyze,
    merge_nodes,
    moment_residual,
    nlp_plane,
    nlp_rational,
    penalty_h,
    prune_weights,
    pullback_gauss,
)
from curvequad.synthesis.al import ALProblem, augmented_lagrangian, feasibility_polish

TWISTED = RationalCurve.monomial(1, 2, 3)
LINE = RationalCurve.line()


class TestPullback:
    @pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
    def test_node_count_meets_lower_bound(self, s):
        out = pullback_gauss(TWISTED, MeasureSpec.uniform(0, 1), 2 * s - 1)
        assert out.rule.size == lower_bound(3, 2 * s - 1).value
        assert out.converged and out.target_met
        assert out.residual <= 1e-8

    def test_nodes_lie_on_curve(self):
        out = pullback_gauss(TWISTED, MeasureSpec.gaussian(), 5)
        x = out.rule.nodes
        np.testing.assert_allclose(x[:, 1], x[:, 0] ** 2, rtol=1e-12)
        np.testing.assert_allclose(x[:, 2], x[:, 0] ** 3, rtol=1e-12)

    def test_rational_curve_rejected(self):
        with pytest.raises(NotPolynomialParametrization):
            pullback_gauss(inverse_curve(), MeasureSpec.uniform(1, 2), 3)

    def test_degenerate_measure_returns_atoms(self):
        out = pullback_gauss(TWISTED, MeasureSpec.atoms([0.2, 0.7], [1.0, 1.0]), 5)
        assert out.rule.size == 2
        assert any("degenerate" in m for m in out.messages)


class TestPrune:
    def test_merges_coincident_atoms(self):
        X = np.array([[0.5, 0.25], [0.5, 0.25], [-0.5, 0.25]])
        out = caratheodory_prune(QuadratureRule(X, [1.0, 2.0, 1.0], 2, "pruned"), None, 2)
        assert out.size == 2
        np.testing.assert_allclose(np.sort(out.weights), [1.0, 3.0])

    def test_merge_nodes_keeps_params(self):
        P, W, T = merge_nodes(np.array([[0.0], [1e-9], [1.0]]), np.array([1.0, 1.0, 1.0]), 1e-6,
                              np.array([0.0, 1e-9, 1.0]))
        assert len(W) == 2 and W.sum() == 3.0 and len(T) == 2

    def test_prune_weights_preserves_image(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((4, 20))
        w = rng.uniform(0.1, 1.0, 20)
        mask, w2 = prune_weights(A, w)
        assert mask.sum() <= 4
        assert np.all(w2[mask] > 0)
        np.testing.assert_allclose(A @ w2, A @ w, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(10, 80), st.integers(1, 4))
    def test_exactness_preserved(self, seed, count, strength):
        rng = np.random.default_rng(seed)
        t = rng.uniform(-1, 1, count)
        X = np.column_stack([t, np.cos(3 * t)])
        w = rng.uniform(0.1, 1.0, count)
        m = atom_moments(X, w, strength)
        out = caratheodory_prune(QuadratureRule(X, w, strength, "pruned", t), m, strength)
        exps = monomial_exponents(2, strength)
        assert out.size <= len(exps)
        assert np.all(out.weights > 0)
        assert moment_residual(out, m, strength) <= 1e-9


class TestAugmentedLagrangian:
    def _problem(self):
        # min x^2 + y^2 on x + y = 1, x >= 0.6
        return ALProblem(
            objective=lambda z: (z @ z, 2 * z),
            equality=lambda z: (np.array([z[0] + z[1] - 1.0]), np.array([[1.0, 1.0]])),
            lo=np.array([0.6, -5.0]),
            hi=np.array([5.0, 5.0]),
        )

    def test_active_box(self):
        res = augmented_lagrangian(self._problem(), np.array([2.0, 2.0]))
        assert res.converged
        np.testing.assert_allclose(res.z, [0.6, 0.4], atol=1e-7)

    def test_feasibility_polish(self):
        z = feasibility_polish(self._problem(), np.array([3.0, 1.0]))
        assert abs(z[0] + z[1] - 1.0) <= 1e-12
        assert z[0] >= 0.6


class TestPenalty:
    def test_values(self):
        h, dh = penalty_h(np.array([2.0]), [1.0])
        assert h[0] == 5.0 and dh[0] == 2.0

    def test_grows_at_pole(self):
        h, _ = penalty_h(np.array([1e-3, 1.0]), [0.0])
        assert h[0] > 1e5 > h[1]


class TestNLPRational:
    def test_line_recovers_gauss(self):
        nu = MeasureSpec.uniform(-1, 1)
        out = nlp_rational(LINE, curve_moments(nu, None, 5), 5, nu=nu)
        x, w = np.polynomial.legendre.leggauss(3)
        assert out.converged
        np.testing.assert_allclose(out.rule.parameter_values, x, atol=1e-8)
        np.testing.assert_allclose(out.rule.weights, w, atol=1e-8)

    def test_single_atom(self):
        m = curve_moments(MeasureSpec.atoms([0.3], [2.0]), TWISTED, 3)
        out = nlp_rational(TWISTED, m, 3)
        assert out.rule.size == 1
        np.testing.assert_allclose(out.rule.parameter_values, [0.3], atol=1e-8)

    def test_infeasible_moments(self):
        m = curve_moments(MeasureSpec.uniform(0, 1), TWISTED, 3)
        bad = type(m).from_array(3, 3, m.as_array() * np.linspace(1.0, -2.0, len(m.as_array())))
        with pytest.raises(InfeasibleStart):
            nlp_rational(TWISTED, bad, 3)

    @pytest.mark.slow
    def test_pole_margin_and_determinism(self):
        curve = inverse_curve()
        nu = MeasureSpec.uniform(1, 2)
        m = curve_moments(nu, curve, 3)
        cfg = NLPConfig()
        a = nlp_rational(curve, m, 3, cfg, nu=nu)
        b = nlp_rational(curve, m, 3, cfg, nu=nu)
        np.testing.assert_array_equal(a.rule.nodes, b.rule.nodes)
        assert np.min(np.abs(a.rule.parameter_values)) >= cfg.pole_margin
        assert a.converged and a.rule.size <= a.target_nodes


class TestNLPPlane:
    @pytest.mark.slow
    def test_circle(self):
        c = PlaneCurve.circle()
        out = nlp_plane(c, circle_uniform_moments(3), 3)
        assert out.converged and out.rule.size <= 4
        np.testing.assert_allclose(np.hypot(*out.rule.nodes.T), 1.0, atol=1e-9)
        assert kkt_analyze(out.rule, c, 3).max_gradient <= 1e-4


class TestKKT:
    def test_gauss_rule_is_stationary(self):
        nu = MeasureSpec.uniform(-1, 1)
        rep = kkt_analyze(gauss_rule_for_measure(nu, 7), LINE, 7)
        assert rep.max_H <= 1e-8 and rep.max_gradient <= 1e-8
        assert np.all(rep.sign_consistent)

    def test_exact_but_not_optimal_rule_flagged(self):
        t = np.array([-1.0, 0.0, 1.0])
        simpson = QuadratureRule(t, [1 / 3, 4 / 3, 1 / 3], 3, "pruned", t)
        rep = kkt_analyze(simpson, LINE, 3)
        assert rep.max_H > 1e-2 or rep.max_gradient > 1e-2

    def test_plane_report_on_circle_rule(self):
        th = np.pi / 2 * np.arange(4) + 0.3
        P = np.column_stack([np.cos(th), np.sin(th)])
        rule = QuadratureRule(P, np.full(4, 0.25), 3, "nlp-plane")
        m = circle_uniform_moments(3)
        assert moment_residual(rule, m, 3) <= 1e-12
        rep = kkt_analyze(rule, PlaneCurve.circle(), 3)
        assert rep.setting == "plane"
        assert rep.max_gradient <= 1e-8
