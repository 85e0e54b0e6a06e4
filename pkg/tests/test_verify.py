"""Independent verification of rules against moments and bounds."""

import numpy as np
import pytest

from curvequad.bench import circle_uniform_moments
from curvequad.curves import PlaneCurve, RationalCurve
from curvequad.gauss import QuadratureRule, gauss_rule_for_measure
from curvequad.moments import MeasureSpec, curve_moments
from curvequad.synthesis import pullback_gauss
from curvequad.verify import (
    canonical_nodes,
    certify_nondegenerate,
    check_bounds,
    check_exactness,
    degeneracy_transfer,
    verify_rule,
)

TWISTED = RationalCurve.monomial(1, 2, 3)
UNIFORM = MeasureSpec.uniform(0, 1)


@pytest.fixture(scope="module")
def pulled():
    return pullback_gauss(TWISTED, UNIFORM, 5).rule


class TestExactness:
    def test_exact_rule(self, pulled):
        rep = check_exactness(pulled, curve_moments(UNIFORM, TWISTED, 5), 5)
        assert rep.max_residual <= 1e-12
        assert set(rep.per_degree) == set(range(6))

    def test_perturbed_weight_detected(self, pulled):
        w = pulled.weights.copy()
        w[0] *= 1 + 1e-3
        bad = QuadratureRule(pulled.nodes, w, 5, "pullback", pulled.parameter_values)
        rep = check_exactness(bad, curve_moments(UNIFORM, TWISTED, 5), 5)
        # the zeroth moment moves by exactly w0 * 1e-3
        assert rep.max_residual == pytest.approx(pulled.weights[0] * 1e-3, rel=1e-6)
        assert rep.per_degree[0] == pytest.approx(pulled.weights[0] * 1e-3, rel=1e-6)

    def test_empty_rule(self):
        empty = QuadratureRule(np.zeros((0, 3)), np.zeros(0), 1, "pruned")
        rep = check_exactness(empty, curve_moments(UNIFORM, TWISTED, 1), 1)
        assert rep.max_residual == pytest.approx(1.0)

    def test_dimension_mismatch(self, pulled):
        with pytest.raises(ValueError):
            check_exactness(pulled, circle_uniform_moments(3), 3)


class TestCanonicalNodes:
    def test_clusters_and_tiny_weights(self):
        X = np.array([[0.0, 0.0], [1e-8, 0.0], [1.0, 1.0], [2.0, 2.0]])
        rule = QuadratureRule(X, [1.0, 1.0, 1.0, 1e-14], 1, "pruned")
        P, W = canonical_nodes(rule)
        assert len(W) == 2
        np.testing.assert_allclose(np.sort(W), [1.0, 2.0])


class TestBounds:
    def test_pullback_rule_meets_lower_bound(self, pulled):
        rep = verify_rule(pulled, TWISTED, 5, curve_moments(UNIFORM, TWISTED, 5), UNIFORM)
        assert rep.verdict == "pass"
        lower = rep.lower_rows[0]
        assert lower.satisfied and lower.achieved == lower.bound.value == 8

    def test_too_few_nodes_fails(self, pulled):
        # drop a node: a nondegenerate measure cannot be served by fewer than the bound
        keep = slice(1, None)
        short = QuadratureRule(pulled.nodes[keep], pulled.weights[keep], 5, "pullback",
                               pulled.parameter_values[keep])
        rep = check_bounds(short, TWISTED, 5, UNIFORM)
        assert rep.verdict == "fail"

    def test_plane_lower_bound_is_advisory(self):
        th = np.pi / 2 * np.arange(4)
        rule = QuadratureRule(np.column_stack([np.cos(th), np.sin(th)]), np.full(4, 0.25), 3, "nlp-plane")
        rep = verify_rule(rule, PlaneCurve.circle(), 3, circle_uniform_moments(3))
        assert rep.verdict == "pass"
        assert all(r.bound.advisory for r in rep.lower_rows)

    def test_report_serializes(self, pulled):
        rep = verify_rule(pulled, TWISTED, 5, curve_moments(UNIFORM, TWISTED, 5), UNIFORM)
        data = rep.to_json()
        assert data["verdict"] == "pass" and data["nodes_canonical"] == 8
        assert "verdict: pass" in rep.summary()


class TestCertification:
    def test_density_certified(self):
        assert certify_nondegenerate(UNIFORM, 6) is True

    def test_few_atoms_not_certified(self):
        assert certify_nondegenerate(MeasureSpec.atoms([0.0, 1.0], [1.0, 1.0]), 6) is False

    @pytest.mark.parametrize("count", [2, 4, 7, 9])
    def test_transfer_agrees(self, count):
        nu = MeasureSpec.atoms(np.linspace(-1, 1, count), np.ones(count))
        tr = degeneracy_transfer(nu, TWISTED, 2)
        assert tr.agree
        assert tr.curve_rank <= count and tr.line_rank <= count

    def test_gauss_rule_on_line(self):
        nu = MeasureSpec.uniform(-1, 1)
        rule = gauss_rule_for_measure(nu, 9)
        rep = verify_rule(rule, RationalCurve.line(), 9, curve_moments(nu, None, 9), nu)
        assert rep.verdict == "pass"
