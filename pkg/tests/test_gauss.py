"""Gaussian rules from moment sequences."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from curvequad.errors import DegenerateMeasure
from curvequad.gauss import (
    QuadratureRule,
    gauss_rule,
    gauss_rule_for_measure,
    minimal_nodes,
    recurrence_from_moments,
)
from curvequad.moments import MeasureSpec, parameter_moments


def legendre_moments(top):
    k = np.arange(top + 1)
    return np.where(k % 2 == 0, 2.0 / (k + 1), 0.0)


class TestMinimalNodes:
    @pytest.mark.parametrize("strength, n", [(0, 1), (1, 1), (2, 2), (3, 2), (19, 10)])
    def test_values(self, strength, n):
        assert minimal_nodes(strength) == n

    def test_negative(self):
        with pytest.raises(ValueError):
            minimal_nodes(-1)


class TestAgainstNumpy:
    @pytest.mark.parametrize("n", [1, 2, 5, 10, 16])
    def test_legendre(self, n):
        rule = gauss_rule(legendre_moments(2 * n), 2 * n - 1)
        x, w = np.polynomial.legendre.leggauss(n)
        np.testing.assert_allclose(rule.parameter_values, x, atol=1e-12)
        np.testing.assert_allclose(rule.weights, w, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_hermite(self, n):
        rule = gauss_rule_for_measure(MeasureSpec.gaussian(), 2 * n - 1)
        x, w = np.polynomial.hermite_e.hermegauss(n)
        np.testing.assert_allclose(rule.parameter_values, x, atol=1e-9)
        np.testing.assert_allclose(rule.weights / rule.weights.sum(), w / w.sum(), atol=1e-10)

    def test_even_strength_uses_next_odd(self):
        a = gauss_rule(legendre_moments(8), 4)
        b = gauss_rule(legendre_moments(8), 5)
        np.testing.assert_allclose(a.parameter_values, b.parameter_values)
        assert a.strength == 4


class TestRecurrence:
    def test_legendre_coefficients(self):
        rec = recurrence_from_moments(legendre_moments(10), 5)
        k = np.arange(1, 5)
        np.testing.assert_allclose(rec.a, 0.0, atol=1e-14)
        np.testing.assert_allclose(rec.b[1:], k**2 / (4.0 * k**2 - 1), rtol=1e-12)

    def test_hankel_round_trip(self):
        m = legendre_moments(9)
        rec = recurrence_from_moments(m, 5)
        np.testing.assert_allclose(rec.hankel_moments(10), m, atol=1e-13)

    def test_degenerate_measure_detected(self):
        m = parameter_moments(MeasureSpec.atoms([0.0, 1.0], [1.0, 1.0]), 7)
        with pytest.raises(DegenerateMeasure):
            gauss_rule(m, 7)

    def test_recover_returns_atoms(self):
        m = parameter_moments(MeasureSpec.atoms([-0.5, 1.0], [1.0, 2.0]), 7)
        rule = gauss_rule(m, 7, recover=True)
        np.testing.assert_allclose(rule.parameter_values, [-0.5, 1.0], atol=1e-10)
        np.testing.assert_allclose(rule.weights, [1.0, 2.0], atol=1e-10)
        assert rule.meta["degenerate_depth"] == 2


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.floats(-3, 3), min_size=2, max_size=12, unique=True),
        st.integers(1, 9),
    )
    def test_random_atoms(self, t, strength):
        t = np.array(t)
        assume(np.min(np.diff(np.sort(t))) > 0.05)
        assume(minimal_nodes(strength) <= len(t))
        w = np.linspace(0.5, 2.0, len(t))
        nu = MeasureSpec.atoms(t, w)
        rule = gauss_rule_for_measure(nu, strength)
        assert rule.size == minimal_nodes(strength)
        assert np.all(rule.weights > 0)
        assert abs(rule.weights.sum() - w.sum()) <= 1e-10 * w.sum()
        m = parameter_moments(nu, strength)
        got = rule.weights @ np.vander(rule.parameter_values, strength + 1, increasing=True)
        assert np.max(np.abs(got - m) / np.maximum(1.0, np.abs(m))) <= 1e-9

    @pytest.mark.parametrize("a, b", [(0.0, 1.0), (2.0, 5.0), (-10.0, -9.0)])
    @pytest.mark.parametrize("strength", [1, 7, 19])
    def test_nodes_inside_support(self, a, b, strength):
        rule = gauss_rule_for_measure(MeasureSpec.uniform(a, b), strength)
        assert np.all((rule.parameter_values > a) & (rule.parameter_values < b))
        assert rule.weights.sum() == pytest.approx(b - a, rel=1e-12)


class TestRuleContainer:
    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            QuadratureRule(np.zeros((2, 1)), [1.0, 0.0], 1)

    def test_json_round_trip(self):
        rule = gauss_rule(legendre_moments(6), 5)
        back = QuadratureRule.from_json(rule.to_json())
        np.testing.assert_array_equal(back.nodes, rule.nodes)
        np.testing.assert_array_equal(back.weights, rule.weights)
