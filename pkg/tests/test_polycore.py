"""Univariate and multivariate polynomial kernel."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvequad.curves import RationalCurve
from curvequad.errors import DimensionMismatch, ZeroPolynomial
from curvequad.polycore import (
    MultivariatePolynomial,
    Polynomial,
    compose_with_parametrization,
    horner,
    monomial_exponents,
    monomial_values,
    poly_gcd,
    real_roots,
    squarefree_decomposition,
)

int_coeffs = st.lists(st.integers(-9, 9), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)


def _sqfree_real(p: Polynomial) -> Polynomial:
    # oracle: distinct real roots straight from numpy on the exact polynomial
    z = np.roots(p.coeffs[::-1])
    real = np.sort(z[np.abs(z.imag) < 1e-6].real)
    keep = [r for i, r in enumerate(real) if i == 0 or abs(r - real[i - 1]) > 1e-4]
    return Polynomial.from_roots(keep)


class TestPolynomialArithmetic:
    def test_trailing_zeros_trimmed(self):
        assert Polynomial([1.0, 2.0, 0.0, 0.0]).degree == 1

    def test_zero_polynomial(self):
        assert Polynomial([0.0]).is_zero

    @pytest.mark.parametrize("k", [0, 1, 3, 7])
    def test_power_matches_repeated_product(self, k):
        p = Polynomial([1.0, -2.0, 0.5])
        q = Polynomial([1.0])
        for _ in range(k):
            q = q * p
        np.testing.assert_allclose((p**k).coeffs, q.coeffs)

    def test_divmod_reconstructs(self):
        a = Polynomial([3.0, 0.0, -1.0, 2.0, 1.0])
        b = Polynomial([1.0, 1.0])
        q, r = a.divmod(b)
        np.testing.assert_allclose((q * b + r).coeffs, a.coeffs, atol=1e-12)
        assert r.degree < b.degree

    def test_horner_agrees_with_numpy(self):
        c = np.array([0.5, -1.0, 2.0, 3.0])
        t = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(horner(c, t), np.polynomial.polynomial.polyval(t, c))

    def test_gcd_of_shared_factor(self):
        f = Polynomial.from_roots([1.0, 2.0])
        g = Polynomial.from_roots([2.0, -3.0])
        np.testing.assert_allclose(poly_gcd(f, g).monic().coeffs, [-2.0, 1.0], atol=1e-10)

    def test_json_round_trip(self):
        p = Polynomial([1.0, -0.25, 3.0])
        assert Polynomial.from_json(p.to_json()) == p


class TestRealRoots:
    def test_zero_polynomial_raises(self):
        with pytest.raises(ZeroPolynomial):
            real_roots(Polynomial([0.0]))

    def test_multiplicities(self):
        p = Polynomial.from_roots([1.0, 1.0, 1.0, -2.0, 0.5, 0.5])
        roots = real_roots(p)
        assert [m for _, m in roots] == [1, 2, 3]
        np.testing.assert_allclose([r for r, _ in roots], [-2.0, 0.5, 1.0], atol=1e-8)

    def test_no_real_roots(self):
        assert real_roots(Polynomial([1.0, 0.0, 1.0])) == []

    def test_squarefree_decomposition_exponents(self):
        p = Polynomial.from_roots([3.0, -1.0, -1.0])
        parts = squarefree_decomposition(p)
        assert sorted(i for _, i in parts) == [1, 2]

    @settings(max_examples=60, deadline=None)
    @given(int_coeffs)
    def test_factored_real_part_matches_oracle(self, coeffs):
        p = Polynomial(np.array(coeffs, dtype=float))
        expected = _sqfree_real(p)
        got = Polynomial.from_roots([r for r, _ in real_roots(p)])
        assert got.degree == expected.degree
        scale = max(1.0, float(np.max(np.abs(expected.coeffs))))
        assert np.max(np.abs(got.coeffs - expected.coeffs)) <= 1e-6 * scale


class TestMultivariate:
    def test_exponents_are_graded(self):
        exps = monomial_exponents(2, 2)
        assert exps[0] == (0, 0)
        assert [sum(e) for e in exps] == sorted(sum(e) for e in exps)
        assert len(exps) == 6

    def test_monomial_values(self):
        V = monomial_values(np.array([[2.0, 3.0]]), [(1, 0), (0, 2), (1, 1)])
        np.testing.assert_allclose(V, [[2.0, 9.0, 6.0]])

    def test_gradient(self):
        p = MultivariatePolynomial(2, {(2, 0): 1.0, (1, 1): 3.0})
        np.testing.assert_allclose(p.gradient(np.array([[1.0, 2.0]])), [[8.0, 3.0]])

    def test_leading_form(self):
        p = MultivariatePolynomial(2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): -1.0})
        assert p.leading_form().degree == 2
        assert (0, 0) not in p.leading_form().terms


class TestCompose:
    twisted = RationalCurve.monomial(1, 2, 3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compose_with_parametrization(MultivariatePolynomial.variable(0, 2), self.twisted)

    def test_pullback_of_defining_relation_vanishes(self):
        # y - x^2 vanishes on (t, t^2, t^3)
        p = MultivariatePolynomial(3, {(0, 1, 0): 1.0, (2, 0, 0): -1.0})
        N, e = compose_with_parametrization(p, self.twisted)
        assert e == 0 and N.is_zero

    def test_rational_denominator_power(self):
        curve = RationalCurve(Polynomial([0.0, 1.0]), (Polynomial([1.0]), Polynomial([0.0, 0.0, 1.0])))
        p = MultivariatePolynomial(2, {(1, 1): 1.0})  # xy = 1 on this curve
        N, e = compose_with_parametrization(p, curve)
        assert e == 2
        t = np.array([0.5, 1.5, -2.0])
        np.testing.assert_allclose(N(t) / t**e, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.floats(-3, 3), min_size=10, max_size=10),
        st.lists(st.floats(-3, 3), min_size=10, max_size=10),
        st.floats(-2, 2),
        st.floats(-2, 2),
    )
    def test_linear_and_degree_bounded(self, ca, cb, a, b):
        exps = monomial_exponents(3, 2)
        p = MultivariatePolynomial.from_vector(np.array(ca), exps)
        q = MultivariatePolynomial.from_vector(np.array(cb), exps)
        lhs, _ = compose_with_parametrization(p * a + q * b, self.twisted)
        P, _ = compose_with_parametrization(p, self.twisted)
        Q, _ = compose_with_parametrization(q, self.twisted)
        rhs = P * a + Q * b
        n = max(len(lhs.coeffs), len(rhs.coeffs))
        diff = np.pad(lhs.coeffs, (0, n - len(lhs.coeffs))) - np.pad(rhs.coeffs, (0, n - len(rhs.coeffs)))
        assert np.max(np.abs(diff), initial=0.0) <= 1e-9 * (1 + np.max(np.abs(rhs.coeffs), initial=0.0))
        assert lhs.degree <= self.twisted.degree * max(p.degree, q.degree, 0) or lhs.is_zero
