"""Parametrized curves, plane curves and the pullback map."""

from math import comb

import numpy as np
import pytest

from curvequad.curves import (
    PlaneCurve,
    RationalCurve,
    curve_from_json,
    exponent_coverage,
    image_dimension_binomial,
    image_dimension_xd,
    nearest_curve_point,
    places_at_infinity,
    plane_curve_points,
    psi_matrix,
    psi_rank,
)
from curvequad.errors import DomainError, NotPolynomialParametrization
from curvequad.polycore import MultivariatePolynomial, Polynomial


def witness(d):
    return RationalCurve.monomial(1, d - 1, d)


class TestRationalCurve:
    def test_degree_and_poles(self):
        c = RationalCurve(Polynomial([-1.0, 0.0, 1.0]), (Polynomial([1.0]), Polynomial([0.0, 1.0])))
        assert c.degree == 2
        assert c.p_real_zeros == 2
        assert not c.is_polynomial

    def test_evaluation(self):
        c = RationalCurve.monomial(1, 2, 3)
        np.testing.assert_allclose(c(np.array([2.0])), [[2.0, 4.0, 8.0]])

    def test_psi_requires_polynomial(self):
        c = RationalCurve(Polynomial([0.0, 1.0]), (Polynomial([1.0]),))
        with pytest.raises(NotPolynomialParametrization):
            psi_matrix(c, 2)

    def test_json_round_trip(self):
        c = RationalCurve.random_generic(3, 2, np.random.default_rng(1))
        back = curve_from_json(c.to_json())
        t = np.linspace(-1, 1, 5)
        np.testing.assert_array_equal(back(t), c(t))


class TestPsiRank:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("extra", [0, 1, 2])
    def test_witness_surjective(self, d, extra):
        s = d + extra
        assert psi_rank(witness(d), s).surjective

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("s", [1, 2, 3, 4, 5, 6, 7])
    def test_coverage_agrees_with_rank(self, d, s):
        _, complete = exponent_coverage(d, s)
        assert complete == psi_rank(witness(d), s).surjective

    def test_kernel_dim_of_plane_monomial_curve(self):
        # (t, t^d) at s = d: y - x^d is the single relation
        r = psi_rank(RationalCurve.monomial(1, 4), 4)
        assert r.kernel_dim == 1

    def test_generic_stable_under_noise(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            c = RationalCurve.random_generic(3, 3, rng)
            noisy = RationalCurve.polynomial(
                *(Polynomial(p.coeffs * (1 + 1e-3 * rng.standard_normal(p.coeffs.shape))) for p in c.phi)
            )
            assert psi_rank(noisy, 3).surjective


class TestXdImage:
    @pytest.mark.parametrize("d", range(1, 9))
    def test_dim_matches_exponent_set(self, d):
        for s in range(d, d + 5):
            dim, exps = image_dimension_xd(d, s)
            assert len(exps) == dim
            assert dim == image_dimension_binomial(d, s) == comb(s + 2, 2) - comb(s - d + 2, 2)

    def test_rank_matches_psi(self):
        for d in (2, 3, 4):
            for s in (d, d + 1):
                assert psi_rank(RationalCurve.monomial(1, d), s).rank == image_dimension_xd(d, s)[0]

    def test_s_below_d(self):
        with pytest.raises(DomainError):
            image_dimension_xd(4, 3)


class TestPlaneCurve:
    @pytest.mark.parametrize(
        "curve, places", [(PlaneCurve.circle(), 0), (PlaneCurve.hyperbola(), 2), (PlaneCurve.parabola(), 1)]
    )
    def test_places_at_infinity(self, curve, places):
        assert places_at_infinity(curve) == places
        assert curve.is_compact_candidate == (places == 0)

    def test_override(self):
        c = PlaneCurve(PlaneCurve.hyperbola().F, t_override=0)
        assert c.t_places == 0

    def test_bivariate_required(self):
        with pytest.raises(ValueError):
            PlaneCurve(MultivariatePolynomial.variable(0, 3))

    def test_sampled_points_lie_on_curve(self):
        c = PlaneCurve.circle(2.0)
        pts = plane_curve_points(c, 3.0)
        assert len(pts) > 50
        np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1]), 2.0, atol=1e-12)

    def test_nearest_point(self):
        p = nearest_curve_point(PlaneCurve.circle(), target=(3.0, 4.0))
        np.testing.assert_allclose(p, [0.6, 0.8], atol=1e-8)
