"""Rules on polynomial curves pulled back from Gaussian rules on the line."""

from __future__ import annotations

import numpy as np

from ..bounds import lower_bound
from ..curves import RationalCurve
from ..errors import NotPolynomialParametrization
from ..gauss import QuadratureRule, gauss_rule_for_measure
from ..moments import MeasureSpec, curve_moments
from ..polycore import monomial_exponents
from .common import SynthesisResult


def moment_residual(rule: QuadratureRule, m_target, strength: int) -> float:
    """Max of ``|sum w x^a - m_a| / max(1, |m_a|)`` over ``|a| <= strength``."""
    exps = monomial_exponents(rule.ambient_dim, strength)
    X = rule.nodes
    worst = 0.0
    for a in exps:
        got = float(rule.weights @ np.prod(X ** np.asarray(a), axis=1))
        ref = m_target[a]
        worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return worst


def pullback_gauss(curve: RationalCurve, nu: MeasureSpec, strength: int, m_target=None) -> SynthesisResult:
    """Map the Gaussian rule of strength ``strength * D`` for ``nu`` onto ``curve``.

    Every monomial of degree ``<= strength`` pulls back to a polynomial of
    degree ``<= strength * D`` in ``t``, so the mapped rule is exact for the
    pushforward of ``nu``. A degenerate ``nu`` comes back as its own atoms.
    """
    if not curve.is_polynomial:
        raise NotPolynomialParametrization("pullback needs a constant phi0")
    D = curve.D
    line_rule = gauss_rule_for_measure(nu, strength * D, recover=True)
    t = line_rule.parameter_values
    rule = QuadratureRule(curve(t), line_rule.weights, strength, "pullback", t, dict(line_rule.meta))
    if m_target is None:
        m_target = curve_moments(nu, curve, strength)
    res = moment_residual(rule, m_target, strength)
    lb = lower_bound(D, strength)
    result = SynthesisResult(rule, res, res <= 1e-8, target_nodes=lb.value)
    result.target_met = rule.size == lb.value
    result.bound_check.append((lb, rule.size, rule.size >= lb.value))
    if "degenerate_depth" in rule.meta:
        result.messages.append(f"measure degenerate at depth {rule.meta['degenerate_depth']}; atoms returned")
    return result
