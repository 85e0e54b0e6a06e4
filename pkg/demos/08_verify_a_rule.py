"""Independent checks on a finished rule.

The verifier recomputes every moment, canonicalizes nearly coincident
nodes and compares the count with each applicable bound. A rule with one
weight nudged by 0.1% fails the exactness check.
"""

from curvequad import MeasureSpec, QuadratureRule, RationalCurve, curve_moments
from curvequad.synthesis import pullback_gauss
from curvequad.verify import verify_rule

curve = RationalCurve.monomial(1, 2, 3)
nu = MeasureSpec.uniform(0, 1)
m = curve_moments(nu, curve, 5)
rule = pullback_gauss(curve, nu, 5).rule
print(verify_rule(rule, curve, 5, m, nu).summary())

w = rule.weights.copy()
w[0] *= 1.001
bad = QuadratureRule(rule.nodes, w, 5, "pullback", rule.parameter_values)
print()
print(verify_rule(bad, curve, 5, m, nu).summary())
