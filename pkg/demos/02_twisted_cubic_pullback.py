"""Optimal rules on the twisted cubic by pulling back a line rule.

On a polynomial curve of degree D, a monomial of degree s pulls back to a
polynomial of degree D*s in the parameter. A Gaussian rule of strength D*s
on the parameter line therefore maps to an exact rule on the curve. For
the twisted cubic its node count hits the lower bound exactly.
"""

from curvequad import MeasureSpec, RationalCurve, curve_moments, lower_bound
from curvequad.synthesis import pullback_gauss
from curvequad.verify import check_exactness

curve = RationalCurve.monomial(1, 2, 3)  # t -> (t, t^2, t^3)
nu = MeasureSpec.uniform(0, 1)

print(f"{'strength':>8} {'nodes':>6} {'lower bound':>12} {'residual':>10}")
for s in range(1, 6):
    strength = 2 * s - 1
    out = pullback_gauss(curve, nu, strength)
    res = check_exactness(out.rule, curve_moments(nu, curve, strength), strength).max_residual
    print(f"{strength:>8} {out.rule.size:>6} {lower_bound(3, strength).value:>12} {res:>10.1e}")

print("\nnodes of the strength-5 rule (x, y, z):")
print(pullback_gauss(curve, nu, 5).rule.nodes.round(6))
