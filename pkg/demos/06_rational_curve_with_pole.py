"""Rules on a rational curve whose parametrization has a pole.

The curve t -> (1/t, t) is the hyperbola xy = 1 and phi0 = t vanishes at
t = 0. The solver keeps every node inside its interval of the real line
minus the pole and at least pole_margin away from it. The stationarity
report counts nodes per interval against the sign pattern of H'.
"""

import numpy as np

from curvequad import MeasureSpec, curve_moments
from curvequad.bench import inverse_curve
from curvequad.synthesis import NLPConfig, kkt_analyze, nlp_rational

curve = inverse_curve()
nu = MeasureSpec.uniform(1, 2)
m = curve_moments(nu, curve, 3)
cfg = NLPConfig()
out = nlp_rational(curve, m, 3, cfg, nu=nu)
print("nodes:", out.rule.size, " target:", out.target_nodes, " residual:", f"{out.residual:.1e}")
print("parameters t:", np.round(np.sort(out.rule.parameter_values), 6))
print("closest approach to the pole:", f"{np.min(np.abs(out.rule.parameter_values)):.3f}")

rep = kkt_analyze(out.rule, curve, 3)
print("max |H(t_i)|:", f"{rep.max_H:.1e}", " max gradient residual:", f"{rep.max_gradient:.1e}")
for row in rep.sign_pattern:
    print(f"  interval ({row.lo:.3g}, {row.hi:.3g}): {row.nodes} nodes, cap {row.cap} [{row.cap_rule}]")
