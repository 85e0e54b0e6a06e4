"""A four-node rule on the circle found by penalized optimization.

Starting from a feasible rule built by NNLS on sampled curve points, the
solver removes nodes and re-fits until the target count is reached. The
stationarity report then fits the auxiliary polynomial G and measures how
tangent its level set is to the circle at each node.
"""

import numpy as np

from curvequad import PlaneCurve
from curvequad.bench import circle_uniform_moments
from curvequad.synthesis import kkt_analyze, nlp_plane

circle = PlaneCurve.circle()
m = circle_uniform_moments(3)
out = nlp_plane(circle, m, 3)
print("nodes:", out.rule.size, " converged:", out.converged, " residual:", f"{out.residual:.1e}")
print("angles (deg):", np.round(np.degrees(np.arctan2(*out.rule.nodes.T[::-1])), 4))
print("weights:", np.round(out.rule.weights, 6))

rep = kkt_analyze(out.rule, circle, 3)
print("worst tangency angle (rad):", f"{rep.max_gradient:.1e}")
for msg in out.messages:
    print("solver:", msg)
