"""Shrinking a large positive rule without touching its moments.

A hundred random atoms on the parabola y = x^2 define a rule that is exact
for its own moments. Walking along null vectors of the node-moment matrix
removes one atom at a time while keeping all weights positive, until no
more atoms than the matrix rank remain.
"""

import numpy as np

from curvequad import QuadratureRule, atom_moments
from curvequad.synthesis import caratheodory_prune
from curvequad.verify import check_exactness

rng = np.random.default_rng(1)
t = rng.uniform(-1, 1, 100)
X = np.column_stack([t, t**2])
w = rng.uniform(0.1, 1.0, 100)
m = atom_moments(X, w, 3)

rule = QuadratureRule(X, w, 3, "pruned", t)
small = caratheodory_prune(rule, m, 3)
print("atoms before:", rule.size, " after:", small.size, " (rank", small.meta["rank"], ")")
print("moment change:", check_exactness(small, m, 3).max_residual)
print("weights:", np.round(small.weights, 6))
