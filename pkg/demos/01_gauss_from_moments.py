"""Gaussian rules straight from a moment sequence.

A measure on the line is known here only through its moments. The
three-term recurrence is recovered from them and the Jacobi matrix gives
nodes and weights. We check the result against numpy's Gauss-Legendre table
and then show what happens when the "measure" is secretly a few atoms.
"""

import numpy as np

from curvequad import MeasureSpec, gauss_rule, gauss_rule_for_measure, parameter_moments

# Lebesgue measure on [-1, 1]: m_k = 2/(k+1) for even k, 0 for odd k
k = np.arange(20)
m = np.where(k % 2 == 0, 2.0 / (k + 1), 0.0)
rule = gauss_rule(m, strength=9)
x, w = np.polynomial.legendre.leggauss(5)
print("strength 9 needs", rule.size, "nodes")
print("max node error vs leggauss:  ", np.max(np.abs(rule.parameter_values - x)))
print("max weight error vs leggauss:", np.max(np.abs(rule.weights - w)))

# a standard normal, handled in a centered and scaled frame for conditioning
g = gauss_rule_for_measure(MeasureSpec.gaussian(), strength=7)
print("\nGaussian nodes:", np.round(g.parameter_values, 6))

# three atoms cannot carry a 5-node rule; recover=True returns the atoms
atoms = MeasureSpec.atoms([-0.4, 0.1, 0.9], [1.0, 2.0, 0.5])
r = gauss_rule(parameter_moments(atoms, 9), 9, recover=True)
print("\nthree-atom measure, strength 9 ->", r.size, "nodes at", np.round(r.parameter_values, 12))
print("degenerate at depth", r.meta["degenerate_depth"])
