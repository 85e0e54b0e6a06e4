"""Degeneracy seen from the curve and from the parameter line.

Polynomials that vanish on the whole curve make every curve moment matrix
singular, so rank is measured on the coordinate ring instead. For a
polynomial parametrization with surjective restriction map, a measure on
the curve is degenerate at degree k exactly when its parameter measure is
degenerate at degree D*k.
"""

import numpy as np

from curvequad import MeasureSpec, RationalCurve, exponent_coverage, psi_rank
from curvequad.verify import degeneracy_transfer

curve = RationalCurve.monomial(1, 2, 3)
for s in (1, 2, 3):
    r = psi_rank(curve, s)
    print(f"psi_{s}: rank {r.rank}, surjective {r.surjective}, kernel {r.kernel_dim}")

print("\nexponent coverage of (t, t^3, t^4) at s = 3 and 4:",
      exponent_coverage(4, 3)[1], exponent_coverage(4, 4)[1])

print("\natoms  curve rank / ring dim  line rank / line dim  agree")
for count in (2, 4, 6, 7, 9):
    nu = MeasureSpec.atoms(np.linspace(-1, 1, count), np.ones(count))
    tr = degeneracy_transfer(nu, curve, 2)
    print(f"{count:>5}  {tr.curve_rank:>10} / {tr.ring_dim:<8}  {tr.line_rank:>9} / {tr.line_dim:<8}  {tr.agree}")
