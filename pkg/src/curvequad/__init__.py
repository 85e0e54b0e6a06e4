"""Quadrature rules on rational and plane algebraic curves."""

from .bounds import BoundReport, lower_bound, upper_bounds
from .curves import PlaneCurve, RationalCurve, exponent_coverage, psi_rank
from .gauss import QuadratureRule, Recurrence, gauss_rule, gauss_rule_for_measure
from .moments import (
    MeasureSpec,
    MomentVector,
    atom_moments,
    curve_moments,
    degeneracy_test,
    moment_matrix,
    parameter_moments,
)

__version__ = "0.1.0"
