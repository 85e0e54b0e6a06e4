"""Independent checks of quadrature rules.

Nothing here reuses state from the synthesis code: moment sums are
recomputed from the nodes, node counts come from a separate canonical
merge, and bound values are recomputed from the curve description.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .bounds import BoundReport, lower_bound, upper_bounds
from .curves import PlaneCurve, RationalCurve
from .gauss import QuadratureRule
from .moments import (
    MeasureSpec,
    MomentVector,
    curve_degeneracy,
    curve_moments,
    degeneracy_test,
    moment_matrix,
    parameter_moments,
)
from .polycore import monomial_exponents

EXACTNESS_TOL = 1e-9


@dataclass
class ExactnessReport:
    max_residual: float
    per_degree: dict
    worst_index: Optional[tuple] = None

    def to_json(self):
        return {
            "max_residual": self.max_residual,
            "per_degree": {str(k): v for k, v in self.per_degree.items()},
            "worst_index": None if self.worst_index is None else list(self.worst_index),
        }


@dataclass
class BoundRow:
    bound: BoundReport
    achieved: int
    satisfied: bool

    def to_json(self):
        return {"bound": self.bound.to_json(), "achieved": self.achieved, "satisfied": self.satisfied}


@dataclass
class DegeneracyTransfer:
    k: int
    curve_rank: int
    ring_dim: int
    line_rank: int
    line_dim: int
    curve_degenerate: bool
    line_degenerate: bool

    @property
    def agree(self) -> bool:
        return self.curve_degenerate == self.line_degenerate

    def to_json(self):
        return dict(vars(self), agree=self.agree)


@dataclass
class VerificationReport:
    exactness: Optional[ExactnessReport]
    bound_rows: list = field(default_factory=list)
    lower_rows: list = field(default_factory=list)
    degeneracy: Optional[list] = None
    nodes_raw: int = 0
    nodes_canonical: int = 0
    notes: list = field(default_factory=list)
    tol: float = EXACTNESS_TOL

    @property
    def reasons(self) -> list:
        out = []
        if self.exactness is not None and not self.exactness.max_residual <= self.tol:
            out.append(f"exactness residual {self.exactness.max_residual:.3e} > {self.tol:.1e}")
        for row in self.bound_rows:
            if not row.satisfied:
                out.append(f"{row.bound.setting} upper bound {row.bound.value} < {row.achieved} nodes")
        for row in self.lower_rows:
            if not row.satisfied and not row.bound.advisory:
                out.append(f"lower bound {row.bound.value} > {row.achieved} nodes")
        return out

    @property
    def verdict(self) -> str:
        return "pass" if not self.reasons else "fail"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "reasons": self.reasons,
            "exactness": None if self.exactness is None else self.exactness.to_json(),
            "bound_rows": [r.to_json() for r in self.bound_rows],
            "lower_rows": [r.to_json() for r in self.lower_rows],
            "degeneracy": None if self.degeneracy is None else [d.to_json() for d in self.degeneracy],
            "nodes_raw": self.nodes_raw,
            "nodes_canonical": self.nodes_canonical,
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        lines = [f"verdict: {self.verdict}", f"nodes: {self.nodes_canonical} (raw {self.nodes_raw})"]
        if self.exactness is not None:
            lines.append(f"max relative residual: {self.exactness.max_residual:.3e}")
        for r in self.bound_rows + self.lower_rows:
            tag = "ok" if r.satisfied else ("advisory" if r.bound.advisory else "FAIL")
            lines.append(f"  {r.bound.kind:5s} {r.bound.setting:14s} bound {r.bound.value!s:>6} "
                         f"achieved {r.achieved:>4}  {tag}")
        lines += [f"  note: {n}" for n in self.notes]
        lines += [f"  reason: {r}" for r in self.reasons]
        return "\n".join(lines)


# ---------------------------------------------------------------------------


def check_exactness(rule: QuadratureRule, m_target: MomentVector, strength: int) -> ExactnessReport:
    """Residuals ``|sum w x^a - m_a| / max(1, |m_a|)`` for ``|a| <= strength``."""
    X = np.asarray(rule.nodes, dtype=float)
    X = X.reshape(len(rule.weights), -1) if len(rule.weights) else X.reshape(0, m_target.nvars)
    if X.shape[1] != m_target.nvars and len(rule.weights):
        raise ValueError(f"rule lives in R^{X.shape[1]}, moments in R^{m_target.nvars}")
    w = np.asarray(rule.weights, dtype=float)
    per_degree = {}
    worst, worst_idx = 0.0, None
    for a in monomial_exponents(m_target.nvars, strength):
        val = 0.0
        if len(w):
            col = np.ones(len(w))
            for k, e in enumerate(a):
                col = col * X[:, k] ** e
            val = float(np.sum(w * col))
        ref = m_target[a]
        r = abs(val - ref) / max(1.0, abs(ref))
        deg = sum(a)
        per_degree[deg] = max(per_degree.get(deg, 0.0), r)
        if r > worst or worst_idx is None:
            worst, worst_idx = r, a
    return ExactnessReport(worst, per_degree, worst_idx)


def canonical_nodes(rule: QuadratureRule, merge_tol: float = 1e-6, weight_drop_tol: float = 1e-10):
    """Distinct nodes after merging clusters within ``merge_tol`` and dropping
    weights below ``weight_drop_tol`` times the mass."""
    X = np.asarray(rule.nodes, dtype=float)
    w = np.asarray(rule.weights, dtype=float)
    if not len(w):
        return X, w
    parent = list(range(len(w)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(X).query_pairs(merge_tol, p=np.inf):
        parent[find(i)] = find(j)
    roots = sorted({find(i) for i in range(len(w))})
    P = np.array([np.average(X[[i for i in range(len(w)) if find(i) == r]], axis=0,
                             weights=w[[i for i in range(len(w)) if find(i) == r]]) for r in roots])
    W = np.array([w[[i for i in range(len(w)) if find(i) == r]].sum() for r in roots])
    keep = W > weight_drop_tol * W.sum()
    return P[keep], W[keep]


def certify_nondegenerate(nu: Optional[MeasureSpec], depth: int) -> Optional[bool]:
    """Whether ``nu`` has at least ``depth`` support points; ``None`` if unknown.

    Densities always qualify. Atoms qualify by counting distinct locations.
    Raw moments use a Hankel rank test.
    """
    if nu is None:
        return None
    if nu.kind == "density":
        return True
    if nu.kind == "atoms":
        loc = np.asarray(nu.locations, dtype=float).reshape(len(nu.weights), -1)
        distinct = len(np.unique(np.round(loc, 12), axis=0))
        return distinct >= depth
    if nu.kind == "raw" and nu.raw.nvars == 1:
        k = min(depth - 1, nu.raw.max_degree // 2)
        if k < depth - 1:
            return None
        M = moment_matrix(nu.raw, k)
        return degeneracy_test(M).rank == len(M.basis)
    return None


def _family(curve):
    if isinstance(curve, PlaneCurve):
        return "plane", {"d": curve.d, "t": curve.t_places}
    if curve.n == 1 and curve.degree == 1 and curve.is_polynomial:
        return "line", {}
    return "rational", {"d": curve.degree, "p": curve.p_real_zeros, "n": curve.n}


def check_bounds(
    rule: QuadratureRule,
    curve,
    strength: int,
    nu: Optional[MeasureSpec] = None,
    merge_tol: float = 1e-6,
    weight_drop_tol: float = 1e-10,
) -> VerificationReport:
    """Compare the canonical node count with every applicable bound.

    Lower-bound rows are advisory unless the curve is a polynomial
    parametrization with ``n >= 3`` (or the line), ``strength >= d``, and
    ``nu`` is certified nondegenerate at the needed depth.
    """
    P, _ = canonical_nodes(rule, merge_tol, weight_drop_tol)
    achieved = len(P)
    rep = VerificationReport(None, nodes_raw=rule.size, nodes_canonical=achieved)
    if achieved != rule.size:
        rep.notes.append(f"canonical merge: {rule.size} -> {achieved} nodes")
    family, params = _family(curve)
    for row in upper_bounds(family, strength, **params):
        if not row.applicable:
            rep.notes.append(f"{row.setting}: {row.reason}")
            continue
        rep.bound_rows.append(BoundRow(row, achieved, achieved <= row.value))
    d = 1 if family == "line" else params["d"]
    lb = lower_bound(d, strength)
    why = []
    if lb.advisory:
        why.append(lb.reason)
    if family == "plane":
        why.append("plane curve: no polynomial parametrization known")
    elif family == "rational":
        if not curve.is_polynomial:
            why.append("parametrization is not polynomial")
        if curve.n < 3:
            why.append(f"n={curve.n} < 3")
    cert = certify_nondegenerate(nu, lb.value)
    if cert is None:
        why.append("nondegeneracy not certified")
    elif not cert:
        why.append("measure is degenerate at the needed depth")
    if why:
        lb = BoundReport(lb.setting, lb.kind, lb.value, lb.strength, lb.params, lb.source,
                         reason="; ".join(why), advisory=True)
    rep.lower_rows.append(BoundRow(lb, achieved, achieved >= lb.value))
    return rep


def degeneracy_transfer(nu: MeasureSpec, curve: RationalCurve, k: int, rel_tol: float = 1e-8) -> DegeneracyTransfer:
    """Degeneracy of the curve measure at degree ``k`` against ``nu`` at degree ``D k``."""
    Dk = curve.D * k
    m = curve_moments(nu, curve, 2 * k)
    deg, r, dim = curve_degeneracy(moment_matrix(m, k), curve, rel_tol)
    mv = MomentVector.univariate(parameter_moments(nu, 2 * Dk))
    rn = degeneracy_test(moment_matrix(mv, Dk), rel_tol).rank
    return DegeneracyTransfer(k, r, dim, rn, Dk + 1, deg, rn < Dk + 1)


def verify_rule(
    rule: QuadratureRule,
    curve,
    strength: int,
    m_target: MomentVector,
    nu: Optional[MeasureSpec] = None,
    tol: float = EXACTNESS_TOL,
) -> VerificationReport:
    """Exactness and bound checks in one report."""
    rep = check_bounds(rule, curve, strength, nu)
    rep.exactness = check_exactness(rule, m_target, strength)
    rep.tol = tol
    return rep
