"""Univariate Gaussian quadrature from raw moments.

The three-term recurrence is read off the Cholesky factor of the Hankel
moment matrix; nodes and weights then come from the eigen-decomposition of
the Jacobi matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateMeasure, InsufficientDegree
from .moments import MeasureSpec, MomentVector, parameter_moments
from .polycore import Polynomial

#: ``beta_k`` below this fraction of the variance ``beta_1`` means degeneracy
BETA_TOL = 1e-10
PROVENANCES = ("gauss", "pullback", "nlp-plane", "nlp-rational", "pruned")


@dataclass(frozen=True, eq=False)
class Recurrence:
    """Monic recurrence ``p_{k+1} = (t - a_k) p_k - b_k p_{k-1}``.

    ``b[0]`` holds the total mass, so ``b`` has the same length as ``a``.
    """

    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> int:
        return len(self.a)

    def jacobi(self) -> np.ndarray:
        J = np.diag(self.a)
        off = np.sqrt(self.b[1:])
        return J + np.diag(off, 1) + np.diag(off, -1)

    def orthogonal_polynomial(self, k: int) -> Polynomial:
        """Monic orthogonal polynomial of degree ``k <= length``."""
        if k > self.length:
            raise ValueError(f"recurrence of length {self.length} defines p_0..p_{self.length}")
        prev, cur = Polynomial([0.0]), Polynomial([1.0])
        for j in range(k):
            bj = self.b[j] if j > 0 else 0.0
            prev, cur = cur, Polynomial([-self.a[j], 1.0]) * cur - prev * bj
        return cur

    def hankel_moments(self, count: int) -> np.ndarray:
        """Moments ``b_0 * e_1^T J^k e_1`` for ``k < count``.

        Only the first ``2 * length`` of them are fixed by the recurrence.
        """
        J = self.jacobi()
        v = np.zeros(self.length)
        v[0] = 1.0
        out = []
        for _ in range(count):
            out.append(self.b[0] * v[0])
            v = J @ v
        return np.array(out)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes with positive weights.

    ``nodes`` has shape ``(N, ambient_dim)``. ``parameter_values`` holds the
    curve parameters of the nodes when the rule lives on a parametrized curve.
    """

    nodes: np.ndarray
    weights: np.ndarray
    strength: int
    provenance: str = "gauss"
    parameter_values: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.nodes, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        w = np.asarray(self.weights, dtype=float).ravel()
        if X.shape[0] != w.shape[0]:
            raise ValueError(f"{X.shape[0]} nodes but {w.shape[0]} weights")
        if np.any(~(w > 0)):
            raise ValueError("quadrature weights must be strictly positive")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "nodes", X)
        object.__setattr__(self, "weights", w)
        if self.parameter_values is not None:
            t = np.asarray(self.parameter_values, dtype=float).ravel()
            if t.shape[0] != w.shape[0]:
                raise ValueError("parameter_values length mismatch")
            object.__setattr__(self, "parameter_values", t)

    @property
    def ambient_dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return len(self.weights)

    def __len__(self):
        return self.size

    def integrate(self, f) -> float:
        return float(self.weights @ np.asarray(f(self.nodes)))

    def to_json(self):
        out = {
            "dim": self.ambient_dim,
            "strength": int(self.strength),
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
            "provenance": self.provenance,
        }
        if self.parameter_values is not None:
            out["t"] = self.parameter_values.tolist()
        return out

    @classmethod
    def from_json(cls, data):
        return cls(
            np.asarray(data["nodes"], dtype=float).reshape(-1, int(data.get("dim", 1))),
            data["weights"],
            int(data["strength"]),
            data.get("provenance", "gauss"),
            data.get("t"),
        )


def _as_sequence(m) -> np.ndarray:
    if isinstance(m, MomentVector):
        if m.nvars != 1:
            raise ValueError("univariate moments required")
        return m.as_array()
    return np.asarray(m, dtype=float).ravel()


def recurrence_from_moments(m, ell: int, beta_tol: float = BETA_TOL) -> Recurrence:
    """Recurrence coefficients ``a_0..a_{ell-1}``, ``b_0..b_{ell-1}`` from moments.

    Needs ``m_0 .. m_{2 ell - 1}``. Raises :class:`DegenerateMeasure` with the
    number of support points when the Hankel form loses rank before depth
    ``ell``.
    """
    m = _as_sequence(m)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if len(m) < 2 * ell:
        raise InsufficientDegree(f"{ell} recurrence steps need moments to degree {2 * ell - 1}")
    if not m[0] > 0:
        raise DegenerateMeasure(0, "measure has no mass")
    # Cholesky of the ell x ell Hankel block, bordered by one extra column
    R = np.zeros((ell, ell + 1))
    for i in range(ell):
        piv = m[2 * i] - R[:i, i] @ R[:i, i]
        if not piv > 0:
            raise DegenerateMeasure(i)
        R[i, i] = np.sqrt(piv)
        for j in range(i + 1, ell + 1):
            R[i, j] = (m[i + j] - R[:i, i] @ R[:i, j]) / R[i, i]
        if i >= 1:
            beta = (R[i, i] / R[i - 1, i - 1]) ** 2
            ref = (R[1, 1] / R[0, 0]) ** 2 if i > 1 else m[2] / m[0]
            if beta <= beta_tol * ref:
                raise DegenerateMeasure(i)
    diag = np.diag(R[:, :ell])
    sup = np.array([R[k, k + 1] for k in range(ell)])
    a = sup / diag
    a[1:] -= sup[:-1] / diag[:-1]
    b = np.empty(ell)
    b[0] = m[0]
    b[1:] = (diag[1:] / diag[:-1]) ** 2
    return Recurrence(a, b)


def minimal_nodes(strength: int) -> int:
    """Fewest nodes of a rule of this strength for a nondegenerate measure."""
    if strength < 0:
        raise ValueError("strength must be >= 0")
    return strength // 2 + 1


def rule_from_recurrence(rec: Recurrence, strength: int, provenance="gauss") -> QuadratureRule:
    if rec.length == 1:
        nodes, vecs = rec.a.copy(), np.ones((1, 1))
    else:
        nodes, vecs = eigh_tridiagonal(rec.a, np.sqrt(rec.b[1:]))
    weights = rec.b[0] * vecs[0, :] ** 2
    return QuadratureRule(nodes[:, None], weights, strength, provenance, parameter_values=nodes)


def gauss_rule(m, strength: int, recover: bool = False) -> QuadratureRule:
    """Gaussian rule with ``minimal_nodes(strength)`` nodes from raw moments.

    Parameters
    ----------
    m : MomentVector or array_like
        Univariate moments ``m_0, m_1, ...`` up to degree ``2*ceil((strength+1)/2) - 1``.
    strength : int
        Polynomial degree to integrate exactly. Even strengths are served by
        the rule of the next odd strength.
    recover : bool
        If the measure turns out to have fewer support points than nodes
        requested, return its exact atomic decomposition instead of raising.
    """
    seq = _as_sequence(m)
    ell = minimal_nodes(strength)
    try:
        rec = recurrence_from_moments(seq, ell)
    except DegenerateMeasure as exc:
        if not recover or exc.depth == 0:
            raise
        rec = recurrence_from_moments(seq, exc.depth)
        rule = rule_from_recurrence(rec, strength)
        rule.meta["degenerate_depth"] = exc.depth
        return rule
    return rule_from_recurrence(rec, strength)


def affine_frame(nu: MeasureSpec):
    """Center and half-width used to condition the Hankel problem for ``nu``."""
    if nu.kind == "density":
        a, b = nu.integration_interval()
        if nu.name == "gaussian":
            mu, sd = nu.params.get("mean", 0.0), nu.params.get("std", 1.0)
            lo, hi = max(a, mu - 3 * sd), min(b, mu + 3 * sd)
            return 0.5 * (lo + hi), 0.5 * (hi - lo)
        return 0.5 * (a + b), 0.5 * (b - a)
    if nu.kind == "atoms":
        t = nu.locations
        lo, hi = float(t.min()), float(t.max())
        half = 0.5 * (hi - lo)
        return 0.5 * (lo + hi), half if half > 0 else 1.0
    return 0.0, 1.0


def shifted_measure(nu: MeasureSpec, center: float, half: float) -> MeasureSpec:
    """Image of ``nu`` under ``t -> (t - center) / half``."""
    if nu.kind == "atoms":
        return MeasureSpec.atoms((nu.locations - center) / half, nu.weights)
    if nu.kind == "density":
        a, b = nu.support
        sup = ((a - center) / half, (b - center) / half)
        if nu.name == "uniform":
            return MeasureSpec.uniform(*sup)
        if nu.name == "gaussian":
            mu, sd = nu.params.get("mean", 0.0), nu.params.get("std", 1.0)
            return MeasureSpec.gaussian((mu - center) / half, sd / half, sup)
        grid = (nu.params["grid"] - center) / half
        return MeasureSpec.tabulated(grid, nu.params["values"] * half)
    return nu


def gauss_rule_for_measure(nu: MeasureSpec, strength: int, recover: bool = True) -> QuadratureRule:
    """Gaussian rule on the parameter line for a measure spec.

    Moments are taken in the affine frame where the support is roughly
    ``[-1, 1]``, which keeps the Hankel factorization well conditioned;
    nodes are mapped back afterwards.
    """
    if nu.kind == "raw":
        return gauss_rule(nu.raw, strength, recover)
    center, half = affine_frame(nu)
    shifted = shifted_measure(nu, center, half)
    ell = minimal_nodes(strength)
    seq = parameter_moments(shifted, 2 * ell - 1)
    if nu.kind == "density" and nu.name == "uniform":
        seq = seq * half  # dt = half * du
    rule = gauss_rule(seq, strength, recover)
    t = center + half * rule.parameter_values
    return QuadratureRule(t[:, None], rule.weights, strength, "gauss", parameter_values=t, meta=dict(rule.meta))
