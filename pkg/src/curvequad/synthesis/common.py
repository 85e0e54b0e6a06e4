"""Configuration and result containers shared by the synthesis routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..gauss import QuadratureRule
from ..polycore import Polynomial


@dataclass
class NLPConfig:
    """Knobs of the penalized node-placement solvers.

    ``disk_radius`` bounds node norms in the plane setting; ``None`` means
    twice the largest node norm of the initial rule.
    """

    max_nodes_init: int = 400
    disk_radius: Optional[float] = None
    pole_margin: float = 1e-3
    merge_tol: float = 1e-6
    weight_drop_tol: float = 1e-10
    max_outer_iters: int = 40
    max_inner_iters: int = 400
    penalty_growth: float = 10.0
    initial_penalty: float = 10.0
    constraint_tol: float = 1e-10
    exactness_tol: float = 1e-9
    seed: int = 20240601
    search_interval: tuple = (-10.0, 10.0)
    reduce_below_target: bool = False
    max_removal_tries: int = 4

    def __post_init__(self):
        if self.merge_tol <= 0:
            raise ValueError("merge_tol must be positive")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must exceed 1")

    @classmethod
    def from_json(cls, data):
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "search_interval" in known:
            known["search_interval"] = tuple(known["search_interval"])
        return cls(**known)

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class IntervalCount:
    """Root bookkeeping of the fitted ``H`` on one interval ``(z_i, z_{i+1})``."""

    lo: float
    hi: float
    minimizer: float
    roots: int
    left_roots: int
    right_roots: int
    candidates: int
    cap: int
    nodes: int
    cap_rule: str


@dataclass
class KKTReport:
    """Stationarity diagnostics of a rule.

    For parametrized curves ``H_values`` are ``|H(t_i)|`` and
    ``gradient_residuals`` are ``|H'(t_i) + h'(t_i)/w_i|`` after scaling
    ``H`` to unit coefficient max-norm. For plane curves
    ``gradient_residuals`` are tangency angles (radians) between ``grad F``
    and ``grad G``.
    """

    setting: str
    lam: np.ndarray
    H_values: np.ndarray
    gradient_residuals: np.ndarray
    H: Optional[Polynomial] = None
    H_denominator_power: int = 0
    node_factor: Optional[Polynomial] = None
    sign_pattern: list = field(default_factory=list)
    sign_consistent: Optional[np.ndarray] = None
    rank_deficient: bool = False
    fit_rank: int = 0
    unknowns: int = 0

    @property
    def max_H(self) -> float:
        return float(np.max(self.H_values)) if len(self.H_values) else 0.0

    @property
    def max_gradient(self) -> float:
        return float(np.max(self.gradient_residuals)) if len(self.gradient_residuals) else 0.0

    def to_json(self):
        return {
            "setting": self.setting,
            "lambda": np.asarray(self.lam).tolist(),
            "H_values": np.asarray(self.H_values).tolist(),
            "gradient_residuals": np.asarray(self.gradient_residuals).tolist(),
            "H": None if self.H is None else self.H.to_json(),
            "H_denominator_power": self.H_denominator_power,
            "sign_pattern": [vars(c) for c in self.sign_pattern],
            "rank_deficient": self.rank_deficient,
            "fit_rank": self.fit_rank,
            "unknowns": self.unknowns,
        }


@dataclass
class SynthesisResult:
    rule: QuadratureRule
    residual: float
    converged: bool
    kkt: Optional[KKTReport] = None
    bound_check: list = field(default_factory=list)
    target_nodes: Optional[int] = None
    target_met: Optional[bool] = None
    fallback: Optional[QuadratureRule] = None
    partial: Optional[QuadratureRule] = None
    messages: list = field(default_factory=list)

    def to_json(self):
        return {
            "rule": self.rule.to_json(),
            "residual": self.residual,
            "converged": self.converged,
            "target_nodes": self.target_nodes,
            "target_met": self.target_met,
            "kkt": None if self.kkt is None else self.kkt.to_json(),
            "bound_check": [
                {"bound": b.to_json(), "achieved": a, "satisfied": s} for b, a, s in self.bound_check
            ],
            "messages": list(self.messages),
        }


def pullback_values(curve, t, exps, derivative=False):
    """``Phi[i, j] = prod_k r_k(t_i)**exps[j][k]`` with ``r_k = phi_k/phi_0``.

    With ``derivative=True`` also returns ``dPhi/dt``.
    """
    t = np.asarray(t, dtype=float)
    R = curve(t)  # (N, n)
    E = np.asarray(exps, dtype=int)
    top = int(E.max()) if E.size else 0
    pw = R[:, :, None] ** np.arange(top + 1)[None, None, :]
    Phi = np.ones((len(t), len(E)))
    for k in range(R.shape[1]):
        Phi *= pw[:, k, E[:, k]]
    if not derivative:
        return Phi
    dR = curve.derivative(t)
    dPhi = np.zeros_like(Phi)
    for k in range(R.shape[1]):
        term = np.ones_like(Phi)
        for j in range(R.shape[1]):
            if j == k:
                ek = np.maximum(E[:, k] - 1, 0)
                term *= E[:, k][None, :] * pw[:, k, ek] * dR[:, k][:, None]
            else:
                term *= pw[:, j, E[:, j]]
        dPhi += term
    return Phi, dPhi


def merge_nodes(points, weights, tol, params=None):
    """Merge nodes closer than ``tol`` (sup-norm) into their weighted mean.

    Distances are measured on ``params`` when given (curve parameters),
    otherwise on ``points``.
    """
    X = np.asarray(points, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    w = np.asarray(weights, dtype=float)
    key = X if params is None else np.asarray(params, dtype=float).reshape(len(w), -1)
    order = np.lexsort(key.T[::-1])
    groups = []
    for i in order:
        for g in groups:
            if np.max(np.abs(key[g[0]] - key[i])) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    P, W, T = [], [], []
    for g in groups:
        wg = w[g]
        tot = wg.sum()
        P.append((wg[:, None] * X[g]).sum(0) / tot if tot > 0 else X[g[0]])
        W.append(tot)
        if params is not None:
            T.append(float(np.dot(wg, key[g, 0]) / tot) if tot > 0 else float(key[g[0], 0]))
    P, W = np.array(P), np.array(W)
    return P, W, (np.array(T) if params is not None else None)
