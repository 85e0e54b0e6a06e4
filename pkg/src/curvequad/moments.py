"""Truncated moments of measures pushed onto curves, moment matrices, degeneracy."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .curves import RANK_TOL, RationalCurve, psi_matrix
from .errors import InsufficientDegree, PoleInSupport
from .integrate import adaptive_integrate
from .polycore import MultivariatePolynomial, monomial_exponents, monomial_values

POLE_MARGIN = 1e-6
GAUSSIAN_TAIL = 40.0


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Moments ``m_alpha`` for every ``|alpha| <= max_degree``."""

    nvars: int
    max_degree: int
    values: dict

    def __post_init__(self):
        vals = {tuple(int(a) for a in k): float(v) for k, v in self.values.items()}
        missing = [a for a in monomial_exponents(self.nvars, self.max_degree) if a not in vals]
        if missing:
            raise ValueError(f"moment vector incomplete, missing {missing[:3]}...")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_array(cls, nvars, max_degree, array):
        exps = monomial_exponents(nvars, max_degree)
        return cls(nvars, max_degree, dict(zip(exps, np.asarray(array, dtype=float))))

    @classmethod
    def univariate(cls, seq):
        seq = np.asarray(seq, dtype=float)
        return cls(1, len(seq) - 1, {(k,): v for k, v in enumerate(seq)})

    def __getitem__(self, alpha):
        if isinstance(alpha, (int, np.integer)):
            alpha = (int(alpha),)
        return self.values[tuple(alpha)]

    @property
    def mass(self) -> float:
        return self.values[(0,) * self.nvars]

    def exponents(self, max_degree=None, min_degree=0):
        top = self.max_degree if max_degree is None else max_degree
        return monomial_exponents(self.nvars, top, min_degree)

    def as_array(self, max_degree=None, min_degree=0) -> np.ndarray:
        return np.array([self.values[a] for a in self.exponents(max_degree, min_degree)])

    def truncate(self, max_degree) -> "MomentVector":
        if max_degree > self.max_degree:
            raise InsufficientDegree(f"have degree {self.max_degree}, asked {max_degree}")
        exps = monomial_exponents(self.nvars, max_degree)
        return MomentVector(self.nvars, max_degree, {a: self.values[a] for a in exps})

    def to_json(self):
        return {
            "kind": "raw",
            "nvars": self.nvars,
            "max_degree": self.max_degree,
            "values": {str(tuple(a)).replace(" ", ""): v for a, v in self.values.items()},
        }

    @classmethod
    def from_json(cls, data):
        vals = {}
        for k, v in data["values"].items():
            key = tuple(int(x) for x in k.strip("()[] ").split(",") if x.strip())
            vals[key] = v
        return cls(int(data["nvars"]), int(data["max_degree"]), vals)


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    """A measure on the parameter line (or atoms in R^n).

    ``kind`` is ``"atoms"``, ``"density"`` or ``"raw"``. Densities are
    ``uniform``, ``gaussian`` (``mean``, ``std``, restricted to ``support``)
    or ``tabulated`` (piecewise-linear through ``grid``/``values``).
    """

    kind: str
    locations: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    name: Optional[str] = None
    support: Optional[tuple] = None
    params: dict = field(default_factory=dict)
    raw: Optional[MomentVector] = None

    def __post_init__(self):
        if self.kind == "atoms":
            loc = np.asarray(self.locations, dtype=float)
            w = np.asarray(self.weights, dtype=float).ravel()
            if loc.shape[0] != w.shape[0]:
                raise ValueError("atoms and weights differ in length")
            if np.any(w <= 0):
                raise ValueError("atom weights must be strictly positive")
            object.__setattr__(self, "locations", loc)
            object.__setattr__(self, "weights", w)
        elif self.kind == "density":
            if self.name not in ("uniform", "gaussian", "tabulated"):
                raise ValueError(f"unknown density {self.name!r}")
            a, b = (float(x) for x in self.support)
            if not a < b:
                raise ValueError("density support needs a < b")
            if self.name != "gaussian" and not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError(f"{self.name} density needs a finite support")
            object.__setattr__(self, "support", (a, b))
        elif self.kind == "raw":
            if self.raw is None:
                raise ValueError("raw measure needs a MomentVector")
            _warn_if_not_psd(self.raw)
        else:
            raise ValueError(f"unknown measure kind {self.kind!r}")

    @classmethod
    def atoms(cls, locations, weights):
        return cls("atoms", locations=locations, weights=weights)

    @classmethod
    def uniform(cls, a, b):
        return cls("density", name="uniform", support=(a, b))

    @classmethod
    def gaussian(cls, mean=0.0, std=1.0, support=(-np.inf, np.inf)):
        return cls("density", name="gaussian", support=support, params={"mean": mean, "std": std})

    @classmethod
    def tabulated(cls, grid, values):
        grid = np.asarray(grid, dtype=float)
        return cls(
            "density",
            name="tabulated",
            support=(grid[0], grid[-1]),
            params={"grid": grid, "values": np.asarray(values, dtype=float)},
        )

    @classmethod
    def from_moments(cls, m: MomentVector):
        return cls("raw", raw=m)

    @property
    def is_parameter_measure(self) -> bool:
        return self.kind == "density" or (self.kind == "atoms" and self.locations.ndim == 1)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "uniform":
            return np.ones_like(t)
        if self.name == "gaussian":
            mu, sd = self.params.get("mean", 0.0), self.params.get("std", 1.0)
            return np.exp(-0.5 * ((t - mu) / sd) ** 2) / (sd * np.sqrt(2 * np.pi))
        return np.interp(t, self.params["grid"], self.params["values"])

    def integration_interval(self):
        a, b = self.support
        if self.name == "gaussian":
            mu, sd = self.params.get("mean", 0.0), self.params.get("std", 1.0)
            a = max(a, mu - GAUSSIAN_TAIL * sd)
            b = min(b, mu + GAUSSIAN_TAIL * sd)
        return a, b

    def breakpoints(self):
        a, b = self.integration_interval()
        if self.name == "tabulated":
            return np.asarray(self.params["grid"], dtype=float)
        if self.name == "gaussian":
            mu, sd = self.params.get("mean", 0.0), self.params.get("std", 1.0)
            inner = mu + sd * np.arange(-8.0, 9.0)
            return np.unique(np.concatenate([[a, b], inner[(inner > a) & (inner < b)]]))
        return np.array([a, b])

    def to_json(self):
        if self.kind == "atoms":
            loc = self.locations
            if loc.ndim == 1:
                atoms = [{"t": float(t), "w": float(w)} for t, w in zip(loc, self.weights)]
            else:
                atoms = [{"x": [float(v) for v in p], "w": float(w)} for p, w in zip(loc, self.weights)]
            return {"kind": "atoms", "atoms": atoms}
        if self.kind == "density":
            out = {"kind": "density", "name": self.name, "support": list(self.support)}
            for k, v in self.params.items():
                out[k] = v.tolist() if isinstance(v, np.ndarray) else v
            return out
        return self.raw.to_json()

    @classmethod
    def from_json(cls, data):
        kind = data["kind"]
        if kind == "atoms":
            atoms = data["atoms"]
            if "t" in atoms[0]:
                loc = [a["t"] for a in atoms]
            else:
                loc = [a["x"] for a in atoms]
            return cls.atoms(loc, [a["w"] for a in atoms])
        if kind == "density":
            name = data["name"]
            if name == "tabulated":
                return cls.tabulated(data["grid"], data["values"])
            sup = tuple(float(x) for x in data.get("support", (-np.inf, np.inf)))
            if name == "gaussian":
                return cls.gaussian(data.get("mean", 0.0), data.get("std", 1.0), sup)
            return cls("density", name=name, support=sup)
        if kind == "raw":
            return cls.from_moments(MomentVector.from_json(data))
        raise ValueError(f"unknown measure kind {kind!r}")


def _warn_if_not_psd(m: MomentVector):
    k = m.max_degree // 2
    M = moment_matrix(m, k).entries
    lam = np.linalg.eigvalsh(M)
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    if lam.size and lam[0] < -1e-10 * scale:
        warnings.warn(
            f"raw moments give an indefinite moment matrix (min eigenvalue {lam[0]:.3e})",
            stacklevel=3,
        )


# ---------------------------------------------------------------------------


def _check_poles(curve: RationalCurve, lo, hi, margin):
    for z in curve.Z:
        if lo - margin <= z <= hi + margin:
            raise PoleInSupport(f"phi0 vanishes at t={z:.6g}, inside [{lo:.6g}, {hi:.6g}] +- {margin}")


def curve_moments(
    nu: MeasureSpec,
    curve: Optional[RationalCurve],
    max_degree: int,
    *,
    atol: float = 1e-12,
    pole_margin: float = POLE_MARGIN,
) -> MomentVector:
    """Moments of the pushforward of ``nu`` along ``curve``.

    ``m_alpha = int prod_i (phi_i/phi_0)(t)**alpha_i d nu(t)``. Atoms are
    summed exactly; densities are integrated adaptively to ``atol`` per
    moment (relative ``1e-14`` for large moments). ``curve=None`` means the
    parameter line itself.
    """
    curve = curve or RationalCurve.line()
    exps = monomial_exponents(curve.n, max_degree)
    if nu.kind == "raw":
        if nu.raw.nvars != curve.n:
            raise ValueError("raw moments have the wrong number of variables")
        return nu.raw.truncate(max_degree)
    if nu.kind == "atoms":
        if nu.locations.ndim != 1:
            return atom_moments(nu.locations, nu.weights, max_degree)
        t = nu.locations
        for z in curve.Z:
            if np.any(np.abs(t - z) <= pole_margin):
                raise PoleInSupport(f"atom at a zero of phi0 (t={z:.6g})")
        V = monomial_values(curve(t), exps)
        return MomentVector.from_array(curve.n, max_degree, nu.weights @ V)

    lo, hi = nu.integration_interval()
    _check_poles(curve, lo, hi, pole_margin)

    def integrand(t):
        return monomial_values(curve(t), exps) * nu.density(t)[:, None]

    cuts = nu.breakpoints()
    total = np.zeros(len(exps))
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = adaptive_integrate(integrand, a, b, atol=atol / (len(cuts) - 1))
        total += val
    return MomentVector.from_array(curve.n, max_degree, total)


def atom_moments(points, weights, max_degree: int) -> MomentVector:
    """Moments of ``sum_i w_i delta_{x_i}`` for points in R^n (or R)."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    exps = monomial_exponents(X.shape[1], max_degree)
    vals = np.asarray(weights, dtype=float) @ monomial_values(X, exps)
    return MomentVector.from_array(X.shape[1], max_degree, vals)


def parameter_moments(nu: MeasureSpec, max_degree: int) -> np.ndarray:
    """Moments ``int t**k d nu`` for ``k <= max_degree`` as a plain array."""
    return curve_moments(nu, None, max_degree).as_array()


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    k: int
    basis: tuple
    entries: np.ndarray

    @property
    def nvars(self) -> int:
        return len(self.basis[0])


def moment_matrix(m: MomentVector, k: int) -> MomentMatrix:
    """``M_k[beta, gamma] = m_{beta+gamma}`` over the graded-lex basis of degree ``<= k``."""
    if 2 * k > m.max_degree:
        raise InsufficientDegree(f"M_{k} needs moments to degree {2 * k}, have {m.max_degree}")
    basis = monomial_exponents(m.nvars, k)
    n = len(basis)
    M = np.empty((n, n))
    for i, b in enumerate(basis):
        for j in range(i, n):
            c = basis[j]
            M[i, j] = M[j, i] = m.values[tuple(x + y for x, y in zip(b, c))]
    return MomentMatrix(k, basis, M)


class Degeneracy(NamedTuple):
    rank: int
    kernel: list


def degeneracy_test(M: MomentMatrix, rel_tol: float = RANK_TOL) -> Degeneracy:
    """Numerical rank of ``M`` and a basis of polynomials spanning its kernel.

    Singular values below ``rel_tol`` times the largest count as zero. Each
    kernel polynomial is normalized to unit coefficient 2-norm.
    """
    A = M.entries
    if A.size == 0:
        return Degeneracy(0, [])
    lam, vec = np.linalg.eigh(0.5 * (A + A.T))
    sv = np.abs(lam)
    top = sv.max()
    if top == 0.0:
        null = np.arange(len(lam))
    else:
        null = np.nonzero(sv <= rel_tol * top)[0]
    kernel = [MultivariatePolynomial.from_vector(vec[:, j], M.basis) for j in null]
    return Degeneracy(len(lam) - len(null), kernel)


def is_degenerate(M: MomentMatrix, rel_tol: float = RANK_TOL) -> bool:
    return degeneracy_test(M, rel_tol).rank < len(M.basis)


def curve_degeneracy(M: MomentMatrix, curve: RationalCurve, rel_tol: float = RANK_TOL):
    """Degeneracy of a curve measure modulo polynomials vanishing on the curve.

    Polynomials in the kernel of ``psi_k`` vanish on the whole curve, so
    ``M_k`` of any curve measure is singular whenever ``psi_k`` has a kernel.
    The meaningful test compares ``rank M_k`` with ``rank psi_k``, the
    dimension of the degree-``k`` part of the coordinate ring.

    The rank is measured on the coordinate ring in the coordinates that
    ``psi_k`` induces from the parameter line: with ``psi_k = U S V^T``
    the compressed matrix is ``S^-1 V^T M_k V S^-1``. This drops the kernel
    of ``psi_k`` and removes the scaling of the monomial basis, so the
    threshold sees the same conditioning as the parameter-side Hankel.

    Returns ``(degenerate, rank, coordinate_ring_dim)``.
    """
    A = psi_matrix(curve, M.k)
    _, sv, vt = np.linalg.svd(A)
    if sv.size == 0 or sv[0] == 0.0:
        return False, 0, 0
    dim = int(np.count_nonzero(sv > rel_tol * sv[0]))
    B = vt[:dim].T / sv[:dim]
    C = B.T @ (0.5 * (M.entries + M.entries.T)) @ B
    ev = np.abs(np.linalg.eigvalsh(0.5 * (C + C.T)))
    top = ev.max()
    r = int(np.count_nonzero(ev > rel_tol * top)) if top > 0 else 0
    return r < dim, r, dim
