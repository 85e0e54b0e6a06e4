"""Curve descriptions and the linear algebra of the restriction map.

A :class:`RationalCurve` is ``t -> (phi_1/phi_0, ..., phi_n/phi_0)``; the
polynomial case has constant ``phi_0``. A :class:`PlaneCurve` is the zero
set of a bivariate polynomial ``F``.

The restriction map ``psi_s`` sends ``p`` in ``R[x_1..x_n]_{<=s}`` to
``p o phi`` in ``R[t]_{<=Ds}``; its rank controls whether quadrature rules
can be moved between the curve and the parameter line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, NotPolynomialParametrization
from .polycore import (
    MultivariatePolynomial,
    Polynomial,
    _power_table,
    monomial_exponents,
    real_roots,
)

RANK_TOL = 1e-8


def numerical_rank(A, rel_tol=RANK_TOL) -> int:
    s = np.linalg.svd(np.atleast_2d(A), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


@dataclass(frozen=True, eq=False)
class RationalCurve:
    """Parametrized curve ``t -> (phi_i(t) / phi_0(t))_{i=1..n}``."""

    phi0: Polynomial
    phi: tuple

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))
        if not self.phi:
            raise ValueError("a curve needs at least one coordinate")
        if self.phi0.is_zero:
            raise ValueError("phi0 must be nonzero")

    @classmethod
    def polynomial(cls, *phi):
        """Polynomial parametrization from coefficient lists or Polynomials."""
        return cls(Polynomial([1.0]), tuple(p if isinstance(p, Polynomial) else Polynomial(p) for p in phi))

    @classmethod
    def monomial(cls, *degrees):
        """The curve ``(t**d_1, ..., t**d_n)``."""
        return cls.polynomial(*(Polynomial.monomial(d) for d in degrees))

    @classmethod
    def line(cls):
        return cls.monomial(1)

    @classmethod
    def random_generic(cls, n, D, rng):
        """Random polynomial curve with every coordinate of exact degree ``D``."""
        phi = []
        for _ in range(n):
            c = rng.uniform(-1.0, 1.0, D + 1)
            c[-1] = np.sign(c[-1]) * (0.5 + abs(c[-1]))
            phi.append(Polynomial(c))
        return cls(Polynomial([1.0]), tuple(phi))

    @property
    def n(self) -> int:
        return len(self.phi)

    @property
    def degrees(self):
        return tuple(p.degree for p in self.phi)

    @property
    def D(self) -> int:
        return max(self.degrees)

    @property
    def degree(self) -> int:
        return max(self.D, self.phi0.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.phi0.degree == 0

    @property
    def Z(self):
        """Distinct real zeros of ``phi0``."""
        if self.is_polynomial:
            return ()
        return tuple(r + 0.0 for r, _ in real_roots(self.phi0))  # no signed zeros

    @property
    def p_real_zeros(self) -> int:
        return len(self.Z)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        den = self.phi0(t)
        return np.stack([np.asarray(p(t)) / den for p in self.phi], axis=-1)

    def derivative(self, t):
        """Tangent vectors ``d/dt (phi_i/phi_0)``."""
        t = np.asarray(t, dtype=float)
        f0, df0 = self.phi0(t), self.phi0.deriv()(t)
        cols = [(p.deriv()(t) * f0 - p(t) * df0) / f0**2 for p in self.phi]
        return np.stack(cols, axis=-1)

    def components(self, t):
        """Connected components of ``R minus Z`` as ``(lo, hi)`` containing each ``t``."""
        cuts = (-np.inf,) + self.Z + (np.inf,)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.searchsorted(np.asarray(cuts), t) - 1
        return [(cuts[i], cuts[i + 1]) for i in idx]

    def to_json(self):
        return {
            "kind": "rational",
            "phi0": self.phi0.to_json(),
            "phi": [p.to_json() for p in self.phi],
        }

    @classmethod
    def from_json(cls, data):
        return cls(Polynomial(data.get("phi0", [1.0])), tuple(Polynomial(p) for p in data["phi"]))


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Zero set of ``F(x, y)``.

    ``t_override`` replaces the computed number of real places at infinity,
    for curves whose leading form directions do not match their places.
    """

    F: MultivariatePolynomial
    t_override: Optional[int] = None
    smooth_claimed: bool = False
    label: str = field(default="")

    def __post_init__(self):
        if self.F.nvars != 2:
            raise ValueError("plane curves need a bivariate F")
        if self.F.is_zero or self.F.degree < 1:
            raise ValueError("F must have degree >= 1")

    @classmethod
    def circle(cls, r=1.0):
        return cls(MultivariatePolynomial(2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): -r * r}), label="circle")

    @classmethod
    def hyperbola(cls):
        return cls(MultivariatePolynomial(2, {(1, 1): 1.0, (0, 0): -1.0}), label="hyperbola")

    @classmethod
    def parabola(cls):
        return cls(MultivariatePolynomial(2, {(0, 1): 1.0, (2, 0): -1.0}), label="parabola")

    @property
    def d(self) -> int:
        return self.F.degree

    @property
    def t_places(self) -> int:
        if self.t_override is not None:
            return int(self.t_override)
        return places_at_infinity(self)

    @property
    def is_compact_candidate(self) -> bool:
        return self.t_places == 0

    def __call__(self, points):
        return self.F(points)

    def to_json(self):
        out = {"kind": "plane", "F": self.F.to_json()}
        if self.t_override is not None:
            out["places_at_infinity"] = int(self.t_override)
        return out

    @classmethod
    def from_json(cls, data):
        return cls(
            MultivariatePolynomial.from_json(data["F"], nvars=2),
            t_override=data.get("places_at_infinity"),
        )


def curve_from_json(data):
    kind = data.get("kind", "rational")
    if kind == "rational":
        return RationalCurve.from_json(data)
    if kind == "plane":
        return PlaneCurve.from_json(data)
    raise ValueError(f"unknown curve kind {kind!r}")


# ---------------------------------------------------------------------------
# restriction map


def psi_matrix(curve: RationalCurve, s: int) -> np.ndarray:
    """Matrix of ``p -> p o phi`` in monomial bases.

    Rows are ``t**0 .. t**(D*s)``; columns follow
    ``monomial_exponents(n, s)``.
    """
    if not curve.is_polynomial:
        raise NotPolynomialParametrization("psi is only defined for constant phi0")
    c0 = curve.phi0.coeffs[0]
    phi = [p / c0 for p in curve.phi]
    table = _power_table(phi, s)
    exps = monomial_exponents(curve.n, s)
    rows = curve.D * s + 1
    A = np.zeros((rows, len(exps)))
    for j, alpha in enumerate(exps):
        col = Polynomial([1.0])
        for i, a in enumerate(alpha):
            if a:
                col = col * table[i][a]
        A[: len(col.coeffs), j] = col.coeffs
    return A


class PsiRank(NamedTuple):
    rank: int
    surjective: bool
    kernel_dim: int


def psi_rank(curve: RationalCurve, s: int, rel_tol: float = RANK_TOL) -> PsiRank:
    """Numerical rank of ``psi_s``; surjective iff rank equals ``D*s + 1``."""
    A = psi_matrix(curve, s)
    r = numerical_rank(A, rel_tol)
    return PsiRank(r, r == A.shape[0], A.shape[1] - r)


def exponent_coverage(d: int, s: int):
    """Exponents ``a + b(d-1) + c d`` with ``a + b + c <= s``.

    Returns ``(covered, complete)`` where complete means every integer in
    ``[0, d*s]`` is hit.
    """
    if d < 1 or s < 0:
        raise DomainError("need d >= 1 and s >= 0")
    covered = {
        a + b * (d - 1) + c * d
        for b in range(s + 1)
        for c in range(s + 1 - b)
        for a in range(s + 1 - b - c)
    }
    return covered, covered >= set(range(d * s + 1))


def image_dimension_xd(d: int, s: int):
    """Rank of ``psi_s`` for the curve ``(t, t**d)``.

    Returns the closed form ``d*s - d(d-3)/2`` together with the exponent set
    ``{a + b d : a + b <= s}`` it should count.
    """
    if d < 1 or s < d:
        raise DomainError(f"formula needs s >= d >= 1, got d={d}, s={s}")
    dim = d * s - d * (d - 3) // 2
    exps = {a + b * d for b in range(s + 1) for a in range(s + 1 - b)}
    return dim, exps


def image_dimension_binomial(d: int, s: int) -> int:
    return comb(s + 2, 2) - comb(s - d + 2, 2)


def places_at_infinity(c: PlaneCurve) -> int:
    """Number of real directions killing the leading form of ``F``."""
    Fd = c.F.leading_form()
    d = c.F.degree
    # F_d(1, m) = sum_b c_{d-b, b} m**b
    coeffs = np.zeros(d + 1)
    for (a, b), v in Fd.terms.items():
        coeffs[b] += v
    count = len(real_roots(Polynomial(coeffs))) if np.any(coeffs[1:]) else 0
    if Fd.terms.get((0, d), 0.0) == 0.0:
        count += 1
    return count


# ---------------------------------------------------------------------------
# plane-curve point sampling and projection


def plane_curve_points(c: PlaneCurve, radius: float, n_lines: int = 64) -> np.ndarray:
    """Sample real points of ``F = 0`` inside the disk of given radius.

    Points come from intersecting the curve with vertical and horizontal
    lines, so every real branch crossing the disk is hit.
    """
    pts = []
    grid = np.linspace(-radius, radius, n_lines)
    for axis in (0, 1):
        for g in grid:
            coeffs = np.zeros(c.d + 1)
            for (a, b), v in c.F.terms.items():
                if axis == 0:
                    coeffs[b] += v * g**a
                else:
                    coeffs[a] += v * g**b
            poly = Polynomial(coeffs)
            if poly.is_zero or poly.degree == 0:
                continue
            for r, _ in real_roots(poly):
                pt = (g, r) if axis == 0 else (r, g)
                if pt[0] ** 2 + pt[1] ** 2 <= radius**2:
                    pts.append(pt)
    pts = np.array(pts).reshape(-1, 2)
    return project_to_curve(c, pts)


def project_to_curve(c: PlaneCurve, pts, iters: int = 8) -> np.ndarray:
    """Newton projection along the gradient onto ``F = 0``."""
    P = np.array(pts, dtype=float).reshape(-1, 2)
    for _ in range(iters):
        f = c.F(P)
        g = c.F.gradient(P)
        nrm = np.sum(g**2, axis=1)
        ok = nrm > 1e-300
        P[ok] -= (f[ok] / nrm[ok])[:, None] * g[ok]
    return P


def nearest_curve_point(c: PlaneCurve, target=(0.0, 0.0), radius: float = 10.0) -> np.ndarray:
    """Curve point closest to ``target`` found by sampling then projection."""
    target = np.asarray(target, dtype=float)
    if abs(c.F(target)) <= 1e-12:
        return target.copy()
    pts = plane_curve_points(c, radius + float(np.hypot(*target)), n_lines=201)
    if len(pts) == 0:
        raise DomainError("no real curve points found in the search disk")
    best = pts[np.argmin(np.sum((pts - target) ** 2, axis=1))]
    # refine on the curve: tangent moves then projection, halved until closer
    dist = float(np.sum((best - target) ** 2))
    for _ in range(100):
        g = c.F.gradient(best[None, :])[0]
        tang = np.array([-g[1], g[0]]) / (np.hypot(*g) or 1.0)
        step = np.dot(target - best, tang)
        while abs(step) > 1e-15:
            cand = project_to_curve(c, best + tang * step)[0]
            d = float(np.sum((cand - target) ** 2))
            if d < dist:
                break
            step *= 0.5
        else:
            break
        best, dist = cand, d
    return best
