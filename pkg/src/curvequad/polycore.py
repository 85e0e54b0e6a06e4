"""Dense polynomial arithmetic, real root isolation and curve pullbacks.

Univariate polynomials store coefficients in ascending order. Multivariate
polynomials are sparse term maps keyed by exponent tuples. Every routine
that enumerates monomials uses the graded lexicographic order produced by
:func:`monomial_exponents`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, ZeroPolynomial

TRIM_TOL = 1e-12
REAL_TOL = 1e-8


def _trim(coeffs, tol=TRIM_TOL):
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > tol * scale)[0]
    c = c[: keep[-1] + 1].copy()
    c[np.abs(c) <= tol * scale] = 0.0
    return c


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Univariate real polynomial, coefficients ascending in degree."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim(coeffs))
        self.coeffs.flags.writeable = False

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def monomial(cls, k, c=1.0):
        coeffs = np.zeros(k + 1)
        coeffs[k] = c
        return cls(coeffs)

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, t):
        return horner(self.coeffs, t)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return Polynomial(c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.coeffs * float(other))
        other = _as_poly(other)
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Polynomial(self.coeffs / float(c))

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def deriv(self, m: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(m):
            if len(c) == 1:
                return Polynomial([0.0])
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def divmod(self, other: "Polynomial"):
        """Long division ``self = q*other + r`` with ``deg r < deg other``."""
        if other.is_zero:
            raise ZeroPolynomial("division by the zero polynomial")
        num = self.coeffs.astype(float).copy()
        den = other.coeffs
        dn = len(den) - 1
        if len(num) - 1 < dn:
            return Polynomial([0.0]), self
        q = np.zeros(len(num) - dn)
        for k in range(len(num) - 1, dn - 1, -1):
            f = num[k] / den[-1]
            q[k - dn] = f
            num[k - dn : k + 1] -= f * den
        return Polynomial(q), Polynomial(num[:dn] if dn > 0 else [0.0])

    def monic(self) -> "Polynomial":
        return Polynomial(self.coeffs / self.coeffs[-1])

    def to_json(self):
        return [float(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls(list(data))


def _as_poly(x):
    return x if isinstance(x, Polynomial) else Polynomial([float(x)])


def horner(coeffs, t):
    """Evaluate ascending ``coeffs`` at ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, coeffs[-1], dtype=float)
    for c in coeffs[-2::-1]:
        out = out * t + c
    return out if out.ndim else float(out)


def eval(p: Polynomial, t):  # noqa: A001 - mirrors the documented operation name
    return p(t)


def poly_gcd(a: Polynomial, b: Polynomial, tol: float = TRIM_TOL) -> Polynomial:
    """Approximate monic GCD by the Euclidean algorithm.

    Remainders are scaled to unit max-norm before trimming, so ``tol`` acts
    as a relative threshold on each remainder.
    """
    if a.degree < b.degree:
        a, b = b, a
    if b.is_zero:
        return a.monic()
    a = Polynomial(a.coeffs / np.max(np.abs(a.coeffs)))
    b = Polynomial(b.coeffs / np.max(np.abs(b.coeffs)))
    while True:
        _, r = a.divmod(b)
        scale = max(np.max(np.abs(a.coeffs)), np.max(np.abs(b.coeffs)))
        if np.max(np.abs(r.coeffs)) <= 1e3 * tol * scale * max(1, a.degree):
            return b.monic()
        a, b = b, Polynomial(r.coeffs / np.max(np.abs(r.coeffs)))
        if b.degree == 0:
            return Polynomial([1.0])


def squarefree_decomposition(p: Polynomial):
    """Yun's algorithm: return ``[(a_1, 1), (a_2, 2), ...]`` with ``p ~ prod a_i**i``."""
    if p.is_zero:
        raise ZeroPolynomial("zero polynomial has no square-free decomposition")
    if p.degree == 0:
        return []
    dp = p.deriv()
    g = poly_gcd(p, dp)
    c, _ = p.divmod(g)
    d, _ = dp.divmod(g)
    d = d - c.deriv()
    out = []
    i = 1
    while c.degree > 0:
        a = poly_gcd(c, d) if not d.is_zero else c.monic()
        if a.degree > 0:
            out.append((a.monic(), i))
        c, _ = c.divmod(a)
        d, _ = d.divmod(a)
        d = d - c.deriv()
        i += 1
        if i > p.degree + 1:
            break
    return out


def companion_roots(p: Polynomial) -> np.ndarray:
    """All complex roots as eigenvalues of the companion matrix."""
    n = p.degree
    if n == 0:
        return np.zeros(0, dtype=complex)
    c = p.coeffs / p.coeffs[-1]
    C = np.zeros((n, n))
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1]
    return np.linalg.eigvals(C)


def _newton_polish(p: Polynomial, x: float) -> float:
    dp = p.deriv()
    d = dp(x)
    if d == 0.0:
        return x
    step = p(x) / d
    x_new = x - step
    # reject a step that makes things worse, e.g. near a cluster
    return x_new if abs(p(x_new)) <= abs(p(x)) else x


def real_roots(p: Polynomial, tol: float = REAL_TOL):
    """Distinct real roots with multiplicities, sorted ascending.

    Parameters
    ----------
    p : Polynomial
        Nonzero polynomial.
    tol : float
        Realness threshold; an eigenvalue is real if
        ``|imag| <= tol * (1 + |real|)``.

    Returns
    -------
    list of (float, int)
    """
    if p.is_zero:
        raise ZeroPolynomial("real_roots of the zero polynomial")
    out = []
    for factor, mult in squarefree_decomposition(p):
        for z in companion_roots(factor):
            if abs(z.imag) <= tol * (1.0 + abs(z.real)):
                out.append((_newton_polish(factor, float(z.real)), mult))
    out.sort()
    # collapse accidental duplicates produced by inexact factor splits
    merged = []
    for r, m in out:
        if merged and abs(r - merged[-1][0]) <= 1e-7 * (1.0 + abs(r)):
            merged[-1] = (merged[-1][0], merged[-1][1] + m)
        else:
            merged.append((r, m))
    return merged


# ---------------------------------------------------------------------------
# multivariate


@lru_cache(maxsize=None)
def monomial_exponents(nvars: int, max_degree: int, min_degree: int = 0):
    """Exponent tuples of total degree in ``[min_degree, max_degree]``, graded lex.

    Within a degree block tuples are in descending lexicographic order, so
    the basis starts ``1, x1, x2, ..., x1**2, x1*x2, ...``.
    """
    out = []
    for deg in range(min_degree, max_degree + 1):
        block = [
            e
            for e in itertools.product(range(deg, -1, -1), repeat=nvars)
            if sum(e) == deg
        ]
        out.extend(block)
    return tuple(out)


def graded_key(alpha):
    """Sort key realizing the graded lexicographic order."""
    return (sum(alpha), tuple(-a for a in alpha))


def monomial_values(points, exponents) -> np.ndarray:
    """Matrix ``V[i, j] = points[i] ** exponents[j]`` (product over coordinates)."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[1] != len(exponents[0]) and X.shape[0] == len(exponents[0]):
        X = X.T
    E = np.asarray(exponents, dtype=int)
    top = int(E.max()) if E.size else 0
    pw = X[:, :, None] ** np.arange(top + 1)[None, None, :]
    V = np.ones((X.shape[0], len(E)))
    for k in range(X.shape[1]):
        V *= pw[:, k, E[:, k]]
    return V


@dataclass(frozen=True, eq=False)
class MultivariatePolynomial:
    """Sparse real polynomial in ``nvars`` variables."""

    nvars: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be >= 1")
        cleaned = {}
        for alpha, c in self.terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.nvars:
                raise DimensionMismatch(f"exponent {alpha} has length != {self.nvars}")
            cleaned[alpha] = cleaned.get(alpha, 0.0) + float(c)
        scale = max((abs(c) for c in cleaned.values()), default=0.0)
        cleaned = {a: c for a, c in cleaned.items() if abs(c) > TRIM_TOL * scale}
        object.__setattr__(self, "terms", dict(sorted(cleaned.items(), key=lambda kv: graded_key(kv[0]))))

    @classmethod
    def from_vector(cls, coeffs, exponents):
        return cls(len(exponents[0]), dict(zip(exponents, coeffs)))

    @classmethod
    def variable(cls, i, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_vector(self, exponents) -> np.ndarray:
        return np.array([self.terms.get(tuple(a), 0.0) for a in exponents])

    def __call__(self, points):
        X = np.asarray(points, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if not self.terms:
            out = np.zeros(X.shape[0])
        else:
            exps = list(self.terms)
            out = monomial_values(X, exps) @ np.array(list(self.terms.values()))
        return float(out[0]) if single else out

    def __add__(self, other):
        t = dict(self.terms)
        for a, c in other.terms.items():
            t[a] = t.get(a, 0.0) + c
        return MultivariatePolynomial(self.nvars, t)

    def __neg__(self):
        return MultivariatePolynomial(self.nvars, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if np.isscalar(other):
            return MultivariatePolynomial(self.nvars, {a: c * other for a, c in self.terms.items()})
        t = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                t[k] = t.get(k, 0.0) + ca * cb
        return MultivariatePolynomial(self.nvars, t)

    __rmul__ = __mul__

    def partial(self, i: int) -> "MultivariatePolynomial":
        t = {}
        for a, c in self.terms.items():
            if a[i] > 0:
                b = list(a)
                b[i] -= 1
                t[tuple(b)] = c * a[i]
        return MultivariatePolynomial(self.nvars, t)

    def gradient(self, points) -> np.ndarray:
        return np.stack([self.partial(i)(points) for i in range(self.nvars)], axis=-1)

    def homogeneous_part(self, degree: int) -> "MultivariatePolynomial":
        return MultivariatePolynomial(
            self.nvars, {a: c for a, c in self.terms.items() if sum(a) == degree}
        )

    def leading_form(self) -> "MultivariatePolynomial":
        return self.homogeneous_part(self.degree)

    def __repr__(self):
        return f"MultivariatePolynomial({self.nvars}, {self.terms})"

    def to_json(self):
        return [{"exponents": list(a), "coeff": float(c)} for a, c in self.terms.items()]

    @classmethod
    def from_json(cls, data, nvars=None):
        if not data:
            if nvars is None:
                raise ValueError("cannot infer nvars of an empty polynomial")
            return cls(nvars, {})
        nv = len(data[0]["exponents"]) if nvars is None else nvars
        return cls(nv, {tuple(r["exponents"]): r["coeff"] for r in data})


def _power_table(polys, top):
    """``table[i][k] = polys[i] ** k`` for ``k <= top``."""
    table = []
    for p in polys:
        row = [Polynomial([1.0])]
        for _ in range(top):
            row.append(row[-1] * p)
        table.append(row)
    return table


def compose_with_parametrization(p: MultivariatePolynomial, curve):
    """Pull ``p`` back along a rational parametrization.

    Returns ``(N, e)`` with ``p(phi_1/phi_0, ..., phi_n/phi_0) = N / phi_0**e``.
    ``e = deg p`` for a genuine denominator and ``e = 0`` when ``phi_0`` is
    constant.
    """
    phi = list(curve.phi)
    if p.nvars != len(phi):
        raise DimensionMismatch(f"polynomial has {p.nvars} vars, curve has dimension {len(phi)}")
    phi0 = curve.phi0
    if phi0.degree == 0:
        phi = [f / phi0.coeffs[0] for f in phi]
        e = 0
    else:
        e = p.degree
    table = _power_table(phi, p.degree)
    den = _power_table([phi0], e)[0] if e else None
    out = Polynomial([0.0])
    for alpha, c in p.terms.items():
        term = Polynomial([c])
        for i, a in enumerate(alpha):
            if a:
                term = term * table[i][a]
        if e:
            term = term * den[e - sum(alpha)]
        out = out + term
    return out, e
