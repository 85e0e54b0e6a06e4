"""Closed-form node-count bounds, all in exact integer arithmetic.

Every bound is expressed through the *strength* of the rule. Odd strength
``2s - 1`` and even strength ``2l`` formulas read their half-parameter off
the strength, so ``rational_odd_bound(D=1, p=0, strength=2s-1) == s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

from .errors import HypothesisViolated

SETTINGS = (
    "plane",
    "plane-compact",
    "rational-odd",
    "rational-even",
    "xd-curve",
    "line",
    "caratheodory",
    "rs-baseline",
    "zalar-baseline",
)

SOURCES = {
    "plane": "smooth plane curve, t places at infinity: N <= ds - ceil(d/2) + 1 + 2t",
    "plane-compact": "compact plane curve: N <= ds - ceil(d/2) + 1",
    "rational-odd": "rational curve, odd strength: N <= Ds - ceil(D/2) + p + 1",
    "rational-even": "rational curve, even strength 2s: N <= Ds + p + 1",
    "xd-curve": "Curve y = x^d, s >= d: N <= ceil((ds-1)/2 - d(d-3)/4) + 1",
    "line": "Gaussian quadrature on the line: ceil((strength+1)/2) nodes",
    "caratheodory": "Caratheodory: binom(n+s, s) nodes",
    "rs-baseline": "earlier plane-curve baseline: at most ds nodes for strength 2s-1 on a degree-d curve",
    "zalar-baseline": "Zalar: N <= ds - ceil(d/2) for y = q(x), deg q = d, strength 2s-1",
    "lower": "Curve-to-line lower bound: ds - ceil(d/2) + 1 (strength 2s-1), dl + 1 (strength 2l)",
}


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _half_odd(strength: int) -> int:
    if strength % 2 != 1:
        raise HypothesisViolated(f"formula needs odd strength, got {strength}")
    return (strength + 1) // 2


def _half_even(strength: int) -> int:
    if strength % 2 != 0:
        raise HypothesisViolated(f"formula needs even strength, got {strength}")
    return strength // 2


@dataclass(frozen=True)
class BoundReport:
    setting: str
    kind: str  # "upper" | "lower"
    value: Optional[int]
    strength: int
    params: dict = field(default_factory=dict)
    source: str = ""
    applicable: bool = True
    reason: str = ""
    advisory: bool = False

    def to_json(self):
        return {
            "setting": self.setting,
            "kind": self.kind,
            "value": self.value,
            "strength": self.strength,
            "params": dict(self.params),
            "source": self.source,
            "applicable": self.applicable,
            "reason": self.reason,
            "advisory": self.advisory,
        }


# --- individual formulas ----------------------------------------------------


def plane_bound(d: int, strength: int, t: int) -> int:
    s = _half_odd(strength)
    return d * s - ceil_div(d, 2) + 1 + 2 * t


def plane_compact_bound(d: int, strength: int) -> int:
    return plane_bound(d, strength, 0)


def rational_odd_bound(D: int, strength: int, p: int = 0) -> int:
    s = _half_odd(strength)
    return D * s - ceil_div(D, 2) + p + 1


def rational_even_bound(D: int, strength: int, p: int = 0) -> int:
    s = _half_even(strength)
    return D * s + p + 1


def xd_curve_bound(d: int, strength: int) -> int:
    """Bound for ``y = x**d``; here ``strength`` plays the role of ``s``."""
    s = strength
    if s < d:
        raise HypothesisViolated(f"y = x^d bound needs s >= d, got s={s}, d={d}")
    # ceil((ds-1)/2 - d(d-3)/4) = ceil((2(ds-1) - d(d-3)) / 4)
    return ceil_div(2 * (d * s - 1) - d * (d - 3), 4) + 1


def line_bound(strength: int) -> int:
    return strength // 2 + 1


def caratheodory_bound(n: int, strength: int) -> int:
    return comb(n + strength, strength)


def rs_baseline(d: int, strength: int) -> int:
    return d * _half_odd(strength)


def zalar_baseline(d: int, strength: int) -> int:
    return d * _half_odd(strength) - ceil_div(d, 2)


# --- reports ------------------------------------------------------------------


def _report(setting, fn, strength, params, **kw):
    try:
        value = fn()
    except HypothesisViolated as exc:
        return BoundReport(setting, "upper", None, strength, params, SOURCES[setting], False, str(exc))
    return BoundReport(setting, "upper", value, strength, params, SOURCES[setting], **kw)


def upper_bounds(
    curve: str,
    strength: int,
    *,
    d: Optional[int] = None,
    t: Optional[int] = None,
    p: int = 0,
    n: Optional[int] = None,
) -> list:
    """All upper bounds for a curve family.

    Parameters
    ----------
    curve : {"plane", "rational", "xd", "line"}
        ``"plane"`` is a plane curve of degree ``d`` with ``t`` places at
        infinity, ``"rational"`` a rational curve with ``D = d`` and ``p``
        real poles in ``R^n``, ``"xd"`` the curve ``y = x**d``.
    strength : int
        Rule strength. Odd-only and even-only formulas come back with
        ``applicable=False`` and a reason instead of being dropped.
    """
    rows = []
    if curve == "line":
        rows.append(_report("line", lambda: line_bound(strength), strength, {}))
        rows.append(_report("rational-odd", lambda: rational_odd_bound(1, strength, 0), strength, {"D": 1, "p": 0}))
        rows.append(_report("rational-even", lambda: rational_even_bound(1, strength, 0), strength, {"D": 1, "p": 0}))
        rows.append(_report("caratheodory", lambda: caratheodory_bound(1, strength), strength, {"n": 1}))
        return rows
    if d is None:
        raise ValueError("curve degree d is required")
    if curve == "plane":
        tt = 0 if t is None else t
        note = "the 2t term for places at infinity may be far from tight"
        rows.append(
            _report("plane", lambda: plane_bound(d, strength, tt), strength, {"d": d, "t": tt}, reason=note)
        )
        if tt == 0:
            rows.append(_report("plane-compact", lambda: plane_compact_bound(d, strength), strength, {"d": d}))
        else:
            rows.append(
                BoundReport("plane-compact", "upper", None, strength, {"d": d}, SOURCES["plane-compact"],
                            False, f"curve has t={tt} places at infinity")
            )
        rows.append(_report("rs-baseline", lambda: rs_baseline(d, strength), strength, {"d": d}))
        rows.append(_report("caratheodory", lambda: caratheodory_bound(2, strength), strength, {"n": 2}))
        return rows
    if curve == "rational":
        rows.append(_report("rational-odd", lambda: rational_odd_bound(d, strength, p), strength, {"D": d, "p": p}))
        rows.append(_report("rational-even", lambda: rational_even_bound(d, strength, p), strength, {"D": d, "p": p}))
        if n is not None:
            rows.append(_report("caratheodory", lambda: caratheodory_bound(n, strength), strength, {"n": n}))
        return rows
    if curve == "xd":
        rows.append(_report("zalar-baseline", lambda: zalar_baseline(d, strength), strength, {"d": d}))
        rows.append(_report("rational-odd", lambda: rational_odd_bound(d, strength, 0), strength, {"D": d, "p": 0}))
        rows.append(_report("rational-even", lambda: rational_even_bound(d, strength, 0), strength, {"D": d, "p": 0}))
        rows.append(_report("xd-curve", lambda: xd_curve_bound(d, strength), strength, {"d": d}))
        rows.append(_report("rs-baseline", lambda: rs_baseline(d, strength), strength, {"d": d}))
        rows.append(_report("caratheodory", lambda: caratheodory_bound(2, strength), strength, {"n": 2}))
        return rows
    raise ValueError(f"unknown curve family {curve!r}")


def lower_bound(d: int, strength: int) -> BoundReport:
    """Fewest nodes of a strength-``strength`` rule on a generic degree-``d`` curve.

    Valid for polynomial parametrizations with ``n >= 3`` generic
    coordinates (recorded, not checked) and ``strength >= d``; outside that
    range the report is produced with ``advisory=True``.
    """
    if strength % 2:
        s = (strength + 1) // 2
        value = d * s - ceil_div(d, 2) + 1
    else:
        value = d * (strength // 2) + 1
    assert value == ceil_div(d * strength + 1, 2)
    params = {"d": d, "assumes": "n >= 3, generic polynomial parametrization"}
    setting = "line" if d == 1 else ("rational-odd" if strength % 2 else "rational-even")
    if strength < d:
        return BoundReport(setting, "lower", value, strength, params, SOURCES["lower"],
                           reason=f"strength {strength} < d={d}", advisory=True)
    return BoundReport(setting, "lower", value, strength, params, SOURCES["lower"])


def improvement_over_rs(d: int, t: int) -> int:
    """Gap between the ``ds`` baseline and the plane-curve bound."""
    return ceil_div(d, 2) - 1 - 2 * t


def format_table(rows) -> str:
    """Aligned text table of bound reports."""
    head = ("setting", "kind", "value", "strength", "params", "note")
    body = []
    for r in rows:
        val = "-" if r.value is None else str(r.value)
        params = ",".join(f"{k}={v}" for k, v in r.params.items() if k != "assumes")
        body.append((r.setting, r.kind, val, str(r.strength), params, r.reason))
    widths = [max(len(x[i]) for x in [head] + body) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [head] + body]
    return "\n".join(lines)
