"""Command-line interface.

Exit status: 0 on success, 1 when a verification fails, 2 on input errors.
Errors go to stderr as one JSON line ``{"error": ..., "type": ..., "file": ...}``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from . import io
from .bounds import format_table, lower_bound, upper_bounds
from .curves import PlaneCurve, exponent_coverage, places_at_infinity, psi_rank
from .errors import CurveQuadError
from .gauss import gauss_rule_for_measure
from .moments import atom_moments, curve_moments
from .synthesis import NLPConfig, SynthesisResult, caratheodory_prune, kkt_analyze, nlp_plane, nlp_rational, pullback_gauss
from .synthesis.prune import parameter_start
from .verify import check_exactness, verify_rule

DEFAULT_SEED = 20240601


@dataclass
class RunConfig:
    exactness_tol: float = 1e-9
    rank_tol: float = 1e-8
    merge_tol: float = 1e-6
    weight_drop_tol: float = 1e-10
    max_outer_iters: int = 40
    max_inner_iters: int = 400
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    csv: Optional[str] = None
    format: str = "json"
    nlp: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("exactness_tol", "rank_tol", "merge_tol", "weight_drop_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.format not in ("json", "csv", "table"):
            raise ValueError(f"unknown output format {self.format!r}")

    @classmethod
    def load(cls, path=None, env=None):
        env = os.environ if env is None else env
        data = io.load_json(path) if path else {}
        known = {f.name for f in fields(cls)}
        cfg = cls(**{k: v for k, v in data.items() if k in known})
        cfg.nlp = {k: v for k, v in data.items() if k not in known}
        if env.get("CURVEQUAD_SEED"):
            cfg.seed = int(env["CURVEQUAD_SEED"])
        return cfg

    def nlp_config(self) -> NLPConfig:
        base = dict(self.nlp)
        base.update(
            merge_tol=self.merge_tol,
            weight_drop_tol=self.weight_drop_tol,
            max_outer_iters=self.max_outer_iters,
            max_inner_iters=self.max_inner_iters,
            exactness_tol=self.exactness_tol,
            seed=self.seed,
        )
        return NLPConfig.from_json(base)


def _emit(obj, args, text=None):
    payload = io.dumps(obj)
    if getattr(args, "out", None):
        Path(args.out).write_text(payload)
    if text is not None:
        print(text)
    elif not getattr(args, "out", None):
        sys.stdout.write(payload)


def _write_csv(rule, args):
    if getattr(args, "csv", None):
        Path(args.csv).write_text(io.rule_csv(rule))


# ---------------------------------------------------------------------------
# subcommands


def cmd_moments(args, cfg):
    curve = io.load_curve(args.curve) if args.curve else None
    nu = io.load_measure(args.measure)
    m = curve_moments(nu, curve, args.degree)
    _emit(m, args)
    return 0


def cmd_gauss(args, cfg):
    nu = io.load_measure(args.measure)
    rule = gauss_rule_for_measure(nu, args.strength, recover=True)
    _emit({"rule": rule, "nodes": rule.size, "meta": rule.meta}, args)
    _write_csv(rule, args)
    return 0


def cmd_psi_rank(args, cfg):
    curve = io.load_curve(args.curve)
    r = psi_rank(curve, args.s, cfg.rank_tol)
    _emit({"s": args.s, "rank": r.rank, "surjective": r.surjective, "kernel_dim": r.kernel_dim,
           "target_dim": curve.D * args.s + 1}, args)
    return 0


def cmd_exponent_coverage(args, cfg):
    covered, complete = exponent_coverage(args.d, args.s)
    _emit({"d": args.d, "s": args.s, "covered": sorted(covered), "count": len(covered),
           "complete": complete}, args)
    return 0


def cmd_places(args, cfg):
    c = io.load_curve(args.curve)
    if not isinstance(c, PlaneCurve):
        raise io.InputError(args.curve, "places-at-infinity needs a plane curve")
    _emit({"places_at_infinity": places_at_infinity(c), "degree": c.d}, args)
    return 0


def cmd_bounds(args, cfg):
    if args.setting == "lower":
        rows = [lower_bound(args.d, args.s)]
    else:
        rows = upper_bounds(args.setting, args.s, d=args.d, t=args.t, p=args.p, n=args.n)
    if args.format == "json":
        _emit([r.to_json() for r in rows], args)
        return 0
    text = format_table(rows)
    if args.setting == "xd":
        val = {r.setting: r.value for r in rows}
        text += (f"\n\n(s,d)=({args.s},{args.d}): zalar {val['zalar-baseline']} | "
                 f"rational {val['rational-odd']} | xd-curve {val['xd-curve']}")
    if args.out:
        Path(args.out).write_text(io.dumps([r.to_json() for r in rows]))
    print(text)
    return 0


def _synthesize(curve, nu, strength, method, cfg):
    ncfg = cfg.nlp_config()
    if method == "pullback":
        return pullback_gauss(curve, nu, strength)
    if isinstance(curve, PlaneCurve):
        if nu.kind not in ("raw", "atoms"):
            raise CurveQuadError("plane curves need ambient moments or atoms in R^2")
        m = nu.raw.truncate(strength) if nu.kind == "raw" else _atom_moments(nu, strength)
        if method == "nlp":
            return nlp_plane(curve, m, strength, ncfg)
        raise CurveQuadError("prune on a plane curve needs an explicit rule; use the prune command")
    m = curve_moments(nu, curve, strength)
    if method == "nlp":
        return nlp_rational(curve, m, strength, ncfg, nu=nu if nu.kind != "raw" else None)
    if method == "prune":
        rule = parameter_start(curve, nu, m, strength, ncfg.pole_margin)
        res = check_exactness(rule, m, strength).max_residual
        return SynthesisResult(rule, res, res <= cfg.exactness_tol)
    raise ValueError(f"unknown method {method!r}")


def _atom_moments(nu, strength):
    return atom_moments(nu.locations, nu.weights, strength)


def cmd_synthesize(args, cfg):
    curve = io.load_curve(args.curve)
    nu = io.load_measure(args.measure)
    result = _synthesize(curve, nu, args.strength, args.method, cfg)
    if result.kkt is None and args.method == "nlp":
        result.kkt = kkt_analyze(result.rule, curve, args.strength)
    out = result.to_json()
    out["seed"] = cfg.seed
    _emit(out, args)
    _write_csv(result.rule, args)
    return 0


def cmd_prune(args, cfg):
    rule = io.load_rule(args.rule)
    strength = args.strength if args.strength is not None else rule.strength
    m = io.load_moments(args.moments) if args.moments else None
    pruned = caratheodory_prune(rule, m, strength)
    _emit({"rule": pruned, "nodes": pruned.size, "from": rule.size}, args)
    _write_csv(pruned, args)
    return 0


def cmd_verify(args, cfg):
    rule = io.load_rule(args.rule)
    curve = io.load_curve(args.curve)
    nu = io.load_measure(args.measure)
    strength = args.strength if args.strength is not None else rule.strength
    if isinstance(curve, PlaneCurve):
        m = nu.raw.truncate(strength) if nu.kind == "raw" else _atom_moments(nu, strength)
        nu_line = None
    else:
        m = curve_moments(nu, curve, strength)
        nu_line = nu
    rep = verify_rule(rule, curve, strength, m, nu_line, cfg.exactness_tol)
    if args.out:
        Path(args.out).write_text(io.dumps(rep))
        print(rep.summary())
    else:
        sys.stdout.write(io.dumps(rep))
        print(rep.summary(), file=sys.stderr)
    return 0 if rep.verdict == "pass" else 1


def cmd_bench(args, cfg):
    from .bench import run_bench

    rows = run_bench(seed=cfg.seed, only=args.only)
    if args.out:
        Path(args.out).write_text(io.dumps([r.to_json() for r in rows]))
    print(format_bench(rows))
    return 0 if all(r.ok for r in rows) else 1


def format_bench(rows) -> str:
    head = ("scenario", "nodes", "target", "residual", "seconds", "status")
    body = [(r.name, str(r.nodes), str(r.target), f"{r.residual:.2e}", f"{r.seconds:.2f}",
             "ok" if r.ok else "FAIL") for r in rows]
    widths = [max(len(x[i]) for x in [head] + body) for i in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [head] + body)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvequad", description="Quadrature rules on algebraic curves.")
    p.add_argument("--config", help="RunConfig JSON (tolerances, budgets, seed, solver knobs)")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp, csv=False):
        sp.add_argument("--out", help="write JSON output here")
        if csv:
            sp.add_argument("--csv", help="also write a node/weight CSV")

    sp = sub.add_parser("moments", help="moments of a measure pushed onto a curve")
    sp.add_argument("--curve")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--degree", type=int, required=True)
    out(sp)
    sp.set_defaults(fn=cmd_moments)

    sp = sub.add_parser("gauss", help="Gaussian rule for a measure on the line")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--strength", type=int, required=True)
    out(sp, csv=True)
    sp.set_defaults(fn=cmd_gauss)

    sp = sub.add_parser("psi-rank", help="rank of p -> p o phi on degree <= s")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--s", type=int, required=True)
    out(sp)
    sp.set_defaults(fn=cmd_psi_rank)

    sp = sub.add_parser("exponent-coverage", help="exponents a + b d with a + b <= s")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    out(sp)
    sp.set_defaults(fn=cmd_exponent_coverage)

    sp = sub.add_parser("places-at-infinity", help="real places at infinity of a plane curve")
    sp.add_argument("--curve", required=True)
    out(sp)
    sp.set_defaults(fn=cmd_places)

    sp = sub.add_parser("bounds", help="node-count bounds")
    sp.add_argument("--setting", choices=["plane", "rational", "xd", "line", "lower"], required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--s", type=int, required=True, help="rule strength")
    sp.add_argument("--t", type=int)
    sp.add_argument("--p", type=int, default=0)
    sp.add_argument("--n", type=int)
    sp.add_argument("--format", choices=["table", "json"], default="table")
    out(sp)
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("synthesize", help="build a rule on a curve")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--strength", type=int, required=True)
    sp.add_argument("--method", choices=["pullback", "nlp", "prune"], default="pullback")
    out(sp, csv=True)
    sp.set_defaults(fn=cmd_synthesize)

    sp = sub.add_parser("prune", help="Caratheodory pruning of a rule")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--strength", type=int)
    sp.add_argument("--moments", help="target moments used for row scaling")
    out(sp, csv=True)
    sp.set_defaults(fn=cmd_prune)

    sp = sub.add_parser("verify", help="check exactness and bounds of a rule")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--curve", required=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--strength", type=int)
    out(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("bench", help="run the reference scenarios")
    sp.add_argument("--only", action="append", help="scenario name (repeatable)")
    out(sp)
    sp.set_defaults(fn=cmd_bench)
    return p


def _error(exc, kind=None):
    rec = {"error": str(exc), "type": kind or type(exc).__name__}
    if isinstance(exc, io.InputError):
        rec["file"] = exc.path
    print(json.dumps(rec), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
    except (io.InputError, ValueError, TypeError) as exc:
        _error(exc)
        return 2
    try:
        return args.fn(args, cfg)
    except io.InputError as exc:
        _error(exc)
        return 2
    except (CurveQuadError, ValueError) as exc:
        _error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
