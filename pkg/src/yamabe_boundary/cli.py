"""Command-line front end: certify / integrals / quotient.

Exit codes (stable):
    0   success (certificate verdict true / residuals pass / drop property holds)
    1   check failed (cancellation failure, residual too large, no quotient drop)
    2   certificate hypothesis not met (W(x0) = 0)
    3   sampler tolerance not met
    64  usage error (bad flags, malformed curvature file)

JSON reports are canonical (sorted keys, fixed separators) and contain no
wall-clock data, so identical inputs and seeds produce byte-identical files;
timing goes to stderr.  Every numeric value carries a provenance tag
(exact | quadrature | fitted).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .curvature_model import (BoundaryCurvature, load_curvature,
                              random_admissible, to_json_dict)
from .energy_expansion import (PreconditionViolation, CancellationFailure,
                               certify, quadrature_residuals)
from .exact_integrals import integral_table
from .discrete_quotient import QuotientConfig, sweep
from .numerics import scaled_value
from .quadrature_oracle import QuadratureConfig, ToleranceNotMet

USAGE_ERROR = 64
RESIDUAL_TOL = 1e-6
LOG_SLOPE_TOL = 1e-2


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def _write_report(path: str, report: dict):
    with open(path, "w") as fh:
        fh.write(_canonical_json(report))


def _base_report(args, command: str) -> dict:
    inputs = {k: v for k, v in sorted(vars(args).items())
              if k != "func" and v is not None}
    return {"schema": 1, "tool_version": __version__, "command": command,
            "inputs": {k: (str(v) if isinstance(v, Fraction) else v)
                       for k, v in inputs.items()}}


def _load_curv(args, n: int) -> BoundaryCurvature:
    if args.curv:
        curv = load_curvature(args.curv)
        if curv.n != n:
            raise ValueError(f"curvature file has n={curv.n}, expected {n}")
        return curv
    seed = args.random
    if seed is None:
        seed = int(os.environ.get("YAMABE_SEED", "1"))
    return random_admissible(n, seed)


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def cmd_certify(args) -> int:
    curv = _load_curv(args, args.n)
    t0 = time.time()
    try:
        cert = certify(args.n, curv, a=Fraction(args.A),
                       with_quadrature=not args.no_check)
    except PreconditionViolation as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except CancellationFailure as exc:
        print(f"internal cancellation failure: {exc}", file=sys.stderr)
        return 1
    wall = time.time() - t0

    print(f"certificate for n = {cert.n} (A = {cert.a_used})")
    print(f"  P({cert.a_used}) = {cert.p_value}"
          + ("   [coefficient of eps^4 log(delta/eps) sigma I]" if cert.log_channel
             else "   [coefficient of eps^4 gamma sigma I]"))
    print(f"  optimal A = {cert.a_optimal}, P(A*) = {cert.p_at_optimal}")
    print(f"  W2 coefficient = {cert.w2_coefficient}")
    print("  channels: " + ", ".join(
        f"{k}={v}" for k, v in cert.channel_scalars.items()))
    print(f"  {cert.dichotomy}")
    if cert.quadrature_residuals:
        worst = max(cert.quadrature_residuals.values())
        print(f"  quadrature residuals: worst {worst:.2e} over "
              f"{sorted(cert.quadrature_residuals)}")
    print(f"  verdict: {'CERTIFIED' if cert.verdict else 'NOT CERTIFIED'}")
    print(f"(wall {wall:.2f}s)", file=sys.stderr)

    if args.json:
        report = _base_report(args, "certify")
        report["certificate"] = cert.as_dict()
        report["curvature"] = to_json_dict(curv)
        report["passed"] = cert.verdict
        _write_report(args.json, report)
    return 0 if cert.verdict else 1


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------

def cmd_integrals(args) -> int:
    n = args.n
    t0 = time.time()
    table = integral_table(n)
    unit = ("log(delta/eps) sigma I" if n == 6 else "sigma I")
    print(f"energy-expansion integrals, n = {n}  [exact, units of {unit}]")
    for name, val in table.items():
        print(f"  {name}: {val.q}")
    rows = {name: {"value": str(val.q), "tag": "exact"}
            for name, val in table.items()}
    passed = True
    residuals = None
    if args.check:
        residuals = quadrature_residuals(n)
        tol = LOG_SLOPE_TOL if n == 6 else RESIDUAL_TOL
        print(f"quadrature residuals (tolerance {tol:g}):")
        for name, r in residuals.items():
            ok = r < tol
            passed &= ok
            print(f"  {name}: {r:.3e}  {'ok' if ok else 'FAIL'}")
    wall = time.time() - t0
    print(f"(wall {wall:.2f}s)", file=sys.stderr)
    if args.json:
        report = _base_report(args, "integrals")
        report["table"] = rows
        if residuals is not None:
            report["residuals"] = {k: {"value": v, "tag": "quadrature"}
                                   for k, v in residuals.items()}
        report["passed"] = passed
        _write_report(args.json, report)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# quotient
# ---------------------------------------------------------------------------

def cmd_quotient(args) -> int:
    curv = _load_curv(args, args.n)
    sampler = QuadratureConfig(rel_tol=args.rel_tol, abs_tol=1e-12,
                               mc_samples=args.mc_samples, seed=args.seed)
    eps_list = tuple(args.eps) if args.eps else ()
    cfg = QuotientConfig(n=args.n, curv=curv, delta=args.delta,
                         eps_list=eps_list, sampler=sampler)
    t0 = time.time()
    try:
        res = sweep(cfg)
    except ToleranceNotMet as exc:
        print(f"sampler tolerance not met: {exc}", file=sys.stderr)
        return 3
    wall = time.time() - t0

    print(f"quotient sweep, n = {args.n}, delta = {cfg.delta}, "
          f"mc_samples = {sampler.mc_samples}, seed = {sampler.seed}")
    print(f"  sharp constant Q(B^n, dB) = {res.sharp_value:.9f}")
    print(f"  {'eps':>10} {'A':>4} {'energy':>14} {'quotient':>12}")
    for r in res.rows:
        print(f"  {r.eps:>10.6f} {r.a:>4.1f} {r.energy:>14.9f} "
              f"{r.quotient:>12.7f}")
    for e, d, de, p in res.drops:
        print(f"  drop at eps={e:.6f}: measured {d:.4e} (+-{de:.1e}), "
              f"leading-order prediction {p:.4e}")
    print(f"  fitted drop coefficient: measured {res.slope_measured:.5e}, "
          f"predicted {res.slope_predicted:.5e} "
          f"(rel dev {res.slope_rel_dev:.1%})")
    if res.exponent_fit is not None:
        print(f"  drop growth exponent fit: {res.exponent_fit:.2f}")
    if res.flat_gap_rel is not None:
        print(f"  Q(A=0, smallest eps) - sharp, relative: {res.flat_gap_rel:.2e}"
              "  (cutoff excess; positive at desk scale)")
    print(f"  monotone improvement on two smallest eps: {res.monotone_ok}")
    print(f"(wall {wall:.2f}s)", file=sys.stderr)

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=[
                "eps", "A", "energy", "energy_err", "quotient",
                "quotient_err", "tag"])
            writer.writeheader()
            for row in res.to_rows():
                writer.writerow(row)
    if args.json:
        report = _base_report(args, "quotient")
        report["sweep"] = res.summary_dict()
        report["curvature"] = to_json_dict(curv)
        report["passed"] = res.monotone_ok
        _write_report(args.json, report)
    return 0 if res.monotone_ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="yamabe-boundary",
        description="Exact and numerical verification of the fourth-order "
                    "boundary-bubble energy expansion (dimensions 6-8)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_curv_opts(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--curv", help="curvature JSON file")
        g.add_argument("--random", type=int, default=None,
                       help="seed for random admissible data "
                            "(default: env YAMABE_SEED or 1)")

    pc = sub.add_parser("certify", help="exact sign certificate")
    pc.add_argument("--n", type=int, choices=(6, 7, 8), required=True)
    add_curv_opts(pc)
    pc.add_argument("--A", default="1", help="amplitude (rational, default 1)")
    pc.add_argument("--json", help="write JSON report here")
    pc.add_argument("--no-check", action="store_true",
                    help="skip quadrature cross-checks")
    pc.set_defaults(func=cmd_certify)

    pi = sub.add_parser("integrals", help="exact integral table")
    pi.add_argument("--n", type=int, required=True)
    pi.add_argument("--check", action="store_true",
                    help="cross-check against the quadrature oracle")
    pi.add_argument("--json", help="write JSON report here")
    pi.set_defaults(func=cmd_integrals)

    pq = sub.add_parser("quotient", help="desk-scale quotient sweep")
    pq.add_argument("--n", type=int, choices=(6, 7, 8), required=True)
    add_curv_opts(pq)
    pq.add_argument("--sweep", action="store_true",
                    help="accepted for compatibility; the sweep always runs")
    pq.add_argument("--delta", type=float, default=0.25)
    pq.add_argument("--eps", type=float, nargs="*",
                    help="epsilon values (default: dimension-specific sweep)")
    pq.add_argument("--mc-samples", type=int, default=2_000_000)
    pq.add_argument("--seed", type=int, default=1)
    pq.add_argument("--rel-tol", type=float, default=5e-3)
    pq.add_argument("--csv", help="write the sweep table as CSV here")
    pq.add_argument("--json", help="write JSON report here")
    pq.set_defaults(func=cmd_quotient)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
