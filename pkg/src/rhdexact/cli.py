"""Command-line front end: rhdexact {list,eval,verify,solve,domain-scan}.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .solutions import CATALOG, INTEGER_PARAMS, HALF_PI, make
from .solver import SolverConfig, UnrecoverableStateError, run_comparison
from .verify import (DEFAULT_SEED, SCAN_COLUMNS, StencilConfig, StencilError, scan_domain,
                     verify_solution)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

SOLVE_DEFAULTS = {
    # id: (t_start, t_end, planar range, curvilinear range)
    "linear-scaling": (1.0, 1.5, (-0.5, 0.5), (0.1, 0.5)),
    "selfsimilar": (1.0, 1.5, (2.0, 3.0), (2.0, 3.0)),
}
EVAL_COLUMNS = ["t", "r", "theta", "eps", "p", "v_r", "v_theta", "class"]
SOLVE_COLUMNS = ["resolution", "l1_eps", "linf_eps", "l1_v", "order_estimate"]


class UsageError(Exception):
    pass


# -- argument helpers -----------------------------------------------------------


def parse_number(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def parse_params(pairs) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"malformed parameter {pair!r}, expected key=value")
        num = parse_number(value)
        if key in INTEGER_PARAMS:
            if num != int(num):
                raise UsageError(f"parameter {key} must be an integer")
            num = int(num)
        out[key] = num
    return out


def parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"range {text!r} must look like lo,hi")
    lo, hi = (parse_number(p) for p in parts)
    if not lo < hi:
        raise UsageError(f"range {text!r} needs lo < hi")
    return lo, hi


def parse_ints(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    return vals


_REGION = re.compile(r"^\s*(?P<abs>\|)?(?P<var>[xr])\|?\s*(?P<op>[<>])\s*(?P<k>[-+]?[0-9./]*)\s*\*?\s*t\s*$")


def parse_region(text: str):
    """Turn 'x>t', 'x<-t', 'r<0.5t' or '|x|<t' into an x-range function of t."""
    m = _REGION.match(text)
    if not m:
        raise UsageError(f"unsupported region {text!r}")
    k = m["k"]
    k = -1.0 if k == "-" else 1.0 if k in ("", "+") else parse_number(k)
    margin = 1e-3

    def x_range(t):
        edge = k * t
        if m["abs"]:
            return (-edge * (1 - margin), edge * (1 - margin)) if m["op"] == "<" else (edge * (1 + margin), edge + 2 * abs(t))
        if m["op"] == ">":
            return edge + margin * abs(t), edge + 2 * abs(t)
        return edge - 2 * abs(t), edge - margin * abs(t)

    return x_range


def build_solution(sid: str, pairs):
    if sid not in CATALOG:
        raise UsageError(f"unknown solution id {sid!r}; try 'list'")
    try:
        return make(sid, **parse_params(pairs))
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from None


# -- output ---------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(columns, rows, meta: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# rhdexact {__version__}\n")
    for key in sorted(meta):
        buf.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _clean_json(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_json(v) for v in obj]
    return obj


def write_json(obj) -> str:
    return json.dumps(_clean_json({"schema": 1, **obj}), indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, sol=None) -> dict:
    meta = {"command": args.command, "seed": args.seed}
    if sol is not None:
        meta.update(solution=sol.id, params=sol.params)
    spec = {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "command", "out", "jobs", "json", "ids", "params", "seed")}
    meta["spec"] = spec
    return meta


def _stencil(args) -> StencilConfig:
    if args.levels < 3:
        raise UsageError("--levels must be at least 3 for an order estimate")
    try:
        return StencilConfig(h=args.h, refinement_levels=args.levels)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _x_range(args, sol):
    if args.x_range:
        lo_hi = parse_range(args.x_range)
        return lambda t: lo_hi
    return sol.x_range


# -- commands -------------------------------------------------------------------


def cmd_list(args) -> int:
    entries = [e for e in CATALOG.values() if args.eos is None or e.eos == args.eos]
    if args.json:
        emit(write_json({"entries": [e.schema() for e in entries]}), args.out)
        return EXIT_OK
    lines = []
    for e in entries:
        params = " ".join(f"{k}={_fmt(v)}" for k, v in e.defaults.items())
        lines.append(f"{e.id:<20} {e.eos:<8} {e.symmetry:<13} {params}\n    {e.formula}\n")
    emit("".join(lines), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    sol = build_solution(args.id, args.params)
    t_range = parse_range(args.t_range) if args.t_range else sol.t_range
    x_range = _x_range(args, sol)
    nt, nx = _resolution(args.resolution)
    theta = args.theta
    rows = []
    for t in np.linspace(*t_range, nt):
        for x in np.linspace(*x_range(t), nx):
            t, x = float(t), float(x)
            with np.errstate(all="ignore"):
                try:
                    st = sol.eval_fluid(t, x, theta)
                    vals = [st.eps, st.p, st.v_r, st.v_theta, st.cls.value]
                except (ValueError, ZeroDivisionError, OverflowError):
                    vals = [float("nan")] * 4 + ["Invalid"]
            row = dict(zip(EVAL_COLUMNS, [t, x, theta, *vals]))
            row["in_domain"] = bool(sol.in_domain(t, x, theta, args.buffer))
            rows.append(row)
    emit(write_csv(EVAL_COLUMNS + ["in_domain"], rows, _meta(args, sol)), args.out)
    return EXIT_OK


def _resolution(text):
    res = parse_ints(text)
    if len(res) == 1:
        res = res * 2
    if len(res) != 2 or min(res) < 2:
        raise UsageError("resolution must be N or NT,NX with each at least 2")
    return res


def cmd_verify(args) -> int:
    if args.all == bool(args.ids):
        raise UsageError("give either solution ids or --all")
    if args.all:
        if args.params:
            raise UsageError("parameters cannot be combined with --all")
        sols = [make(sid) for sid in CATALOG]
    else:
        sols = [build_solution(sid, args.params if len(args.ids) == 1 else []) for sid in args.ids]
        if len(args.ids) > 1 and args.params:
            raise UsageError("parameters need exactly one solution id")
    cfg = _stencil(args)
    points = args.points or (20 if args.quick else 50)
    reports = []
    for sol in sols:
        if args.region:
            x_range = parse_region(args.region)
            nt, nx = (11, 21) if args.quick else (21, 41)
            t_range = parse_range(args.t_range) if args.t_range else sol.t_range
            _, rep = scan_domain(sol, t_range, x_range, (nt, nx), HALF_PI, cfg, args.jobs, args.buffer)
            rep.notes.append(f"region {args.region}")
        else:
            rep = verify_solution(sol, points, cfg, seed=args.seed, jobs=args.jobs)
        reports.append(rep.to_dict())
        if not args.json:
            status = "PASS" if rep.passed else "FAIL"
            order = rep.estimated_order
            order = "n/a" if order is None or not math.isfinite(order) else f"{order:.3f}"
            print(f"{status}  {sol.id:<20} order={order} physical={rep.fraction_physical:.0%} "
                  f"mismatches={rep.domain_mismatches}", file=sys.stderr if args.out is None else sys.stdout)
    passed = all(r["passed"] for r in reports)
    text = write_json({"seed": args.seed, "passed": passed, "reports": reports})
    if args.json or args.out:
        emit(text, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_solve(args) -> int:
    sol = build_solution(args.id, args.params)
    if sol.eos.family != "linear" or sol.axisymmetric:
        raise UsageError(f"{sol.id} is not a symmetric linear-EOS solution")
    if "kappa" not in parse_params(args.params):
        raise UsageError("solve needs an explicit kappa=<value>")
    t0, t1, planar, curved = SOLVE_DEFAULTS.get(sol.id, (1.0, 1.5, None, None))
    t0 = args.t_start if args.t_start is not None else t0
    t1 = args.t_end if args.t_end is not None else t1
    r_range = parse_range(args.r_range) if args.r_range else (planar if sol.n == 0 else curved)
    if r_range is None:
        raise UsageError("give --r-range for this solution")
    resolutions = parse_ints(args.resolutions)
    try:
        cfg = SolverConfig(kappa=sol.eos.kappa, t_start=t0, t_end=t1, cfl=args.cfl, boundary=args.boundary)
    except ValueError as err:
        raise UsageError(str(err)) from None
    try:
        rows = run_comparison(sol, resolutions, r_range, cfg, jobs=args.jobs)
    except UnrecoverableStateError as err:
        print(f"error: solver blow-up, last good time t={err.t}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as err:
        raise UsageError(str(err)) from None
    dicts = [{c: getattr(r, c) for c in SOLVE_COLUMNS} for r in rows]
    if args.json:
        emit(write_json({"solution": sol.id, "params": sol.params, "rows": dicts}), args.out)
    else:
        emit(write_csv(SOLVE_COLUMNS, dicts, _meta(args, sol)), args.out)
    if args.min_order is not None and any(r.order_estimate < args.min_order for r in rows[1:]):
        return EXIT_FAIL
    return EXIT_OK


def cmd_domain_scan(args) -> int:
    sol = build_solution(args.id, args.params)
    t_range = parse_range(args.t_range) if args.t_range else sol.t_range
    rows, rep = scan_domain(sol, t_range, _x_range(args, sol), _resolution(args.resolution),
                            args.theta, _stencil(args), args.jobs, args.buffer)
    if args.json:
        emit(write_json({"report": rep.to_dict(), "rows": rows}), args.out)
    else:
        emit(write_csv(SCAN_COLUMNS + ["in_domain"], rows, _meta(args, sol)), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV/text")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="sampling seed")
    common.add_argument("--jobs", type=int, default=1, help="parallel-map width")
    common.add_argument("--h", type=float, default=1e-2, help="relative base stencil step")
    common.add_argument("--levels", type=int, default=5, help="stencil refinement levels (at least 3)")
    common.add_argument("--buffer", type=float, default=1e-8, help="relative exclusion buffer around singular sets")

    parser = argparse.ArgumentParser(prog="rhdexact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rhdexact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", parents=[common], help="list catalog entries")
    p.add_argument("--eos", choices=["stiff", "linear", "log", "iterlog"])
    p.set_defaults(func=cmd_list)

    def grid_opts(p):
        p.add_argument("id")
        p.add_argument("params", nargs="*", metavar="key=value")
        p.add_argument("--t-range", help="lo,hi")
        p.add_argument("--x-range", help="lo,hi (default: the entry's natural range)")
        p.add_argument("--theta", type=parse_number, default=HALF_PI)
        p.add_argument("--resolution", default="21,21", help="N or NT,NX")

    p = sub.add_parser("eval", parents=[common], help="evaluate a solution on a (t, r) lattice")
    grid_opts(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="residual convergence and admissibility checks")
    p.add_argument("ids", nargs="*", metavar="id [key=value ...]")
    p.add_argument("--all", action="store_true")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--points", type=int)
    p.add_argument("--region", help="e.g. x>t, x<-t, |x|<t")
    p.add_argument("--t-range", help="lo,hi")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", parents=[common], help="finite-volume convergence study")
    p.add_argument("id")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--resolutions", default="100,200,400,800")
    p.add_argument("--t-start", type=parse_number)
    p.add_argument("--t-end", type=parse_number)
    p.add_argument("--r-range", help="lo,hi")
    p.add_argument("--cfl", type=float, default=0.5)
    p.add_argument("--boundary", choices=["exact", "outflow", "periodic"], default="exact")
    p.add_argument("--min-order", type=float, help="exit 1 if any order estimate falls below this")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("domain-scan", parents=[common], help="class and residual map over a lattice")
    grid_opts(p)
    p.set_defaults(func=cmd_domain_scan)
    return parser


def _split_verify_ids(args):
    if args.command != "verify":
        return
    args.params = [a for a in args.ids if "=" in a]
    args.ids = [a for a in args.ids if "=" not in a]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _split_verify_ids(args)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (StencilError, UnrecoverableStateError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
