"""Command-line front door: generation, solving, oracle checks, estimates.

Exit codes: 0 success, 1 no solution within budget, 2 usage or format
error, 3 infeasible parameters.  All output is deterministic for a fixed
seed and thread count; wall-clock times never reach stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import estimator
from .estimator import InfeasibleError
from .instances import (
    DoomInstance,
    FormatError,
    ParameterError,
    SdInstance,
    brute_force_solutions,
    expected_solutions_log2,
    gen_doom,
    gen_sd,
    parse,
    serialize,
)
from .pgess import Budget, EnumerationEngine, PgessParams, run, run_doom, success_prob_log2
from .reps import Density, RepEngine, nrep_exponent_log2, solve_typical_z
from .wagner import WagnerEngine

USAGE_ERROR = 2
INFEASIBLE = 3
NO_SOLUTION = 1


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TERNISD_SEED")
    if env is not None:
        return int(env)
    return 0


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _round_floats(obj, places: int = 6):
    if isinstance(obj, float):
        return round(obj, places)
    if isinstance(obj, dict):
        return {k: _round_floats(v, places) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, places) for v in obj]
    return obj


def cmd_gen(args) -> int:
    inst = gen_sd(args.n, args.k, args.w, _seed_from(args))
    text = serialize(inst)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_doom(args) -> int:
    inst = gen_doom(args.n, args.k, args.w, args.z, _seed_from(args))
    text = serialize(inst)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def default_prange_weight(n: int, k: int, w: int, cap: int = 1 << 16) -> int:
    lo = max(0, w - (n - k))
    hi = min(k, w)
    best, best_p = -math.inf, lo
    for p in range(lo, hi + 1):
        if math.comb(k, p) * 2 ** p > cap:
            continue
        val = success_prob_log2(n, k, 0, p, w)
        if val > best:
            best, best_p = val, p
    return best_p


def default_window(n: int, k: int, w: int) -> int:
    return max(1, min(3, w - k, n - k - 1))


def build_engine(name: str, n: int, k: int, w: int, args) -> tuple[object, PgessParams]:
    restarts = args.restarts
    if name == "prange":
        p = args.p if args.p is not None else default_prange_weight(n, k, w)
        ell = args.ell if args.ell is not None else 0
        return EnumerationEngine(weight=p), PgessParams(ell=ell, p=p, max_restarts=restarts)
    ell = args.ell if args.ell is not None else default_window(n, k, w)
    p = k + ell
    if args.p is not None and args.p != p:
        raise InfeasibleError("tree engines use the full-weight window: p must equal k + ell")
    if w - p < 0:
        raise InfeasibleError(f"w = {w} leaves no residual weight for ell = {ell}")
    if name == "wagner":
        return WagnerEngine(p=p, a=args.a), PgessParams(ell=ell, p=p, max_restarts=restarts)
    if name == "rep":
        return RepEngine(p=p), PgessParams(ell=ell, p=p, max_restarts=restarts)
    raise InfeasibleError(f"unknown engine {name!r}")


def cmd_solve(args) -> int:
    try:
        with open(args.infile) as fh:
            inst = parse(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    doom = isinstance(inst, DoomInstance)
    if args.doom and not doom:
        print("error: --doom requires a doom3 instance file", file=sys.stderr)
        return USAGE_ERROR
    engine, params = build_engine(args.engine, inst.n, inst.k, inst.w, args)
    budget = Budget(args.budget)
    inst = _with_seed(inst, _seed_from(args))
    if doom:
        report = run_doom(inst, params, engine, budget, threads=args.threads)
    else:
        report = run(inst, params, engine, budget, threads=args.threads)
    out = {
        "engine": args.engine,
        "n": inst.n,
        "k": inst.k,
        "w": inst.w,
        "ell": params.ell,
        "p": params.p,
        "restarts_used": report.restarts_used,
        "candidates_tested": report.subset_sum_candidates_tested,
        "solution": str(report.solution) if report.solution is not None else None,
    }
    if doom:
        out["syndrome_index"] = report.syndrome_index
    _emit_json(out)
    return 0 if report.solution is not None else NO_SOLUTION


def _with_seed(inst, seed: int):
    if isinstance(inst, SdInstance):
        return SdInstance(inst.n, inst.k, inst.w, inst.H, inst.s, inst.planted, seed)
    return DoomInstance(
        inst.n, inst.k, inst.w, inst.z, inst.H, inst.syndromes,
        inst.planted_index, inst.planted, seed,
    )


def cmd_oracle(args) -> int:
    try:
        with open(args.infile) as fh:
            inst = parse(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if isinstance(inst, DoomInstance):
        print("error: the oracle enumerates single-syndrome instances", file=sys.stderr)
        return USAGE_ERROR
    sols = brute_force_solutions(inst, cap=args.cap)
    out = {
        "count": len(sols),
        "expected_log2": expected_solutions_log2(inst.n, inst.k, inst.w),
        "solutions": [str(e) for e in sols[: args.show]],
    }
    _emit_json(_round_floats(out))
    return 0


def cmd_estimate(args) -> int:
    if args.alg == "prange":
        res = estimator.prange_exponent(args.q, args.R, args.W)
    elif args.alg in ("wagner", "dumer"):
        if args.q == 2:
            res = estimator.dumer2_exponent(args.R, args.W)
        elif args.doom_z_bits is not None:
            res = estimator.wagner_exponent(args.R, args.W, doom_z_log2=args.doom_z_bits)
        else:
            res = estimator.wagner_exponent(args.R, args.W)
    elif args.alg == "rep":
        if args.q == 2:
            print("error: binary representation numbers are reference constants", file=sys.stderr)
            return USAGE_ERROR
        res = estimator.rep_exponent(args.R, args.W, effort=args.effort)
    else:
        print(f"error: unknown algorithm {args.alg}", file=sys.stderr)
        return USAGE_ERROR
    _emit_json(
        _round_floats(
            {
                "exponent": res.exponent,
                "algorithm": res.algorithm,
                "q": res.q,
                "R": res.R,
                "W": res.W,
                "space_exponent": res.space_exponent,
                "params": res.params,
            }
        )
    )
    return 0


def cmd_curve(args) -> int:
    grid = [args.w_min + i * (args.w_max - args.w_min) / (args.points - 1) for i in range(args.points)]
    pts = estimator.curve(args.R, args.alg, grid, q=args.q, effort=args.effort)
    sys.stdout.write(estimator.curve_csv(pts, args.alg, args.R, q=args.q))
    return 0


def cmd_min_size(args) -> int:
    res = estimator.min_input_size(args.alg, args.q, security_bits=args.bits, effort=args.effort)
    _emit_json(_round_floats(res))
    return 0


def cmd_wave_check(args) -> int:
    res = estimator.wave_security(args.n, args.k, args.w, doom_z_log2=args.doom_z_bits)
    _emit_json(_round_floats(res))
    return 0


def cmd_rep_count(args) -> int:
    a0 = Density(args.alpha0, args.beta0)
    a1 = Density(args.alpha1, args.beta1)
    z = solve_typical_z(a0, a1)
    out = {
        "z": z,
        "nrep_exponent_log2": nrep_exponent_log2(a0, a1),
    }
    _emit_json(_round_floats(out, places=9))
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ternisd", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None, help="64-bit seed (env TERNISD_SEED fallback)")

    g = sub.add_parser("gen", help="generate a planted single-syndrome instance")
    for name in ("--n", "--k", "--w"):
        g.add_argument(name, type=int, required=True)
    add_seed(g)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gen)

    gd = sub.add_parser("gen-doom", help="generate a planted multi-syndrome instance")
    for name in ("--n", "--k", "--w", "--z"):
        gd.add_argument(name, type=int, required=True)
    add_seed(gd)
    gd.add_argument("--out", default=None)
    gd.set_defaults(fn=cmd_gen_doom)

    s = sub.add_parser("solve", help="run the solve loop on an instance file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--engine", choices=("prange", "wagner", "rep"), default="wagner")
    s.add_argument("--ell", type=int, default=None)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--a", type=int, default=None)
    s.add_argument("--restarts", type=int, default=200)
    s.add_argument("--budget", type=int, default=10 ** 9)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--doom", action="store_true")
    add_seed(s)
    s.set_defaults(fn=cmd_solve)

    o = sub.add_parser("oracle", help="exhaustively enumerate all solutions")
    o.add_argument("--in", dest="infile", required=True)
    o.add_argument("--cap", type=int, default=1 << 20)
    o.add_argument("--show", type=int, default=16)
    o.set_defaults(fn=cmd_oracle)

    e = sub.add_parser("estimate", help="asymptotic exponent for one algorithm")
    e.add_argument("--q", type=int, choices=(2, 3), default=3)
    e.add_argument("--R", type=float, required=True)
    e.add_argument("--W", type=float, required=True)
    e.add_argument("--alg", choices=("prange", "wagner", "dumer", "rep"), required=True)
    e.add_argument("--doom-z-bits", type=float, default=None, help="per-n log2 target count")
    e.add_argument("--effort", choices=("min", "fast", "full"), default="fast")
    e.set_defaults(fn=cmd_estimate)

    c = sub.add_parser("curve", help="CSV of (W, exponent) points")
    c.add_argument("--q", type=int, choices=(2, 3), default=3)
    c.add_argument("--R", type=float, required=True)
    c.add_argument("--alg", choices=("prange", "wagner", "dumer", "rep"), required=True)
    c.add_argument("--w-min", type=float, default=0.9)
    c.add_argument("--w-max", type=float, default=1.0)
    c.add_argument("--points", type=int, default=11)
    c.add_argument("--effort", choices=("min", "fast", "full"), default="fast")
    c.set_defaults(fn=cmd_curve)

    m = sub.add_parser("min-size", help="smallest input size forcing a work target")
    m.add_argument("--q", type=int, choices=(2, 3), default=3)
    m.add_argument("--alg", choices=("prange", "wagner", "dumer", "rep", "bjmm"), required=True)
    m.add_argument("--bits", type=float, default=128.0)
    m.add_argument("--effort", choices=("min", "fast", "full"), default="fast")
    m.set_defaults(fn=cmd_min_size)

    wv = sub.add_parser("wave-check", help="audit one signature parameter set")
    for name in ("--n", "--k", "--w"):
        wv.add_argument(name, type=int, required=True)
    wv.add_argument("--doom-z-bits", type=float, default=64.0)
    wv.set_defaults(fn=cmd_wave_check)

    rc = sub.add_parser("rep-count", help="decomposition-count exponent of a density pair")
    rc.add_argument("--alpha0", type=float, required=True)
    rc.add_argument("--beta0", type=float, required=True)
    rc.add_argument("--alpha1", type=float, required=True)
    rc.add_argument("--beta1", type=float, required=True)
    rc.set_defaults(fn=cmd_rep_count)
    return ap


def dispatch(argv: list[str]) -> int:
    from .pgess import InfeasibleError as LoopInfeasible
    from .wagner import ParamError

    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (FormatError, ValueError) as exc:
        if isinstance(exc, (ParameterError, InfeasibleError, LoopInfeasible, ParamError)):
            print(f"error: {exc}", file=sys.stderr)
            return INFEASIBLE
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
