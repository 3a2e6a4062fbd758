#!/usr/bin/env python3
"""End-to-end demo: plant an instance, solve it three ways, cross-check.

Usage:
    python3 scripts/solver_demo.py [--n 18] [--k 9] [--w 16] [--seed 1]
"""

import argparse
import time

from ternisd.cli import default_prange_weight, default_window
from ternisd.f3 import syndrome
from ternisd.instances import brute_force_solutions, gen_sd
from ternisd.pgess import EnumerationEngine, PgessParams, run
from ternisd.reps import RepEngine
from ternisd.wagner import WagnerEngine


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=18)
    ap.add_argument("--k", type=int, default=9)
    ap.add_argument("--w", type=int, default=16)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    inst = gen_sd(args.n, args.k, args.w, args.seed)
    print(f"instance: n={inst.n} k={inst.k} w={inst.w} seed={inst.seed}")
    print(f"planted : {inst.planted}")
    oracle = brute_force_solutions(inst)
    print(f"oracle  : {len(oracle)} solutions by exhaustive enumeration")

    ell = default_window(inst.n, inst.k, inst.w)
    p0 = default_prange_weight(inst.n, inst.k, inst.w)
    engines = (
        ("prange", EnumerationEngine(weight=p0), PgessParams(ell=0, p=p0, max_restarts=200)),
        ("wagner", WagnerEngine(p=inst.k + ell), PgessParams(ell=ell, p=inst.k + ell, max_restarts=200)),
        ("rep", RepEngine(p=inst.k + ell), PgessParams(ell=ell, p=inst.k + ell, max_restarts=200)),
    )
    for name, engine, params in engines:
        t0 = time.time()
        report = run(inst, params, engine)
        dt = time.time() - t0
        if report.solution is None:
            print(f"{name:7s}: no solution within budget ({report.restarts_used} restarts, {dt:.2f}s)")
            continue
        ok = report.solution.weight() == inst.w and syndrome(inst.H, report.solution) == inst.s
        member = report.solution in oracle
        print(
            f"{name:7s}: {report.solution}  restarts={report.restarts_used} "
            f"candidates={report.subset_sum_candidates_tested} verified={ok} in_oracle={member} ({dt:.2f}s)"
        )


if __name__ == "__main__":
    main()
