#!/usr/bin/env python3
"""Recompute the headline exponent and input-size tables plus the parameter audit.

Usage:
    python3 scripts/reproduce_tables.py [--full]

Default effort keeps the whole run to a few minutes; --full tightens the
optimizer (slower, marginally sharper representation-tree values).
"""

import argparse
import time

from ternisd import estimator


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()
    effort = "full" if args.full else "fast"

    t0 = time.time()
    print("== worst-case exponents (hardest weight, hardest rate) ==")
    rows = []
    for alg in ("prange", "dumer", "bjmm"):
        res = estimator.worst_case_exponent(alg, 2, effort="fast")
        rows.append((alg, 2, res.exponent, res.R))
    for alg in ("prange", "wagner", "rep"):
        res = estimator.worst_case_exponent(alg, 3, effort="min" if alg == "rep" else "fast")
        rows.append((alg, 3, res.exponent, res.R))
    for alg, q, F, R in rows:
        print(f"  q={q}  {alg:8s}  F = {F:.4f}  at R = {R:.4f}")

    print("\n== minimum input sizes for 2^128 work (kbits) ==")
    for q, algs in ((2, ("prange", "dumer", "bjmm")), (3, ("prange", "wagner", "rep"))):
        for alg in algs:
            ms = estimator.min_input_size(alg, q, effort="min" if alg == "rep" else "fast")
            tag = " (reference constant)" if ms.get("reference_constant") else ""
            print(f"  q={q}  {alg:8s}  {ms['kbits']:7.1f} kbits  at R = {ms['R_star']:.4f}{tag}")

    print("\n== signature parameter audit (n=7236, k=4892, w=6862, z=2^64) ==")
    ws = estimator.wave_security(7236, 4892, 6862, doom_z_log2=64.0)
    print(f"  security bits : {ws['security_bits']:.1f}")
    print(f"  key size      : {ws['key_size_mb']:.3f} MB")
    print(f"  signature     : {ws['signature_kb']:.4f} kB")

    print("\n== best layered plan at (R=0.676, W=0.948366) ==")
    res = estimator.rep_exponent(0.676, 0.948366, effort=effort)
    print(f"  exponent = {res.exponent:.6f}")
    print(estimator.rep_plan_text(res.R, res.W, res.params), end="")
    led = estimator.rep_plan_ledger(res.R, res.W, res.params)
    print(f"  ledger: solutions {led.solutions:.4f} + representations {led.representations:.4f}"
          f" - waste {led.waste:.4f} = {led.solutions + led.representations - led.waste:.4f}")
    print(f"\ndone in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
