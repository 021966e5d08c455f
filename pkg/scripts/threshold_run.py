#!/usr/bin/env python3
"""Threshold search for the reduced exponential pattern across solvers.

    python3 scripts/threshold_run.py --r 1 2 --N-hi 512 --cache out/verdicts.jsonl
"""
import argparse
import json
import time

from ramsey_exp import satgen as sg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--base", type=int, default=2)
    ap.add_argument("--allow-equal", action="store_true")
    ap.add_argument("--N-hi", type=int, default=512)
    ap.add_argument("--solvers", nargs="+", default=["pysat:cadical195", "pysat:glucose4", "splr"])
    ap.add_argument("--cache", help="journal shared across runs (one per solver is safest)")
    ap.add_argument("--timeout", type=float)
    args = ap.parse_args()

    rows = []
    for r in args.r:
        for s in args.solvers:
            if not sg.solver_available(s):
                print(f"skip {s}: not available")
                continue
            t0 = time.perf_counter()
            res = sg.threshold_search(r, args.base, not args.allow_equal, 1, args.N_hi, s,
                                      args.cache, args.timeout)
            dt = time.perf_counter() - t0
            rows.append({"r": r, "solver": s, "N_star": res.N_star, "resolved": res.resolved,
                         "reason": res.reason, "probes": len(res.verdicts), "seconds": round(dt, 2)})
            print(json.dumps(rows[-1]))
    stars = {(row["r"], row["N_star"]) for row in rows if row["resolved"]}
    for r in args.r:
        got = sorted(n for rr, n in stars if rr == r)
        print(f"r={r}: N* = {got[0] if len(got) == 1 else got} ({'agree' if len(got) == 1 else 'DISAGREE'})")


if __name__ == "__main__":
    main()
