#!/usr/bin/env python3
"""Generate interval towers, print the condition report and run the no-triple check."""
import argparse
import time

from ramsey_exp import counterexample as cx


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--x1", type=int, default=3)
    ap.add_argument("--cap", type=int, default=10**4)
    args = ap.parse_args()

    for L in args.levels:
        t0 = time.perf_counter()
        try:
            t = cx.generate(L, x1=args.x1)
        except OverflowError as e:
            print(f"L={L}: {e}")
            continue
        rep = cx.verify_conditions(t)
        print(f"L={L} ({t.strategy}) generated in {time.perf_counter() - t0:.3f}s")
        for i, lv in enumerate(t.levels, start=1):
            fmt = lambda v: str(v.exact) if v.is_exact and v.exact.bit_length() < 64 else (
                f"<{v.exact.bit_length()} bits>" if v.is_exact else f"2^[{float(v.lo):.6g}, {float(v.hi):.6g}]")
            print(f"  I_{i} = [{fmt(lv.x)}, {fmt(lv.y)}]   x={lv.x_expr} y={lv.y_expr}")
        for c in rep:
            print(f"  level {c.level}: {c.condition:<24} {c.order.value:<13} {'ok' if c.passed else 'FAIL'} {c.note}")
        t0 = time.perf_counter()
        hit = cx.brute_check_no_triple(t, args.cap)
        print(f"  no-triple up to {args.cap}: {'clean' if hit is None else hit} ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
