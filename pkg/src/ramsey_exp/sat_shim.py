"""Command-line SAT solver speaking the usual competition output format.

    python -m ramsey_exp.sat_shim [--backend cadical195] instance.cnf

Prints ``s SATISFIABLE`` / ``s UNSATISFIABLE`` and ``v`` model lines and exits
with 10 / 20.  Backed by the solvers bundled with python-sat.
"""

import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver, SolverNames


def main(argv=None):
    ap = argparse.ArgumentParser(prog="ramsey_exp.sat_shim")
    ap.add_argument("--backend", default="cadical195")
    ap.add_argument("cnf")
    args = ap.parse_args(argv)
    if not hasattr(SolverNames, args.backend):
        ap.error(f"unknown backend {args.backend!r}")
    cnf = CNF(from_file=args.cnf)
    with Solver(name=args.backend, bootstrap_with=cnf.clauses) as s:
        sat = s.solve()
        print(f"c backend {args.backend}")
        if not sat:
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    # pad variables the solver never saw
    seen = {abs(l) for l in model}
    model = list(model) + [-v for v in range(1, cnf.nv + 1) if v not in seen]
    model.sort(key=abs)
    print("s SATISFIABLE")
    for i in range(0, len(model), 16):
        print("v " + " ".join(map(str, model[i:i + 16])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
