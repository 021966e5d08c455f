"""Batch command line.

    ramsey-exp search --pattern reduced-exp --base 2 --monochrome --N 4
    ramsey-exp threshold --pattern reduced-exp --r 1 --base 2
    ramsey-exp counterexample --levels 2
    ramsey-exp verify --certificate w.json --coloring file:c.txt

Exit codes: 0 found / valid, 1 legitimate negative, 2 error.

A ``--config`` file holds ``key=value`` lines using the long flag names of the
chosen subcommand (dashes or underscores); flags on the command line win.

Growth functions (``--phi``) use a tiny grammar: the variable ``x``, integer
literals, ``+``, ``*`` (or ``·``) and ``^``.  Polynomials for ``--F1`` are
coefficient lists: ``"1"`` is t, ``"0,2"`` is 2t^2, ``"-1,1"`` is t^2 - t.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import counterexample as cx
from . import extractors as ex
from . import largeness as lg
from . import patterns as pt
from . import satgen as sg
from .colorings import ColoringParseError, Coloring, IntWindowSet, load_coloring, monochrome, parity, random_coloring
from .scale import DEFAULT_BIT_BUDGET, Polynomial

EXIT_FOUND, EXIT_NONE, EXIT_ERROR = 0, 1, 2

PATTERNS = {
    "schur": pt.SCHUR,
    "exp-triple": pt.EXP_TRIPLE,
    "reduced-exp": pt.REDUCED_EXP,
    "hindman-tower": pt.HINDMAN_TOWER,
    "fs": pt.FS,
    "fp": pt.FP,
    "combined": pt.COMBINED,
    "exp-eq": pt.EXP_EQ,
    "pf": pt.PF,
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ------------------------------------------------------------------ helpers


def _coloring(args) -> Coloring:
    src = "monochrome" if getattr(args, "monochrome", False) else args.coloring
    if src is None:
        raise CliError("no coloring given (use --coloring or --monochrome)")
    if src.startswith("file:"):
        path = src[5:]
        if not Path(path).is_file():
            raise CliError(f"coloring file not found: {path}")
        return load_coloring(path)
    if args.N is None:
        raise CliError(f"--N is required for coloring {src!r}")
    if src == "monochrome":
        return monochrome(args.N, args.colors or 1)
    if src == "parity":
        return parity(args.N)
    if src == "random":
        return random_coloring(args.N, args.colors or 2, args.seed)
    raise CliError(f"unknown coloring source {src!r}")


def _ints(text: str) -> list[int]:
    """Comma list with optional ranges: ``1,3,5-9``."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _polys(specs) -> list[Polynomial]:
    return [Polynomial(tuple(int(c) for c in s.split(","))) for s in specs]


def _emit(args, result: dict) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    if args.format == "json":
        text = json.dumps({"config": cfg, "result": result}, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# {k}={v}" for k, v in cfg.items()]
        lines += _table(result)
        text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _table(result: dict) -> list[str]:
    out = []
    for k in sorted(result):
        v = result[k]
        if isinstance(v, list) and v and isinstance(v[0], dict):
            cols = list(v[0])
            out.append(f"{k}:")
            out.append("  " + "\t".join(cols))
            out += ["  " + "\t".join(str(row.get(c, "")) for c in cols) for row in v]
        else:
            out.append(f"{k}\t{json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    return out


# ----------------------------------------------------------------- commands


def cmd_search(args) -> int:
    c = _coloring(args)
    kind = PATTERNS[args.pattern]
    if kind == pt.SCHUR:
        finder, fargs = pt.find_schur, ()
    elif kind == pt.EXP_TRIPLE:
        finder, fargs = pt.find_exp_triple, ()
    elif kind == pt.REDUCED_EXP:
        finder, fargs = pt.find_reduced_exp, (args.base, not args.allow_equal)
    elif kind == pt.HINDMAN_TOWER:
        finder, fargs = pt.find_hindman_tower, (args.k, args.cap)
    elif kind == pt.FS:
        finder, fargs = pt.find_FS, (args.length, args.bound)
    elif kind == pt.FP:
        finder, fargs = pt.find_FP, (args.length,)
    elif kind == pt.COMBINED:
        finder, fargs = pt.find_combined, (args.k, args.same_sequence, args.cap)
    elif kind == pt.EXP_EQ:
        finder, fargs = pt.find_exp_eq, (args.tower_len, args.product_len)
    else:
        F1 = _polys(args.F1 or ["1"])

        def finder(S):
            got = ex.find_PF_monochromatic(S, F1, args.phi or [], args.base, args.k, args.strict, args.bound)
            return None if got is None else got[1]

        fargs = ()
    try:
        hit = pt.find_in_coloring(c, finder, *fargs)
    except pt.SearchTruncated as e:
        _emit(args, {"status": "truncated", "reason": str(e)})
        return EXIT_NONE
    if hit is None:
        _emit(args, {"status": "none", "classes": c.num_colors})
        return EXIT_NONE
    color, w = hit
    _emit(args, {"status": "found", "color": color, "witness": pt.witness_to_dict(w)})
    return EXIT_FOUND


def cmd_verify(args) -> int:
    try:
        doc = json.loads(Path(args.certificate).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read certificate: {e}") from e
    if "result" in doc:
        doc = doc["result"]
    if "witness" in doc:
        doc = doc["witness"]
    w = pt.witness_from_dict(doc)
    v = pt.verify_witness(w, _coloring(args))
    _emit(args, {"valid": v.valid, "color": v.color, "reason": v.reason})
    return EXIT_FOUND if v.valid else EXIT_NONE


def cmd_threshold(args) -> int:
    if args.pattern != "reduced-exp":
        raise CliError("threshold search is implemented for --pattern reduced-exp only")
    res = sg.threshold_search(args.r, args.base, not args.allow_equal, args.N_lo, args.N_hi,
                              args.solver, args.cache, args.timeout)
    verdicts = [{"N": N, "verdict": v} for N, v in sorted(res.verdicts.items()) if N > 0]
    _emit(args, {"resolved": res.resolved, "N_star": res.N_star, "reason": res.reason, "verdicts": verdicts})
    return EXIT_FOUND if res.resolved else EXIT_NONE


def cmd_largeness(args) -> int:
    if args.set is not None:
        if args.N is None:
            raise CliError("--N is required with --set")
        A = IntWindowSet.from_iterable(args.N, _ints(args.set))
    else:
        A = _coloring(args).classes()[args.color]
    n = args.notion
    out = {"notion": n, "size": len(A)}
    if n == "add-thick":
        cert = lg.thick_certificate(A)
        ok = cert is not None and (args.L is None or cert.params["L"] >= args.L)
    elif n == "add-syndetic":
        gap = lg.add_syndetic_gap(A)
        out["gap"] = gap
        ok, cert = args.g is None or gap <= args.g, None
    elif n == "add-pws":
        cert = lg.add_pws_check(A, args.g or 2, args.L or 1)
        ok = cert is not None
    elif n == "mult-thick":
        cert = lg.mult_thick_certificate(A, _ints(args.F or "1"))
        ok = cert is not None
    elif n == "mult-syndetic":
        y = lg.mult_syndetic_check(A, _ints(args.F or "1"), args.M)
        out["uncovered"] = y
        ok, cert = y is None, None
    else:
        cert = lg.ip_r_certificate(A, args.length, args.bound)
        ok = cert is not None
    if cert is not None:
        out["certificate"] = cert.to_dict()
    out["holds"] = ok
    _emit(args, out)
    return EXIT_FOUND if ok else EXIT_NONE


def cmd_counterexample(args) -> int:
    t = cx.generate(args.levels, args.x1, _ints(args.offsets) if args.offsets else None, args.bit_budget)
    rep = cx.verify_conditions(t)
    out = {
        "tower": cx.tower_to_dict(t),
        "report": [{"level": c.level, "condition": c.condition, "order": c.order.value, "passed": c.passed}
                   for c in rep],
        "all_passed": not cx.failures(rep),
    }
    ok = out["all_passed"]
    if args.cap is not None:
        hit = cx.brute_check_no_triple(t, args.cap)
        out["no_triple"] = "clean" if hit is None else {"violation": list(hit)}
        ok = ok and hit is None
    if args.member:
        out["membership"] = {str(v): cx.membership(t, v) for v in _ints(args.member)}
    _emit(args, out)
    return EXIT_FOUND if ok else EXIT_NONE


def cmd_extract(args) -> int:
    if args.instance == "full":
        if args.N is None:
            raise CliError("--N is required for the full instance")
        A = IntWindowSet.full(args.N)
        cert = ex.PSCertificate(A, (1,), A)
    else:
        cert = ex.planted_ps_instance(random.Random(args.seed), args.base, args.translates)
    w, trace = ex.main1_extract(cert, args.base, args.M_cap)
    ex.replay_trace(cert, trace)
    _emit(args, {"N": cert.A.window_size, "F": list(cert.F), "witness": pt.witness_to_dict(w),
                 "trace": json.loads(trace.to_json())})
    return EXIT_FOUND


# ------------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--config")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bit-budget", type=int, default=DEFAULT_BIT_BUDGET)


def _coloring_flags(p):
    p.add_argument("--coloring", help="parity | monochrome | random | file:PATH")
    p.add_argument("--monochrome", action="store_true")
    p.add_argument("--N", type=int)
    p.add_argument("--colors", type=int, help="number of colors for monochrome/random")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ramsey-exp", description="Finite-window search for exponential patterns.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search")
    _common(p)
    _coloring_flags(p)
    p.add_argument("--pattern", choices=sorted(PATTERNS), required=True)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--allow-equal", action="store_true", help="reduced-exp: allow x == y")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--length", type=int, default=2, help="sequence length for fs / fp")
    p.add_argument("--bound", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--same-sequence", action="store_true")
    p.add_argument("--tower-len", type=int, default=2)
    p.add_argument("--product-len", type=int, default=2)
    p.add_argument("--F1", nargs="+")
    p.add_argument("--phi", nargs="+")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify")
    _common(p)
    _coloring_flags(p)
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("threshold")
    _common(p)
    p.add_argument("--pattern", default="reduced-exp")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--allow-equal", action="store_true")
    p.add_argument("--N-lo", type=int, default=1)
    p.add_argument("--N-hi", type=int, default=1000)
    p.add_argument("--solver", default="pysat:cadical195")
    p.add_argument("--cache")
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("largeness")
    _common(p)
    _coloring_flags(p)
    p.add_argument("--notion", required=True,
                   choices=("add-thick", "add-syndetic", "add-pws", "mult-thick", "mult-syndetic", "ip-r"))
    p.add_argument("--set", help="explicit members, e.g. 1,3,5-9")
    p.add_argument("--color", type=int, default=0)
    p.add_argument("--g", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--F")
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--length", type=int, default=2)
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_largeness)

    p = sub.add_parser("counterexample")
    _common(p)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--x1", type=int, default=3)
    p.add_argument("--offsets")
    p.add_argument("--cap", type=int)
    p.add_argument("--member")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("extract")
    _common(p)
    p.add_argument("--instance", choices=("planted", "full"), default="planted")
    p.add_argument("--N", type=int)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--translates", type=int)
    p.add_argument("--M-cap", type=int, default=24)
    p.set_defaults(func=cmd_extract)
    return ap


def _read_config(path) -> dict:
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        cfg[k.strip().lstrip("-")] = v.strip()
    return cfg


def _config_argv(cfg: dict, sub: argparse.ArgumentParser) -> list[str]:
    # turn config entries into flags so they go through the same validation
    flags = {}
    for a in sub._actions:
        for s in a.option_strings:
            if s.startswith("--"):
                flags[s[2:].replace("-", "_")] = (s, a)
    argv = []
    for k, v in cfg.items():
        hit = flags.get(k.replace("-", "_"))
        if hit is None:
            raise CliError(f"unknown config key {k!r}")
        flag, action = hit
        if action.nargs == 0:
            if v.lower() in ("1", "true", "yes"):
                argv.append(flag)
        elif action.nargs in ("+", "*"):
            argv += [flag, *v.split()]
        else:
            argv += [flag, v]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            cmd = next((a for a in argv if not a.startswith("-")), None)
            subs = ap._subparsers._group_actions[0].choices
            if cmd not in subs:
                raise CliError("a subcommand must precede --config")
            i = argv.index(cmd)
            # config first so explicit flags override it
            argv = argv[: i + 1] + _config_argv(_read_config(known.config), subs[cmd]) + argv[i + 1:]
        args = ap.parse_args(argv)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, IndexError, OverflowError, OSError, RuntimeError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
