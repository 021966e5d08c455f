"""Finders and verifiers for monochromatic patterns inside one color class.

Every finder scans candidates in ascending lexicographic order of their
generators and returns the first hit, so results are the lexicographically
least witness and are reproducible.  Witnesses carry their full span and can
be re-checked against any coloring with :func:`verify_witness`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .colorings import Coloring, IntWindowSet
from .scale import from_text, sv_pow, to_text, ScaleValue

SCHUR = "schur"
EXP_TRIPLE = "exp_triple"
REDUCED_EXP = "reduced_exp"
HINDMAN_TOWER = "hindman_tower"
FS = "fs"
FP = "fp"
COMBINED = "combined"
EXP_EQ = "exp_eq"
PF = "pf"

KINDS = (SCHUR, EXP_TRIPLE, REDUCED_EXP, HINDMAN_TOWER, FS, FP, COMBINED, EXP_EQ, PF)


class SearchTruncated(Exception):
    """The lexicographic scan reached a candidate whose values exceed the search cap."""


class OutOfWindow(ValueError):
    pass


@dataclass(frozen=True)
class PatternWitness:
    kind: str
    params: dict
    generators: tuple
    span: tuple = field(default=())

    def to_json(self) -> str:
        return json.dumps(witness_to_dict(self), separators=(",", ":"))


@dataclass(frozen=True)
class Verdict:
    valid: bool
    color: int | None = None
    reason: str | None = None

    def __bool__(self):
        return self.valid


# ------------------------------------------------------------------ spans


def bounded_pow(b: int, e: int, limit: int) -> int | None:
    """``b**e`` if it is at most ``limit``, else None (never materializes big values)."""
    if b == 1 or e == 0:
        return 1 if limit >= 1 else None
    v = sv_pow(b, e, bit_budget=limit.bit_length())
    if not v.is_exact or v.exact > limit:
        return None
    return v.exact


def fep_values(xs, limit: int) -> set[int]:
    """All towers over increasing index subsequences of ``xs``.

    The tower for i1 < ... < im is x[im] ** (tower for i1..i(m-1)), so the
    latest index sits at the base.  Raises OutOfWindow if any tower exceeds
    ``limit``.
    """
    vals: set[int] = set()
    for x in xs:
        new = {x}
        for e in vals:
            v = bounded_pow(x, e, limit)
            if v is None:
                raise OutOfWindow(f"{x}^{e} exceeds {limit}")
            new.add(v)
        vals |= new
    if any(v > limit for v in vals):
        raise OutOfWindow("generator exceeds window")
    return vals


def fs_values(bs) -> set[int]:
    sums: set[int] = set()
    for b in bs:
        sums |= {b} | {b + s for s in sums}
    return sums


def fp_values(bs) -> set[int]:
    prods: set[int] = set()
    for b in bs:
        prods |= {b} | {b * s for s in prods}
    return prods


def tower_value(xs, limit: int) -> int | None:
    """x_n ** (x_{n-1} ** ... ** x_1) or None when it exceeds ``limit``."""
    e = xs[0]
    if e > limit:
        return None
    for x in xs[1:]:
        e = bounded_pow(x, e, limit)
        if e is None:
            return None
    return e


def _split(kind, params, gens):
    if kind == COMBINED:
        k = params["k"]
        if params["same_sequence"]:
            return tuple(gens), tuple(gens)
        return tuple(gens[:k]), tuple(gens[k:])
    if kind == EXP_EQ:
        n = params["n"]
        return tuple(gens[:n]), tuple(gens[n:])
    raise ValueError(kind)


def structural_problem(kind: str, params: dict, gens) -> str | None:
    """Reason the generators violate the kind's side conditions, or None."""
    gens = tuple(gens)
    if any(not isinstance(g, int) or g < 1 for g in gens):
        return "generators must be naturals"
    increasing = lambda s: all(a < b for a, b in zip(s, s[1:]))
    if kind == SCHUR:
        if len(gens) != 2 or gens[0] >= gens[1]:
            return "schur needs x < y"
    elif kind == EXP_TRIPLE:
        if len(gens) != 2 or gens[0] == gens[1] or min(gens) < 2:
            return "exp triple needs x != y, both >= 2"
    elif kind == REDUCED_EXP:
        if len(gens) != 2 or params.get("base", 0) < 2:
            return "reduced pattern needs two generators and base >= 2"
        if params.get("distinct") and gens[0] == gens[1]:
            return "distinct flag set but x == y"
    elif kind == HINDMAN_TOWER:
        if len(gens) != params.get("k") or not increasing(gens) or min(gens, default=2) < 2:
            return "tower needs k increasing generators >= 2"
    elif kind in (FS, FP):
        if len(gens) != params.get("r") or not increasing(gens):
            return "needs r increasing generators"
        if kind == FP and min(gens, default=2) < 2:
            return "product generators must be >= 2"
    elif kind == COMBINED:
        k = params.get("k")
        expected = k if params.get("same_sequence") else 2 * k
        if len(gens) != expected:
            return "wrong number of generators"
        xs, ys = _split(kind, params, gens)
        if not increasing(xs) or not increasing(ys) or min(gens) < 2:
            return "sequences must be increasing and >= 2"
    elif kind == EXP_EQ:
        if len(gens) != params.get("n", 0) + params.get("m", 0) or min(gens, default=2) < 2:
            return "equation variables must be >= 2"
    elif kind == PF:
        if len(gens) != params.get("k"):
            return "needs k generators"
    else:
        return f"unknown kind {kind!r}"
    return None


def compute_span(kind: str, params: dict, gens, limit: int) -> tuple[int, ...]:
    """Closure of the generators under the kind's rule; OutOfWindow past ``limit``."""
    gens = tuple(gens)
    if kind == SCHUR:
        vals = {gens[0], gens[1], gens[0] + gens[1]}
    elif kind == EXP_TRIPLE:
        v = bounded_pow(gens[0], gens[1], limit)
        if v is None:
            raise OutOfWindow("x^y exceeds window")
        vals = {gens[0], gens[1], v}
    elif kind == REDUCED_EXP:
        v = bounded_pow(params["base"], gens[1], limit)
        if v is None:
            raise OutOfWindow("x*n^y exceeds window")
        vals = {gens[0], gens[1], gens[0] * v}
    elif kind == HINDMAN_TOWER:
        vals = fep_values(gens, limit)
    elif kind == FS:
        vals = fs_values(gens)
    elif kind == FP:
        vals = fp_values(gens)
    elif kind == COMBINED:
        xs, ys = _split(kind, params, gens)
        vals = fep_values(xs, limit) | fp_values(ys)
    elif kind == EXP_EQ:
        vals = set(gens)
    elif kind == PF:
        from .extractors import family_from_params

        fam = family_from_params(params, gens, limit)
        if fam.negative:
            raise OutOfWindow("family has members with negative exponent sums")
        vals = set()
        for v in fam.values:
            if not v.is_exact or v.exact > limit:
                raise OutOfWindow("family value exceeds window")
            vals.add(v.exact)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if max(vals) > limit:
        raise OutOfWindow("span exceeds window")
    return tuple(sorted(vals))


def make_witness(kind: str, params: dict, gens, limit: int) -> PatternWitness:
    return PatternWitness(kind, dict(params), tuple(gens), compute_span(kind, params, gens, limit))


def _equation_holds(params, gens) -> bool:
    xs, ys = _split(EXP_EQ, params, gens)
    prod = 1
    for y in ys:
        prod *= y
    return tower_value(xs, prod) == prod


# ----------------------------------------------------------------- finders


def find_schur(S: IntWindowSet) -> PatternWitness | None:
    mem = S.members
    for i, x in enumerate(mem):
        for y in mem[i + 1:]:
            if x + y > S.window_size:
                break
            if x + y in S:
                return make_witness(SCHUR, {}, (x, y), S.window_size)
    return None


def find_exp_triple(S: IntWindowSet) -> PatternWitness | None:
    N = S.window_size
    cand = [x for x in S.members if x >= 2]
    for x in cand:
        for y in cand:
            if y == x:
                continue
            v = bounded_pow(x, y, N)
            if v is None:
                break
            if v in S:
                return make_witness(EXP_TRIPLE, {}, (x, y), N)
    return None


def find_reduced_exp(S: IntWindowSet, base: int = 2, distinct: bool = False) -> PatternWitness | None:
    if base < 2:
        raise ValueError("base must be >= 2")
    N = S.window_size
    for x in S.members:
        for y in S.members:
            p = bounded_pow(base, y, N // x)
            if p is None:
                break
            if distinct and x == y:
                continue
            if x * p in S:
                return make_witness(REDUCED_EXP, {"base": base, "distinct": distinct}, (x, y), N)
    return None


def enumerate_FEP(xs, depth: int | None = None) -> set[ScaleValue]:
    """Every tower over index subsequences of ``xs`` (all of them when depth is None)."""
    xs = tuple(xs)
    if depth is not None and depth != len(xs):
        raise ValueError("depth must equal the number of generators")
    if any(a >= b for a, b in zip(xs, xs[1:])) or min(xs) < 2:
        raise ValueError("generators must be strictly increasing and >= 2")
    vals: set[ScaleValue] = set()
    for x in xs:
        new = {ScaleValue.of(x)} | {sv_pow(x, e) for e in vals}
        vals |= new
    return vals


def _fep_extend(x: int, values, S: IntWindowSet, cap: int):
    # new tower values with x on top; None if some value leaves S
    N = S.window_size
    if x not in S:
        return None
    new = [x]
    for e in sorted(values):
        v = bounded_pow(x, e, N)
        if v is None:
            return None
        if v > cap:
            raise SearchTruncated(f"tower {x}^{e} above cap {cap}")
        if v not in S:
            return None
        new.append(v)
    return new


def _fep_too_big(x: int, values, N: int) -> bool:
    # monotone in x: once x^max(values) > N no larger x works either
    return bool(values) and bounded_pow(x, max(values), N) is None


def find_hindman_tower(S: IntWindowSet, k: int, cap=None) -> PatternWitness | None:
    """Least x1 < ... < xk (all >= 2) whose towers all lie in S.

    ``cap`` bounds the tower values the search is allowed to evaluate; the
    default (the window size) makes the search complete.
    """
    if k < 2:
        raise ValueError("depth must be >= 2")
    N = S.window_size
    cap = N if cap is None else int(cap)
    cand = [x for x in S.members if x >= 2]

    def dfs(chosen, values):
        if len(chosen) == k:
            return chosen
        lo = chosen[-1] if chosen else 1
        for x in cand:
            if x <= lo:
                continue
            if x > cap:
                raise SearchTruncated(f"generator {x} above cap {cap}")
            if _fep_too_big(x, values, N):
                break
            new = _fep_extend(x, values, S, cap)
            if new is None:
                continue
            found = dfs(chosen + [x], values | set(new))
            if found:
                return found
        return None

    gens = dfs([], set())
    return None if gens is None else make_witness(HINDMAN_TOWER, {"k": k}, gens, N)


def _closure_dfs(S, r, op, lo_gen, bound):
    N = S.window_size
    cand = [b for b in S.members if b >= lo_gen and b <= bound]

    def dfs(chosen, vals):
        if len(chosen) == r:
            return chosen
        last = chosen[-1] if chosen else 0
        for b in cand:
            if b <= last:
                continue
            if vals and op(b, max(vals)) > N:
                break
            new = [b] + [op(b, v) for v in vals]
            if all(v in S for v in new):
                found = dfs(chosen + [b], vals | set(new))
                if found:
                    return found
        return None

    return dfs([], set())


def find_FS(S: IntWindowSet, r: int, bound: int | None = None) -> PatternWitness | None:
    if r < 1:
        raise ValueError("r must be >= 1")
    bound = S.window_size if bound is None else bound
    gens = _closure_dfs(S, r, lambda a, b: a + b, 1, bound)
    return None if gens is None else make_witness(FS, {"r": r}, gens, S.window_size)


def find_FP(S: IntWindowSet, r: int) -> PatternWitness | None:
    if r < 1:
        raise ValueError("r must be >= 1")
    gens = _closure_dfs(S, r, lambda a, b: a * b, 2, S.window_size)
    return None if gens is None else make_witness(FP, {"r": r}, gens, S.window_size)


def find_combined(S: IntWindowSet, k: int, same_sequence: bool = False, cap=None) -> PatternWitness | None:
    """FEP(xs) together with FP(ys) inside S; one sequence when ``same_sequence``."""
    if k < 2:
        raise ValueError("depth must be >= 2")
    N = S.window_size
    params = {"k": k, "same_sequence": same_sequence}
    if not same_sequence:
        tw = find_hindman_tower(S, k, cap)
        fp = find_FP(S, k)
        if tw is None or fp is None:
            return None
        return make_witness(COMBINED, params, tw.generators + fp.generators, N)

    cap = N if cap is None else int(cap)
    cand = [x for x in S.members if x >= 2]

    def dfs(chosen, towers, prods):
        if len(chosen) == k:
            return chosen
        lo = chosen[-1] if chosen else 1
        for x in cand:
            if x <= lo:
                continue
            if x > cap:
                raise SearchTruncated(f"generator {x} above cap {cap}")
            if _fep_too_big(x, towers, N):
                break
            new_t = _fep_extend(x, towers, S, cap)
            if new_t is None:
                continue
            new_p = [x * p for p in prods]
            if any(p > N or p not in S for p in new_p):
                continue
            found = dfs(chosen + [x], towers | set(new_t), prods | {x} | set(new_p))
            if found:
                return found
        return None

    gens = dfs([], set(), set())
    return None if gens is None else make_witness(COMBINED, params, gens, N)


def _factorizations(T: int, m: int, cand, S):
    # lexicographically first (y1..ym) in S with product T
    if m == 1:
        return (T,) if T in S and T >= 2 else None
    for y in cand:
        # the other m-1 factors are each >= 2
        if y << (m - 1) > T:
            break
        if T % y == 0:
            rest = _factorizations(T // y, m - 1, cand, S)
            if rest:
                return (y,) + rest
    return None


def find_exp_eq(S: IntWindowSet, tower_len: int, product_len: int) -> PatternWitness | None:
    """Least (x1..xn, y1..ym) in S, all >= 2, with x_n^(...^x_1) = y1*...*ym.

    Only the variables need to share a color; the common value itself does not.
    """
    n, m = tower_len, product_len
    if n < 1 or m < 1:
        raise ValueError("tower and product lengths must be >= 1")
    N = S.window_size
    limit = N**m
    cand = [x for x in S.members if x >= 2]
    params = {"n": n, "m": m}

    def dfs(xs):
        if len(xs) == n:
            T = tower_value(xs, limit)
            if T is None:
                return None
            ys = _factorizations(T, m, cand, S)
            return xs + list(ys) if ys else None
        for x in cand:
            partial = tower_value(xs + [x], limit)
            if partial is None:
                break
            # minimal completion 2^(2^...partial) must stay within limit
            if len(xs) + 1 < n and bounded_pow(2, partial, limit) is None:
                break
            found = dfs(xs + [x])
            if found:
                return found
        return None

    gens = dfs([])
    return None if gens is None else make_witness(EXP_EQ, params, gens, N)


# -------------------------------------------------------------- verification


def verify_witness(w: PatternWitness, c: Coloring) -> Verdict:
    problem = structural_problem(w.kind, w.params, w.generators)
    if problem:
        return Verdict(False, reason=f"structure: {problem}")
    if w.kind == EXP_EQ and not _equation_holds(w.params, w.generators):
        return Verdict(False, reason="equation-mismatch")
    try:
        span = compute_span(w.kind, w.params, w.generators, c.window_size)
    except OutOfWindow as e:
        return Verdict(False, reason=f"out-of-window: {e}")
    if tuple(sorted(w.span)) != span:
        return Verdict(False, reason="span-mismatch")
    colors = {c(v) for v in span}
    if len(colors) != 1:
        return Verdict(False, reason="not-monochromatic")
    return Verdict(True, color=colors.pop())


def find_in_coloring(c: Coloring, finder, *args, **kwargs):
    """Search every color class in order; returns (color, witness) or None."""
    for i, S in enumerate(c.classes()):
        w = finder(S, *args, **kwargs)
        if w is not None:
            return i, w
    return None


# ----------------------------------------------------------- serialization


def witness_to_dict(w: PatternWitness) -> dict:
    return {
        "kind": w.kind,
        "params": {k: w.params[k] for k in sorted(w.params)},
        "generators": list(w.generators),
        "span": [to_text(ScaleValue.of(v)) for v in w.span],
    }


def witness_from_dict(d: dict) -> PatternWitness:
    try:
        span = tuple(int(from_text(s)) for s in d["span"])
        return PatternWitness(d["kind"], dict(d["params"]), tuple(d["generators"]), span)
    except (KeyError, TypeError, OverflowError) as e:
        raise ValueError(f"malformed witness certificate: {e}") from e
