"""Constructive procedures: polynomial return sets, the pigeonhole extraction of
{x, y, x*n^y} from a piecewise syndetic set, and the polynomial exponent family.
"""

from __future__ import annotations

import ast
import json
import random
from dataclasses import asdict, dataclass, field
from itertools import combinations, product

from .colorings import IntWindowSet
from .patterns import (
    PF,
    REDUCED_EXP,
    PatternWitness,
    SearchTruncated,
    bounded_pow,
    fs_values,
    make_witness,
)
from .scale import Polynomial, ScaleValue, poly_eval, sv_mul, sv_pow

# exhaustive enumeration is used while k**M stays below this
EXHAUSTIVE_LIMIT = 1 << 25

DEFAULT_FAMILY_CAP = 100_000


class ThresholdNotFound(RuntimeError):
    pass


class ThicknessInsufficient(RuntimeError):
    pass


class FamilyTooLarge(RuntimeError):
    pass


# -------------------------------------------------------------- return sets


def vdw_return_set(A: IntWindowSet, P, d_bound: int) -> set[int]:
    """All d <= d_bound with some a in A such that a + p(d) is in A for every p."""
    P = list(P)
    out = set()
    for d in range(1, d_bound + 1):
        shifts = [poly_eval(p, d) for p in P]
        for a in A.members:
            if all(1 <= a + s and a + s in A for s in shifts):
                out.add(d)
                break
    return out


def ipr_star_check(D, r: int, B: int) -> tuple | None:
    """Least increasing b1..br <= B whose finite sums all miss D; None if D meets every one."""
    if r < 1:
        raise ValueError("r must be >= 1")
    D = set(D)
    for bs in combinations(range(1, B + 1), r):
        if not fs_values(bs) & D:
            return bs
    return None


# ------------------------------------------------------ pigeonhole threshold


@dataclass(frozen=True)
class PigeonholeResult:
    M: int
    avoiding: tuple  # a k-coloring of [M - 1] with no monochromatic {a, a + y}
    method: str


def _avoiding_coloring(k: int, M: int, Y) -> tuple | None:
    # exhaustive backtracking over colorings of [1..M]; color of 1 fixed to 0
    ys = sorted(y for y in Y if y < M)
    col = [None] * (M + 1)

    def ok(i, c):
        return all(col[i - y] != c for y in ys if y < i)

    def dfs(i, used):
        if i > M:
            return True
        for c in range(min(k, used + 1)):
            if ok(i, c):
                col[i] = c
                if dfs(i + 1, max(used, c + 1)):
                    return True
        col[i] = None
        return False

    return tuple(col[1:]) if dfs(1, 0) else None


def _avoiding_coloring_sat(k: int, M: int, Y, solver) -> tuple | None:
    from .satgen import encode_avoidance, run_solver, SAT, UNSAT

    blocks = [(a, a + y) for y in sorted(Y) for a in range(1, M - y + 1)]
    inst = encode_avoidance(M, k, blocks, {"pattern": "difference-pair", "N": M, "r": k})
    res = run_solver(inst, solver)
    if res.verdict == UNSAT:
        return None
    if res.verdict != SAT:
        raise ThresholdNotFound(f"solver returned {res.verdict} at M={M}")
    return res.coloring.colors


def pigeonhole_threshold(k: int, Y, M_cap: int, solver=None) -> PigeonholeResult | None:
    """Least M <= M_cap such that every k-coloring of [M] has a monochromatic
    {a, a + y} with y in Y; None if no such M up to the cap.
    """
    Y = {y for y in Y if y >= 1}
    if k < 1 or not Y:
        raise ValueError("need k >= 1 and a nonempty Y")
    prev = ()
    for M in range(1, M_cap + 1):
        if k**M < EXHAUSTIVE_LIMIT or solver is None:
            col, method = _avoiding_coloring(k, M, Y), "exhaustive"
        else:
            col, method = _avoiding_coloring_sat(k, M, Y, solver), "sat"
        if col is None:
            return PigeonholeResult(M, prev, method)
        prev = col
    return None


# ------------------------------------------------------------ extraction


@dataclass(frozen=True)
class PSCertificate:
    """A with translates F whose union of f^-1 A contains the claimed thick part T."""

    A: IntWindowSet
    F: tuple
    T: IntWindowSet

    def __post_init__(self):
        F = tuple(sorted(set(self.F)))
        if not F or F[0] < 1:
            raise ValueError("F must be a nonempty set of naturals")
        object.__setattr__(self, "F", F)
        for t in self.T.members:
            if not any(f * t in self.A for f in F):
                raise ValueError(f"{t} in T is not covered by any f^-1 A")


@dataclass
class ExtractionTrace:
    M: int
    t: int
    labels: list  # labels[m - 1] = index into F of the least f with f*t*n^m in A
    a: int
    y: int
    f: int
    x: int
    base: int
    steps: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.steps, separators=(",", ":"))


def _anchor(T: IntWindowSet, n: int, M: int) -> int | None:
    N = T.window_size
    for t in T.members:
        top = bounded_pow(n, M, N // t)
        if top is None:
            return None
        if all(t * n**m in T for m in range(1, M + 1)):
            return t
    return None


def _labels(cert: PSCertificate, t: int, n: int, M: int) -> list[int]:
    return [next(i for i, f in enumerate(cert.F) if f * t * n**m in cert.A) for m in range(1, M + 1)]


def _pair(labels, Y, M):
    for a in range(1, M + 1):
        for y in Y:
            if a + y > M:
                break
            if labels[a - 1] == labels[a + y - 1]:
                return a, y
    return None


def main1_extract(cert: PSCertificate, n: int, M_cap: int = 24, solver=None):
    """Run the pigeonhole construction; returns (witness, trace).

    With k = |F|, pick M so every k-coloring of [M] has a monochromatic
    {a, a + y} with y in A, find t with t*n^m in T for m <= M, label m by the
    least f with f*t*n^m in A, and read off x = f*t*n^a together with y.
    """
    if n < 2:
        raise ValueError("base must be >= 2")
    Y = [y for y in cert.A.members if y <= M_cap]
    if not Y:
        raise ThresholdNotFound("A has no element below the threshold cap")
    th = pigeonhole_threshold(len(cert.F), Y, M_cap, solver)
    if th is None:
        raise ThresholdNotFound(f"no pigeonhole threshold up to M_cap={M_cap}")
    M = th.M
    t = _anchor(cert.T, n, M)
    if t is None:
        raise ThicknessInsufficient(f"no t with t*{n}^m in T for all m <= {M} inside the window")
    labels = _labels(cert, t, n, M)
    a, y = _pair(labels, Y, M)
    f = cert.F[labels[a - 1]]
    x = f * t * n**a
    w = make_witness(REDUCED_EXP, {"base": n, "distinct": False}, (x, y), cert.A.window_size)
    steps = [
        {"step": "threshold", "k": len(cert.F), "M": M, "method": th.method},
        {"step": "anchor", "t": t},
        {"step": "labels", "labels": labels},
        {"step": "pair", "a": a, "y": y, "f": f},
        {"step": "witness", "x": x, "y": y, "value": x * n**y},
    ]
    return w, ExtractionTrace(M, t, labels, a, y, f, x, n, steps)


def replay_trace(cert: PSCertificate, trace: ExtractionTrace) -> PatternWitness:
    """Re-derive every step of a trace; raises AssertionError on any disagreement."""
    n, M, t = trace.base, trace.M, trace.t
    assert all(t * n**m in cert.T for m in range(1, M + 1)), "anchor not in T"
    assert _anchor(cert.T, n, M) == t, "anchor is not the least valid t"
    assert _labels(cert, t, n, M) == trace.labels, "labels differ"
    Y = [y for y in cert.A.members if y <= M]
    assert _pair(trace.labels, Y, M) == (trace.a, trace.y), "pair differs"
    assert cert.F[trace.labels[trace.a - 1]] == trace.f
    assert trace.x == trace.f * t * n**trace.a
    return make_witness(REDUCED_EXP, {"base": n, "distinct": False}, (trace.x, trace.y), cert.A.window_size)


def planted_ps_instance(rng: random.Random, n: int, k: int | None = None, noise: int = 20) -> PSCertificate:
    """Random certified instance: a dilated geometric core spread over k translates,
    plus a small planted IP set so the pigeonhole threshold is reached early."""
    k = k or rng.randint(1, 3)
    F = sorted(rng.sample(range(1, 7), k))
    bs = [rng.randint(1, 2) for _ in range(k)]
    depth = sum(bs) + 2
    t0 = rng.randint(1, 12)
    core = [t0 * n**m for m in range(0, depth + 1)]
    N = F[-1] * core[-1]
    A = set(fs_values(bs))
    for c in core:
        A.add(rng.choice(F) * c)
    A |= {rng.randint(1, N) for _ in range(noise)}
    A_set = IntWindowSet.from_iterable(N, A)
    T = IntWindowSet.from_iterable(N, core)
    return PSCertificate(A_set, tuple(F), T)


# --------------------------------------------------- polynomial exponent family


_ALLOWED_OPS = {ast.Add: lambda a, b: a + b, ast.Mult: lambda a, b: a * b}


def parse_phi(text: str):
    """Compile a growth function from the grammar: x, integer literals, +, * (or ·), ^.

    Returns a callable ``f(x) -> int``.
    """
    src = text.replace("·", "*").replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as e:
        raise ValueError(f"cannot parse growth function {text!r}") from e

    def ev(node, x):
        if isinstance(node, ast.Expression):
            return ev(node.body, x)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id == "x":
            return x
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left, x), ev(node.right, x)
            if isinstance(node.op, ast.Pow):
                if b > 64 or a.bit_length() * b > 4096:
                    raise FamilyTooLarge(f"growth function {text!r} too large at x={x}")
                return a**b
            if type(node.op) in _ALLOWED_OPS:
                return _ALLOWED_OPS[type(node.op)](a, b)
        raise ValueError(f"unsupported syntax in growth function {text!r}")

    ev(tree, 1)  # reject bad syntax eagerly

    def f(x: int) -> int:
        v = ev(tree, x)
        if v < 1:
            raise ValueError(f"growth function {text!r} gave {v} < 1 at x={x}")
        return v

    f.source = text
    return f


def bounded_polys(D: int, cap: int = DEFAULT_FAMILY_CAP) -> list[Polynomial]:
    """Nonzero integer polynomials without constant term, degree <= D, |coefficients| <= D."""
    if (2 * D + 1) ** D - 1 > cap:
        raise FamilyTooLarge(f"polynomial family for bound {D} exceeds cap {cap}")
    out = []
    for cs in product(range(-D, D + 1), repeat=D):
        if any(cs):
            out.append(Polynomial(cs))
    return out


@dataclass(frozen=True)
class PFFamily:
    values: frozenset  # of ScaleValue
    negative: frozenset = frozenset()  # (x_k, exponent sum) pairs with a negative sum


def _exponent_sums(xs, F1, phis, cap):
    sums = {0}
    for i, x in enumerate(xs[:-1], start=1):
        if i == 1:
            polys = list(F1)
        else:
            polys = bounded_polys(phis[i - 2](xs[i - 2]), cap)
        if len(sums) * len(polys) > cap:
            raise FamilyTooLarge("exponent-sum enumeration exceeds cap")
        vals = {poly_eval(p, x) for p in polys}
        sums = {s + v for s in sums for v in vals}
    return sums


def enumerate_PF(xs, F1, phis, n: int, cap: int = DEFAULT_FAMILY_CAP) -> PFFamily:
    """Top-level family {x_k * n^(p_1(x_1) + ... + p_{k-1}(x_{k-1}))}.

    ``p_1`` ranges over F1 and ``p_i`` (i >= 2) over integer polynomials with
    degree and coefficient bound ``phis[i-2](x_{i-1})``.
    """
    xs = tuple(xs)
    if not 1 <= len(xs) <= 3:
        raise ValueError("family depth must be 1, 2 or 3")
    if n < 2:
        raise ValueError("base must be >= 2")
    phis = [parse_phi(p) if isinstance(p, str) else p for p in phis]
    sums = _exponent_sums(xs, F1, phis, cap)
    top = xs[-1]
    vals = frozenset(sv_mul(top, sv_pow(n, s)) if s > 0 else ScaleValue.of(top) for s in sums if s >= 0)
    neg = frozenset((top, s) for s in sums if s < 0)
    return PFFamily(vals, neg)


def family_from_params(params: dict, xs, limit: int) -> PFFamily:
    F1 = [Polynomial(c) for c in params["F1"]]
    return enumerate_PF(xs, F1, params.get("phi", []), params["n"], params.get("cap", DEFAULT_FAMILY_CAP))


def find_PF_monochromatic(S: IntWindowSet, F1, phis, n: int, k: int, strict: bool = False,
                          x_bound: int | None = None, cap: int = DEFAULT_FAMILY_CAP):
    """Least xs (entries in [1..x_bound]) whose whole family lies in S.

    Returns (xs, witness) or None.  The xs themselves need not be in S unless
    ``strict``.  Raises SearchTruncated if ``x_bound`` is below the window size
    and nothing was found, or if a family grows past ``cap``.
    """
    if not 1 <= k <= 3:
        raise ValueError("family depth must be 1, 2 or 3")
    N = S.window_size
    xb = N if x_bound is None else min(x_bound, N)
    phi_src = [p if isinstance(p, str) else p.source for p in phis]
    compiled = [parse_phi(p) for p in phi_src]
    params = {"n": n, "k": k, "F1": [list(p.coeffs) for p in F1], "phi": phi_src, "strict": strict}
    if cap != DEFAULT_FAMILY_CAP:
        params["cap"] = cap

    def prefixes(depth, acc):
        if depth == 0:
            yield acc
            return
        for x in range(1, xb + 1):
            if strict and x not in S:
                continue
            yield from prefixes(depth - 1, acc + (x,))

    for pre in prefixes(k - 1, ()):
        try:
            sums = _exponent_sums(pre + (1,), F1, compiled, cap)
        except FamilyTooLarge as e:
            raise SearchTruncated(f"family at prefix {pre} exceeds cap") from e
        if min(sums) < 0:
            continue
        # x_k * n^max(sums) <= N bounds x_k
        top_mult = bounded_pow(n, max(sums), N)
        if top_mult is None:
            continue
        mults = sorted(n**s for s in sums)
        for xk in range(1, min(xb, N // top_mult) + 1):
            if strict and xk not in S:
                continue
            if all(xk * m in S for m in mults):
                xs = pre + (xk,)
                return xs, make_witness(PF, params, xs, N)
    if xb < N:
        raise SearchTruncated(f"no family found with entries <= {xb}")
    return None
