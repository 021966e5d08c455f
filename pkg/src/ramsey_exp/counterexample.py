"""A thick set A = union of intervals [x_n, y_n] with no exponential triple.

Levels are built from x_1 = y_1 and the recurrence

    x_{n+1} = y_n^{y_n} + 1 + delta_n,    y_{n+1} = x_{n+1} * y_n

(delta_n = 0 is the minimal tower).  Past a few levels the endpoints only
exist as log2 brackets; every check goes through certified comparisons and an
undecided comparison counts as a failure.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from .scale import DEFAULT_BIT_BUDGET, Order, ScaleValue, as_scale, sv_add, sv_compare, sv_mul, sv_pow, to_text

IN, OUT, INDETERMINATE = "in", "out", "indeterminate"

# x**y is materialized when its bit length is at most this
MATERIALIZE_BITS = 1 << 22


class ConditionViolation(ValueError):
    def __init__(self, level: int, condition: str, order: Order):
        super().__init__(f"level {level}: {condition} fails ({order.value})")
        self.level = level
        self.condition = condition
        self.order = order


class InsufficientLevels(ValueError):
    pass


class MembershipIndeterminate(RuntimeError):
    pass


@dataclass(frozen=True)
class Level:
    x: ScaleValue
    y: ScaleValue
    x_expr: str = ""
    y_expr: str = ""


@dataclass(frozen=True)
class IntervalTower:
    levels: tuple
    strategy: str = "minimal"
    seeds: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.levels)

    def pairs(self):
        return [(lv.x, lv.y) for lv in self.levels]


def generate(levels: int, x1: int = 3, offsets=None, bit_budget: int = DEFAULT_BIT_BUDGET) -> IntervalTower:
    """Tower with ``levels`` levels; ``offsets[n-1]`` is added to x_{n+1}.

    Endpoints longer than ``bit_budget`` bits are kept as log2 brackets.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    if x1 < 3:
        raise ValueError("x_1 must exceed 2")
    offsets = list(offsets or [])
    if any(d < 0 for d in offsets):
        raise ValueError("offsets must be non-negative")
    offsets += [0] * (levels - 1 - len(offsets))
    x = y = ScaleValue.of(x1)
    out = [Level(x, y, str(x1), str(x1))]
    for n in range(1, levels):
        bump = 1 + offsets[n - 1]
        try:
            x = sv_add(sv_pow(y, y, bit_budget), bump, bit_budget)
            y = sv_mul(x, y, bit_budget)
        except OverflowError as e:
            raise OverflowError(f"level {n + 1} is beyond the log-domain range") from e
        out.append(Level(x, y, f"pow(y{n},y{n})+{bump}", f"mul(x{n + 1},y{n})"))
    minimal = x1 == 3 and not any(offsets)
    seeds = {"x1": x1, "offsets": offsets[: levels - 1]}
    t = IntervalTower(tuple(out), "minimal" if minimal else "seeded", seeds)
    bad = failures(verify_conditions(t))
    if bad:
        c = bad[0]
        raise ConditionViolation(c.level, c.condition, c.order)
    return t


def from_pairs(pairs, validate: bool = True) -> IntervalTower:
    """Tower from explicit endpoints; rejects the first failing condition when validating."""
    lv = tuple(Level(as_scale(x), as_scale(y), str(x), str(y)) for x, y in pairs)
    if not lv:
        raise ValueError("need at least one level")
    t = IntervalTower(lv, "custom", {})
    if validate:
        bad = failures(verify_conditions(t))
        if bad:
            c = bad[0]
            raise ConditionViolation(c.level, c.condition, c.order)
    return t


# ------------------------------------------------------------ verification


@dataclass(frozen=True)
class Check:
    level: int
    condition: str
    order: Order
    passed: bool
    note: str = ""


def _check(level, name, a, b, want, note=""):
    o = sv_compare(a, b)
    return Check(level, name, o, o in want, note)


def verify_conditions(t: IntervalTower) -> list[Check]:
    """Certified status of every defining inequality, level by level."""
    lt, eq, gt = {Order.LESS}, {Order.EQUAL}, {Order.GREATER}
    rep = []
    x1, y1 = t.levels[0].x, t.levels[0].y
    rep.append(_check(1, "x_1=y_1", x1, y1, eq))
    rep.append(_check(1, "x_1>2", x1, 2, gt))
    # not implied by anything at level 1, but the no-triple argument uses it
    if y1.is_exact and y1.exact.bit_length() <= 64:
        rep.append(_check(1, "y_1<2^x_1", y1, sv_pow(2, x1), lt))
    else:
        rep.append(Check(1, "y_1<2^x_1", Order.INDETERMINATE, False, "level 1 too large"))
    for n in range(2, len(t.levels) + 1):
        prev, cur = t.levels[n - 2], t.levels[n - 1]
        x, y = cur.x, cur.y
        try:
            p = sv_pow(prev.y, prev.y)
            rep.append(_check(n, "y_{n-1}^y_{n-1}<x_n", p, x, lt))
        except OverflowError:
            rep.append(Check(n, "y_{n-1}^y_{n-1}<x_n", Order.INDETERMINATE, False, "beyond log-domain range"))
        rep.append(_check(n, "x_n<y_n", x, y, lt))
        y_lt_sq = _check(n, "y_n<x_n^2", y, sv_pow(x, 2), lt)
        rep.append(y_lt_sq)
        if x.is_exact:
            sq_lt_exp = _check(n, "x_n^2<2^x_n", sv_pow(x, 2), sv_pow(2, x), lt)
        else:
            # t^2 < 2^t holds for every t >= 5
            o = sv_compare(x, 4)
            if o == Order.GREATER:
                sq_lt_exp = Check(n, "x_n^2<2^x_n", Order.LESS, True, "via t^2<2^t for t>=5")
            else:
                sq_lt_exp = Check(n, "x_n^2<2^x_n", Order.INDETERMINATE, False, "x_n > 4 not certified")
        rep.append(sq_lt_exp)
        try:
            rep.append(_check(n, "y_n=x_n*y_{n-1}", y, sv_mul(x, prev.y), eq))
        except OverflowError:
            rep.append(Check(n, "y_n=x_n*y_{n-1}", Order.INDETERMINATE, False, "beyond log-domain range"))
        if x.is_exact and x.exact.bit_length() <= 24:
            rep.append(_check(n, "y_n<2^x_n", y, sv_pow(2, x), lt))
        else:
            ok = y_lt_sq.passed and sq_lt_exp.passed
            rep.append(Check(n, "y_n<2^x_n", Order.LESS if ok else Order.INDETERMINATE, ok, "via y_n<x_n^2<2^x_n"))
    return rep


def failures(report) -> list[Check]:
    return [c for c in report if not c.passed]


# -------------------------------------------------------------- membership


def membership(t: IntervalTower, v) -> str:
    v = as_scale(v)
    undecided = False
    for lv in t.levels:
        lo, hi = sv_compare(v, lv.x), sv_compare(v, lv.y)
        if Order.INDETERMINATE in (lo, hi):
            if lo != Order.LESS and hi != Order.GREATER:
                undecided = True
            continue
        if lo != Order.LESS and hi != Order.GREATER:
            return IN
    return INDETERMINATE if undecided else OUT


def _log_floor(v: ScaleValue) -> int:
    # an integer k with 2**k <= v
    if v.is_exact:
        return v.exact.bit_length() - 1
    return v.lo.numerator // v.lo.denominator


def _log_ceil(v: ScaleValue) -> int:
    # an integer k with v < 2**k
    if v.is_exact:
        return v.exact.bit_length()
    return -((-v.hi.numerator) // v.hi.denominator) + 1


def members_upto(t: IntervalTower, cap: int) -> list[int]:
    """Sorted elements of A in [2..cap]."""
    out = set()
    for lv in t.levels:
        if sv_compare(lv.x, cap) == Order.GREATER:
            continue
        hi = cap if sv_compare(lv.y, cap) != Order.LESS else lv.y.exact
        out.update(range(max(lv.x.exact, 2), hi + 1))
    return sorted(out)


def brute_check_no_triple(t: IntervalTower, cap: int):
    """None when no x != y in A (both >= 2) with x^y in A exists up to ``cap``, else the least pair."""
    elems = members_upto(t, cap)
    ends = [(_log_floor(lv.x), _log_ceil(lv.y)) for lv in t.levels]
    for x in elems:
        bl = x.bit_length()
        # 2**((bl-1)*y) <= x**y < 2**(bl*y); only y with that window meeting some level survive
        cands = set()
        for xf, yc in ends:
            lo_y = xf // bl + 1
            hi_y = -(-yc // (bl - 1)) if bl > 1 else cap
            i, j = bisect_left(elems, lo_y), bisect_right(elems, hi_y)
            cands.update(elems[i:j])
        for y in sorted(cands):
            if x == y:
                continue
            if bl * y <= MATERIALIZE_BITS:
                v = x**y
                # exact power: only levels whose log range meets [bitlen-1, bitlen) can hold it
                L = v.bit_length()
                near = [lv for lv, (xf, yc) in zip(t.levels, ends) if L > xf and L - 1 < yc]
                m = membership(IntervalTower(tuple(near), t.strategy, t.seeds), v) if near else OUT
            else:
                m = membership(t, sv_pow(x, y))
            if m == INDETERMINATE:
                raise MembershipIndeterminate(f"cannot place {x}^{y} relative to the tower")
            if m == IN:
                return (x, y)
    return None


def mult_thick_witness(t: IntervalTower, n: int) -> int:
    """Least level p with n * x_p <= y_p, so {x_p, 2x_p, ..., n x_p} lies in I_p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for p, lv in enumerate(t.levels, start=1):
        if sv_compare(sv_mul(n, lv.x), lv.y) in (Order.LESS, Order.EQUAL):
            return p
    raise InsufficientLevels(f"no level among {len(t)} holds {n} multiples of its left end")


# ---------------------------------------------------------- serialization


def _value_text(v: ScaleValue) -> str:
    return str(v.exact) if v.is_exact else to_text(v)


def tower_to_dict(t: IntervalTower) -> dict:
    lv = []
    for i, L in enumerate(t.levels, start=1):
        lv.append({
            "level": i,
            "x": _value_text(L.x), "x_expr": L.x_expr,
            "y": _value_text(L.y), "y_expr": L.y_expr,
        })
    return {"strategy": t.strategy, "seeds": t.seeds, "levels": lv}


def tower_from_dict(d: dict) -> IntervalTower:
    """Re-derive a generated tower and check it against the stored values."""
    if d["strategy"] == "custom":
        return from_pairs([(int(L["x"]), int(L["y"])) for L in d["levels"]])
    s = d["seeds"]
    t = generate(len(d["levels"]), s.get("x1", 3), s.get("offsets"))
    got = tower_to_dict(t)["levels"]
    if got != d["levels"]:
        raise ValueError("stored tower does not match its re-derivation")
    return t
