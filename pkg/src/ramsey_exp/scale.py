"""Exact and log-domain arithmetic for values that may be far too large to materialize.

A :class:`ScaleValue` is either an exact positive integer or a pair of exact
rationals bracketing ``log2`` of the value.  Values derived through
:func:`sv_pow`, :func:`sv_mul` and :func:`sv_add` remember how they were built,
so brackets can be recomputed at higher precision when a comparison is too
close to call.  The only floating point on the comparison path is MPFR with
directed rounding, whose results are exact bounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import gmpy2

DEFAULT_BIT_BUDGET = 1 << 20

# width of a fresh bracket is at most 2**-LOG_WIDTH_BITS
LOG_WIDTH_BITS = 32

# exponents whose log2 exceeds this cannot be turned into rational brackets
MAX_LOG_EXPONENT_BITS = 1 << 16

_MAX_TIGHTEN_ROUNDS = 4

# extra precision spent on a base raised to a huge exact exponent; past this
# the bracket is only relatively tight (width grows with the exponent)
MAX_EXTRA_BITS = 4096


class Order(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class ScaleValue:
    """A positive natural number, stored exactly or as ``log2`` brackets.

    ``expr`` is an optional provenance node ``(op, *operands)`` used for
    tightening and for structural comparisons.
    """

    exact: int | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None
    expr: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.exact is not None:
            if self.exact < 1:
                raise ValueError(f"ScaleValue must be >= 1, got {self.exact}")
            if self.lo is not None or self.hi is not None:
                raise ValueError("exact ScaleValue cannot carry log bounds")
        else:
            if self.lo is None or self.hi is None:
                raise ValueError("log-domain ScaleValue needs both bounds")
            if self.lo > self.hi:
                raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")
            if self.lo < 0:
                raise ValueError("log2 of a natural number is non-negative")

    @classmethod
    def of(cls, n: int) -> "ScaleValue":
        return cls(exact=int(n))

    @classmethod
    def log_bounds(cls, lo, hi, expr=None) -> "ScaleValue":
        return cls(lo=Fraction(lo), hi=Fraction(hi), expr=expr)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __eq__(self, other):
        if isinstance(other, int):
            return self.exact == other
        if not isinstance(other, ScaleValue):
            return NotImplemented
        return (self.exact, self.lo, self.hi) == (other.exact, other.lo, other.hi)

    def __hash__(self):
        return hash((self.exact, self.lo, self.hi))

    def __int__(self):
        if self.exact is None:
            raise OverflowError("value is only known through log2 brackets")
        return self.exact

    def __str__(self):
        return to_text(self)


def as_scale(v) -> ScaleValue:
    if isinstance(v, ScaleValue):
        return v
    return ScaleValue.of(v)


# ---------------------------------------------------------------- log brackets


@lru_cache(maxsize=4096)
def log2_bounds(a: int, frac_bits: int) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= log2(a) <= hi`` with ``hi - lo <= 2**(1 - frac_bits)``.

    MPFR rounds correctly in the requested direction, so converting ``a`` and
    taking log2 both rounded down (or both up) gives a certified bracket.
    """
    if a < 1:
        raise ValueError("log2 undefined below 1")
    e = a.bit_length() - 1
    if a == 1 << e:
        return Fraction(e), Fraction(e)
    prec = frac_bits + e.bit_length() + 8
    out = []
    for rnd in (gmpy2.RoundDown, gmpy2.RoundUp):
        with gmpy2.context(precision=prec, round=rnd):
            out.append(Fraction(*gmpy2.log2(gmpy2.mpfr(gmpy2.mpz(a))).as_integer_ratio()))
    return out[0], out[1]


def _pow2_floor(q: Fraction) -> Fraction:
    # rational lower bound on 2**q
    k = q.numerator // q.denominator
    if k > MAX_LOG_EXPONENT_BITS:
        raise OverflowError("exponent too large for log-domain representation")
    return Fraction(2) ** k


def _pow2_ceil(q: Fraction) -> Fraction:
    k = -((-q.numerator) // q.denominator)
    if k > MAX_LOG_EXPONENT_BITS:
        raise OverflowError("exponent too large for log-domain representation")
    return Fraction(2) ** k


def bounds_at(v: ScaleValue, frac_bits: int) -> tuple[Fraction, Fraction]:
    """Brackets on log2(v), recomputed from provenance when it is available."""
    if v.exact is not None:
        return log2_bounds(v.exact, frac_bits)
    if v.expr is None:
        return v.lo, v.hi
    op = v.expr[0]
    if op == "pow":
        base, exp = v.expr[1], v.expr[2]
        if exp.exact is not None:
            lo, hi = bounds_at(base, frac_bits + min(exp.exact.bit_length(), MAX_EXTRA_BITS))
            return _tighter((lo * exp.exact, hi * exp.exact), v)
        blo, bhi = bounds_at(base, frac_bits + 8)
        elo, ehi = bounds_at(exp, frac_bits + 8)
        return _tighter((blo * _pow2_floor(elo), bhi * _pow2_ceil(ehi)), v)
    if op == "mul":
        lo = hi = Fraction(0)
        for part in v.expr[1:]:
            plo, phi = bounds_at(part, frac_bits + 2)
            lo, hi = lo + plo, hi + phi
        return _tighter((lo, hi), v)
    if op == "add":
        big, small = v.expr[1], v.expr[2]
        lo, hi = bounds_at(big, frac_bits + 1)
        return _tighter((lo, hi + _add_slack(lo, small.exact, frac_bits)), v)
    raise ValueError(f"unknown provenance op {op!r}")


def _tighter(b, v):
    return max(b[0], v.lo), min(b[1], v.hi)


def _add_slack(lo: Fraction, c: int, frac_bits: int) -> Fraction:
    # log2(a + c) - log2(a) <= 2c/a <= 2**(bitlen(c) + 1 - floor(lo))
    k = c.bit_length() + 1 - (lo.numerator // lo.denominator)
    if k < -frac_bits:
        return Fraction(1, 1 << frac_bits)
    return Fraction(2) ** k


# ------------------------------------------------------------------ operations


def sv_pow(base, exp, bit_budget: int = DEFAULT_BIT_BUDGET) -> ScaleValue:
    """``base ** exp``, exact when the result fits in ``bit_budget`` bits."""
    base, exp = as_scale(base), as_scale(exp)
    if base.exact == 1:
        return ScaleValue.of(1)
    if exp.exact == 1:
        return base
    if base.exact is not None and exp.exact is not None:
        b, e = base.exact, exp.exact
        # bit_length(b**e) >= (bit_length(b) - 1) * e + 1
        if (b.bit_length() - 1) * e + 1 <= bit_budget:
            r = b**e
            if r.bit_length() <= bit_budget:
                return ScaleValue.of(r)
    expr = ("pow", base, exp)
    frac_bits = LOG_WIDTH_BITS + 8
    if exp.exact is not None:
        lo, hi = bounds_at(base, frac_bits + min(exp.exact.bit_length(), MAX_EXTRA_BITS))
        return ScaleValue.log_bounds(lo * exp.exact, hi * exp.exact, expr)
    blo, bhi = bounds_at(base, frac_bits)
    elo, ehi = bounds_at(exp, frac_bits)
    return ScaleValue.log_bounds(blo * _pow2_floor(elo), bhi * _pow2_ceil(ehi), expr)


def sv_mul(a, b, bit_budget: int = DEFAULT_BIT_BUDGET) -> ScaleValue:
    a, b = as_scale(a), as_scale(b)
    if a.exact is not None and b.exact is not None:
        if a.exact.bit_length() + b.exact.bit_length() - 1 <= bit_budget:
            r = a.exact * b.exact
            if r.bit_length() <= bit_budget:
                return ScaleValue.of(r)
    frac_bits = LOG_WIDTH_BITS + 8
    alo, ahi = bounds_at(a, frac_bits)
    blo, bhi = bounds_at(b, frac_bits)
    return ScaleValue.log_bounds(alo + blo, ahi + bhi, ("mul", a, b))


def sv_add(a, c, bit_budget: int = DEFAULT_BIT_BUDGET) -> ScaleValue:
    """``a + c`` where ``c`` is an exact (typically small) natural."""
    a, c = as_scale(a), as_scale(c)
    if c.exact is None:
        raise ValueError("sv_add requires an exact addend")
    if a.exact is not None:
        r = a.exact + c.exact
        if r.bit_length() <= bit_budget:
            return ScaleValue.of(r)
    frac_bits = LOG_WIDTH_BITS + 8
    lo, hi = bounds_at(a, frac_bits)
    return ScaleValue.log_bounds(lo, hi + _add_slack(lo, c.exact, frac_bits), ("add", a, c))


def _same(a: ScaleValue, b: ScaleValue) -> bool:
    # structural identity; exact values compare by value
    if a.exact is not None or b.exact is not None:
        return a.exact == b.exact
    if a.expr is None or b.expr is None:
        return a is b
    if a.expr[0] != b.expr[0] or len(a.expr) != len(b.expr):
        return False
    return all(_same(x, y) for x, y in zip(a.expr[1:], b.expr[1:]))


def _structural(a: ScaleValue, b: ScaleValue) -> Order | None:
    if _same(a, b):
        return Order.EQUAL
    # a = b + c with c >= 1
    if a.expr is not None and a.expr[0] == "add" and _same(a.expr[1], b):
        return Order.GREATER
    if b.expr is not None and b.expr[0] == "add" and _same(b.expr[1], a):
        return Order.LESS
    # a = b * c with every factor a positive integer; a > b iff some other factor is > 1
    s = _mul_over(a, b)
    if s is not None:
        return s
    s = _mul_over(b, a)
    if s is not None:
        return {Order.GREATER: Order.LESS, Order.EQUAL: Order.EQUAL}[s]
    return None


def _mul_over(a: ScaleValue, b: ScaleValue) -> Order | None:
    if a.expr is None or a.expr[0] != "mul":
        return None
    parts = list(a.expr[1:])
    for i, p in enumerate(parts):
        if _same(p, b):
            rest = parts[:i] + parts[i + 1:]
            if any(sv_compare(q, 1) == Order.GREATER for q in rest):
                return Order.GREATER
            if all(q.exact == 1 for q in rest):
                return Order.EQUAL
            return None
    return None


def sv_compare(a, b) -> Order:
    """Certified order of ``a`` and ``b``; never returns a wrong answer."""
    a, b = as_scale(a), as_scale(b)
    if a.exact is not None and b.exact is not None:
        if a.exact < b.exact:
            return Order.LESS
        return Order.GREATER if a.exact > b.exact else Order.EQUAL
    s = _structural(a, b)
    if s is not None:
        return s
    frac_bits = LOG_WIDTH_BITS + 8
    for _ in range(_MAX_TIGHTEN_ROUNDS):
        try:
            alo, ahi = bounds_at(a, frac_bits)
            blo, bhi = bounds_at(b, frac_bits)
        except OverflowError:
            break
        if ahi < blo:
            return Order.LESS
        if alo > bhi:
            return Order.GREATER
        if alo == ahi == blo == bhi:
            return Order.EQUAL
        if a.expr is None and a.exact is None and b.expr is None and b.exact is None:
            break
        frac_bits *= 4
    return Order.INDETERMINATE


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial without constant term; ``coeffs[j]`` multiplies t**(j+1)."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        for j in range(len(self.coeffs), 0, -1):
            if self.coeffs[j - 1] != 0:
                return j
        return 0

    @property
    def coef(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def __call__(self, t: int) -> int:
        return poly_eval(self, t)

    def __str__(self):
        terms = [f"{c}*t^{j}" for j, c in enumerate(self.coeffs, start=1) if c]
        return " + ".join(terms) or "0"


def poly_eval(p: Polynomial, t: int) -> int:
    if t < 1:
        raise ValueError("polynomials are evaluated at naturals t >= 1")
    acc = 0
    for c in reversed(p.coeffs):
        acc = (acc + c) * t
    return acc


# ------------------------------------------------------------ canonical text

_LOG_RE = re.compile(r"^log2:\[(-?\d+)/(\d+),(-?\d+)/(\d+)\]$")


def to_text(v: ScaleValue) -> str:
    if v.exact is not None:
        return str(v.exact)
    return (
        f"log2:[{v.lo.numerator}/{v.lo.denominator},"
        f"{v.hi.numerator}/{v.hi.denominator}]"
    )


def from_text(s: str) -> ScaleValue:
    s = s.strip()
    if s.isdigit():
        return ScaleValue.of(int(s))
    m = _LOG_RE.match(s)
    if not m:
        raise ValueError(f"not a canonical ScaleValue: {s!r}")
    a, b, c, d = (int(g) for g in m.groups())
    return ScaleValue.log_bounds(Fraction(a, b), Fraction(c, d))
