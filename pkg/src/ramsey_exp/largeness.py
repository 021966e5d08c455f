"""Window-relative tests for thick, syndetic and piecewise syndetic sets.

The infinitary notions quantify over every finite configuration, which no
finite window can decide.  Each test here therefore takes explicit parameters
(run length, gap bound, translate set, sub-window) and its certificate records
exactly what was checked.

Gap convention: 0 and N+1 act as virtual members, so a set is g-syndetic on
[1..N] when every g consecutive integers of the window meet it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .colorings import IntWindowSet
from .patterns import find_FS, fs_values
from .scale import ScaleValue, to_text


@dataclass(frozen=True)
class LargenessCertificate:
    notion: str
    params: dict
    witness: dict
    span: tuple = field(default=())

    def to_dict(self) -> dict:
        """Same envelope as pattern witnesses; ``span`` is what must lie in the set."""
        return {
            "kind": self.notion,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "generators": [self.witness[k] for k in sorted(self.witness)],
            "span": [to_text(ScaleValue.of(v)) for v in self.span],
        }

    def holds_on(self, A: IntWindowSet) -> bool:
        if not all(v in A for v in self.span):
            return False
        if self.notion == "add_pws":
            a, b = self.witness["interval"]
            return _max_gap(A, a, b) <= self.params["g"] and b - a + 1 >= self.params["L"]
        return True


def _max_gap(A: IntWindowSet, a: int, b: int) -> int:
    # largest distance between consecutive members of A inside [a, b], with
    # a - 1 and b + 1 as virtual members
    prev, worst = a - 1, 0
    for x in A.members:
        if a <= x <= b:
            worst = max(worst, x - prev)
            prev = x
    return max(worst, b + 1 - prev)


def add_thick_length(A: IntWindowSet):
    """(L, (a, b)) for the leftmost longest run of consecutive members; (0, None) if empty."""
    best, best_iv = 0, None
    start = prev = None
    for x in A.members:
        if prev is not None and x == prev + 1:
            prev = x
        else:
            start = prev = x
        if prev - start + 1 > best:
            best, best_iv = prev - start + 1, (start, prev)
    return best, best_iv


def thick_certificate(A: IntWindowSet) -> LargenessCertificate | None:
    L, iv = add_thick_length(A)
    if iv is None:
        return None
    return LargenessCertificate("add_thick", {"L": L}, {"interval": list(iv)}, tuple(range(iv[0], iv[1] + 1)))


def add_syndetic_gap(A: IntWindowSet) -> int:
    if len(A) == 0:
        raise ValueError("empty set has no syndetic gap")
    return _max_gap(A, 1, A.window_size)


def add_pws_check(A: IntWindowSet, g: int, L: int) -> LargenessCertificate | None:
    """Leftmost interval of length >= L on which A has gaps <= g.

    A chain of members m1 < ... < mk with consecutive gaps <= g certifies any
    interval up to [m1 - g + 1, mk + g - 1].  The member span [m1, mk] is
    reported when it is long enough, otherwise the widest such interval.
    """
    if g < 1 or L < 1:
        raise ValueError("g and L must be >= 1")
    N = A.window_size
    mem = A.members
    i = 0
    while i < len(mem):
        j = i
        while j + 1 < len(mem) and mem[j + 1] - mem[j] <= g:
            j += 1
        a, b = mem[i], mem[j]
        if b - a + 1 < L:
            a, b = max(1, a - g + 1), min(N, b + g - 1)
        if b - a + 1 >= L:
            span = tuple(mem[i:j + 1])
            return LargenessCertificate("add_pws", {"g": g, "L": L}, {"interval": [a, b]}, span)
        i = j + 1
    return None


def mult_thick_check(A: IntWindowSet, F) -> int | None:
    """Least x with f*x in A for every f in F."""
    F = sorted(set(F))
    if not F or F[0] < 1:
        raise ValueError("F must be a nonempty set of naturals")
    for x in range(1, A.window_size // F[-1] + 1):
        if all(f * x in A for f in F):
            return x
    return None


def mult_thick_certificate(A: IntWindowSet, F) -> LargenessCertificate | None:
    x = mult_thick_check(A, F)
    if x is None:
        return None
    F = sorted(set(F))
    return LargenessCertificate("mult_thick", {"F": F}, {"x": x}, tuple(f * x for f in F))


def mult_syndetic_check(A: IntWindowSet, F, M: int) -> int | None:
    """Least y <= M with no f in F such that f*y is in A; None when every y is covered."""
    F = sorted(set(F))
    if not F or F[0] < 1:
        raise ValueError("F must be a nonempty set of naturals")
    if F[-1] * M > A.window_size:
        raise ValueError(f"max(F)*M = {F[-1] * M} exceeds window {A.window_size}")
    for y in range(1, M + 1):
        if not any(f * y in A for f in F):
            return y
    return None


def ip_r_find(A: IntWindowSet, r: int, bound: int | None = None) -> tuple | None:
    """Least increasing b1..br <= bound whose finite sums all lie in A."""
    bound = A.window_size if bound is None else bound
    if bound > A.window_size:
        raise ValueError("bound exceeds window")
    w = find_FS(A, r, bound=bound)
    return None if w is None else w.generators


def ip_r_certificate(A: IntWindowSet, r: int, bound: int | None = None) -> LargenessCertificate | None:
    bs = ip_r_find(A, r, bound)
    if bs is None:
        return None
    return LargenessCertificate("ip_r", {"r": r}, {"sequence": list(bs)}, tuple(sorted(fs_values(bs))))
