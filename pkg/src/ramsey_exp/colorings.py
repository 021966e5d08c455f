"""Finite colorings of the window [1..N] and sets inside it."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np


class ColoringParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class IntWindowSet:
    """A subset of [1..N] stored as an integer bitmask (bit i <=> i in the set)."""

    window_size: int
    bits: int
    _members: tuple = field(init=False, repr=False, compare=False)
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.bits < 0 or self.bits & 1 or self.bits.bit_length() > self.window_size + 1:
            raise ValueError("membership must lie inside [1..N]")
        s = bin(self.bits)[:1:-1]
        members = tuple(i for i, ch in enumerate(s) if ch == "1")
        object.__setattr__(self, "_members", members)
        object.__setattr__(self, "_lookup", frozenset(members))

    @classmethod
    def from_iterable(cls, window_size: int, items: Iterable[int]) -> "IntWindowSet":
        bits = 0
        for i in items:
            if not 1 <= i <= window_size:
                raise ValueError(f"{i} outside window [1..{window_size}]")
            bits |= 1 << i
        return cls(window_size, bits)

    @classmethod
    def full(cls, window_size: int) -> "IntWindowSet":
        return cls(window_size, ((1 << window_size) - 1) << 1)

    @classmethod
    def empty(cls, window_size: int) -> "IntWindowSet":
        return cls(window_size, 0)

    def __contains__(self, x) -> bool:
        return x in self._lookup

    def __iter__(self) -> Iterator[int]:
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    @property
    def members(self) -> tuple[int, ...]:
        return self._members

    def issubset(self, other: "IntWindowSet") -> bool:
        return self.bits & ~other.bits == 0

    def __or__(self, other):
        return IntWindowSet(max(self.window_size, other.window_size), self.bits | other.bits)

    def __and__(self, other):
        return IntWindowSet(min(self.window_size, other.window_size), self.bits & other.bits)

    def restrict(self, window_size: int) -> "IntWindowSet":
        return IntWindowSet(window_size, self.bits & (((1 << window_size) - 1) << 1))


@dataclass(frozen=True)
class Coloring:
    """Total map [1..N] -> [0..r); ``colors[i - 1]`` is the color of i."""

    num_colors: int
    colors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if self.num_colors < 1:
            raise ValueError("need at least one color")
        for i, c in enumerate(self.colors, start=1):
            if not 0 <= c < self.num_colors:
                raise ValueError(f"color {c} of element {i} not in [0..{self.num_colors})")

    @property
    def window_size(self) -> int:
        return len(self.colors)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= len(self.colors):
            raise IndexError(f"{i} outside window [1..{len(self.colors)}]")
        return self.colors[i - 1]

    def classes(self) -> list[IntWindowSet]:
        return [color_class(self, c) for c in range(self.num_colors)]


def color_class(c: Coloring, i: int) -> IntWindowSet:
    if not 0 <= i < c.num_colors:
        raise IndexError(f"color {i} not in [0..{c.num_colors})")
    bits = 0
    for x, col in enumerate(c.colors, start=1):
        if col == i:
            bits |= 1 << x
    return IntWindowSet(c.window_size, bits)


def monochrome(N: int, r: int = 1) -> Coloring:
    return Coloring(r, (0,) * N)


def parity(N: int) -> Coloring:
    """Evens get color 0, odds color 1."""
    return Coloring(2, tuple(x % 2 for x in range(1, N + 1)))


def from_sets(N: int, sets: Iterable[Iterable[int]]) -> Coloring:
    """Coloring whose class i is the i-th set; the sets must partition [1..N]."""
    colors = [None] * N
    k = 0
    for k, s in enumerate(sets):
        for x in s:
            if colors[x - 1] is not None:
                raise ValueError(f"{x} assigned twice")
            colors[x - 1] = k
    if any(c is None for c in colors):
        raise ValueError("sets do not cover the window")
    return Coloring(k + 1, tuple(colors))


def random_coloring(N: int, r: int, seed: int) -> Coloring:
    """Uniform coloring drawn as ``numpy.random.Generator(PCG64(seed)).integers(0, r, N)``."""
    if N < 1 or r < 1:
        raise ValueError("need N >= 1 and r >= 1")
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be an unsigned 64-bit value")
    rng = np.random.Generator(np.random.PCG64(seed))
    return Coloring(r, tuple(rng.integers(0, r, size=N).tolist()))


def induced_log_coloring(c: Coloring, base: int = 2) -> Coloring:
    """Color m by the color of base**m, on the window [1..floor(log_base N)]."""
    if base < 2:
        raise ValueError("base must be >= 2")
    N = c.window_size
    if N < base:
        raise ValueError(f"window {N} is below base {base}: induced window is empty")
    M, p = 0, 1
    while p * base <= N:
        p *= base
        M += 1
    return Coloring(c.num_colors, tuple(c(base**m) for m in range(1, M + 1)))


def save_coloring(c: Coloring, path) -> None:
    lines = [f"{c.window_size} {c.num_colors}"] + [str(x) for x in c.colors]
    Path(path).write_text("\n".join(lines) + "\n")


def load_coloring(path) -> Coloring:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ColoringParseError(path, 1, "empty file, expected header 'N r'")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise ColoringParseError(path, 1, f"bad header {lines[0]!r}, expected 'N r'")
    N, r = int(head[0]), int(head[1])
    if N < 1 or r < 1:
        raise ColoringParseError(path, 1, "N and r must be positive")
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != N:
        raise ColoringParseError(path, len(lines) + 1, f"expected {N} color lines, found {len(body)}")
    colors = []
    for k, line in enumerate(body, start=2):
        tok = line.strip()
        if not tok.isdigit():
            raise ColoringParseError(path, k, f"not a color value: {line!r}")
        if int(tok) >= r:
            raise ColoringParseError(path, k, f"color {tok} out of range for r={r}")
        colors.append(int(tok))
    return Coloring(r, tuple(colors))
