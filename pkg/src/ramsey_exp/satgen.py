"""CNF encodings of pattern-avoiding colorings, an external solver client,
threshold search, and an append-only verdict journal.

Variable for "element i has color c" is (i - 1) * r + c + 1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import shlex
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .colorings import Coloring, color_class
from .patterns import bounded_pow, find_reduced_exp

log = logging.getLogger(__name__)

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"

REDUCED_EXP_PATTERN = "reduced-exp"


class SolverError(RuntimeError):
    def __init__(self, msg, raw=""):
        super().__init__(f"{msg}; output excerpt: {raw[:400]!r}")
        self.raw = raw


class DecodeError(ValueError):
    pass


class CacheIntegrityError(RuntimeError):
    pass


class CacheCorrupted(RuntimeError):
    pass


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple
    N: int
    r: int
    metadata: dict = field(default_factory=dict)

    def var(self, i: int, c: int) -> int:
        return (i - 1) * self.r + c + 1

    def unvar(self, v: int) -> tuple[int, int]:
        return (v - 1) // self.r + 1, (v - 1) % self.r


def encode_avoidance(N: int, r: int, blocks, metadata: dict, symmetry_break: bool = False) -> CnfInstance:
    """Exactly one color per element, and no block entirely inside one color."""
    var = lambda i, c: (i - 1) * r + c + 1
    clauses = set()
    for i in range(1, N + 1):
        clauses.add(tuple(var(i, c) for c in range(r)))
        for a in range(r):
            for b in range(a + 1, r):
                clauses.add((-var(i, a), -var(i, b)))
    for blk in blocks:
        elems = sorted(set(blk))
        for c in range(r):
            clauses.add(tuple(-var(e, c) for e in elems))
    if symmetry_break and N >= 1:
        clauses.add((var(1, 0),))
    meta = dict(metadata)
    meta["symmetry"] = bool(symmetry_break)
    return CnfInstance(N * r, tuple(sorted(clauses, key=_clause_key)), N, r, meta)


def _clause_key(cl):
    return (len(cl), tuple((abs(l), l) for l in cl))


def reduced_exp_triples(N: int, n: int, distinct: bool):
    """Every (x, y, x*n^y) with x*n^y <= N."""
    out = []
    for y in range(1, N + 1):
        p = bounded_pow(n, y, N)
        if p is None:
            break
        for x in range(1, N // p + 1):
            if distinct and x == y:
                continue
            out.append((x, y, x * p))
    return out


def encode_reduced_exp(N: int, r: int, n: int, distinct: bool, symmetry_break: bool = False) -> CnfInstance:
    """Satisfiable iff some r-coloring of [1..N] has no monochromatic {x, y, x*n^y}."""
    if N < 1 or r < 1 or n < 2:
        raise ValueError("need N >= 1, r >= 1, n >= 2")
    meta = {"pattern": REDUCED_EXP_PATTERN, "N": N, "r": r, "n": n, "distinct": bool(distinct)}
    return encode_avoidance(N, r, reduced_exp_triples(N, n, distinct), meta, symmetry_break)


def to_dimacs(inst: CnfInstance) -> str:
    m = inst.metadata
    head = " ".join(f"{k}={_meta_text(m[k])}" for k in ("pattern", "N", "r", "n", "distinct") if k in m)
    lines = [f"c ramsey-exp {head}", f"c symmetry={_meta_text(m.get('symmetry', False))}"]
    lines.append(f"p cnf {inst.num_vars} {len(inst.clauses)}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in inst.clauses]
    return "\n".join(lines) + "\n"


def _meta_text(v):
    return str(v).lower() if isinstance(v, bool) else str(v)


def write_dimacs(inst: CnfInstance, path) -> None:
    Path(path).write_text(to_dimacs(inst))


# ------------------------------------------------------------------ solving

BUNDLED_PREFIX = "pysat:"


def resolve_solver(name) -> list[str]:
    """Command prefix for a solver name.

    ``pysat:<backend>`` runs the bundled shim, ``splr`` the splr binary with
    output on stdout; anything else is split as a shell command.  The instance
    path is appended as the last argument.
    """
    if isinstance(name, (list, tuple)):
        return list(name)
    if name.startswith(BUNDLED_PREFIX):
        return [sys.executable, "-m", "ramsey_exp.sat_shim", "--backend", name[len(BUNDLED_PREFIX):]]
    if name == "splr":
        return ["splr", "-q", "-C", "-r", "-"]
    return shlex.split(name)


def solver_available(name) -> bool:
    cmd = resolve_solver(name)
    if cmd[0] == sys.executable:
        try:
            import pysat  # noqa: F401
        except ImportError:
            return False
        return True
    return shutil.which(cmd[0]) is not None


@dataclass
class SolverResult:
    verdict: str
    model: list | None = None
    coloring: Coloring | None = None
    solver: str = ""
    wall_time: float = 0.0


_STATUS = re.compile(r"^s\s+(SATISFIABLE|UNSATISFIABLE|UNKNOWN)\b")
# some solvers (splr) paint progress lines with terminal control codes
_ANSI = re.compile(r"\x1b\[[0-9;]*[A-Za-z]")


def parse_solver_output(text: str):
    """(verdict, model) from standard solver output; raises SolverError when unparsable."""
    verdict, model = None, []
    for line in _ANSI.sub("", text).splitlines():
        line = line.strip()
        m = _STATUS.match(line)
        if m or line in ("SATISFIABLE", "UNSATISFIABLE", "UNKNOWN"):
            word = m.group(1) if m else line
            verdict = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT, "UNKNOWN": UNKNOWN}[word]
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverError(f"bad model token {tok!r}", text) from None
                if lit != 0:
                    model.append(lit)
    if verdict is None:
        raise SolverError("no satisfiability verdict in solver output", text)
    if verdict == SAT and not model:
        raise SolverError("SAT verdict without a model", text)
    return verdict, (model if verdict == SAT else None)


def run_solver(inst: CnfInstance, solver="pysat:cadical195", timeout: float | None = None,
               decode: bool = True) -> SolverResult:
    cmd = resolve_solver(solver)
    name = solver if isinstance(solver, str) else " ".join(solver)
    if timeout is not None and timeout <= 0:
        return SolverResult(UNKNOWN, solver=name)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "instance.cnf")
        write_dimacs(inst, path)
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(cmd + [path], capture_output=True, text=True, timeout=timeout, cwd=tmp)
        except subprocess.TimeoutExpired:
            return SolverResult(UNKNOWN, solver=name, wall_time=time.perf_counter() - t0)
        except OSError as e:
            raise SolverError(f"cannot run solver {cmd[0]!r}: {e}") from e
        wall = time.perf_counter() - t0
    out = proc.stdout + ("\n" + proc.stderr if proc.returncode not in (0, 10, 20) else "")
    verdict, model = parse_solver_output(out)
    res = SolverResult(verdict, model, solver=name, wall_time=wall)
    if verdict == SAT and decode:
        res.coloring = decode_model(inst, model)
    return res


def decode_model(inst: CnfInstance, model, verify: bool = True) -> Coloring:
    """Coloring read off a model; checks exactly-one and that the coloring avoids."""
    truth = {}
    for lit in model:
        truth[abs(lit)] = lit > 0
    missing = [v for v in range(1, inst.num_vars + 1) if v not in truth]
    if missing:
        raise DecodeError(f"model leaves {len(missing)} variables unassigned (first {missing[0]})")
    colors = []
    for i in range(1, inst.N + 1):
        on = [c for c in range(inst.r) if truth[inst.var(i, c)]]
        if len(on) != 1:
            raise DecodeError(f"element {i} has {len(on)} colors in the model")
        colors.append(on[0])
    col = Coloring(inst.r, tuple(colors))
    if verify:
        for cl in inst.clauses:
            if not any(truth[abs(l)] == (l > 0) for l in cl):
                raise DecodeError(f"model violates clause {cl}")
        m = inst.metadata
        if m.get("pattern") == REDUCED_EXP_PATTERN:
            for c in range(inst.r):
                w = find_reduced_exp(color_class(col, c), m["n"], m["distinct"])
                if w is not None:
                    raise DecodeError(f"decoded coloring has monochromatic {w.generators} in color {c}")
    return col


# -------------------------------------------------------------------- cache


@dataclass(frozen=True)
class ThresholdRecord:
    pattern: str
    N: int
    r: int
    n: int
    distinct: bool
    verdict: str
    solver: str = ""
    wall_time: float = 0.0
    model_hash: str | None = None

    @property
    def key(self):
        return (self.pattern, self.N, self.r, self.n, self.distinct)


def model_hash(model) -> str:
    return hashlib.sha256(" ".join(map(str, sorted(model, key=abs))).encode()).hexdigest()[:16]


class VerdictCache:
    """Append-only JSON-lines journal of solver verdicts.

    A key never holds both SAT and UNSAT; UNKNOWN is recorded but never
    replaces a decided verdict.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self.table: dict[tuple, ThresholdRecord] = {}
        if self.path and self.path.exists():
            self._replay()

    def _replay(self):
        for lineno, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = ThresholdRecord(**json.loads(line))
            except (json.JSONDecodeError, TypeError) as e:
                raise CacheCorrupted(f"{self.path}:{lineno}: {e}") from e
            self._merge(rec)
        self.check_monotone()

    def _merge(self, rec: ThresholdRecord) -> bool:
        old = self.table.get(rec.key)
        if old is not None and old.verdict != UNKNOWN:
            if rec.verdict not in (UNKNOWN, old.verdict):
                raise CacheIntegrityError(f"conflicting verdicts for {rec.key}: {old.verdict} vs {rec.verdict}")
            return False
        if old is not None and rec.verdict == UNKNOWN:
            return False
        self.table[rec.key] = rec
        return True

    def get(self, pattern, N, r, n, distinct) -> ThresholdRecord | None:
        return self.table.get((pattern, N, r, n, distinct))

    def put(self, rec: ThresholdRecord) -> None:
        if not self._merge(rec):
            return
        if self.path:
            with self.path.open("a") as fh:
                fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")

    def check_monotone(self):
        """SAT verdicts must be downward closed in N for each parameter set."""
        groups: dict[tuple, dict[int, str]] = {}
        for (pat, N, r, n, d), rec in self.table.items():
            groups.setdefault((pat, r, n, d), {})[N] = rec.verdict
        for key, row in groups.items():
            sat = [N for N, v in row.items() if v == SAT]
            unsat = [N for N, v in row.items() if v == UNSAT]
            if sat and unsat and min(unsat) < max(sat):
                raise CacheIntegrityError(f"{key}: UNSAT at {min(unsat)} below SAT at {max(sat)}")


# ---------------------------------------------------------------- threshold


@dataclass
class ThresholdResult:
    N_star: int | None
    resolved: bool
    reason: str = ""
    verdicts: dict = field(default_factory=dict)


def _open_cache(cache):
    if cache is None or isinstance(cache, VerdictCache):
        return cache or VerdictCache()
    try:
        return VerdictCache(cache)
    except CacheCorrupted as e:
        log.warning("verdict cache unreadable (%s); moving it aside and rebuilding", e)
        p = Path(cache)
        p.replace(p.with_suffix(p.suffix + ".corrupt"))
        return VerdictCache(cache)


def threshold_search(r: int, n: int, distinct: bool, N_lo: int, N_hi: int,
                     solver="pysat:cadical195", cache=None, timeout: float | None = None) -> ThresholdResult:
    """Least N in [N_lo, N_hi] whose instance is UNSAT while N - 1 is SAT.

    Avoidance is inherited by restriction, so SAT verdicts are downward
    closed and binary search is sound.
    """
    cache = _open_cache(cache)
    verdicts: dict[int, str] = {}
    name = solver if isinstance(solver, str) else " ".join(solver)

    def verdict(N):
        if N in verdicts:
            return verdicts[N]
        if N == 0:
            verdicts[0] = SAT
            return SAT
        rec = cache.get(REDUCED_EXP_PATTERN, N, r, n, distinct)
        if rec is not None and rec.verdict != UNKNOWN:
            verdicts[N] = rec.verdict
            return rec.verdict
        res = run_solver(encode_reduced_exp(N, r, n, distinct, symmetry_break=True), solver, timeout)
        h = model_hash(res.model) if res.model else None
        cache.put(ThresholdRecord(REDUCED_EXP_PATTERN, N, r, n, distinct, res.verdict, name, round(res.wall_time, 4), h))
        verdicts[N] = res.verdict
        return res.verdict

    if N_lo > N_hi:
        return ThresholdResult(None, False, "empty range", verdicts)
    top = verdict(N_hi)
    if top == SAT:
        return ThresholdResult(None, False, f"avoiding coloring exists at N_hi={N_hi}", verdicts)
    if top == UNKNOWN:
        return ThresholdResult(None, False, f"solver undecided at N_hi={N_hi}", verdicts)
    lo, hi = N_lo - 1, N_hi  # invariant: answer in (lo, hi], hi is UNSAT
    while hi - lo > 1:
        mid = (lo + hi) // 2
        v = verdict(mid)
        if v == UNKNOWN:
            return ThresholdResult(None, False, f"solver undecided at N={mid}", verdicts)
        if v == UNSAT:
            hi = mid
        else:
            lo = mid
    below = verdict(hi - 1)
    if below != SAT:
        reason = "UNSAT already below N_lo" if below == UNSAT else f"solver undecided at N={hi - 1}"
        return ThresholdResult(None, False, reason, verdicts)
    return ThresholdResult(hi, True, "", verdicts)
