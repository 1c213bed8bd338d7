"""Proof producers and semantic oracles for tests and benchmarks.

brute_force enumerates truth tables with numpy bitmask chunks (hard cap 24
variables).  cdcl_solve is a deliberately small CDCL solver, two watched
literals, first-UIP learning, saved phases, geometric restarts, and a
clause-database reduction pass, that logs every learned clause and every
database deletion as DRAT steps.  gen_php and gen_random build benchmark
formulas.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from dratkit.core import Clause, Formula
from dratkit.formats import ProofStep, add_step, delete_step

ORACLE_VAR_CAP = 24
_CHUNK = 1 << 20


class OracleRangeError(ValueError):
    """Truth-table oracle asked to enumerate more than 2**24 assignments."""


def _clause_masks(clauses):
    masks = []
    for c in clauses:
        pos = neg = 0
        for l in c:
            if l > 0:
                pos |= 1 << (l - 1)
            else:
                neg |= 1 << (-l - 1)
        masks.append((pos, neg))
    return masks


def _first_model_index(masks, nvars):
    """Index of the smallest satisfying assignment, or None.

    Assignment index i sets variable v true iff bit v-1 of i is set.
    """
    total = 1 << nvars
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.uint32)
        alive = np.ones(len(idx), dtype=bool)
        for pos, neg in masks:
            sat = (idx & pos) != 0 if pos else np.zeros(len(idx), dtype=bool)
            if neg:
                sat |= (idx & neg) != neg
            alive &= sat
            if not alive.any():
                break
        else:
            return int(idx[np.flatnonzero(alive)[0]])
    return None


def brute_force(f: Formula):
    """Exhaustive satisfiability: a model dict var->bool, or None for Unsat."""
    if f.max_var > ORACLE_VAR_CAP:
        raise OracleRangeError("formula has %d variables, oracle cap is %d"
                               % (f.max_var, ORACLE_VAR_CAP))
    clauses = [c.lits for _, c in f.items()]
    if any(not c for c in clauses):
        return None
    i = _first_model_index(_clause_masks(clauses), f.max_var)
    if i is None:
        return None
    return {v: bool(i >> (v - 1) & 1) for v in range(1, f.max_var + 1)}


def entails(f: Formula, c) -> bool:
    """True iff every model of f satisfies c (f plus negated c is Unsat)."""
    lits = list(c.lits) if isinstance(c, Clause) else list(c)
    nvars = max([f.max_var] + [abs(l) for l in lits])
    if nvars > ORACLE_VAR_CAP:
        raise OracleRangeError("entailment query spans %d variables, cap is %d"
                               % (nvars, ORACLE_VAR_CAP))
    clauses = [cl.lits for _, cl in f.items()]
    if any(not cl for cl in clauses):
        return True
    clauses = clauses + [(-l,) for l in set(lits)]
    return _first_model_index(_clause_masks(clauses), nvars) is None


# ------------------------------------------------------------------ generators

def gen_php(n: int) -> Formula:
    """Pigeonhole CNF: n+1 pigeons, n holes, variable (i-1)*n + j.

    Per-pigeon at-least-one-hole clauses first, then per-hole exclusion
    pairs.
    """
    if n < 1:
        raise ValueError("need at least one hole")
    f = Formula()
    var = lambda i, j: (i - 1) * n + j
    for i in range(1, n + 2):
        f.add_clause(Clause([var(i, j) for j in range(1, n + 1)]))
    for j in range(1, n + 1):
        for i in range(1, n + 2):
            for i2 in range(i + 1, n + 2):
                f.add_clause(Clause([-var(i, j), -var(i2, j)]))
    return f


def gen_random(v: int, c: int, k: int, seed) -> Formula:
    """c random clauses of width k over v variables, seed-deterministic.

    Each clause uses k distinct variables with independent random signs, so
    clauses are duplicate-free and non-tautological.
    """
    if k > v:
        raise ValueError("width %d exceeds %d variables" % (k, v))
    rng = random.Random(seed)
    f = Formula()
    for _ in range(c):
        vs = rng.sample(range(1, v + 1), k)
        f.add_clause(Clause([x * rng.choice((-1, 1)) for x in vs]))
    f.declare_variables(v)
    return f


# ---------------------------------------------------------------------- solver

@dataclass
class SolveResult:
    status: str                       # "sat" | "unsat"
    model: dict | None = None
    proof: list | None = None         # DRAT ProofSteps for unsat
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0


_RESTART_FIRST = 100
_RESTART_GROWTH = 1.5
_REDUCE_FLOOR = 30


class _Cdcl:
    def __init__(self, f: Formula, seed):
        rng = random.Random(seed)
        self.nv = f.max_var
        self.clauses: list = []
        self.dead: set = set()
        self.watches = defaultdict(list)
        self.value = [0] * (self.nv + 1)
        self.reason: list = [None] * (self.nv + 1)
        self.level = [0] * (self.nv + 1)
        self.trail: list = []
        self.lim: list = []
        self.qhead = 0
        self.phase = [bool(rng.getrandbits(1)) for _ in range(self.nv + 1)]
        self.order = list(range(1, self.nv + 1))
        rng.shuffle(self.order)
        self.proof: list = []
        self.learned: list = []
        self.conflicts = self.decisions = self.propagations = 0
        self.originals = [list(c.lits) for _, c in f.items()]

    def val(self, l):
        v = self.value[abs(l)]
        return v if l > 0 else -v

    def assign(self, l, why):
        v = abs(l)
        self.value[v] = 1 if l > 0 else -1
        self.reason[v] = why
        self.level[v] = len(self.lim)
        self.phase[v] = l > 0
        self.trail.append(l)

    def attach(self, lits) -> int:
        idx = len(self.clauses)
        self.clauses.append(lits)
        if len(lits) >= 2:
            self.watches[lits[0]].append(idx)
            self.watches[lits[1]].append(idx)
        return idx

    def propagate(self):
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            neg = -lit
            wl = self.watches[neg]
            i = j = 0
            n = len(wl)
            while i < n:
                idx = wl[i]
                i += 1
                if idx in self.dead:
                    continue
                c = self.clauses[idx]
                if c[0] == neg:
                    c[0], c[1] = c[1], c[0]
                w0 = c[0]
                if self.val(w0) == 1:
                    wl[j] = idx
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if self.val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self.watches[c[1]].append(idx)
                        break
                else:
                    wl[j] = idx
                    j += 1
                    if self.val(w0) == -1:
                        while i < n:
                            wl[j] = wl[i]
                            j += 1
                            i += 1
                        del wl[j:]
                        return idx
                    self.assign(w0, idx)
            del wl[j:]
        return None

    def analyze(self, confl):
        cur = len(self.lim)
        seen = [False] * (self.nv + 1)
        others = []
        counter = 0
        idx = len(self.trail) - 1
        p = 0
        reason_lits = self.clauses[confl]
        while True:
            for l in reason_lits:
                v = abs(l)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    if self.level[v] == cur:
                        counter += 1
                    else:
                        others.append(l)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            reason_lits = [l for l in self.clauses[self.reason[abs(p)]] if l != p]
        lits = [-p] + sorted(others, key=lambda l: -self.level[abs(l)])
        blevel = self.level[abs(lits[1])] if len(lits) > 1 else 0
        return lits, blevel

    def backtrack(self, blevel):
        if len(self.lim) <= blevel:
            return
        keep = self.lim[blevel]
        for l in self.trail[keep:]:
            self.value[abs(l)] = 0
            self.reason[abs(l)] = None
        del self.trail[keep:]
        del self.lim[blevel:]
        self.qhead = len(self.trail)

    def reduce_db(self, threshold):
        live = [i for i in self.learned if i not in self.dead]
        if len(live) < threshold:
            return False
        reasons = {self.reason[abs(l)] for l in self.trail}
        cands = [i for i in live
                 if len(self.clauses[i]) > 2 and i not in reasons]
        cands.sort(key=lambda i: (-len(self.clauses[i]), i))
        for i in cands[: len(cands) // 2]:
            self.dead.add(i)
            self.proof.append(delete_step(self.clauses[i]))
        return True

    def solve(self) -> SolveResult:
        for lits in self.originals:
            if not lits:
                self.proof.append(add_step([]))
                return self._unsat()
        for lits in self.originals:
            idx = self.attach(lits)
            if len(lits) == 1:
                l = lits[0]
                if self.val(l) == -1:
                    self.proof.append(add_step([]))
                    return self._unsat()
                if self.val(l) == 0:
                    self.assign(l, idx)
        restart_lim = _RESTART_FIRST
        reduce_at = _REDUCE_FLOOR
        since_restart = 0
        while True:
            confl = self.propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.lim:
                    self.proof.append(add_step([]))
                    return self._unsat()
                lits, blevel = self.analyze(confl)
                self.backtrack(blevel)
                idx = self.attach(lits)
                self.learned.append(idx)
                self.proof.append(add_step(lits))
                self.assign(lits[0], idx)
                if since_restart >= restart_lim:
                    since_restart = 0
                    restart_lim = int(restart_lim * _RESTART_GROWTH)
                    self.backtrack(0)
                    if self.reduce_db(reduce_at):
                        reduce_at += _REDUCE_FLOOR // 2
                continue
            v = self._pick()
            if v is None:
                model = {u: self.value[u] > 0 for u in range(1, self.nv + 1)}
                return SolveResult("sat", model=model,
                                   conflicts=self.conflicts,
                                   decisions=self.decisions,
                                   propagations=self.propagations)
            self.decisions += 1
            self.lim.append(len(self.trail))
            self.assign(v if self.phase[v] else -v, None)

    def _pick(self):
        for v in self.order:
            if self.value[v] == 0:
                return v
        return None

    def _unsat(self) -> SolveResult:
        return SolveResult("unsat", proof=self.proof,
                           conflicts=self.conflicts,
                           decisions=self.decisions,
                           propagations=self.propagations)


def cdcl_solve(f: Formula, seed=0) -> SolveResult:
    """Solve f, returning a model or a DRAT proof stream ending in the
    empty clause."""
    return _Cdcl(f, seed).solve()
