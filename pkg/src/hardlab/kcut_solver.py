"""Exact weighted MAX-k-CUT under partial assignments.

Two backends share one contract: the optimum value and the lexicographically
smallest maximizing assignment (free variables in increasing id order).

* ``brute``: plain exhaustive depth-first enumeration.
* ``bnb``: depth-first branch and bound in id order with a Russian-doll
  bound. For the free-variable suffix starting at position i the exact
  optimum of the clauses inside the suffix is precomputed (``rds[i]``); the
  bound of a node is its current value plus ``rds`` of the unassigned suffix
  plus, for each unassigned variable, its best gain against everything
  already colored.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence


class SolverTimeout(RuntimeError):
    pass


def _as_fraction(w) -> Fraction:
    return w if isinstance(w, Fraction) else Fraction(w)


@dataclass(frozen=True)
class KCutInstance:
    """``m`` variables with 1-based ids; ``fixed`` maps id to color."""

    k: int
    m: int
    clauses: tuple[tuple[int, int, Fraction], ...]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        for a, b, w in self.clauses:
            if not (1 <= a <= self.m and 1 <= b <= self.m):
                raise ValueError(f"clause ({a}, {b}) out of range 1..{self.m}")
            if a == b:
                raise ValueError(f"clause on identical variables ({a}, {a})")
            if w < 0:
                raise ValueError("clause weights must be non-negative")
        for v, c in self.fixed.items():
            if not 1 <= v <= self.m:
                raise ValueError(f"fixed variable {v} out of range")
            if not 0 <= c < self.k:
                raise ValueError(f"color {c} outside Z_{self.k}")

    @classmethod
    def build(cls, k: int, m: int, clauses, fixed=None) -> "KCutInstance":
        cl = tuple((int(a), int(b), _as_fraction(w)) for a, b, w in clauses)
        return cls(k, m, cl, dict(fixed or {}))

    @property
    def free(self) -> list[int]:
        return [v for v in range(1, self.m + 1) if v not in self.fixed]

    def value(self, assignment: Sequence[int]) -> Fraction:
        """Cut weight of a full assignment given as colors of ids 1..m."""
        return sum((w for a, b, w in self.clauses if assignment[a - 1] != assignment[b - 1]), Fraction(0))


@dataclass
class Solution:
    value: Fraction
    assignment: tuple[int, ...]  # colors of ids 1..m
    nodes: int = 0


def _scale(clauses) -> tuple[int, list[tuple[int, int, int]]]:
    den = 1
    for _, _, w in clauses:
        den = den * w.denominator // math.gcd(den, w.denominator)
    return den, [(a, b, int(w * den)) for a, b, w in clauses]


class _Deadline:
    def __init__(self, deadline_ms: float | None):
        self.stop = None if deadline_ms is None else time.monotonic() + deadline_ms / 1000.0
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if (self.count & 1023) == 0:
            self.check()

    def check(self) -> None:
        if self.stop is not None and time.monotonic() > self.stop:
            raise SolverTimeout("deadline exceeded")


def max_value_brute(inst: KCutInstance, deadline_ms: float | None = None) -> Solution:
    """Enumerate every completion of ``inst.fixed`` without pruning."""
    den, clauses = _scale(inst.clauses)
    k, m = inst.k, inst.m
    colors = [0] * (m + 1)
    for v, c in inst.fixed.items():
        colors[v] = c
    free = inst.free
    pos = {v: i for i, v in enumerate(free)}
    # clauses charged to the later free endpoint, or to the base if both fixed
    base = 0
    later: list[list[tuple[int, int]]] = [[] for _ in free]
    for a, b, w in clauses:
        ia, ib = pos.get(a, -1), pos.get(b, -1)
        if ia < 0 and ib < 0:
            base += w if colors[a] != colors[b] else 0
        elif ia > ib:
            later[ia].append((b, w))
        else:
            later[ib].append((a, w))
    clock = _Deadline(deadline_ms)
    best = [-1, None]
    f = len(free)

    def rec(i: int, val: int) -> None:
        if i == f:
            clock.tick()
            if val > best[0]:
                best[0] = val
                best[1] = tuple(colors[1:])
            return
        v = free[i]
        for c in range(k):
            colors[v] = c
            gain = 0
            for u, w in later[i]:
                if colors[u] != c:
                    gain += w
            rec(i + 1, val + gain)
        colors[v] = 0

    rec(0, base)
    return Solution(Fraction(best[0], den), best[1], clock.count)


class PreparedBnB:
    """Branch-and-bound state reusable across many fixings of the same variables.

    The Russian-doll table depends only on the clauses among free variables,
    so it is computed once per (clauses, free set) and shared by every call
    to :meth:`solve` with a different coloring of the fixed variables.
    """

    def __init__(self, k: int, m: int, clauses, fixed_vars, deadline_ms: float | None = None):
        self.k = k
        self.m = m
        self.den, iclauses = _scale([(a, b, _as_fraction(w)) for a, b, w in clauses])
        fixed_vars = set(fixed_vars)
        self.fixed_vars = sorted(fixed_vars)
        self.free = [v for v in range(1, m + 1) if v not in fixed_vars]
        f = len(self.free)
        pos = {v: i for i, v in enumerate(self.free)}
        self.pos = pos
        # adjacency among free positions, only towards later positions
        fwd: list[dict[int, int]] = [dict() for _ in range(f)]
        # per free position: weights to fixed vars
        tofix: list[dict[int, int]] = [dict() for _ in range(f)]
        fixfix: dict[tuple[int, int], int] = {}
        for a, b, w in iclauses:
            if w == 0:
                continue
            ia, ib = pos.get(a, -1), pos.get(b, -1)
            if ia >= 0 and ib >= 0:
                lo, hi = min(ia, ib), max(ia, ib)
                fwd[lo][hi] = fwd[lo].get(hi, 0) + w
            elif ia >= 0:
                tofix[ia][b] = tofix[ia].get(b, 0) + w
            elif ib >= 0:
                tofix[ib][a] = tofix[ib].get(a, 0) + w
            else:
                key = (min(a, b), max(a, b))
                fixfix[key] = fixfix.get(key, 0) + w
        self.fwd = [sorted(d.items()) for d in fwd]
        self.tofix = [sorted(d.items()) for d in tofix]
        self.fixfix = sorted((a, b, w) for (a, b), w in fixfix.items())
        self.nodes = 0
        self._deadline = deadline_ms
        self.rds = self._russian_doll()

    def _russian_doll(self) -> list[int]:
        f = len(self.free)
        rds = [0] * (f + 1)
        for i in range(f - 1, -1, -1):
            # optimum of the sub-instance on positions i..f-1 alone; colors are
            # interchangeable there, so restricted-growth colorings suffice.
            # A trivial cap stands in for rds[i] while it is being computed.
            rds[i] = rds[i + 1] + sum(w for _, w in self.fwd[i])
            val, _ = self._search(i, None, rds, -1, symmetric=True)
            rds[i] = val
        return rds

    def _search(self, start: int, fixed_colors, rds, floor: int, symmetric: bool, clock=None):
        """Maximize over positions start..f-1. Returns (best value, colors) or
        (floor, None) when nothing strictly above ``floor`` exists."""
        k = self.k
        f = len(self.free)
        fwd = self.fwd
        n_loc = f - start
        pen = [[0] * k for _ in range(f)]
        base = [0] * f
        val0 = 0
        if fixed_colors is not None:
            for i in range(start, f):
                row = pen[i]
                for v, w in self.tofix[i]:
                    row[fixed_colors[v]] += w
                    base[i] += w
            for a, b, w in self.fixfix:
                if fixed_colors[a] != fixed_colors[b]:
                    val0 += w
        cols = [0] * f
        best_val = floor
        best_cols = None
        nodes = 0
        if clock is None:
            clock = _Deadline(self._deadline)

        # optimistic gain of every unassigned position against colored ones
        opt = [base[i] - min(pen[i]) for i in range(f)]

        def rec(i: int, val: int, maxc: int) -> None:
            nonlocal best_val, best_cols, nodes
            nodes += 1
            if (nodes & 1023) == 0:
                clock.check()
            if i == f:
                if val > best_val:
                    best_val = val
                    best_cols = cols[start:]
                return
            # bound: current + inner optimum of the suffix + best external gains
            extra = 0
            for j in range(i, f):
                extra += opt[j]
            if val + extra + rds[i] <= best_val:
                return
            rowp = pen[i]
            b_i = base[i]
            top = min(k, maxc + 2) if symmetric else k
            nbrs = fwd[i]
            if i == f - 1:
                # last variable: its best color is decided greedily
                bestc = 0
                bestg = b_i - rowp[0]
                for c in range(1, top):
                    g = b_i - rowp[c]
                    if g > bestg:
                        bestg = g
                        bestc = c
                cols[i] = bestc
                if val + bestg > best_val:
                    best_val = val + bestg
                    best_cols = cols[start:]
                return
            # coloring i can only raise later gains by edges already inside rds[i]
            rest = extra - opt[i] + rds[i]
            for c in range(top):
                gain = b_i - rowp[c]
                if val + gain + rest <= best_val:
                    continue
                cols[i] = c
                # push the choice into later neighbors
                saved = []
                for j, w in nbrs:
                    pj = pen[j]
                    old = base[j] - min(pj)
                    pj[c] += w
                    base[j] += w
                    new = base[j] - min(pj)
                    saved.append(old)
                    opt[j] = new
                rec(i + 1, val + gain, max(maxc, c))
                for idx, (j, w) in enumerate(nbrs):
                    pen[j][c] -= w
                    base[j] -= w
                    opt[j] = saved[idx]

        if n_loc == 0:
            if val0 > best_val:
                return val0, []
            return best_val, None
        rec(start, val0, -1)
        self.nodes = nodes
        return best_val, best_cols

    def solve(self, fixed: dict, floor: Fraction | None = None) -> Solution | None:
        """Exact optimum for one coloring of the fixed variables.

        With ``floor`` set, returns None unless some completion is strictly
        better than ``floor``.
        """
        # integer values strictly above floor(floor * den) are strictly above floor
        ifloor = -1 if floor is None else math.floor(floor * self.den)
        fc = [0] * (self.m + 1)
        for v in self.fixed_vars:
            fc[v] = fixed[v]
        clock = _Deadline(self._deadline)
        val, cols = self._search(0, fc, self.rds, ifloor, symmetric=False, clock=clock)
        if cols is None:
            return None
        assign = fc[1:]
        for i, v in enumerate(self.free):
            assign[v - 1] = cols[i]
        return Solution(Fraction(val, self.den), tuple(assign), self.nodes)


def max_value_bnb(inst: KCutInstance, deadline_ms: float | None = None) -> Solution:
    if not inst.fixed:
        return _solve_unfixed(inst, deadline_ms)
    prep = PreparedBnB(inst.k, inst.m, inst.clauses, inst.fixed.keys(), deadline_ms)
    sol = prep.solve(inst.fixed)
    assert sol is not None
    return sol


def _solve_unfixed(inst: KCutInstance, deadline_ms: float | None) -> Solution:
    # no fixed variables: colors are interchangeable, so the lexicographically
    # smallest optimum is a restricted-growth coloring
    prep = PreparedBnB(inst.k, inst.m, inst.clauses, (), deadline_ms)
    clock = _Deadline(deadline_ms)
    val, cols = prep._search(0, None, prep.rds, -1, symmetric=True, clock=clock)
    return Solution(Fraction(val, prep.den), tuple(cols), prep.nodes)


BACKENDS: dict[str, Callable[..., Solution]] = {"brute": max_value_brute, "bnb": max_value_bnb}


def random_instance(rng: random.Random, k: int, m: int, density: float = 0.5, max_w: int = 5,
                    fix_prob: float = 0.3) -> KCutInstance:
    clauses = []
    for a in range(1, m + 1):
        for b in range(a + 1, m + 1):
            if rng.random() < density:
                w = Fraction(rng.randint(1, max_w), rng.choice((1, 1, 2, 3)))
                clauses.append((a, b, w) if rng.random() < 0.5 else (b, a, w))
    fixed = {v: rng.randrange(k) for v in range(1, m + 1) if rng.random() < fix_prob}
    return KCutInstance.build(k, m, clauses, fixed)


@dataclass
class EquivReport:
    ok: bool
    trials: int
    divergence: KCutInstance | None = None
    values: tuple | None = None


def solver_equiv_check(seed: int, trials: int, m_max: int, ks=(2, 3, 4),
                       backend_a: Callable = max_value_brute, backend_b: Callable = max_value_bnb) -> EquivReport:
    rng = random.Random(seed)
    for t in range(trials):
        k = ks[t % len(ks)]
        m = rng.randint(0, m_max)
        inst = random_instance(rng, k, m)
        ra, rb = backend_a(inst), backend_b(inst)
        if ra.value != rb.value or ra.assignment != rb.assignment:
            return EquivReport(False, t + 1, inst, ((ra.value, ra.assignment), (rb.value, rb.assignment)))
    return EquivReport(True, trials)
