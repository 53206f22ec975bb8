"""Seeded hill climbing over gadget families and (graph, witness) pairs.

Proposals come from fixed mutation kernels; every candidate is scored with the
exact verifiers, and only the best-so-far is reported.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .gadget_core import Gadget, GadgetParams, gadget_params
from .graph_core import MultiGraph
from .reduction_calc import ReductionSummary, summarize
from .spectral_cert import (BOUNDARY, RAMANUJAN, PreconditionError, Violation, Witness, cut_fraction,
                            independent_set_fraction, is_ramanujan, score_pair)


@dataclass
class Budget:
    """Evaluation-count cap, optionally combined with a wall-clock cap."""

    evals: int
    seconds: float | None = None
    used: int = 0
    _t0: float = field(default_factory=time.monotonic)

    def spend(self) -> bool:
        if self.used >= self.evals:
            return False
        if self.seconds is not None and time.monotonic() - self._t0 >= self.seconds:
            return False
        self.used += 1
        return True


def _as_budget(budget) -> Budget:
    return budget if isinstance(budget, Budget) else Budget(int(budget))


# ---------------------------------------------------------------- gadgets

def trivial_family(k: int, n_aux: int) -> list[Gadget]:
    """Every gadget is a unit clique on the globals: a = b, so the ratio is 1."""
    clauses = [(a, b, 1) for a in range(4, k + 4) for b in range(a + 1, k + 4)]
    return [Gadget.build(k, n_aux, clauses) for _ in range(k)]


def mutate_gadget(g: Gadget, rng: random.Random, max_weight: int = 20) -> Gadget:
    """One of: add clause, remove clause, perturb a weight, rewire an endpoint."""
    clauses = list(g.clauses)
    nv = g.num_vars
    op = rng.randrange(4) if clauses else 0
    if op == 0:
        a, b = rng.sample(range(1, nv + 1), 2)
        clauses.append((a, b, Fraction(rng.randint(1, max_weight))))
    elif op == 1:
        if len(clauses) > 1:
            clauses.pop(rng.randrange(len(clauses)))
    elif op == 2:
        j = rng.randrange(len(clauses))
        a, b, w = clauses[j]
        clauses[j] = (a, b, max(Fraction(1), w + rng.choice((-1, 1)) * rng.randint(1, 3)))
    else:
        j = rng.randrange(len(clauses))
        a, b, w = clauses[j]
        keep = a if rng.random() < 0.5 else b
        other = rng.choice([v for v in range(1, nv + 1) if v != keep])
        clauses[j] = (keep, other, w)
    return Gadget(g.k, g.n_aux, tuple(clauses))


def family_score(summary: ReductionSummary | None) -> Fraction | float:
    """a / b, so larger is better; -inf for an invalid family."""
    if summary is None:
        return -math.inf
    if summary.b == 0:
        return math.inf
    return summary.a / summary.b


def _summarize(params: Sequence[GadgetParams]) -> ReductionSummary | None:
    if not all(p.authoritative for p in params):
        return None
    try:
        return summarize(params)
    except (AssertionError, ValueError):
        return None


def hill_climb_gadget(k: int, n_aux: int, budget, seed: int, initial: Sequence[Gadget] | None = None,
                      frozen: Sequence[int] = (), solver: str = "bnb", max_weight: int = 20,
                      deadline_ms: float | None = None, trace=None):
    """Mutate one non-frozen gadget at a time; keep the change unless the score drops.

    Returns (best family, its ReductionSummary). A zero budget returns the
    initial family untouched.
    """
    rng = random.Random(seed)
    budget = _as_budget(budget)
    family = list(initial) if initial is not None else trivial_family(k, n_aux)
    if len(family) != k:
        raise ValueError("a family needs one gadget per residue")
    movable = [i for i in range(k) if i not in set(frozen)]
    params = [gadget_params(g, i, solver, deadline_ms) for i, g in enumerate(family)]
    cur_summary = _summarize(params)
    cur = family_score(cur_summary)
    best_family, best_summary, best = list(family), cur_summary, cur
    if not movable:
        return best_family, best_summary
    while budget.spend():
        i = rng.choice(movable)
        cand = mutate_gadget(family[i], rng, max_weight)
        cand_params = list(params)
        cand_params[i] = gadget_params(cand, i, solver, deadline_ms)
        summ = _summarize(cand_params)
        score = family_score(summ)
        if score >= cur:
            family[i], params, cur, cur_summary = cand, cand_params, score, summ
            if score > best:
                best_family, best_summary, best = list(family), summ, score
        if trace is not None:
            trace.append(best)
    return best_family, best_summary


# ---------------------------------------------------------------- graphs

MC = "mc"
IS = "is"


def random_regular(n: int, d: int, rng: random.Random, tries: int = 1000) -> MultiGraph:
    """Loopless d-regular multigraph from the configuration model (simple if possible)."""
    if (n * d) % 2 or d >= n:
        raise ValueError(f"no loopless {d}-regular graph on {n} vertices this way")
    fallback = None
    for _ in range(tries):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        pairs = list(zip(stubs[::2], stubs[1::2]))
        if any(u == v for u, v in pairs):
            continue
        g = MultiGraph.from_pairs(n, pairs)
        if all(m == 1 for _, _, m in g.edges):
            return g
        fallback = fallback or g
    if fallback is None:
        raise RuntimeError("configuration model kept producing loops")
    return fallback


def double_edge_swap(g: MultiGraph, rng: random.Random) -> MultiGraph | None:
    pairs = g.edge_pairs()
    i, j = rng.sample(range(len(pairs)), 2)
    (a, b), (c, d) = pairs[i], pairs[j]
    if rng.random() < 0.5:
        c, d = d, c
    if a == c or b == d:
        return None
    rest = [p for q, p in enumerate(pairs) if q not in (i, j)]
    return MultiGraph.from_pairs(g.n, rest + [(a, c), (b, d)])


def insert_vertex_pair(g: MultiGraph, d: int, rng: random.Random) -> MultiGraph | None:
    """Add u ~ v and split d-1 disjoint edges (a, b) into (a, u), (b, v)."""
    pairs = g.edge_pairs()
    order = list(range(len(pairs)))
    rng.shuffle(order)
    chosen, used = [], set()
    for q in order:
        a, b = pairs[q]
        if a in used or b in used:
            continue
        chosen.append(q)
        used |= {a, b}
        if len(chosen) == d - 1:
            break
    if len(chosen) < d - 1:
        return None
    u, v = g.n, g.n + 1
    new = [p for q, p in enumerate(pairs) if q not in set(chosen)] + [(u, v)]
    for q in chosen:
        a, b = pairs[q]
        new += [(a, u), (b, v)]
    return MultiGraph.from_pairs(g.n + 2, new)


def improve_witness(g: MultiGraph, chosen: set[int], objective: str) -> set[int]:
    """Greedy repair: single-vertex moves for a cut, maximality for an independent set."""
    nb = g.neighbors()
    s = set(chosen)
    if objective == MC:
        changed = True
        while changed:
            changed = False
            for v in range(g.n):
                same = sum(1 for w in nb[v] if (w in s) == (v in s))
                if 2 * same > len(nb[v]):
                    s ^= {v}
                    changed = True
        return s
    for v in sorted(s):
        if v in s and any(w in s for w in nb[v] if w != v):
            s.discard(v)
    for v in range(g.n):
        if v not in s and not any(w in s for w in nb[v]):
            s.add(v)
    return s


def flip_witness(g: MultiGraph, chosen: set[int], objective: str, rng: random.Random) -> set[int]:
    v = rng.randrange(g.n)
    s = set(chosen) ^ {v}
    if objective == IS and v in s:
        s -= set(g.neighbors()[v])
        s.add(v)
    return s


class _Scorer:
    """score_pair with the spectral verdict cached per graph."""

    def __init__(self, objective: str):
        self.kind = "cut" if objective == MC else "independent_set"
        self.cache: dict[MultiGraph, bool] = {}

    def ramanujan(self, g: MultiGraph) -> bool:
        ok = self.cache.get(g)
        if ok is None:
            try:
                rep = is_ramanujan(g, "float")
                if rep.verdict == BOUNDARY:
                    rep = is_ramanujan(g, "exact")
                ok = rep.verdict == RAMANUJAN
            except PreconditionError:
                ok = False
            self.cache[g] = ok
        return ok

    def __call__(self, g: MultiGraph, s: set[int]):
        if not self.ramanujan(g):
            return -math.inf
        w = Witness(self.kind, frozenset(s))
        if self.kind == "cut":
            return cut_fraction(g, w)
        val = independent_set_fraction(g, w)
        return -math.inf if isinstance(val, Violation) else val


def hill_climb_graph(d: int, n_max: int, objective: str, budget, seed: int,
                     initial: tuple[MultiGraph, set[int]] | None = None, n_start: int | None = None,
                     trace=None):
    """Hill climb over Ramanujan d-regular graphs and witnesses.

    Moves: double-edge swap, vertex-pair insertion (while n + 2 <= n_max),
    single witness flips. Returns (graph, Witness, score); the returned pair is
    re-verified in exact mode.
    """
    if d not in (3, 4):
        raise ValueError("graph search supports d in {3, 4}")
    if objective not in (MC, IS):
        raise ValueError("objective must be 'mc' or 'is'")
    rng = random.Random(seed)
    budget = _as_budget(budget)
    score = _Scorer(objective)
    if initial is None:
        n0 = n_start or min(n_max, 2 * d + 2)
        n0 += (n0 * d) % 2
        if n0 > n_max:
            raise ValueError(f"n_max={n_max} too small for d={d}")
        g = random_regular(n0, d, rng)
        s = improve_witness(g, set(), objective)
    else:
        g, s = initial[0], set(initial[1])
    cur = score(g, s)
    best = (g, set(s), cur)
    while budget.spend():
        r = rng.random()
        if r < 0.5:
            cg, cs = g, flip_witness(g, s, objective, rng)
        else:
            if r < 0.6 and g.n + 2 <= n_max:
                cg = insert_vertex_pair(g, d, rng)
                extra = {g.n} if objective == MC else set()
                cs = s | extra
            else:
                cg = double_edge_swap(g, rng)
                cs = s
            if cg is None:
                if trace is not None:
                    trace.append(best[2])
                continue
            cs = improve_witness(cg, cs, objective)
        val = score(cg, cs)
        if val >= cur:
            g, s, cur = cg, cs, val
            if val > best[2]:
                best = (g, set(s), val)
        if trace is not None:
            trace.append(best[2])
    g, s, val = best
    kind = "cut" if objective == MC else "independent_set"
    w = Witness(kind, frozenset(s))
    if val != -math.inf:
        exact = score_pair(g, w, "exact")
        if exact != val:
            raise AssertionError("returned pair failed exact re-verification")
    return g, w, val
