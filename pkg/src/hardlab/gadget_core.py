"""Gadgets from 3LIN(k) clauses to MAX-k-CUT and their four parameters.

Variable ids are 1-based: primaries 1..3, globals 4..k+3, auxiliaries after.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .kcut_solver import KCutInstance, PreparedBnB, SolverTimeout, max_value_brute


class GadgetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Gadget:
    k: int
    n_aux: int
    clauses: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("alphabet size must be at least 2")
        top = self.num_vars
        for a, b, w in self.clauses:
            if a == b:
                raise ValueError(f"clause on identical variables ({a}, {b})")
            if not (1 <= a <= top and 1 <= b <= top):
                raise ValueError(f"clause ({a}, {b}) outside 1..{top}")
            if w <= 0:
                raise ValueError("clause weights must be positive")

    @classmethod
    def build(cls, k: int, n_aux: int, clauses) -> "Gadget":
        return cls(k, n_aux, tuple((int(a), int(b), Fraction(w)) for a, b, w in clauses))

    @property
    def num_vars(self) -> int:
        return 3 + self.k + self.n_aux

    @property
    def globals(self) -> list[int]:
        return list(range(4, self.k + 4))

    @property
    def aux(self) -> list[int]:
        return list(range(self.k + 4, self.num_vars + 1))

    @property
    def integral(self) -> bool:
        return all(w.denominator == 1 for _, _, w in self.clauses)

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.clauses), Fraction(0))


def parse_gadget(text: str) -> tuple[Gadget, dict[int, int]]:
    """Parse the gadget/instance text format. Returns the gadget and any ``fix`` lines."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GadgetFormatError("empty gadget file")
    head = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    try:
        k = int(head["k"])
        nv = int(head["vars"])
    except (KeyError, ValueError) as exc:
        raise GadgetFormatError("first line must be 'k=<int> vars=<int>'") from exc
    clauses = []
    fixed: dict[int, int] = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        try:
            if parts[0] == "fix":
                fixed[int(parts[1])] = int(parts[2])
                continue
            a, b, w = int(parts[0]), int(parts[1]), Fraction(parts[2])
        except (IndexError, ValueError) as exc:
            raise GadgetFormatError(f"line {lineno}: cannot parse {ln!r}") from exc
        clauses.append((a, b, w))
    try:
        return Gadget.build(k, nv - 3 - k, clauses), fixed
    except ValueError as exc:
        raise GadgetFormatError(str(exc)) from exc


def load_gadget(path) -> Gadget:
    return parse_gadget(Path(path).read_text())[0]


def format_gadget(g: Gadget, fixed: dict[int, int] | None = None) -> str:
    out = [f"k={g.k} vars={g.num_vars}"]
    out += [f"{a} {b} {w}" for a, b, w in g.clauses]
    out += [f"fix {v} {c}" for v, c in sorted((fixed or {}).items())]
    return "\n".join(out) + "\n"


def predicate_3lin(k: int, i: int, x: Sequence[int]) -> bool:
    return (x[0] + x[1] + x[2]) % k == i % k


def allowed_global_assignments(k: int) -> list[tuple[int, ...]]:
    """Restricted-growth strings of length k in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], top: int) -> None:
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for c in range(top + 2):
            if c < k:
                prefix.append(c)
                rec(prefix, max(top, c))
                prefix.pop()

    if k >= 1:
        rec([], -1)
    return out


def gadget_value(g: Gadget, assignment: Sequence[int]) -> Fraction:
    if len(assignment) != g.num_vars:
        raise ValueError(f"assignment has {len(assignment)} entries, gadget has {g.num_vars} variables")
    if any(not 0 <= c < g.k for c in assignment):
        raise ValueError(f"colors must lie in Z_{g.k}")
    return sum((w for a, b, w in g.clauses if assignment[a - 1] != assignment[b - 1]), Fraction(0))


@dataclass
class GadgetParams:
    c: Fraction | None  # None only in a non-authoritative (timed out) result
    c_prime: Fraction | None
    s: Fraction | None
    t: Fraction
    witness_map: dict = field(default_factory=dict)  # satisfying x -> aux colors
    per_x: dict = field(default_factory=dict)  # satisfying x -> completeness maximum
    authoritative: bool = True

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c, self.c_prime, self.s, self.t)


def _fixing(g: Gadget, x, y) -> dict[int, int]:
    fixed = {1: x[0], 2: x[1], 3: x[2]}
    for j, c in enumerate(y):
        fixed[4 + j] = c
    return fixed


class _SliceSolver:
    """Maximum over auxiliary colorings for one (x, y), via either backend."""

    def __init__(self, g: Gadget, backend: str, deadline_ms: float | None):
        self.g = g
        self.backend = backend
        self.deadline_ms = deadline_ms
        if backend == "bnb":
            self.prep = PreparedBnB(g.k, g.num_vars, g.clauses, range(1, g.k + 4), deadline_ms)
        elif backend != "brute":
            raise ValueError(f"unknown backend {backend!r}")

    def solve(self, x, y, floor: Fraction | None = None):
        fixed = _fixing(self.g, x, y)
        if self.backend == "bnb":
            sol = self.prep.solve(fixed, floor)
        else:
            inst = KCutInstance(self.g.k, self.g.num_vars, self.g.clauses, fixed)
            sol = max_value_brute(inst, self.deadline_ms)
            if floor is not None and sol.value <= floor:
                sol = None
        return sol


def gadget_params(g: Gadget, i: int, solver: str = "bnb", deadline_ms: float | None = None,
                  progress=None) -> GadgetParams:
    """Completeness c, the two soundness maxima c' and s, and total weight t.

    c is the minimum over satisfying x of the best auxiliary value with the
    globals pinned to (0, 1, ..., k-1); c' and s maximize over all allowed
    globals and auxiliaries, over satisfying and unsatisfying x respectively.
    """
    k = g.k
    slices = _SliceSolver(g, solver, deadline_ms)
    ys = allowed_global_assignments(k)
    ident = tuple(range(k))
    xs = list(itertools.product(range(k), repeat=3))
    sat = [x for x in xs if predicate_3lin(k, i, x)]
    unsat = [x for x in xs if not predicate_3lin(k, i, x)]

    per_x: dict = {}
    witness: dict = {}
    state = {"c'": None, "s": None}

    def sweep(group, start: Fraction | None, tag: str) -> Fraction:
        best = start
        for x in group:
            for y in ys:
                if solver == "bnb":
                    sol = slices.solve(x, y, best)
                    if sol is not None:
                        best = sol.value
                else:
                    sol = slices.solve(x, y)
                    if best is None or sol.value > best:
                        best = sol.value
                state[tag] = best
                if progress:
                    progress(tag, x, y, best)
        return best

    try:
        for x in sat:
            sol = slices.solve(x, ident)
            per_x[x] = sol.value
            witness[x] = tuple(sol.assignment[v - 1] for v in g.aux)
            if progress:
                progress("c", x, ident, sol.value)
        c = min(per_x.values())
        # (0, ..., k-1) is itself in Y, so c' starts from the best completeness slice
        state["c'"] = max(per_x.values())
        c_prime = sweep(sat, state["c'"], "c'")
        s = sweep(unsat, None, "s") if unsat else Fraction(0)
    except SolverTimeout:
        # partial maxima are lower bounds only; c is unknown unless every x finished
        c = min(per_x.values()) if len(per_x) == len(sat) else None
        return GadgetParams(c, state["c'"], state["s"], g.total_weight, witness, per_x, authoritative=False)
    return GadgetParams(c, c_prime, s, g.total_weight, witness, per_x)
