"""Reduction parameters of a gadget family, global rotations and instance composition."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gadget_core import Gadget, GadgetParams, gadget_params, predicate_3lin
from .kcut_solver import KCutInstance, SolverTimeout


def rotate_globals(g: Gadget, perm: Sequence[int]) -> Gadget:
    """Rename global ids: the variable at global position j becomes ``perm[j]``.

    ``perm`` lists the new ids of globals 4..k+3 in order, e.g. (4, 6, 5)
    swaps globals 5 and 6; (7, 4, 5, 6) maps 4->7, 5->4, 6->5, 7->6.
    """
    glob = g.globals
    if sorted(perm) != glob:
        raise ValueError(f"permutation must rearrange the global ids {glob}")
    ren = dict(zip(glob, perm))
    return Gadget(g.k, g.n_aux, tuple((ren.get(a, a), ren.get(b, b), w) for a, b, w in g.clauses))


def cyclic_rotation(k: int) -> list[int]:
    """The rotation (4, ..., k+3) -> (k+3, 4, ..., k+2)."""
    glob = list(range(4, k + 4))
    return [glob[-1]] + glob[:-1]


def negation_rotation(k: int) -> list[int]:
    """Global position j -> position -j mod k, e.g. (4, 6, 5) for k = 3."""
    return [4 + (-j) % k for j in range(k)]


def family_by_rotation(base: Gadget, k: int) -> list[Gadget]:
    """I_0 and its successive cyclic rotations I_1, ..., I_{k-1}."""
    fam = [base]
    for _ in range(k - 1):
        fam.append(rotate_globals(fam[-1], cyclic_rotation(k)))
    return fam


def complete_family(gadgets: Sequence[Gadget], k: int) -> list[Gadget]:
    """Fill residues len(gadgets)..k-1 by rotating the given gadgets.

    A lone I_0 is extended by cyclic rotations. Otherwise residue j is the
    negation-rotated copy of residue k - j when that one is given, and a
    cyclic rotation of residue j - 1 failing that.
    """
    fam = list(gadgets)
    if not fam:
        raise ValueError("need at least one gadget")
    if len(fam) == 1:
        return family_by_rotation(fam[0], k)
    given = len(fam)
    while len(fam) < k:
        j = len(fam)
        mirror = (-j) % k
        if mirror < given:
            fam.append(rotate_globals(fam[mirror], negation_rotation(k)))
        else:
            fam.append(rotate_globals(fam[-1], cyclic_rotation(k)))
    return fam


@dataclass
class ReductionSummary:
    k: int
    params: list[GadgetParams]
    a: Fraction
    b: Fraction
    ratio: Fraction
    r_perm: list[int]

    def statement(self) -> str:
        return (f"NP-hard to distinguish value >= {self.a} - eps from <= {self.b} + eps; "
                f"hence NP-hard to approximate within {self.ratio} + eps (~{float(self.ratio):.6f})")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "a": str(self.a),
            "b": str(self.b),
            "ratio": str(self.ratio),
            "ratio_float": float(self.ratio),
            "r_perm": self.r_perm,
            "params": [{"residue": i, "c": str(p.c), "c_prime": str(p.c_prime), "s": str(p.s), "t": str(p.t)}
                       for i, p in enumerate(self.params)],
            "statement": self.statement(),
        }


def summarize(params: Sequence[GadgetParams]) -> ReductionSummary:
    """a and b from per-residue parameters; params[i] belongs to the i-gadget."""
    k = len(params)
    total_t = sum((p.t for p in params), Fraction(0))
    if total_t == 0:
        raise ValueError("gadget family has zero total weight")
    gaps = [p.c_prime - p.s for p in params]
    r0 = max(range(k), key=lambda i: (gaps[i], -i))
    r_perm = [r0] + [i for i in range(k) if i != r0]

    def b_for(r: int) -> Fraction:
        return (params[r].c_prime + sum((params[i].s for i in range(k) if i != r), Fraction(0))) / total_t

    a = sum((p.c for p in params), Fraction(0)) / total_t
    b = b_for(r0)
    # any maximizer of c' - s gives the same b
    for i in range(k):
        if gaps[i] == gaps[r0]:
            assert b_for(i) == b
    if b > a:
        raise AssertionError(f"soundness {b} exceeds completeness {a}: not a valid gadget family")
    return ReductionSummary(k, list(params), a, b, b / a, r_perm)


def reduction_summary(gadgets: Sequence[Gadget], solver: str = "bnb", deadline_ms: float | None = None
                      ) -> ReductionSummary:
    k = len(gadgets)
    if any(g.k != k for g in gadgets):
        raise ValueError("need exactly k gadgets over Z_k, one per residue")
    params = [gadget_params(g, i, solver, deadline_ms) for i, g in enumerate(gadgets)]
    for i, p in enumerate(params):
        if not p.authoritative:
            raise SolverTimeout(f"parameters of the residue-{i} gadget did not finish")
    return summarize(params)


@dataclass(frozen=True)
class LinClause:
    vars: tuple[int, int, int]  # 1-based source variable ids
    residue: int


@dataclass(frozen=True)
class LinInstance:
    """A 3LIN(k) source instance on n variables."""

    k: int
    n: int
    clauses: tuple[LinClause, ...]

    def satisfied(self, x: Sequence[int]) -> bool:
        return all(predicate_3lin(self.k, c.residue, [x[v - 1] for v in c.vars]) for c in self.clauses)


@dataclass
class Composition:
    instance: KCutInstance
    global_ids: list[int]
    aux_ids: list[list[int]]  # per source clause


def compose_instance(src: LinInstance, gadgets: Sequence[Gadget], max_vars: int = 100000) -> Composition:
    """Replace every source clause by a copy of the gadget for its residue.

    Layout: source variables 1..n, shared globals n+1..n+k, then one block of
    n_aux auxiliaries per clause. Gadgets are padded to a common n_aux with
    isolated variables.
    """
    k = src.k
    if len(gadgets) != k:
        raise ValueError("need one gadget per residue")
    n_aux = max(g.n_aux for g in gadgets)
    total = src.n + k + n_aux * len(src.clauses)
    if total > max_vars:
        raise ValueError(f"composed instance needs {total} variables (cap {max_vars})")
    glob = [src.n + 1 + j for j in range(k)]
    clauses = []
    aux_ids = []
    for j, cl in enumerate(src.clauses):
        g = gadgets[cl.residue]
        first = src.n + k + 1 + j * n_aux
        block = list(range(first, first + n_aux))
        aux_ids.append(block)
        ren = {1: cl.vars[0], 2: cl.vars[1], 3: cl.vars[2]}
        ren.update({4 + q: glob[q] for q in range(k)})
        ren.update({k + 4 + q: block[q] for q in range(g.n_aux)})
        for a, b, w in g.clauses:
            clauses.append((ren[a], ren[b], w))
    inst = KCutInstance(k, total, tuple(clauses), {})
    return Composition(inst, glob, aux_ids)


def completeness_assignment(comp: Composition, src: LinInstance, x: Sequence[int],
                            witness_maps: Sequence[dict]) -> list[int]:
    """Source assignment x, globals (0, ..., k-1), each block from the witness map."""
    colors = [0] * comp.instance.m
    for v, c in enumerate(x, start=1):
        colors[v - 1] = c
    for q, v in enumerate(comp.global_ids):
        colors[v - 1] = q
    for cl, block in zip(src.clauses, comp.aux_ids):
        z = witness_maps[cl.residue][tuple(x[v - 1] for v in cl.vars)]
        for v, c in zip(block, z):
            colors[v - 1] = c
    return colors
