"""Adjacency spectra, Ramanujan checks and witness scoring for regular graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph_core import MultiGraph, degree_profile

RAMANUJAN = "ramanujan"
NOT_RAMANUJAN = "not_ramanujan"
BOUNDARY = "boundary_uncertain"

JACOBI_TOL = 1e-12
_EPS = np.finfo(float).eps


class PreconditionError(ValueError):
    pass


class BoundaryUncertain(RuntimeError):
    """Float verdict too close to the threshold; rerun in exact mode."""


@dataclass
class SpectralReport:
    eigenvalues: list[float]
    error_bound: float
    d: int | None = None
    lambda_star: float | None = None
    threshold: float | None = None
    verdict: str | None = None
    mode: str = "float"
    sweeps: int = 0


@dataclass(frozen=True)
class Witness:
    kind: str  # "cut" or "independent_set"
    vertices: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ("cut", "independent_set"):
            raise ValueError(f"unknown witness kind {self.kind!r}")


@dataclass(frozen=True)
class Violation:
    """An independent-set witness that spans edges."""

    edges: tuple[tuple[int, int], ...]


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigenvalues(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 60):
    """Cyclic Jacobi with a round-robin ordering of disjoint rotations.

    Each round rotates n/2 disjoint (p, q) planes at once, which is the same
    as applying the commuting plane rotations one after another. Returns
    (eigenvalues descending, off-diagonal Frobenius norm, sweeps).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), 0.0, 0
    rounds = [(np.array([p for p, _ in r], dtype=np.intp), np.array([q for _, q in r], dtype=np.intp))
              for r in _round_robin(n) if r]
    off = _off_norm(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            nz = np.abs(apq) > 1e-300
            if not nz.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            theta = np.where(nz, (aqq - app) / np.where(nz, 2.0 * apq, 1.0), 0.0)
            big = np.abs(theta) > 1e150
            th = np.where(big, 0.0, theta)
            t = np.sign(th + (th == 0)) / (np.abs(th) + np.sqrt(th * th + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), np.where(nz, t, 0.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp = a[p, :].copy()
            rq = a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp = a[:, p].copy()
            cq = a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
        off = _off_norm(a)
    evals = np.sort(np.diag(a))[::-1]
    return evals, off, sweeps


def spectrum(g: MultiGraph) -> SpectralReport:
    if g.n < 1:
        raise PreconditionError("spectrum needs at least one vertex")
    a = g.adjacency()
    evals, off, sweeps = jacobi_eigenvalues(a)
    # Weyl: each eigenvalue moves by at most the norm of the discarded part,
    # plus a rounding allowance for the accumulated rotations.
    err = off + 4.0 * g.n * _EPS * float(np.linalg.norm(a))
    return SpectralReport(eigenvalues=[float(x) for x in evals], error_bound=err, sweeps=sweeps)


def _lambda_star(evals: list[float]) -> float:
    if len(evals) < 2:
        return 0.0
    return max(abs(x) for x in evals[1:])


def psd_exact(m: Iterable[Iterable[int]]) -> bool:
    """Exact PSD test of an integer symmetric matrix.

    Fraction-free symmetric elimination choosing positive pivots. Each
    Schur complement is a positive multiple of the true one, so a negative
    diagonal proves indefiniteness; a zero diagonal must have a zero row.
    """
    a = np.array([[int(x) for x in row] for row in m], dtype=object)
    prev = 1
    while a.shape[0]:
        diag = [a[i, i] for i in range(a.shape[0])]
        if any(x < 0 for x in diag):
            return False
        piv = next((i for i, x in enumerate(diag) if x > 0), None)
        if piv is None:
            return not any(x != 0 for x in a.flat)
        p = a[piv, piv]
        col = np.delete(a[:, piv], piv)
        rest = np.delete(np.delete(a, piv, axis=0), piv, axis=1)
        a = (p * rest - np.outer(col, col)) // prev
        prev = p
    return True


def ramanujan_matrix(g: MultiGraph, d: int) -> list[list[int]]:
    """n times (4(d-1)I - B^2) with B the adjacency minus its d/n * J part."""
    n = g.n
    a = g.adjacency().astype(object)
    a2 = a.dot(a)
    return [[(4 * n * (d - 1) if i == j else 0) - n * a2[i, j] + d * d for j in range(n)] for i in range(n)]


def is_ramanujan(g: MultiGraph, mode: str = "float") -> SpectralReport:
    prof = degree_profile(g)
    if not prof.regular or g.n == 0 or prof.d is None or prof.d < 2:
        raise PreconditionError("Ramanujan check needs a d-regular graph with d >= 2")
    d = prof.d
    rep = spectrum(g)
    rep.d = d
    rep.threshold = 2.0 * math.sqrt(d - 1)
    rep.lambda_star = _lambda_star(rep.eigenvalues)
    rep.mode = mode
    if mode == "float":
        if abs(rep.lambda_star - rep.threshold) <= rep.error_bound:
            rep.verdict = BOUNDARY
        elif rep.lambda_star < rep.threshold:
            rep.verdict = RAMANUJAN
        else:
            rep.verdict = NOT_RAMANUJAN
    elif mode == "exact":
        rep.verdict = RAMANUJAN if psd_exact(ramanujan_matrix(g, d)) else NOT_RAMANUJAN
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return rep


def _check_ids(g: MultiGraph, w: Witness) -> None:
    for v in w.vertices:
        if not 0 <= v < g.n:
            raise ValueError(f"witness vertex {v} out of range for n={g.n}")


def cut_fraction(g: MultiGraph, w: Witness) -> Fraction:
    if w.kind != "cut":
        raise ValueError("cut_fraction needs a cut witness")
    _check_ids(g, w)
    total = g.num_edges
    if total == 0:
        raise ValueError("graph has no edges")
    crossing = sum(m for u, v, m in g.edges if (u in w.vertices) != (v in w.vertices))
    return Fraction(crossing, total)


def independent_set_fraction(g: MultiGraph, w: Witness) -> Fraction | Violation:
    if w.kind != "independent_set":
        raise ValueError("independent_set_fraction needs an independent_set witness")
    _check_ids(g, w)
    bad = tuple((u, v) for u, v, _ in g.edges if u in w.vertices and v in w.vertices)
    if bad:
        return Violation(bad)
    return Fraction(len(w.vertices), g.n)


def score_pair(g: MultiGraph, w: Witness, mode: str = "float") -> Fraction | float:
    """Fitness of a (graph, witness) pair; -inf unless the graph is Ramanujan."""
    try:
        rep = is_ramanujan(g, mode)
    except PreconditionError:
        return -math.inf
    if rep.verdict == BOUNDARY:
        raise BoundaryUncertain("float verdict is within the error bound; use mode='exact'")
    if rep.verdict != RAMANUJAN:
        return -math.inf
    if w.kind == "cut":
        return cut_fraction(g, w)
    val = independent_set_fraction(g, w)
    return -math.inf if isinstance(val, Violation) else val


def load_witness(path, kind: str) -> Witness:
    with open(path) as fh:
        ids = [int(tok) for tok in fh.read().split()]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate vertex ids in witness file")
    return Witness(kind, frozenset(ids))
