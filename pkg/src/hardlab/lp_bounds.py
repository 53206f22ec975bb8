"""Local-labeling linear programs over the d-ary tree and the bounds they certify.

A labeling class is an orbit of +-1 labelings of T_{d,L} under the automorphisms
fixing the root. Classes are built bottom-up: a subtree type is its root label
plus the sorted ids of its child types, so two labelings share a key exactly
when they lie in the same orbit.

LP variables are class probabilities. Constraints, for a distribution coming
from a d-regular graph G with nontrivial eigenvalues at most lam in absolute
value and a labeling y of G whose +1 fraction is within delta of alpha:

* root mean: E[y_root] = 2|S|/n - 1 lies in [2alpha-1-2delta, 2alpha-1+2delta];
* walk correlation: with rho = (lam/d)^L and m the mean label,
  E[y_root y_end] = m^2 + r, |r| <= rho (1 - m^2), r >= 0 for even L
  (y minus its mean is orthogonal to the top eigenvector);
* edge consistency: re-rooting at a uniformly random child leaves the
  distribution unchanged, so the two halves of the root edge (each seen to
  depth L-1) are exchangeable.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
from scipy import sparse

from . import lp_solvers

MAX_CUT = "max_cut"
INDEPENDENT_SET = "independent_set"
NEG = -(10 ** 9)


class EnumerationGuard(RuntimeError):
    pass


# ---------------------------------------------------------------- tree

@dataclass(frozen=True)
class Tree:
    d: int
    L: int
    vertices: tuple[tuple[int, ...], ...]  # addresses, root = ()

    def depth_counts(self) -> list[int]:
        return [depth_size(self.d, j) for j in range(self.L + 1)]

    def children(self, addr: tuple[int, ...]) -> list[tuple[int, ...]]:
        if len(addr) >= self.L:
            return []
        width = self.d if not addr else self.d - 1
        return [addr + (q,) for q in range(width)]


def depth_size(d: int, j: int) -> int:
    return 1 if j == 0 else d * (d - 1) ** (j - 1)


def build_tree(d: int, L: int) -> Tree:
    if d < 2 or L < 0:
        raise ValueError("need d >= 2 and L >= 0")
    verts = [()]
    frontier = [()]
    for depth in range(L):
        width = d if depth == 0 else d - 1
        frontier = [a + (q,) for a in frontier for q in range(width)]
        verts += frontier
    return Tree(d, L, tuple(verts))


def walk_distribution(d: int, L: int) -> list[Fraction]:
    """Probability that an L-step simple random walk from the root ends at depth j."""
    if L < 1:
        raise ValueError("walk length must be positive")
    p = [Fraction(0)] * (L + 1)
    p[0] = Fraction(1)
    for _ in range(L):
        q = [Fraction(0)] * (L + 1)
        for j, pj in enumerate(p):
            if pj == 0:
                continue
            if j == 0:
                q[1] += pj
            else:
                q[j - 1] += pj / d
                if j + 1 <= L:
                    q[j + 1] += pj * (d - 1) / d
        p = q
    return p


def walk_vertex_probability(d: int, L: int) -> dict[tuple[int, ...], Fraction]:
    depth_p = walk_distribution(d, L)
    tree = build_tree(d, L)
    return {a: depth_p[len(a)] / depth_size(d, len(a)) for a in tree.vertices}


# ---------------------------------------------------------------- class enumeration

@dataclass
class SubtreeType:
    label: int
    children: tuple[int, ...]
    val: int  # objective inside the subtree (cut edges or internal +1 count)
    opt: dict  # best objective per root label with the leaves held fixed
    sums: tuple[int, ...]  # label sums by relative depth
    orbit: int


@dataclass
class LabelingClass:
    label: int
    children: tuple[int, ...]  # type ids at height L-1
    sums: tuple[int, ...]
    orbit: int


@dataclass
class LabelingClassSystem:
    d: int
    L: int
    mode: str
    pruned: bool
    levels: list[list[SubtreeType]]  # levels[h] = non-root types of height h
    classes: list[LabelingClass]
    index: dict = field(default_factory=dict)  # (label, children) -> class id

    def __len__(self) -> int:
        return len(self.classes)

    # ---- coefficients
    def root_values(self) -> np.ndarray:
        return np.array([c.label for c in self.classes], dtype=float)

    def neighbor_correlation(self) -> list[Fraction]:
        """E over root children of y_root * y_child, per class."""
        if self.L == 0:
            raise ValueError("no root children at L = 0")
        return [Fraction(c.label * c.sums[1], self.d) for c in self.classes]

    def objective_coefficients(self) -> list[Fraction]:
        if self.mode == MAX_CUT:
            return [(1 - r) / 2 for r in self.neighbor_correlation()]
        return [Fraction(0)] * len(self.classes)

    def walk_correlation(self) -> list[Fraction]:
        """E[y_root * y_end] for the L-step walk, per class."""
        dist = walk_distribution(self.d, self.L)
        out = []
        for c in self.classes:
            tot = Fraction(0)
            for j, pj in enumerate(dist):
                if pj:
                    tot += pj * Fraction(c.label * c.sums[j], depth_size(self.d, j))
            out.append(tot)
        return out

    def edge_halves(self) -> list[Counter]:
        """Per class, counts of (root-side half, child-side half) over root children."""
        L = self.L
        if L == 0:
            raise ValueError("no root edge at L = 0")
        canon = _Canon(self.levels)
        out = []
        for c in self.classes:
            cnt: Counter = Counter()
            ch = list(c.children)
            for idx, t in enumerate(ch):
                if L == 1:
                    left = (c.label,)
                    right = (self.levels[0][t].label,)
                else:
                    others = ch[:idx] + ch[idx + 1:]
                    left = (c.label, tuple(sorted(canon.trunc(L - 1, o, L - 2) for o in others)))
                    typ = self.levels[L - 1][t]
                    right = (typ.label, tuple(sorted(canon.trunc(L - 2, g, L - 2) for g in typ.children)))
                cnt[(canon.half(left), canon.half(right))] += 1
            out.append(cnt)
        return out

    def consistency_rows(self) -> tuple[sparse.csr_matrix, list[tuple[int, int]]]:
        halves = self.edge_halves()
        rows: dict[tuple[int, int], dict[int, Fraction]] = {}
        for ci, cnt in enumerate(halves):
            for (s, t), m in cnt.items():
                if s == t:
                    continue
                key, sign = ((s, t), 1) if s < t else ((t, s), -1)
                row = rows.setdefault(key, {})
                row[ci] = row.get(ci, Fraction(0)) + Fraction(sign * m, self.d)
        keys = sorted(rows)
        data, ri, cj = [], [], []
        kept = []
        for key in keys:
            row = {c: v for c, v in rows[key].items() if v != 0}
            if not row:
                continue
            r = len(kept)
            kept.append(key)
            for c, v in row.items():
                ri.append(r)
                cj.append(c)
                data.append(float(v))
        mat = sparse.csr_matrix((data, (ri, cj)), shape=(len(kept), len(self.classes)))
        return mat, kept

    def exact_consistency_rows(self) -> list[dict[int, Fraction]]:
        halves = self.edge_halves()
        rows: dict[tuple[int, int], dict[int, Fraction]] = {}
        for ci, cnt in enumerate(halves):
            for (s, t), m in cnt.items():
                if s == t:
                    continue
                key, sign = ((s, t), 1) if s < t else ((t, s), -1)
                row = rows.setdefault(key, {})
                row[ci] = row.get(ci, Fraction(0)) + Fraction(sign * m, self.d)
        return [rows[k] for k in sorted(rows) if any(v != 0 for v in rows[k].values())]

    # ---- explicit labelings
    def expand(self, class_id: int) -> dict[tuple[int, ...], int]:
        """A representative labeling of the tree, keyed by vertex address."""
        c = self.classes[class_id]
        lab = {(): c.label}

        def fill(addr, h, t):
            typ = self.levels[h][t]
            lab[addr] = typ.label
            for q, ct in enumerate(typ.children):
                fill(addr + (q,), h - 1, ct)

        for q, t in enumerate(c.children):
            fill((q,), self.L - 1, t)
        return lab

    def classify(self, labels: dict[tuple[int, ...], int]) -> int | None:
        """Class id of an explicit labeling, or None if it was pruned."""
        lookup = [dict(((t.label, t.children), i) for i, t in enumerate(lev)) for lev in self.levels]

        def tid(addr, h):
            if h == 0:
                return lookup[0].get((labels[addr], ()))
            width = self.d - 1
            ch = []
            for q in range(width):
                x = tid(addr + (q,), h - 1)
                if x is None:
                    return None
                ch.append(x)
            return lookup[h].get((labels[addr], tuple(sorted(ch))))

        if self.L == 0:
            return self.index.get((labels[()], ()))
        ch = []
        for q in range(self.d):
            x = tid((q,), self.L - 1)
            if x is None:
                return None
            ch.append(x)
        return self.index.get((labels[()], tuple(sorted(ch))))


class _Canon:
    """Canonical ids of unpruned labeled subtrees, used for edge halves."""

    def __init__(self, levels):
        self.levels = levels
        self.reg: dict = {}
        self.memo: dict = {}
        self.halves: dict = {}

    def _intern(self, h: int, key) -> int:
        reg = self.reg.setdefault(h, {})
        if key not in reg:
            reg[key] = len(reg)
        return reg[key]

    def trunc(self, h: int, t: int, target: int) -> int:
        """Id of type t (height h) cut down to height ``target``."""
        mk = (h, t, target)
        if mk in self.memo:
            return self.memo[mk]
        typ = self.levels[h][t]
        if target == 0:
            out = self._intern(0, (typ.label, ()))
        else:
            kids = tuple(sorted(self.trunc(h - 1, c, target - 1) for c in typ.children))
            out = self._intern(target, (typ.label, kids))
        self.memo[mk] = out
        return out

    def half(self, key) -> int:
        if key not in self.halves:
            self.halves[key] = len(self.halves)
        return self.halves[key]


def _multinomial(items) -> int:
    cnt = Counter(items)
    out = factorial(len(items))
    for m in cnt.values():
        out //= factorial(m)
    return out


def _combine(mode: str, lab: int, kids: list[SubtreeType]):
    """(val, opt, valid) for a vertex with label ``lab`` above the given subtrees."""
    if mode == MAX_CUT:
        val = sum(k.val + (lab != k.label) for k in kids)
        opt = {}
        for l in (1, -1):
            opt[l] = sum(max(k.opt[lc] + (l != lc) for lc in (1, -1) if k.opt[lc] > NEG // 2) for k in kids)
        return val, opt, True
    own = lambda l: 1 if l == 1 else 0
    if lab == 1 and any(k.label == 1 for k in kids):
        return 0, {}, False
    val = own(lab) + sum(k.val for k in kids)
    opt = {}
    for l in (1, -1):
        tot = own(l)
        for k in kids:
            best = max((k.opt[lc] for lc in (1, -1) if k.opt[lc] > NEG // 2 and not (l == 1 and lc == 1)),
                       default=NEG)
            if best == NEG:
                tot = NEG
                break
            tot += best
        opt[l] = tot
    return val, opt, True


def _keep(pruned: bool, val: int, opt: dict) -> bool:
    return not pruned or val == max(opt.values())


def enumerate_classes(d: int, L: int, mode: str = MAX_CUT, pruned: bool = True,
                      guard: int = 2_000_000) -> LabelingClassSystem:
    """Orbit representatives of labelings of T_{d,L}.

    With ``pruned`` set, only locally optimal labelings are kept: at every
    internal vertex the labels inside its subtree are optimal for that subtree
    with its leaves held fixed (maximum cut, or maximum independent set).
    Independent-set mode always requires the +1 labels to form an
    independent set.
    """
    if mode not in (MAX_CUT, INDEPENDENT_SET):
        raise ValueError(f"unknown mode {mode!r}")
    if d < 2 or L < 0:
        raise ValueError("need d >= 2 and L >= 0")
    leaves = [SubtreeType(l, (), 0, {l: 0, -l: NEG}, (l,), 1) for l in (1, -1)]
    levels = [leaves]
    for h in range(1, L):
        prev = levels[-1]
        if math.comb(len(prev) + d - 2, d - 1) * 2 > guard:
            raise EnumerationGuard(f"height {h} would need more than {guard} candidates")
        cur = []
        for lab in (1, -1):
            for ch in itertools.combinations_with_replacement(range(len(prev)), d - 1):
                kids = [prev[c] for c in ch]
                val, opt, ok = _combine(mode, lab, kids)
                if not ok or not _keep(pruned, val, opt):
                    continue
                sums = (lab,) + tuple(sum(k.sums[j] for k in kids) for j in range(h))
                orbit = _multinomial(ch)
                for k in kids:
                    orbit *= k.orbit
                cur.append(SubtreeType(lab, ch, val, opt, sums, orbit))
        levels.append(cur)

    classes = []
    if L == 0:
        for lab in (1, -1):
            classes.append(LabelingClass(lab, (), (lab,), 1))
    else:
        top = levels[L - 1]
        if math.comb(len(top) + d - 1, d) * 2 > guard:
            raise EnumerationGuard(f"root level would need more than {guard} candidates")
        for lab in (1, -1):
            for ch in itertools.combinations_with_replacement(range(len(top)), d):
                kids = [top[c] for c in ch]
                val, opt, ok = _combine(mode, lab, kids)
                if not ok or not _keep(pruned, val, opt):
                    continue
                sums = (lab,) + tuple(sum(k.sums[j] for k in kids) for j in range(L))
                orbit = _multinomial(ch)
                for k in kids:
                    orbit *= k.orbit
                classes.append(LabelingClass(lab, ch, sums, orbit))
    system = LabelingClassSystem(d, L, mode, pruned, levels, classes)
    system.index = {(c.label, c.children): i for i, c in enumerate(classes)}
    return system


# ---------------------------------------------------------------- LP assembly

@dataclass
class CertLP:
    system: LabelingClassSystem
    alpha: tuple[Fraction, Fraction]  # alpha interval (a single point when equal)
    delta: Fraction
    lam: float
    c: np.ndarray
    A_ub: sparse.csr_matrix
    b_ub: np.ndarray
    A_eq: sparse.csr_matrix
    b_eq: np.ndarray
    row_names: list[str]
    mean_window: tuple[Fraction, Fraction]
    walk_window: tuple[float, float]

    @property
    def maximize(self) -> bool:
        return self.system.mode == MAX_CUT


def square_range(lo: float, hi: float) -> tuple[float, float]:
    """Range of m^2 for m in [lo, hi]."""
    lo2, hi2 = lo * lo, hi * hi
    low = 0.0 if lo <= 0.0 <= hi else min(lo2, hi2)
    return low, max(lo2, hi2)


def walk_window(lo: float, hi: float, rho: float, L: int) -> tuple[float, float]:
    """Admissible range of E[y_root y_end] given the mean lies in [lo, hi]."""
    lo, hi = max(lo, -1.0), min(hi, 1.0)
    s_lo, s_hi = square_range(lo, hi)
    ends = (s_lo, s_hi)
    upper = max(s + rho * (1.0 - s) for s in ends)
    if L % 2 == 0:
        lower = s_lo
    else:
        lower = min(s - rho * (1.0 - s) for s in ends)
    return max(lower, -1.0), min(upper, 1.0)


class _Coefficients:
    """Per-system data shared by every LP of an alpha sweep."""

    def __init__(self, system: LabelingClassSystem):
        self.system = system
        self.root = system.root_values()
        self.obj = np.array([float(v) for v in system.objective_coefficients()])
        self.walk = np.array([float(v) for v in system.walk_correlation()]) if system.L >= 1 else None
        if system.L >= 1:
            self.cons, self.cons_keys = system.consistency_rows()
        else:
            self.cons, self.cons_keys = sparse.csr_matrix((0, len(system))), []


def assemble_lp(system: LabelingClassSystem, alpha, delta, lam: float, coeffs: _Coefficients | None = None,
                alpha_hi=None) -> CertLP:
    """LP for one alpha, or for the whole interval [alpha, alpha_hi] as a relaxation."""
    coeffs = coeffs or _Coefficients(system)
    if coeffs.system is not system:
        raise ValueError("coefficient table belongs to another class system")
    a1 = Fraction(alpha)
    a2 = Fraction(alpha_hi) if alpha_hi is not None else a1
    delta = Fraction(delta)
    if not (0 <= a1 <= a2 <= 1) or delta < 0 or lam <= 0:
        raise ValueError("need 0 <= alpha <= 1, delta >= 0, lam > 0")
    n = len(system)
    lo = 2 * a1 - 1 - 2 * delta
    hi = 2 * a2 - 1 + 2 * delta
    ub_rows = [coeffs.root.reshape(1, -1), -coeffs.root.reshape(1, -1)]
    b_ub = [float(hi), -float(lo)]
    names = ["mean_hi", "mean_lo"]
    window = (math.nan, math.nan)
    if system.L >= 1:
        rho = (lam / system.d) ** system.L
        window = walk_window(float(lo), float(hi), rho, system.L)
        ub_rows += [coeffs.walk.reshape(1, -1), -coeffs.walk.reshape(1, -1)]
        b_ub += [window[1], -window[0]]
        names += ["walk_hi", "walk_lo"]
    A_ub = sparse.csr_matrix(np.vstack(ub_rows))
    A_eq = sparse.vstack([sparse.csr_matrix(np.ones((1, n))), coeffs.cons]).tocsr()
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[0] = 1.0
    names += ["simplex"] + [f"edge_{s}_{t}" for s, t in coeffs.cons_keys]
    c = coeffs.obj if system.mode == MAX_CUT else np.zeros(n)
    return CertLP(system, (a1, a2), delta, lam, c, A_ub, np.array(b_ub), A_eq, b_eq, names, (lo, hi), window)


def solve_lp(lp: CertLP, backend: str = "highs") -> lp_solvers.LPResult:
    args = (lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq)
    if backend == "highs":
        return lp_solvers.highs(*args)
    if backend == "simplex":
        return lp_solvers.simplex(*args)
    if backend == "exact":
        return solve_lp_exact(lp)
    raise ValueError(f"unknown LP backend {backend!r}")


def solve_lp_exact(lp: CertLP) -> lp_solvers.LPResult:
    """Rational simplex; the walk window is rounded outward to rationals."""
    sys_ = lp.system
    n = len(sys_)
    root = [Fraction(c.label) for c in sys_.classes]
    rows = [root, [-v for v in root]]
    rhs = [lp.mean_window[1], -lp.mean_window[0]]
    if sys_.L >= 1:
        walk = sys_.walk_correlation()
        lo_w = Fraction(math.floor(lp.walk_window[0] * 10 ** 12), 10 ** 12)
        hi_w = Fraction(math.ceil(lp.walk_window[1] * 10 ** 12), 10 ** 12)
        rows += [walk, [-v for v in walk]]
        rhs += [hi_w, -lo_w]
    eq = [[Fraction(1)] * n]
    for row in sys_.exact_consistency_rows():
        eq.append([row.get(j, Fraction(0)) for j in range(n)])
    beq = [Fraction(1)] + [Fraction(0)] * (len(eq) - 1)
    return lp_solvers.simplex(sys_.objective_coefficients(), rows, rhs, eq, beq, exact=True)


def export_lp(lp: CertLP, path) -> None:
    names = [f"p{j}" for j in range(len(lp.system))]
    lp_solvers.write_lp_file(path, lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq, names,
                             sense="max" if lp.maximize else "min")


# ---------------------------------------------------------------- certified bounds

def round_up(x, places: int = 3) -> Fraction:
    q = 10 ** places
    return Fraction(math.ceil(Fraction(x) * q), q)


@dataclass
class BoundResult:
    d: int
    L: int
    mode: str
    delta: Fraction
    eps: float
    lam: float
    classes: int
    bound: Fraction
    raw: float
    arg_alpha: Fraction | None
    alphas_solved: int
    lps_solved: int
    seconds: float

    def to_json(self) -> dict:
        return {
            "d": self.d, "L": self.L, "objective": self.mode, "delta": str(self.delta), "eps": self.eps,
            "lambda": self.lam, "classes": self.classes, "bound": float(self.bound), "bound_exact": str(self.bound),
            "raw": self.raw, "arg_alpha": None if self.arg_alpha is None else str(self.arg_alpha),
            "alphas_solved": self.alphas_solved, "lps_solved": self.lps_solved, "seconds": self.seconds,
        }


MC_ROUND_SLACK = 1e-6


def certify_upper_bound(d: int, L: int, mode: str = MAX_CUT, delta="0.0005", eps: float = 1e-5,
                        backend: str = "highs", pruned: bool = True, export_dir=None,
                        system: LabelingClassSystem | None = None) -> BoundResult:
    """Upper bound on the max-cut (or independent-set) fraction over all
    d-regular graphs whose nontrivial eigenvalues are at most 2sqrt(d-1)+eps.

    The alpha grid {0, delta, 2delta, ...} on [0, 1/2] is searched by interval
    bisection: the LP for an alpha interval relaxes the LPs of every grid point
    inside it, so an infeasible interval (or, for max cut, one whose value does
    not beat the best point so far) is discarded whole.
    """
    if d <= 2:
        raise ValueError("d = 2 is degenerate for this bound")
    start = time.monotonic()
    delta = Fraction(str(delta)) if not isinstance(delta, Fraction) else delta
    if delta <= 0:
        raise ValueError("delta must be positive")
    lam = 2.0 * math.sqrt(d - 1) + eps
    system = system or enumerate_classes(d, L, mode, pruned)
    coeffs = _Coefficients(system)
    top = int(Fraction(1, 2) / delta)
    grid = lambda i: i * delta
    stats = {"lps": 0, "points": set()}

    def run(i: int, j: int) -> lp_solvers.LPResult:
        lp = assemble_lp(system, grid(i), delta, lam, coeffs, alpha_hi=grid(j))
        stats["lps"] += 1
        if i == j:
            stats["points"].add(i)
            if export_dir is not None:
                os.makedirs(export_dir, exist_ok=True)
                export_lp(lp, os.path.join(export_dir, f"{mode}_d{d}_L{L}_a{i}.lp"))
        res = solve_lp(lp, backend)
        if res.status not in (lp_solvers.OPTIMAL, lp_solvers.INFEASIBLE):
            raise lp_solvers.LPError(f"LP at alpha index {i}..{j} returned {res.status}")
        return res

    if mode == MAX_CUT:
        best, arg = -math.inf, None
        first = run(0, top)
        stack = [(first.objective if first.status == lp_solvers.OPTIMAL else -math.inf, 0, top)]
        while stack:
            stack.sort()
            ub, i, j = stack.pop()
            if ub <= best + 1e-12:
                break
            if i == j:
                if ub > best:
                    best, arg = ub, grid(i)
                continue
            mid = (i + j) // 2
            for a, b in ((i, mid), (mid + 1, j)):
                r = run(a, b)
                if r.status == lp_solvers.OPTIMAL and r.objective > best + 1e-12:
                    stack.append((r.objective, a, b))
        if best == -math.inf:
            raise lp_solvers.LPError("every alpha is infeasible")
        bound = round_up(Fraction(best) + Fraction(MC_ROUND_SLACK))
        raw = best
    else:
        def highest(i: int, j: int):
            r = run(i, j)
            if r.status == lp_solvers.INFEASIBLE:
                return None
            if i == j:
                return i
            mid = (i + j) // 2
            got = highest(mid + 1, j)
            return got if got is not None else highest(i, mid)

        idx = highest(0, top)
        if idx is None:
            raise lp_solvers.LPError("every alpha is infeasible")
        arg = grid(idx)
        raw = float(arg + delta)
        bound = round_up(arg + delta)
    return BoundResult(d, L, mode, delta, eps, lam, len(system), bound, raw, arg, len(stats["points"]),
                       stats["lps"], time.monotonic() - start)


def hoffman_bound(d: int, mode: str, lam: float | None = None) -> float:
    lam = 2.0 * math.sqrt(d - 1) if lam is None else lam
    if mode == MAX_CUT:
        return 0.5 + lam / (2.0 * d)
    return lam / (d + lam)


# ---------------------------------------------------------------- lifted distributions

def _half_edges(g) -> list[list[tuple[int, int]]]:
    """Per vertex, (edge id, other endpoint) pairs; loops are not supported."""
    if g.num_loops:
        raise ValueError("lifting is defined here for loopless graphs only")
    out: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e, (u, v) in enumerate(g.edge_pairs()):
        out[u].append((e, v))
        out[v].append((e, u))
    return out


def lift_labeling(g, labels, start: int, L: int, orders=None) -> dict[tuple[int, ...], int]:
    """Labels of the depth-L universal-cover ball at ``start``, as tree addresses.

    ``orders`` maps a tree address to the order in which that vertex's
    outgoing edges are assigned to child slots; the default is edge order.
    """
    half = _half_edges(g)

    def fill(addr, v, via, out):
        out[addr] = labels[v]
        if len(addr) == L:
            return
        nxt = [(e, w) for e, w in half[v] if e != via]
        if orders is not None:
            nxt = [nxt[q] for q in orders[addr]]
        for q, (e, w) in enumerate(nxt):
            fill(addr + (q,), w, e, out)

    out: dict[tuple[int, ...], int] = {}
    fill((), start, None, out)
    return out


def _all_orders(d: int, L: int):
    """Every assignment of child-slot permutations to the internal tree vertices."""
    tree = build_tree(d, L)
    internal = [a for a in tree.vertices if len(a) < L]
    perms = [list(itertools.permutations(range(d if not a else d - 1))) for a in internal]
    for choice in itertools.product(*perms):
        yield dict(zip(internal, choice))


def lift_distribution(g, labels, system: LabelingClassSystem, exhaustive: bool = False,
                      guard: int = 200_000) -> tuple[dict[int, Fraction], Fraction]:
    """Class probabilities of the lifted distribution of (g, labels).

    The start vertex is uniform and every vertex orders its edges uniformly at
    random. Class membership does not depend on the ordering, but with
    ``exhaustive`` every ordering is enumerated anyway. Returns the
    distribution and the mass that fell on pruned labelings.
    """
    d = system.d
    if any(len(h) != d for h in _half_edges(g)):
        raise ValueError(f"graph is not {d}-regular")
    orders = [None]
    if exhaustive and system.L >= 1:
        tree = build_tree(d, system.L)
        count = 1
        for a in tree.vertices:
            if len(a) < system.L:
                count *= factorial(d if not a else d - 1)
        if count * g.n > guard:
            raise EnumerationGuard(f"{count} orderings per vertex exceeds the guard")
        orders = list(_all_orders(d, system.L))
    dist: Counter = Counter()
    lost = Fraction(0)
    unit = Fraction(1, g.n * len(orders))
    for v in range(g.n):
        for ordr in orders:
            cid = system.classify(lift_labeling(g, labels, v, system.L, ordr))
            if cid is None:
                lost += unit
            else:
                dist[cid] += unit
    return dict(dist), lost


def greedy_flips(g, labels) -> list[int]:
    """Flip single vertices (lowest index first) while that enlarges the cut."""
    lab = list(labels)
    nb = g.neighbors()
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            same = sum(1 for w in nb[v] if lab[w] == lab[v])
            if 2 * same > len(nb[v]):
                lab[v] = -lab[v]
                changed = True
    return lab


def nontrivial_lambda(g) -> float:
    """Largest |eigenvalue| of the adjacency matrix after dropping the top one."""
    ev = np.linalg.eigvalsh(g.adjacency().astype(float))
    return float(max(abs(ev[0]), abs(ev[-2]))) if len(ev) > 1 else 0.0


@dataclass
class LiftCheck:
    feasible: bool
    max_violation: float
    objective: Fraction
    true_value: Fraction
    lost_mass: Fraction
    lam: float


def check_lift(g, labels, system: LabelingClassSystem, exhaustive: bool = False,
               slack: float = 1e-9, tol: float = 1e-12) -> LiftCheck:
    """Feed the lifted distribution of (g, labels) into the assembled LP.

    alpha is the exact +1 fraction with delta = 0, and lambda is the graph's
    own nontrivial spectral radius plus ``slack``.
    """
    dist, lost = lift_distribution(g, labels, system, exhaustive)
    n = len(system)
    p = [dist.get(j, Fraction(0)) for j in range(n)]
    plus = sum(1 for x in labels if x == 1)
    alpha = Fraction(plus, g.n)
    lam = nontrivial_lambda(g) + slack
    lp = assemble_lp(system, alpha, 0, lam)
    pf = np.array([float(x) for x in p])
    viol = 0.0
    if lp.A_ub.shape[0]:
        viol = max(viol, float(np.max(lp.A_ub @ pf - lp.b_ub)))
    # equalities checked exactly
    if sum(p) != 1:
        viol = max(viol, float(abs(1 - sum(p))))
    if system.L >= 1:
        for row in system.exact_consistency_rows():
            viol = max(viol, float(abs(sum(v * p[j] for j, v in row.items()))))
    if system.mode == MAX_CUT:
        coef = system.objective_coefficients()
        obj = sum((coef[j] * p[j] for j in range(n)), Fraction(0))
        nb = g.neighbors()
        cut = sum(1 for u in range(g.n) for w in nb[u] if labels[u] != labels[w])
        true = Fraction(cut, 2 * g.num_edges)
    else:
        obj = true = alpha
    return LiftCheck(lost == 0 and viol <= tol, viol, obj, true, lost, lam)
