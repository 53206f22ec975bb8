"""Linear-program back ends: a dense two-phase simplex, HiGHS, and LP-file export.

Problems are stated as: maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEAS_TOL = 1e-9


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    objective: float | Fraction | None = None
    x: np.ndarray | None = None
    infeasibility: float | Fraction | None = None  # phase-1 optimum when known
    iterations: int = 0


def _dense(a, ncols: int, exact: bool):
    if a is None:
        return np.zeros((0, ncols), dtype=object if exact else float)
    if sparse.issparse(a):
        a = a.toarray()
    a = np.asarray(a)
    if exact:
        return np.array([[Fraction(v) for v in row] for row in a.tolist()], dtype=object).reshape(a.shape)
    return a.astype(float)


def simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, exact: bool = False,
            max_iter: int = 50000, degenerate_switch: int = 50) -> LPResult:
    """Dense tableau two-phase simplex.

    Dantzig's rule is used until ``degenerate_switch`` consecutive pivots fail
    to move the objective, then Bland's rule takes over, which cannot cycle.
    With ``exact=True`` all arithmetic is on Fractions and tolerances are zero.
    """
    conv = (lambda v: Fraction(v)) if exact else float
    c = [conv(v) for v in c]
    n = len(c)
    Aub = _dense(A_ub, n, exact)
    Aeq = _dense(A_eq, n, exact)
    bub = [conv(v) for v in (b_ub if b_ub is not None else [])]
    beq = [conv(v) for v in (b_eq if b_eq is not None else [])]
    tol = 0 if exact else FEAS_TOL
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    m_ub, m_eq = len(bub), len(beq)
    m = m_ub + m_eq
    dtype = object if exact else float

    # columns: original n, slacks m_ub, artificials (added where needed)
    rows = []
    rhs = []
    needs_art = []
    for i in range(m_ub):
        row = list(Aub[i]) + [zero] * m_ub
        row[n + i] = one
        r = bub[i]
        if r < 0:
            row = [-v for v in row]
            r = -r
            needs_art.append(True)
        else:
            needs_art.append(False)
        rows.append(row)
        rhs.append(r)
    for i in range(m_eq):
        row = list(Aeq[i]) + [zero] * m_ub
        r = beq[i]
        if r < 0:
            row = [-v for v in row]
            r = -r
        rows.append(row)
        rhs.append(r)
        needs_art.append(True)
    n_art = sum(needs_art)
    width = n + m_ub + n_art
    T = np.zeros((m + 1, width + 1), dtype=dtype)
    if exact:
        T[:] = zero
    basis = []
    art_cols = []
    a = 0
    for i in range(m):
        T[i, :n + m_ub] = rows[i]
        T[i, -1] = rhs[i]
        if needs_art[i]:
            col = n + m_ub + a
            T[i, col] = one
            basis.append(col)
            art_cols.append(col)
            a += 1
        else:
            basis.append(n + i)
    iters = 0

    def run(obj_row: np.ndarray, allowed: int) -> str:
        """Maximize with reduced costs stored as -obj in the last row."""
        nonlocal iters
        T[-1, :] = zero
        T[-1, :width] = -obj_row
        for i, b in enumerate(basis):
            if T[-1, b] != 0:
                T[-1, :] = T[-1, :] - T[-1, b] * T[i, :]
        stall = 0
        last = T[-1, -1]
        while True:
            if iters >= max_iter:
                raise LPError("simplex iteration limit reached")
            red = T[-1, :allowed]
            if stall >= degenerate_switch:
                cand = [j for j in range(allowed) if red[j] < -tol]
                if not cand:
                    return OPTIMAL
                e = cand[0]
            else:
                e = int(np.argmin(red)) if not exact else min(range(allowed), key=lambda j: red[j])
                if red[e] >= -tol:
                    return OPTIMAL
            col = T[:-1, e]
            best = None
            leave = -1
            for i in range(m):
                if col[i] > tol:
                    ratio = T[i, -1] / col[i]
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            piv = T[leave, e]
            T[leave, :] = T[leave, :] / piv
            for i in range(m + 1):
                if i != leave and T[i, e] != 0:
                    T[i, :] = T[i, :] - T[i, e] * T[leave, :]
            basis[leave] = e
            iters += 1
            cur = T[-1, -1]
            stall = stall + 1 if (cur == last if exact else abs(cur - last) <= tol) else 0
            last = cur

    infeas = zero
    if n_art:
        obj1 = np.zeros(width, dtype=dtype)
        if exact:
            obj1[:] = zero
        for col in art_cols:
            obj1[col] = -one
        run(obj1, width)
        infeas = -T[-1, -1]
        if infeas > tol:
            return LPResult(INFEASIBLE, infeasibility=infeas, iterations=iters)
        # drive artificials out of the basis where possible
        for i, b in enumerate(basis):
            if b >= n + m_ub:
                for j in range(n + m_ub):
                    if (T[i, j] != 0) if exact else abs(T[i, j]) > tol:
                        piv = T[i, j]
                        T[i, :] = T[i, :] / piv
                        for r in range(m + 1):
                            if r != i and T[r, j] != 0:
                                T[r, :] = T[r, :] - T[r, j] * T[i, :]
                        basis[i] = j
                        break
    obj2 = np.zeros(width, dtype=dtype)
    if exact:
        obj2[:] = zero
    obj2[:n] = c
    status = run(obj2, n + m_ub)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=iters)
    x = np.zeros(n, dtype=dtype)
    if exact:
        x[:] = zero
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i, -1]
    objective = sum((c[j] * x[j] for j in range(n)), zero)
    return LPResult(OPTIMAL, objective, x, infeas, iters)


def highs(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LPResult:
    """HiGHS through scipy; infeasibility confirmed by a phase-1 style re-solve."""
    c = np.asarray(c, dtype=float)
    res = linprog(-c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 0:
        return LPResult(OPTIMAL, float(-res.fun), res.x, 0.0, int(res.nit))
    if res.status == 2:
        viol = min_violation(A_ub, b_ub, A_eq, b_eq, len(c))
        if viol > FEAS_TOL:
            return LPResult(INFEASIBLE, infeasibility=viol, iterations=int(res.nit))
        raise LPError(f"HiGHS reported infeasible but minimum violation is {viol:.3g}")
    if res.status == 3:
        return LPResult(UNBOUNDED, iterations=int(res.nit))
    raise LPError(f"HiGHS failed: {res.message}")


def min_violation(A_ub, b_ub, A_eq, b_eq, n: int) -> float:
    """Smallest total constraint violation over x >= 0 (phase-1 optimum)."""
    blocks = []
    rhs_ub = []
    rhs_eq = []
    m_ub = 0 if b_ub is None else len(b_ub)
    m_eq = 0 if b_eq is None else len(b_eq)
    # variables: x (n), u_ub (m_ub), u_eq+ (m_eq), u_eq- (m_eq)
    if m_ub:
        blocks.append(sparse.hstack([sparse.csr_matrix(A_ub), -sparse.identity(m_ub),
                                     sparse.csr_matrix((m_ub, 2 * m_eq))]))
        rhs_ub = list(b_ub)
    cost = np.concatenate([np.zeros(n), np.ones(m_ub + 2 * m_eq)])
    Aeq2 = None
    if m_eq:
        Aeq2 = sparse.hstack([sparse.csr_matrix(A_eq), sparse.csr_matrix((m_eq, m_ub)),
                              sparse.identity(m_eq), -sparse.identity(m_eq)])
        rhs_eq = list(b_eq)
    res = linprog(cost, A_ub=blocks[0] if blocks else None, b_ub=rhs_ub or None,
                  A_eq=Aeq2, b_eq=rhs_eq or None, bounds=(0, None), method="highs")
    if res.status != 0:
        raise LPError(f"phase-1 solve failed: {res.message}")
    return float(res.fun)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_lp_file(path, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, names=None, sense: str = "max") -> None:
    """Write the problem in the CPLEX LP text format."""
    n = len(c)
    names = names or [f"x{j}" for j in range(n)]

    def expr(row) -> str:
        row = sparse.csr_matrix(row)
        terms = []
        for j, v in zip(row.indices, row.data):
            if v != 0:
                terms.append(f"{'+' if v >= 0 else '-'} {_fmt(abs(v))} {names[j]}")
        return " ".join(terms) if terms else f"0 {names[0]}"

    lines = ["\\ certification LP", "Maximize" if sense == "max" else "Minimize"]
    lines.append(" obj: " + expr(np.asarray(c, dtype=float).reshape(1, -1)))
    lines.append("Subject To")
    if b_ub is not None and len(b_ub):
        A = sparse.csr_matrix(A_ub)
        for i in range(A.shape[0]):
            lines.append(f" u{i}: {expr(A.getrow(i))} <= {_fmt(b_ub[i])}")
    if b_eq is not None and len(b_eq):
        A = sparse.csr_matrix(A_eq)
        for i in range(A.shape[0]):
            lines.append(f" e{i}: {expr(A.getrow(i))} = {_fmt(b_eq[i])}")
    lines.append("Bounds")
    lines += [f" {nm} >= 0" for nm in names]
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
