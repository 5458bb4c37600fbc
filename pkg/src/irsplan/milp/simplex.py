"""Dense bounded-variable primal simplex for small planning models.

Solves  minimize c.x  subject to  A x (<=, >=, =) b  and  lo <= x <= up
with a classic two-phase start.  Sized for models with tens of rows and
a few hundred columns: every iteration refactorizes the basis with a
dense solve, trading raw speed for numerical transparency.  All tie
breaks are by lowest column index, so runs are bit-reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

_FEAS_TOL = 1e-9
_COST_TOL = 1e-9
_PIVOT_TOL = 1e-10
# consecutive degenerate steps tolerated before switching to Bland pricing
_BLAND_AFTER = 300


@dataclass
class LpResult:
    status: str            # "optimal" | "infeasible" | "unbounded" | "stalled"
    x: np.ndarray | None   # structural variable values (None unless optimal)
    objective: float | None
    iterations: int
    # optimal basis over structural+slack columns, for reoptimization
    # after bound changes; None when an artificial stayed basic
    basis: np.ndarray | None = None
    at_upper: np.ndarray | None = None


def _resting_values(lo: np.ndarray, up: np.ndarray,
                    at_upper: np.ndarray) -> np.ndarray:
    return np.where(at_upper, up, lo)


def _run(A, b, c, lo, up, basis, at_upper, max_iter):
    """Primal iterations from a feasible basis.  Returns (status, basis,
    at_upper, x, iterations)."""
    m, n_total = A.shape
    degenerate_streak = 0
    use_bland = False

    for iteration in range(max_iter):
        is_basic = np.zeros(n_total, dtype=bool)
        is_basic[basis] = True
        x = _resting_values(lo, up, at_upper)
        x[basis] = 0.0
        B = A[:, basis]
        try:
            x_b = np.linalg.solve(B, b - A @ x)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            raise RuntimeError("simplex basis became singular") from None
        x[basis] = x_b
        reduced = c - A.T @ y

        # pricing: candidates that improve a minimization step
        lower_cand = ~is_basic & ~at_upper & (reduced < -_COST_TOL)
        upper_cand = ~is_basic & at_upper & (reduced > _COST_TOL)
        candidates = np.flatnonzero(lower_cand | upper_cand)
        if candidates.size == 0:
            return "optimal", basis, at_upper, x, iteration
        if use_bland:
            enter = int(candidates[0])
        else:
            scores = np.abs(reduced[candidates])
            enter = int(candidates[int(np.argmax(scores))])
        sign = -1.0 if at_upper[enter] else 1.0

        w = np.linalg.solve(B, A[:, enter])
        span = up[enter] - lo[enter]
        t_row = np.inf
        leave_pos = -1
        leave_var = -1
        leave_to_upper = False
        for r in range(m):
            delta = -sign * w[r]
            q = basis[r]
            if delta > _PIVOT_TOL:
                if np.isinf(up[q]):
                    continue
                limit = (up[q] - x_b[r]) / delta
                hits_upper = True
            elif delta < -_PIVOT_TOL:
                if np.isinf(lo[q]):
                    continue
                limit = (lo[q] - x_b[r]) / delta
                hits_upper = False
            else:
                continue
            limit = max(limit, 0.0)
            if limit < t_row - _FEAS_TOL or \
                    (limit < t_row + _FEAS_TOL and (leave_var < 0 or q < leave_var)):
                t_row = limit
                leave_pos = r
                leave_var = q
                leave_to_upper = hits_upper

        if span <= t_row + _FEAS_TOL and np.isfinite(span):
            # the entering variable runs to its other bound: no basis change
            step = span
            at_upper[enter] = not at_upper[enter]
        elif leave_pos >= 0:
            step = t_row
            basis[leave_pos] = enter
            at_upper[leave_var] = leave_to_upper
            at_upper[enter] = False
        else:
            return "unbounded", basis, at_upper, x, iteration

        if step <= _FEAS_TOL:
            degenerate_streak += 1
            if degenerate_streak > _BLAND_AFTER and not use_bland:
                use_bland = True
                logger.debug("simplex: switching to Bland pricing after "
                             "%d degenerate steps", degenerate_streak)
        else:
            degenerate_streak = 0

    return "stalled", basis, at_upper, None, max_iter


def _run_dual(A, b, c, lo, up, basis, at_upper, max_iter):
    """Dual iterations from a dual-feasible basis.  Drives out primal
    bound violations while reduced costs keep their signs; ends optimal
    once primal feasible.  Returns (status, basis, at_upper, iterations)."""
    m, _ = A.shape
    degenerate_streak = 0
    use_bland = False

    for iteration in range(max_iter):
        is_basic = np.zeros(A.shape[1], dtype=bool)
        is_basic[basis] = True
        x = _resting_values(lo, up, at_upper)
        x[basis] = 0.0
        B = A[:, basis]
        try:
            x_b = np.linalg.solve(B, b - A @ x)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            return "stalled", basis, at_upper, iteration
        reduced = c - A.T @ y

        below = lo[basis] - x_b
        above = x_b - up[basis]
        violation = np.maximum(below, above)
        worst = float(np.max(violation)) if m else -np.inf
        if worst <= _FEAS_TOL:
            return "optimal", basis, at_upper, iteration
        if use_bland:
            vio_rows = np.flatnonzero(violation > _FEAS_TOL)
            leave_pos = int(vio_rows[int(np.argmin(basis[vio_rows]))])
        else:
            leave_pos = int(np.argmax(violation))
        leave_var = int(basis[leave_pos])
        to_lower = below[leave_pos] > above[leave_pos]

        e = np.zeros(m)
        e[leave_pos] = 1.0
        alpha = A.T @ np.linalg.solve(B.T, e)

        # entering candidates must move the leaving variable back toward
        # its violated bound without breaking dual feasibility
        at_lo = ~is_basic & ~at_upper
        at_up = ~is_basic & at_upper
        if to_lower:
            eligible = (at_lo & (alpha < -_PIVOT_TOL)) | (at_up & (alpha > _PIVOT_TOL))
        else:
            eligible = (at_lo & (alpha > _PIVOT_TOL)) | (at_up & (alpha < -_PIVOT_TOL))
        candidates = np.flatnonzero(eligible)
        if candidates.size == 0:
            return "infeasible", basis, at_upper, iteration
        ratios = np.abs(reduced[candidates]) / np.abs(alpha[candidates])
        best = float(np.min(ratios))
        ties = candidates[ratios <= best + _COST_TOL]
        enter = int(ties[0])

        basis[leave_pos] = enter
        at_upper[leave_var] = not to_lower
        at_upper[enter] = False

        if best <= _COST_TOL:
            degenerate_streak += 1
            if degenerate_streak > _BLAND_AFTER and not use_bland:
                use_bland = True
                logger.debug("dual simplex: Bland row choice after %d "
                             "degenerate steps", degenerate_streak)
        else:
            degenerate_streak = 0

    return "stalled", basis, at_upper, max_iter


def _warm_start(A, b, c_struct, n, lo_all, up_all, start_basis,
                start_at_upper, max_iter) -> LpResult | None:
    """Reoptimize from a previous optimal basis after bound changes.

    Bound edits keep the old basis dual feasible, so a short dual phase
    repairs primal feasibility far cheaper than a two-phase restart.
    Returns None when the start basis is unusable (caller solves cold);
    an "infeasible" result is definitive.
    """
    m, n_cols = A.shape
    basis = np.array(start_basis, dtype=int)
    at_upper = np.array(start_at_upper, dtype=bool)
    if basis.shape != (m,) or at_upper.shape != (n_cols,):
        return None
    if np.any(basis < 0) or np.any(basis >= n_cols) or np.unique(basis).size != m:
        return None
    # nonbasic columns must rest on a finite bound
    at_upper = np.where(np.isinf(up_all), False, at_upper)
    at_upper = np.where(np.isinf(lo_all), True, at_upper)

    c = np.zeros(n_cols)
    c[:n] = c_struct
    B = A[:, basis]
    try:
        y = np.linalg.solve(B.T, c[basis])
    except np.linalg.LinAlgError:
        return None
    reduced = c - A.T @ y
    is_basic = np.zeros(n_cols, dtype=bool)
    is_basic[basis] = True
    broken = ~is_basic & np.where(at_upper, reduced > 1e-7, reduced < -1e-7)
    if np.any(broken):
        return None

    cap = max_iter if max_iter is not None else 500 + 50 * m
    status, basis, at_upper, it_dual = _run_dual(A, b, c, lo_all, up_all,
                                                 basis, at_upper, cap)
    if status == "infeasible":
        return LpResult("infeasible", None, None, it_dual)
    if status != "optimal":
        return None
    cap = max_iter if max_iter is not None else 2000 + 200 * n_cols
    status, basis, at_upper, x, it_clean = _run(A, b, c, lo_all, up_all,
                                                basis, at_upper, cap)
    if status != "optimal":
        return None
    x_struct = x[:n].copy()
    return LpResult("optimal", x_struct, float(c_struct @ x_struct),
                    it_dual + it_clean, basis.copy(), at_upper.copy())


def solve_bounded_lp(objective, rows, senses, rhs, lower, upper,
                     max_iter: int | None = None,
                     start_basis: np.ndarray | None = None,
                     start_at_upper: np.ndarray | None = None) -> LpResult:
    """Two-phase bounded simplex.

    Parameters
    ----------
    objective : (n,) costs to minimize over the structural variables.
    rows : (m, n) dense constraint matrix.
    senses : length-m sequence of "<=", ">=" or "=".
    rhs : (m,) right-hand sides.
    lower, upper : (n,) variable bounds; +-inf allowed but each variable
        needs at least one finite bound.
    start_basis, start_at_upper : optional basis over structural+slack
        columns from an earlier solve of the same rows; reoptimized with
        a dual phase, falling back to the cold start when unusable.
    """
    c_struct = np.asarray(objective, dtype=float)
    A_struct = np.asarray(rows, dtype=float)
    b = np.asarray(rhs, dtype=float).copy()
    lo = np.asarray(lower, dtype=float).copy()
    up = np.asarray(upper, dtype=float).copy()
    m, n = A_struct.shape
    if len(senses) != m or b.shape != (m,) or lo.shape != (n,) or up.shape != (n,):
        raise ValueError("inconsistent model dimensions")
    if np.any(lo > up + _FEAS_TOL):
        return LpResult("infeasible", None, None, 0)
    for j in range(n):
        if np.isinf(lo[j]) and np.isinf(up[j]):
            raise ValueError("variable %d needs at least one finite bound" % j)

    # slacks: Ax + s = b with s >= 0 for "<=" and s <= 0 for ">="
    slack_cols = []
    slack_lo, slack_up = [], []
    slack_of_row = [-1] * m
    for i, sense in enumerate(senses):
        if sense == "<=":
            slack_of_row[i] = n + len(slack_cols)
            col = np.zeros(m)
            col[i] = 1.0
            slack_cols.append(col)
            slack_lo.append(0.0)
            slack_up.append(np.inf)
        elif sense == ">=":
            slack_of_row[i] = n + len(slack_cols)
            col = np.zeros(m)
            col[i] = 1.0
            slack_cols.append(col)
            slack_lo.append(-np.inf)
            slack_up.append(0.0)
        elif sense != "=":
            raise ValueError("unknown row sense %r" % sense)

    parts = [A_struct]
    if slack_cols:
        parts.append(np.column_stack(slack_cols))
    A = np.hstack(parts)
    lo_all = np.concatenate([lo, np.array(slack_lo)])
    up_all = np.concatenate([up, np.array(slack_up)])

    if start_basis is not None and start_at_upper is not None:
        warmed = _warm_start(A, b, c_struct, n, lo_all, up_all,
                             start_basis, start_at_upper, max_iter)
        if warmed is not None:
            return warmed

    # resting point: every column sits at a finite bound (prefer lower)
    n_cols = A.shape[1]
    at_upper = np.zeros(n_cols, dtype=bool)
    for j in range(n_cols):
        if np.isinf(lo_all[j]):
            at_upper[j] = True

    resting = _resting_values(lo_all, up_all, at_upper)
    residual = b - A @ resting

    basis = np.empty(m, dtype=int)
    art_cols, art_rows = [], []
    for i in range(m):
        s = slack_of_row[i]
        r_i = residual[i]
        ok_as_slack = False
        if s >= 0:
            if senses[i] == "<=" and r_i >= -_FEAS_TOL:
                ok_as_slack = True
            if senses[i] == ">=" and r_i <= _FEAS_TOL:
                ok_as_slack = True
        if ok_as_slack:
            basis[i] = s
        else:
            art_rows.append(i)
            col = np.zeros(m)
            col[i] = 1.0 if r_i >= 0.0 else -1.0
            art_cols.append(col)
            basis[i] = n_cols + len(art_cols) - 1

    iterations = 0
    if art_cols:
        A1 = np.hstack([A, np.column_stack(art_cols)])
        n_art = len(art_cols)
        lo1 = np.concatenate([lo_all, np.zeros(n_art)])
        up1 = np.concatenate([up_all, np.full(n_art, np.inf)])
        at_upper1 = np.concatenate([at_upper, np.zeros(n_art, dtype=bool)])
        c1 = np.zeros(A1.shape[1])
        c1[n_cols:] = 1.0
        cap = max_iter if max_iter is not None else 2000 + 200 * A1.shape[1]
        status, basis, at_upper1, x, it1 = _run(A1, b, c1, lo1, up1,
                                                basis, at_upper1, cap)
        iterations += it1
        if status == "stalled":
            return LpResult("stalled", None, None, iterations)
        if status != "optimal" or float(c1 @ x) > 1e-7:
            return LpResult("infeasible", None, None, iterations)
        # artificials are pinned to zero for phase 2
        lo1[n_cols:] = 0.0
        up1[n_cols:] = 0.0
        A2, lo2, up2, at_upper2 = A1, lo1, up1, at_upper1
        c2 = np.zeros(A1.shape[1])
        c2[:n] = c_struct
    else:
        A2, lo2, up2, at_upper2 = A, lo_all, up_all, at_upper
        c2 = np.zeros(n_cols)
        c2[:n] = c_struct

    cap = max_iter if max_iter is not None else 2000 + 200 * A2.shape[1]
    status, basis, at_upper2, x, it2 = _run(A2, b, c2, lo2, up2,
                                            basis, at_upper2, cap)
    iterations += it2
    if status != "optimal":
        return LpResult(status, None, None, iterations)
    x_struct = x[:n].copy()
    n_real = A.shape[1]
    if np.all(basis < n_real):
        # artificials all nonbasic: the basis can seed a warm restart
        basis_out = basis.copy()
        flags_out = at_upper2[:n_real].copy()
    else:
        basis_out = None
        flags_out = None
    return LpResult("optimal", x_struct, float(c_struct @ x_struct),
                    iterations, basis_out, flags_out)
