"""Best-first branch and bound over the deployment model.

Nodes are LP relaxations with tightened variable bounds.  The node with
the smallest bound is expanded next; branching picks the integer
variable closest to one half (lowest index on ties).  An incumbent can
be injected to warm-start pruning; with identical models the warmed
search never solves more LPs than a cold one, because its pruning set
only grows.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .model import IlpModel, lp_relaxation

logger = logging.getLogger(__name__)

_INT_TOL = 1e-6
_PRUNE_TOL = 1e-9


@dataclass
class BranchAndBoundResult:
    status: str                 # "optimal" | "infeasible" | "timeout" | "stalled"
    x: np.ndarray | None
    objective: float | None
    node_count: int             # LP relaxations solved
    proven: bool                # True when the tree was exhausted


def _fractional_branch_var(mask: np.ndarray, x: np.ndarray) -> int | None:
    best = None
    best_dist = None
    for j in np.flatnonzero(mask):
        value = float(x[j])
        frac = value - math.floor(value)
        if min(frac, 1.0 - frac) <= _INT_TOL:
            continue
        dist = abs(frac - 0.5)
        if best is None or dist < best_dist - 1e-15:
            best = int(j)
            best_dist = dist
    return best


def _group_dichotomy(groups, x: np.ndarray, upper: np.ndarray):
    """Split the first at-most-one group carrying fractional mass on two
    or more members into complementary blocks to forbid in either child.

    The whole open slice of the group is split, not just its support:
    leaving non-support members open lets the relaxation shuffle mass to
    a sibling state each level and the search never converges.  The cut
    sits at the middle support member, so both children forbid part of
    the current mass and must move their bound.
    """
    for group in groups:
        open_vars = [int(v) for v in group if upper[v] > 0.5]
        support_pos = [pos for pos, v in enumerate(open_vars)
                       if float(x[v]) > _INT_TOL]
        if len(support_pos) >= 2:
            cut = support_pos[len(support_pos) // 2]
            return open_vars[:cut], open_vars[cut:]
    return None


def branch_and_bound(model: IlpModel, *, incumbent_x: np.ndarray | None = None,
                     incumbent_objective: float | None = None,
                     time_limit: float | None = None,
                     completer=None,
                     branch_mask: np.ndarray | None = None,
                     sos_groups=None,
                     rounder=None,
                     priority_mask: np.ndarray | None = None,
                     leaf_solver=None) -> BranchAndBoundResult:
    """Exact minimization of an integer model.

    ``incumbent_x``/``incumbent_objective`` seed the best-known solution
    for pruning.  ``time_limit`` (seconds) turns an exhaustive run into
    a best-effort one: the incumbent is returned unproven.

    ``branch_mask`` restricts branching to a subset of the integer
    variables whose fixing decides the rest; ``completer`` then maps a
    node solution that is integral on that subset to a fully integral
    one of equal objective, or returns None when the node's remaining
    relaxation cannot be completed (the search then falls back to
    branching one of the other integer variables).  ``sos_groups`` lists
    index blocks under at-most-one rows, branched by dichotomy before
    any single variable.  ``rounder`` maps a node solution to a feasible
    integral vector (or None); it runs on every expanded node, and only
    depends on node content so warm-started pruning stays monotone.
    ``priority_mask`` names aggregate variables branched before anything
    else; fixing one reshapes whole blocks of the relaxation.
    ``leaf_solver`` maps node bounds to an exact answer for small
    subproblems: None when not applicable, ``(None,)`` for a provably
    infeasible node, ``(x,)`` for the node's best integral vector.  A
    solved node is closed without branching.
    """
    started = time.monotonic()
    if branch_mask is None:
        branch_mask = model.integer
    best_x = None if incumbent_x is None else np.asarray(incumbent_x, dtype=float).copy()
    best_obj = math.inf if incumbent_objective is None else float(incumbent_objective)

    # integral costs on integer-only variables make every attainable
    # objective an integer, so node bounds round up to their ceiling
    costs_integral = bool(
        np.all(model.integer | (model.objective == 0.0))
        and np.all(np.floor(model.objective) == model.objective))

    def lift(bound: float) -> float:
        if costs_integral and math.isfinite(bound):
            return math.ceil(bound - 1e-6)
        return bound

    node_count = 0
    seq = 0
    heap: list[tuple] = []

    root = lp_relaxation(model, model.lower, model.upper)
    node_count += 1
    if root.status == "stalled":
        return BranchAndBoundResult("stalled", best_x,
                                    None if best_x is None else best_obj,
                                    node_count, False)
    if root.status != "optimal":
        return BranchAndBoundResult("infeasible", None, None, node_count, True)

    # newer nodes win bound ties so the search plunges toward leaves
    # instead of sweeping an equal-bound plateau breadth-first
    heapq.heappush(heap, (root.objective, -seq, model.lower.copy(),
                          model.upper.copy(), root.x,
                          root.basis, root.at_upper))
    seq += 1

    timed_out = False
    while heap:
        if time_limit is not None and time.monotonic() - started > time_limit:
            timed_out = True
            break
        bound, _, lower, upper, x, basis, flags = heapq.heappop(heap)
        if lift(bound) >= best_obj - _PRUNE_TOL:
            # best-first order: every remaining node is at least this bad
            break

        if leaf_solver is not None:
            solved = leaf_solver(lower, upper)
            if solved is not None:
                (leaf_x,) = solved
                if leaf_x is not None:
                    objective = float(model.objective @ leaf_x)
                    if objective < best_obj - _PRUNE_TOL:
                        best_obj = objective
                        best_x = np.where(model.integer, np.round(leaf_x),
                                          leaf_x)
                        logger.debug("leaf enumeration incumbent %.6g at "
                                     "node %d", best_obj, node_count)
                continue

        if rounder is not None:
            rounded = rounder(x, lower, upper)
            if rounded is not None:
                objective = float(model.objective @ rounded)
                if objective < best_obj - _PRUNE_TOL:
                    best_obj = objective
                    best_x = np.where(model.integer, np.round(rounded), rounded)
                    logger.debug("rounding incumbent %.6g at node %d",
                                 best_obj, node_count)
                    if lift(bound) >= best_obj - _PRUNE_TOL:
                        break

        children = None
        branch_var = None
        if priority_mask is not None:
            branch_var = _fractional_branch_var(priority_mask, x)
        if branch_var is None:
            split = _group_dichotomy(sos_groups, x, upper) if sos_groups else None
            if split is not None:
                forbid_a, forbid_b = split
                child_a = (lower.copy(), upper.copy())
                child_a[1][forbid_a] = 0.0
                child_b = (lower.copy(), upper.copy())
                child_b[1][forbid_b] = 0.0
                children = [child_a, child_b]
        if children is None and branch_var is None:
            branch_var = _fractional_branch_var(branch_mask, x)
            if branch_var is None:
                if completer is not None:
                    completed = completer(x, lower, upper)
                    if completed is not None:
                        objective = float(model.objective @ completed)
                        if objective < best_obj - _PRUNE_TOL:
                            best_obj = objective
                            best_x = np.where(model.integer,
                                              np.round(completed), completed)
                        continue
                    # completion is impossible only while some remaining
                    # integer variable is fractional; split on it
                    rest = model.integer & ~branch_mask
                    if priority_mask is not None:
                        rest = rest & ~priority_mask
                    branch_var = _fractional_branch_var(rest, x)
                    if branch_var is None:
                        continue
                else:
                    branch_var = _fractional_branch_var(model.integer, x)
                    if branch_var is None:
                        if bound < best_obj - _PRUNE_TOL:
                            best_obj = bound
                            best_x = np.where(model.integer, np.round(x), x)
                        continue
        if children is None:
            value = float(x[branch_var])
            child_down = (lower.copy(), upper.copy())
            child_down[1][branch_var] = math.floor(value)
            child_up = (lower.copy(), upper.copy())
            child_up[0][branch_var] = math.ceil(value)
            children = [child_down, child_up]

        for child_lower, child_upper in children:
            result = lp_relaxation(model, child_lower, child_upper,
                                   start_basis=basis, start_at_upper=flags)
            node_count += 1
            if result.status == "stalled":
                return BranchAndBoundResult("stalled", best_x,
                                            None if best_x is None else best_obj,
                                            node_count, False)
            if result.status != "optimal":
                continue
            if lift(result.objective) >= best_obj - _PRUNE_TOL:
                continue
            heapq.heappush(heap, (result.objective, -seq, child_lower,
                                  child_upper, result.x,
                                  result.basis, result.at_upper))
            seq += 1

    if timed_out:
        return BranchAndBoundResult("timeout", best_x,
                                    None if best_x is None else best_obj,
                                    node_count, False)
    if best_x is None:
        return BranchAndBoundResult("infeasible", None, None, node_count, True)
    return BranchAndBoundResult("optimal", best_x, best_obj, node_count, True)
