"""Exact deployment optimization: model builder, bounded simplex, and
best-first branch and bound."""

from __future__ import annotations

import logging
from dataclasses import replace

from ..metrics import (DeploymentSolution, check_feasibility, evaluate_solution,
                       feasibility_bounds)
from .branch_bound import BranchAndBoundResult, branch_and_bound
from .model import (IlpModel, build_p1, build_p21, decode_solution,
                    encode_placements, enumerate_small_incumbent,
                    lp_relaxation, make_cover_completer,
                    make_leaf_enumerator, make_rounding_heuristic,
                    placement_branch_mask, site_use_mask, write_lp)
from .simplex import LpResult, solve_bounded_lp

logger = logging.getLogger(__name__)

__all__ = [
    "BranchAndBoundResult", "IlpModel", "LpResult", "branch_and_bound",
    "build_p1", "build_p21", "decode_solution", "encode_placements",
    "enumerate_small_incumbent",
    "lp_relaxation", "make_cover_completer", "make_leaf_enumerator",
    "make_rounding_heuristic",
    "placement_branch_mask", "site_use_mask", "solve_bounded_lp",
    "solve_deployment", "write_lp",
]


def solve_deployment(knowledge, scene, cost_params, coverage_params, *,
                     time_limit: float | None = None, restrict_sites=None,
                     fixed_tiles: int | None = None, fixed_state: bool = False,
                     incumbent: dict | None = None,
                     dump_lp=None) -> DeploymentSolution:
    """Provably minimum-cost deployment meeting the coverage target.

    Bypasses the search when nothing needs deploying or when even the
    optimistic coverage bound misses the target.  ``incumbent`` may
    carry a known-feasible deployment to warm-start pruning.
    """
    bounds = feasibility_bounds(knowledge, scene, coverage_params)
    verdict = check_feasibility(coverage_params, bounds, knowledge.n_grids)
    if verdict == "trivial":
        return evaluate_solution({}, knowledge, scene, cost_params,
                                 coverage_params, status="trivial",
                                 proven=True, provenance="exact:trivial")
    if verdict == "infeasible":
        return evaluate_solution({}, knowledge, scene, cost_params,
                                 coverage_params, status="infeasible",
                                 proven=True, provenance="exact:bound")

    model = build_p1(knowledge, scene, cost_params, coverage_params,
                     restrict_sites=restrict_sites, fixed_tiles=fixed_tiles,
                     fixed_state=fixed_state)
    if dump_lp is not None:
        write_lp(model, dump_lp)

    incumbent_x = None
    incumbent_obj = None
    if incumbent:
        incumbent_x = encode_placements(model, incumbent)
        incumbent_obj = float(model.objective @ incumbent_x)
    small = enumerate_small_incumbent(model)
    if small is not None:
        small_obj = float(model.objective @ small)
        if incumbent_obj is None or small_obj < incumbent_obj - 1e-12:
            incumbent_x = small
            incumbent_obj = small_obj

    result = branch_and_bound(model, incumbent_x=incumbent_x,
                              incumbent_objective=incumbent_obj,
                              time_limit=time_limit,
                              completer=make_cover_completer(model),
                              branch_mask=placement_branch_mask(model),
                              sos_groups=model.context["site_groups"],
                              rounder=make_rounding_heuristic(model),
                              priority_mask=site_use_mask(model),
                              leaf_solver=make_leaf_enumerator(model))
    logger.info("exact search: status %s, %d nodes", result.status,
                result.node_count)
    if result.status == "infeasible":
        solution = evaluate_solution(
            {}, knowledge, scene, cost_params, coverage_params,
            status="infeasible", proven=True,
            provenance="exact:bb;nodes=%d" % result.node_count)
    elif result.x is None:
        solution = evaluate_solution(
            {}, knowledge, scene, cost_params, coverage_params,
            status="timeout", proven=False,
            provenance="exact:bb;nodes=%d" % result.node_count)
    else:
        placements = decode_solution(model, result.x)
        # a timeout that still produced an incumbent is a usable plan,
        # just not a proven one
        status = "optimal" if result.status == "optimal" else "feasible"
        solution = evaluate_solution(
            placements, knowledge, scene, cost_params, coverage_params,
            status=status, proven=result.proven,
            provenance="exact:bb;nodes=%d" % result.node_count)
    return replace(solution, node_count=result.node_count)
