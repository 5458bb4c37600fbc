"""Successive-refinement planner and reference baselines.

The pipeline stages: a fractional screening LP shrinks the candidate
pool to its support, a greedy insertion loop places one surface at a
time (each with its cheapest sufficient tile count and the
coverage-maximizing height/orientation), then a swap pass, a local
trim descent, and an exhaustive sweep over all deployments of at most
two sites polish the result.  All loops iterate in ascending site-id
order and recompute powers in the same canonical order as the metrics
module, so repeated runs are bit-identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import milp
from .channel import cascaded_gain
from .knowledge import ChannelKnowledge
from .metrics import (CostParams, CoverageParams, DeploymentSolution,
                      Placement, beta_vector, check_feasibility,
                      coupling_vector, deployment_cost, evaluate_solution,
                      feasibility_bounds, required_covered)
from .milp.model import build_p21, lp_relaxation

logger = logging.getLogger(__name__)

_SUPPORT_TOL = 1e-6
_COST_TOL = 1e-12


@dataclass(frozen=True)
class DeployContext:
    """Vectorized lookups shared by all heuristic passes."""

    scene: object
    knowledge: ChannelKnowledge
    cost_params: CostParams
    coverage_params: CoverageParams
    beta: np.ndarray
    need: int
    m_sq: int
    p_min: float
    states: dict[int, tuple[tuple[int, int], ...]]
    coupling: dict[tuple[int, int, int], np.ndarray]


def build_context(knowledge: ChannelKnowledge, scene, cost_params: CostParams,
                  coverage_params: CoverageParams) -> DeployContext:
    states: dict[int, tuple[tuple[int, int], ...]] = {}
    coupling: dict[tuple[int, int, int], np.ndarray] = {}
    for site in scene.candidate_sites:
        usable = []
        for j in range(1, len(site.heights) + 1):
            for k in range(1, len(site.orientations) + 1):
                vec = coupling_vector(knowledge, site.id, j, k)
                if vec is not None:
                    coupling[(site.id, j, k)] = vec
                    usable.append((j, k))
        states[site.id] = tuple(usable)
    return DeployContext(
        scene=scene, knowledge=knowledge, cost_params=cost_params,
        coverage_params=coverage_params, beta=beta_vector(knowledge),
        need=required_covered(coverage_params.target_rate, knowledge.n_grids),
        m_sq=scene.elements_per_tile_side ** 2,
        p_min=coverage_params.p_min_mw, states=states, coupling=coupling)


def power_vector(ctx: DeployContext, placements: dict[int, Placement]) -> np.ndarray:
    """Per-grid effective power, summed in ascending site-id order (the
    same order the scalar metrics use, so floats match bit for bit)."""
    power = ctx.beta.copy()
    for i in sorted(placements):
        p = placements[i]
        vec = ctx.coupling.get((i, p.height_index, p.orient_index))
        if vec is not None:
            power = power + cascaded_gain(p.tiles, ctx.m_sq, 1.0) * vec
    return power


def covered(ctx: DeployContext, power: np.ndarray) -> int:
    return int(np.count_nonzero(power >= ctx.p_min))


def optimal_state(ctx: DeployContext, site_id: int, tiles: int,
                  base_power: np.ndarray):
    """Coverage-maximizing (height, orientation) for a fixed tile count.

    Returns (height_index, orient_index, covered_count, power_vector) or
    None when the site has no usable state.  Ties prefer the larger
    total added gain, then the lexicographically smallest state.
    """
    gain = cascaded_gain(tiles, ctx.m_sq, 1.0)
    best = None
    best_sum = 0.0
    for (j, k) in ctx.states.get(site_id, ()):
        vec = ctx.coupling[(site_id, j, k)]
        power = base_power + gain * vec
        count = covered(ctx, power)
        vec_sum = float(vec.sum())
        if best is None or count > best[2] or \
                (count == best[2] and vec_sum > best_sum):
            best = (j, k, count, power)
            best_sum = vec_sum
    return best


def optimal_tiles(ctx: DeployContext, site_id: int, base_power: np.ndarray,
                  linear_scan: bool = False):
    """Cheapest sufficient tile count at one site.

    If some tile count lets the site reach the global coverage target,
    the smallest such count is returned; otherwise the smallest count
    attaining the site's best achievable coverage.  Coverage is
    monotone in the tile count, so a bisection over counts suffices;
    ``linear_scan`` forces the O(max_tiles) scan used for cross-checks.
    Returns (tiles, optimal_state result) or None.
    """
    top = optimal_state(ctx, site_id, ctx.scene.max_tiles, base_power)
    if top is None:
        return None
    target = ctx.need if top[2] >= ctx.need else top[2]

    def reaches(t):
        state = optimal_state(ctx, site_id, t, base_power)
        return state, state[2] >= target

    if linear_scan:
        for t in range(1, ctx.scene.max_tiles + 1):
            state, ok = reaches(t)
            if ok:
                return t, state
        return ctx.scene.max_tiles, top
    lo, hi = 1, ctx.scene.max_tiles
    while lo < hi:
        mid = (lo + hi) // 2
        _, ok = reaches(mid)
        if ok:
            hi = mid
        else:
            lo = mid + 1
    return lo, optimal_state(ctx, site_id, lo, base_power)


def sequential_deploy(ctx: DeployContext, pool, fixed_tiles: int | None = None,
                      linear_scan: bool = False) -> dict[int, Placement] | None:
    """Greedy insertion until the coverage target holds.

    Each round evaluates every unused pool site at its own best tile
    count and state.  Sites able to reach the target alone are preferred
    (fewest tiles first, then coverage, then id); otherwise the site
    adding the most coverage wins (then fewest tiles, then id).  Returns
    None when no remaining site adds coverage.
    """
    placements: dict[int, Placement] = {}
    power = ctx.beta.copy()
    available = sorted(set(pool))
    while covered(ctx, power) < ctx.need:
        reaching = []
        partial = []
        for i in available:
            if fixed_tiles is not None:
                state = optimal_state(ctx, i, fixed_tiles, power)
                if state is None:
                    continue
                entry = (fixed_tiles, state)
            else:
                found = optimal_tiles(ctx, i, power, linear_scan=linear_scan)
                if found is None:
                    continue
                entry = found
            tiles, state = entry
            if state[2] >= ctx.need:
                reaching.append((tiles, -state[2], i, state))
            else:
                partial.append((-state[2], tiles, i, state))
        if reaching:
            tiles, _, site_id, state = min(reaching)
        elif partial:
            neg_count, tiles, site_id, state = min(partial)
            if -neg_count <= covered(ctx, power):
                logger.debug("greedy stalled: best site %d adds no coverage",
                             site_id)
                return None
        else:
            return None
        placements[site_id] = Placement(height_index=state[0],
                                        orient_index=state[1], tiles=tiles)
        available.remove(site_id)
        power = power_vector(ctx, placements)
        logger.debug("greedy placed site %d: %d tiles, state (%d, %d), "
                     "%d/%d covered", site_id, tiles, state[0], state[1],
                     covered(ctx, power), ctx.need)
    return placements


def step1_lp_subset(ctx: DeployContext) -> tuple[list[int], bool]:
    """Support of the fractional screening model, or the full pool when
    the screen is infeasible or empty."""
    all_ids = [s.id for s in ctx.scene.candidate_sites]
    model = build_p21(ctx.knowledge, ctx.scene, ctx.cost_params,
                      ctx.coverage_params)
    result = lp_relaxation(model)
    if result.status != "optimal":
        logger.debug("screening model %s; keeping the full pool", result.status)
        return sorted(all_ids), False
    totals: dict[int, float] = {i: 0.0 for i in all_ids}
    for idx, meta in enumerate(model.var_meta):
        if meta[0] == "place":
            totals[meta[1]] += float(result.x[idx])
    support = [i for i in sorted(totals) if totals[i] > _SUPPORT_TOL]
    if not support:
        return sorted(all_ids), False
    logger.debug("screening support: %s", support)
    return support, True


def step3_trim(ctx: DeployContext,
               placements: dict[int, Placement]) -> dict[int, Placement]:
    """Local descent on a feasible deployment.

    Repeatedly drops sites made redundant by the others and re-trims
    each remaining site to its cheapest sufficient tile count and state,
    until a full pass yields no strict cost improvement.  Sites are
    visited in ascending id order, so the descent is deterministic.
    """
    current = dict(placements)
    improved = True
    while improved:
        improved = False
        for i in sorted(current):
            others = {j: p for j, p in current.items() if j != i}
            base = power_vector(ctx, others)
            if covered(ctx, base) >= ctx.need:
                logger.debug("trim: site %d redundant, dropped", i)
                del current[i]
                improved = True
                continue
            found = optimal_tiles(ctx, i, base)
            if found is None:
                continue
            tiles, state = found
            if state[2] < ctx.need:
                continue
            trial = Placement(height_index=state[0], orient_index=state[1],
                              tiles=tiles)
            old_cost = deployment_cost(current, ctx.cost_params)
            candidate = dict(others)
            candidate[i] = trial
            if deployment_cost(candidate, ctx.cost_params) < old_cost - _COST_TOL:
                logger.debug("trim: site %d re-trimmed to %d tiles", i, tiles)
                current = candidate
                improved = True
    return current


def best_small_deployment(ctx: DeployContext,
                          max_sites: int = 2) -> dict[int, Placement] | None:
    """Cheapest deployment using at most ``max_sites`` sites, found by
    exhaustive enumeration of (site, tiles, height, orientation) tuples.

    The option count is tiny (sites x tile counts x states), so a full
    sweep costs milliseconds and is exact within its support size.
    Ties break toward lexicographically smaller options.  Returns None
    when no such small deployment meets the coverage target.
    """
    site_ids = sorted(ctx.states)
    options: dict[int, list[tuple[float, int, int, int, np.ndarray]]] = {}
    for i in site_ids:
        rows = []
        for tiles in range(1, ctx.scene.max_tiles + 1):
            gain = cascaded_gain(tiles, ctx.m_sq, 1.0)
            for (j, k) in ctx.states[i]:
                rows.append((ctx.cost_params.site_cost
                             + tiles * ctx.cost_params.tile_cost,
                             tiles, j, k, gain * ctx.coupling[(i, j, k)]))
        options[i] = rows

    best_cost = np.inf
    best: dict[int, Placement] | None = None
    for i in site_ids:
        for cost_i, tiles, j, k, add in options[i]:
            if cost_i >= best_cost - _COST_TOL:
                continue
            if covered(ctx, ctx.beta + add) >= ctx.need:
                best_cost = cost_i
                best = {i: Placement(height_index=j, orient_index=k,
                                     tiles=tiles)}
    if max_sites >= 2:
        for a_pos, a in enumerate(site_ids):
            for b in site_ids[a_pos + 1:]:
                rows_a, rows_b = options[a], options[b]
                if not rows_a or not rows_b:
                    continue
                add_a = np.stack([r[4] for r in rows_a])
                add_b = np.stack([r[4] for r in rows_b])
                cost_a = np.array([r[0] for r in rows_a])
                cost_b = np.array([r[0] for r in rows_b])
                power = (ctx.beta[None, None, :] + add_a[:, None, :]
                         + add_b[None, :, :])
                counts = (power >= ctx.p_min).sum(axis=2)
                pair_cost = cost_a[:, None] + cost_b[None, :]
                feasible = counts >= ctx.need
                if not np.any(feasible):
                    continue
                masked = np.where(feasible, pair_cost, np.inf)
                flat = int(np.argmin(masked))
                ia, ib = np.unravel_index(flat, masked.shape)
                if masked[ia, ib] < best_cost - _COST_TOL:
                    best_cost = float(masked[ia, ib])
                    _, t_a, j_a, k_a, _ = rows_a[ia]
                    _, t_b, j_b, k_b, _ = rows_b[ib]
                    best = {a: Placement(height_index=j_a, orient_index=k_a,
                                         tiles=t_a),
                            b: Placement(height_index=j_b, orient_index=k_b,
                                         tiles=t_b)}
    return best


def step2_swap_refine(ctx: DeployContext,
                      placements: dict[int, Placement]) -> dict[int, Placement]:
    """One pass of site swaps: replace a deployed site with an unused
    one when that strictly lowers cost while keeping the target met."""
    current = dict(placements)
    all_ids = [s.id for s in ctx.scene.candidate_sites]
    for m in sorted(placements):
        if m not in current:
            continue
        without = {i: p for i, p in current.items() if i != m}
        base = power_vector(ctx, without)
        cost_now = deployment_cost(current, ctx.cost_params)
        for cand in all_ids:
            if cand in current:
                continue
            found = optimal_tiles(ctx, cand, base)
            if found is None:
                continue
            tiles, state = found
            if state[2] < ctx.need:
                continue
            trial = dict(without)
            trial[cand] = Placement(height_index=state[0],
                                    orient_index=state[1], tiles=tiles)
            if deployment_cost(trial, ctx.cost_params) < cost_now - _COST_TOL:
                logger.debug("swap: site %d -> %d drops cost %.6g -> %.6g",
                             m, cand, cost_now,
                             deployment_cost(trial, ctx.cost_params))
                current = trial
                break
    return current


def successive_refinement(knowledge: ChannelKnowledge, scene,
                          cost_params: CostParams,
                          coverage_params: CoverageParams, *,
                          exact_fallback: bool = True,
                          time_limit: float | None = None) -> DeploymentSolution:
    """Staged planner: screening LP, greedy insertion, swap pass, local
    descent, and a bounded-support exhaustive sweep.

    Every stage is polynomial in the option count, so the planner runs
    orders of magnitude faster than the provable search.  When the
    greedy core cannot reach the target at all, the provable search is
    invoked once as a fallback (disable with ``exact_fallback=False``).
    """
    bounds = feasibility_bounds(knowledge, scene, coverage_params)
    verdict = check_feasibility(coverage_params, bounds, knowledge.n_grids)
    if verdict == "trivial":
        return evaluate_solution({}, knowledge, scene, cost_params,
                                 coverage_params, status="trivial", proven=True,
                                 provenance="refine:trivial")
    if verdict == "infeasible":
        return evaluate_solution({}, knowledge, scene, cost_params,
                                 coverage_params, status="infeasible",
                                 proven=True, provenance="refine:bound")

    ctx = build_context(knowledge, scene, cost_params, coverage_params)
    pool, used_lp = step1_lp_subset(ctx)
    tags = ["lp_support" if used_lp else "full_pool", "greedy"]
    placements = sequential_deploy(ctx, pool)
    if placements is None and used_lp:
        placements = sequential_deploy(ctx, [s.id for s in scene.candidate_sites])
        tags.append("pool_fallback")
    if placements is None:
        small = best_small_deployment(ctx)
        if small is not None:
            placements = small
            tags.append("small_rescue")
        elif exact_fallback:
            solution = milp.solve_deployment(
                knowledge, scene, cost_params, coverage_params,
                time_limit=time_limit)
            return replace(solution,
                           provenance="refine:exact_fallback;"
                                      + solution.provenance)
        else:
            return evaluate_solution({}, knowledge, scene, cost_params,
                                     coverage_params, status="infeasible",
                                     proven=False,
                                     provenance="refine:greedy_failed")
    else:
        placements = step2_swap_refine(ctx, placements)
        tags.append("swap")

    placements = step3_trim(ctx, placements)
    tags.append("trim")
    dense = sequential_deploy(ctx, [s.id for s in scene.candidate_sites],
                              fixed_tiles=scene.max_tiles)
    if dense is not None:
        dense = step3_trim(ctx, dense)
        if deployment_cost(dense, cost_params) < \
                deployment_cost(placements, cost_params) - _COST_TOL:
            logger.debug("dense restart improves %.6g -> %.6g",
                         deployment_cost(placements, cost_params),
                         deployment_cost(dense, cost_params))
            placements = dense
            tags.append("dense_restart")
    small = best_small_deployment(ctx)
    if small is not None and deployment_cost(small, cost_params) < \
            deployment_cost(placements, cost_params) - _COST_TOL:
        logger.debug("small-support sweep improves %.6g -> %.6g",
                     deployment_cost(placements, cost_params),
                     deployment_cost(small, cost_params))
        placements = small
        tags.append("small_sweep")

    return evaluate_solution(placements, knowledge, scene, cost_params,
                             coverage_params, status="feasible", proven=False,
                             provenance="refine:" + "+".join(tags))


def fixed_state_baseline(knowledge: ChannelKnowledge, scene,
                         cost_params: CostParams,
                         coverage_params: CoverageParams, *,
                         time_limit: float | None = None) -> DeploymentSolution:
    """Provably cheapest deployment with every panel pinned to the
    lowest mounting height and the zero orientation; only sites and
    tile counts are optimized.  Raises ConfigError when some site has
    no zero orientation."""
    solution = milp.solve_deployment(knowledge, scene, cost_params,
                                     coverage_params, fixed_state=True,
                                     time_limit=time_limit)
    return replace(solution,
                   provenance="baseline:fixed_state;" + solution.provenance)


def max_tile_baseline(knowledge: ChannelKnowledge, scene,
                      cost_params: CostParams,
                      coverage_params: CoverageParams, *,
                      time_limit: float | None = None) -> DeploymentSolution:
    """Provably cheapest deployment with every placement forced to the
    maximum tile count; only sites and states are chosen."""
    solution = milp.solve_deployment(knowledge, scene, cost_params,
                                     coverage_params,
                                     fixed_tiles=scene.max_tiles,
                                     time_limit=time_limit)
    return replace(solution,
                   provenance="baseline:max_tile;" + solution.provenance)
