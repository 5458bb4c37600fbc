"""Integer model for minimum-cost surface deployment under a coverage
target, plus the relaxed site-screening variant.

Variables come in two blocks.  A placement variable picks one
(tile count, height, orientation) combination at one candidate site;
a coverage indicator marks one receiver grid as served.  Rows enforce
one combination per site, power balance per grid, and the minimum
number of covered grids.  Grid rows are scaled by the power threshold
so all coefficients sit near unity for the simplex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ValidationError
from ..channel import cascaded_gain
from ..metrics import (CostParams, CoverageParams, Placement, beta_vector,
                       coupling_vector, required_covered)
from .simplex import LpResult, solve_bounded_lp

logger = logging.getLogger(__name__)

_INT_TOL = 1e-6


@dataclass
class IlpModel:
    objective: np.ndarray
    rows: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    var_meta: list[tuple]
    var_index: dict[tuple, int]
    context: dict = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def n_rows(self) -> int:
        return self.rhs.shape[0]


def _orientation_zero_index(site) -> int:
    for k, theta in enumerate(site.orientations, start=1):
        if abs(theta) <= 1e-12:
            return k
    raise ConfigError(
        "site %d has no zero orientation; the fixed-state variant needs one"
        % site.id)


def _site_states(site, fixed_state: bool):
    if fixed_state:
        return [(1, _orientation_zero_index(site))]
    return [(j, k)
            for j in range(1, len(site.heights) + 1)
            for k in range(1, len(site.orientations) + 1)]


def _tile_choices(max_tiles: int, fixed_tiles: int | None):
    if fixed_tiles is None:
        return list(range(1, max_tiles + 1))
    if not (1 <= fixed_tiles <= max_tiles):
        raise ConfigError("fixed tile count %d outside [1, %d]"
                          % (fixed_tiles, max_tiles))
    return [fixed_tiles]


def build_p1(knowledge, scene, cost_params: CostParams,
             coverage_params: CoverageParams, *,
             restrict_sites=None, fixed_tiles: int | None = None,
             fixed_state: bool = False) -> IlpModel:
    """Exact deployment model: minimize site + tile cost subject to the
    coverage-rate target.

    ``restrict_sites`` limits the candidate pool, ``fixed_tiles`` pins
    every placement's tile count, and ``fixed_state`` allows only the
    lowest mounting height with the zero orientation.
    """
    n = knowledge.n_grids
    p_min = coverage_params.p_min_mw
    m_sq = scene.elements_per_tile_side ** 2
    need = required_covered(coverage_params.target_rate, n)
    beta = beta_vector(knowledge)

    sites = list(scene.candidate_sites)
    if restrict_sites is not None:
        allowed = set(restrict_sites)
        sites = [s for s in sites if s.id in allowed]
        if len(sites) != len(allowed):
            raise ValidationError("restrict_sites names unknown site ids")

    var_meta: list[tuple] = []
    var_index: dict[tuple, int] = {}
    costs: list[float] = []
    columns: list[np.ndarray] = []  # per-variable column over grid rows

    tiles_list_cache = _tile_choices(scene.max_tiles, fixed_tiles)
    site_row_vars: dict[int, list[int]] = {}
    for site in sites:
        members = []
        for tiles in tiles_list_cache:
            for (j, k) in _site_states(site, fixed_state):
                key = ("place", site.id, tiles, j, k)
                var_index[key] = len(var_meta)
                var_meta.append(key)
                costs.append(cost_params.tile_cost * tiles)
                vec = coupling_vector(knowledge, site.id, j, k)
                if vec is None:
                    columns.append(np.zeros(n))
                else:
                    columns.append(cascaded_gain(tiles, m_sq, 1.0) * vec)
                members.append(var_index[key])
        site_row_vars[site.id] = members

    n_place = len(var_meta)
    for gid in range(1, n + 1):
        key = ("cover", gid)
        var_index[key] = len(var_meta)
        var_meta.append(key)
        costs.append(0.0)

    # site-use indicators carry the fixed cost and aggregate each
    # group's state choice into one binary the search can branch on
    use_var: dict[int, int] = {}
    for site in sites:
        key = ("use", site.id)
        use_var[site.id] = len(var_meta)
        var_index[key] = len(var_meta)
        var_meta.append(key)
        costs.append(cost_params.site_cost)

    n_vars = len(var_meta)
    rows: list[np.ndarray] = []
    senses: list[str] = []
    rhs: list[float] = []

    # exactly the chosen state's indicator: sum(states) - use = 0
    for site in sites:
        row = np.zeros(n_vars)
        row[site_row_vars[site.id]] = 1.0
        row[use_var[site.id]] = -1.0
        rows.append(row)
        senses.append("=")
        rhs.append(0.0)

    # Grid rows couple each cover indicator to the placements that can
    # push the grid past the threshold.  The raw balance row
    #   cover_n - sum(alpha/p_min) place <= beta_n/p_min
    # is weakened by huge alpha ratios: epsilon placements switch the
    # indicator on for free.  Normalizing by the power still missing,
    # cap_n = 1 - beta_n/p_min, and clipping each coefficient at one,
    #   cover_n <= sum min(alpha/(p_min*cap_n), 1) place
    # keeps the same integer solutions (a state covering the grid alone
    # reaches coefficient one; partial states sum to less than one
    # exactly when their combined power falls short) while dominating
    # the raw row for every fractional point.  Grids the base station
    # already covers keep a slack row so their indicator stays free.
    for gid in range(1, n + 1):
        row = np.zeros(n_vars)
        row[n_place + gid - 1] = 1.0
        cap = 1.0 - beta[gid - 1] / p_min
        if cap <= 0.0:
            rows.append(row)
            senses.append("<=")
            rhs.append(beta[gid - 1] / p_min)
            continue
        for v in range(n_place):
            gain = columns[v][gid - 1]
            if gain != 0.0:
                row[v] = -min(gain / (p_min * cap), 1.0)
        rows.append(row)
        senses.append("<=")
        rhs.append(0.0)

    row = np.zeros(n_vars)
    row[n_place:n_place + n] = 1.0
    rows.append(row)
    senses.append(">=")
    rhs.append(float(need))

    # Subset cover cuts.  A site subset whose best-case combined power
    # still leaves the covered count short of the target cannot serve
    # alone, so every solution uses a site outside it.  The test is
    # monotone in the subset, so only maximal deficient subsets produce
    # rows; the family is enumerable while the pool stays small.
    if need > 0 and 0 < len(sites) <= 12:
        site_best = []
        for site in sites:
            members = site_row_vars[site.id]
            if members:
                site_best.append(np.max([columns[v] for v in members], axis=0))
            else:
                site_best.append(np.zeros(n))
        deficient: list[int] = []
        for subset in range(1 << len(sites)):
            power = beta + sum(site_best[i] for i in range(len(sites))
                               if subset >> i & 1)
            if int(np.count_nonzero(power >= p_min * (1.0 - 1e-12))) < need:
                deficient.append(subset)
        maximal = [s for s in deficient
                   if not any(t != s and t & s == s for t in deficient)]
        for subset in maximal:
            row = np.zeros(n_vars)
            for i, site in enumerate(sites):
                if not subset >> i & 1:
                    row[use_var[site.id]] = 1.0
            rows.append(row)
            senses.append(">=")
            rhs.append(1.0)

    model = IlpModel(
        objective=np.array(costs),
        rows=np.array(rows) if rows else np.zeros((0, n_vars)),
        senses=senses,
        rhs=np.array(rhs),
        lower=np.zeros(n_vars),
        upper=np.ones(n_vars),
        integer=np.ones(n_vars, dtype=bool),
        var_meta=var_meta,
        var_index=var_index,
        context={"knowledge": knowledge, "scene": scene,
                 "cost": cost_params, "coverage": coverage_params,
                 "need": need, "p_min": p_min, "m_sq": m_sq,
                 "n_place": n_place, "n_sites": len(sites), "kind": "deploy",
                 "site_groups": [np.array(site_row_vars[s.id], dtype=int)
                                 for s in sites],
                 "use_vars": np.array([use_var[s.id] for s in sites],
                                      dtype=int)},
    )
    logger.debug("deployment model: %d vars, %d rows, need %d of %d grids",
                 n_vars, model.n_rows, need, n)
    return model


def placement_branch_mask(model: IlpModel) -> np.ndarray:
    """Integer variables worth branching on: the placement block.  The
    cover block is completed in closed form by ``make_cover_completer``
    and the use block follows the site rows once states are integral."""
    mask = np.zeros(model.n_vars, dtype=bool)
    mask[:model.context["n_place"]] = model.integer[:model.context["n_place"]]
    return mask


def site_use_mask(model: IlpModel) -> np.ndarray:
    """Integer mask of the site-use indicators, branched ahead of any
    single state: fixing whether a site participates prunes far more of
    the tree than fixing one of its states."""
    mask = np.zeros(model.n_vars, dtype=bool)
    mask[model.context["use_vars"]] = True
    return mask


def make_cover_completer(model: IlpModel):
    """Closed-form optimal completion of the cover block.

    Cover variables cost nothing, so once the placement block is
    integral the best completion marks exactly the grids whose balance
    row leaves room for the indicator.  Returns a callable mapping a
    node solution (with integral placements) to a fully integral vector,
    or None when even the maximal completion misses the coverage row.
    """
    n_place = model.context["n_place"]
    n_sites = model.context["n_sites"]
    n = model.context["knowledge"].n_grids
    need = model.context["need"]
    grid_rows = model.rows[n_sites:n_sites + n, :n_place]
    grid_rhs = model.rhs[n_sites:n_sites + n]
    cover_slice = slice(n_place, n_place + n)

    def complete(x, lower, upper):
        place = np.round(x[:n_place])
        # scaled power credit available to each cover indicator
        caps = grid_rhs - grid_rows @ place
        cover = (caps >= 1.0 - 1e-9).astype(float)
        cover = np.minimum(cover, upper[cover_slice])
        if np.any(lower[cover_slice] > cover + 1e-9):
            return None
        cover = np.maximum(cover, lower[cover_slice])
        if float(cover.sum()) < need:
            return None
        completed = x.copy()
        completed[:n_place] = place
        completed[cover_slice] = cover
        completed[n_place + n:] = np.round(x[n_place + n:])
        return completed

    return complete


def make_rounding_heuristic(model: IlpModel):
    """Relaxation-guided rounding for incumbent discovery.

    Given a node's fractional solution, keep each site group's
    highest-mass open state and add them in mass order until the
    coverage count is met, then polish: drop placements the cover no
    longer needs (priciest first) and swap each survivor for its site's
    cheapest state that still covers.  Returns a feasible integral
    vector or None; never worse than no incumbent, and cheap enough to
    try at every node.
    """
    n_place = model.context["n_place"]
    n_sites = model.context["n_sites"]
    n = model.context["knowledge"].n_grids
    need = model.context["need"]
    groups = model.context["site_groups"]
    use_vars = model.context["use_vars"]
    grid_rows = model.rows[n_sites:n_sites + n, :n_place]
    grid_rhs = model.rhs[n_sites:n_sites + n]
    costs = model.objective[:n_place]
    site_cost = model.objective[use_vars]
    group_of = {int(v): gi for gi, g in enumerate(groups) for v in g}
    cover_slice = slice(n_place, n_place + n)

    def covered_count(place):
        caps = grid_rhs - grid_rows @ place
        return int(np.count_nonzero(caps >= 1.0 - 1e-9))

    def swap_cost(old, new):
        return costs[new] - costs[old]

    def polish(place, chosen, keep, lower, upper):
        # alternate redundant-placement drops with cheapest in-site swaps
        # until neither moves; two rounds reach the fixpoint in practice
        for _ in range(3):
            moved = False
            droppable = [v for v in chosen if v not in keep]
            for var in sorted(droppable, key=lambda v: (-costs[v], v)):
                place[var] = 0.0
                if covered_count(place) >= need:
                    chosen.remove(var)
                    moved = True
                else:
                    place[var] = 1.0
            for pos, var in enumerate(chosen):
                if var in keep and lower[var] > 0.5:
                    continue
                group = groups[group_of[var]]
                cheaper = [int(v) for v in group
                           if upper[v] > 0.5 and swap_cost(var, int(v)) < -1e-12]
                cheaper.sort(key=lambda v: (costs[v], v))
                for alt in cheaper:
                    place[var] = 0.0
                    place[alt] = 1.0
                    if covered_count(place) >= need:
                        chosen[pos] = alt
                        moved = True
                        break
                    place[alt] = 0.0
                    place[var] = 1.0
            if not moved:
                break
        return place, chosen

    def attempt(x, lower, upper, per_cost):
        place = np.zeros(n_place)
        place[lower[:n_place] > 0.5] = 1.0
        keep = set(np.flatnonzero(place).tolist())
        chosen: list[int] = []
        candidates = []
        for gi, group in enumerate(groups):
            if np.any(place[group] > 0.5):
                continue
            uv = use_vars[gi]
            if upper[uv] <= 0.5:
                continue
            best_var = None
            best_score = 0.0
            for v in group:
                if upper[v] <= 0.5:
                    continue
                score = float(x[v])
                if per_cost:
                    score /= site_cost[gi] + costs[v]
                if best_var is None or score > best_score + 1e-15:
                    best_var = int(v)
                    best_score = score
            if best_var is None:
                if lower[uv] > 0.5:
                    return None
                continue
            if lower[uv] > 0.5:
                # the node demands this site; pin its leading state
                place[best_var] = 1.0
                keep.add(best_var)
                chosen.append(best_var)
            elif best_score > 1e-12:
                candidates.append((-best_score, best_var))
        candidates.sort()
        covered = covered_count(place)
        for _, var in candidates:
            if covered >= need:
                break
            place[var] = 1.0
            covered = covered_count(place)
            chosen.append(var)
        if covered < need:
            return None
        place, chosen = polish(place, chosen, keep, lower, upper)

        caps = grid_rhs - grid_rows @ place
        cover = (caps >= 1.0 - 1e-9).astype(float)
        cover = np.minimum(cover, upper[cover_slice])
        if np.any(lower[cover_slice] > cover + 1e-9):
            return None
        cover = np.maximum(cover, lower[cover_slice])
        if float(cover.sum()) < need:
            return None
        use = np.array([1.0 if np.any(place[g] > 0.5) else 0.0
                        for g in groups])
        return np.concatenate([place, cover, use])

    full_costs = model.objective

    def round_node(x, lower, upper):
        best = None
        best_obj = np.inf
        for per_cost in (False, True):
            rounded = attempt(x, lower, upper, per_cost)
            if rounded is None:
                continue
            objective = float(full_costs @ rounded)
            if objective < best_obj - 1e-12:
                best = rounded
                best_obj = objective
        return best

    return round_node


def enumerate_small_incumbent(model: IlpModel, max_sites: int = 2):
    """Cheapest deployment using at most ``max_sites`` sites, by direct
    enumeration over the model's placement columns.

    Exhaustive and vectorized: tiny-support optima are found outright,
    which seeds the search with the exact answer whenever one or two
    sites suffice.  Returns an integral vector or None.
    """
    n_place = model.context["n_place"]
    n_sites = model.context["n_sites"]
    n = model.context["knowledge"].n_grids
    need = model.context["need"]
    groups = model.context["site_groups"]
    use_vars = model.context["use_vars"]
    grid_rows = model.rows[n_sites:n_sites + n, :n_place]
    grid_rhs = model.rhs[n_sites:n_sites + n]
    costs = model.objective[:n_place]
    site_cost = model.objective[use_vars]

    best_cost = np.inf
    best_vars: tuple[int, ...] | None = None
    for gi, group in enumerate(groups):
        if group.size == 0:
            continue
        caps = grid_rhs[:, None] - grid_rows[:, group]
        counts = (caps >= 1.0 - 1e-9).sum(axis=0)
        feasible = np.flatnonzero(counts >= need)
        if feasible.size:
            totals = site_cost[gi] + costs[group[feasible]]
            pick = int(feasible[int(np.argmin(totals))])
            total = float(site_cost[gi] + costs[group[pick]])
            if total < best_cost - 1e-12:
                best_cost = total
                best_vars = (int(group[pick]),)
    if max_sites >= 2:
        for gi in range(len(groups)):
            if groups[gi].size == 0:
                continue
            for gj in range(gi + 1, len(groups)):
                if groups[gj].size == 0:
                    continue
                a = grid_rows[:, groups[gi]]
                b = grid_rows[:, groups[gj]]
                caps = grid_rhs[:, None, None] - a[:, :, None] - b[:, None, :]
                counts = (caps >= 1.0 - 1e-9).sum(axis=0)
                ok = counts >= need
                if not np.any(ok):
                    continue
                pair_cost = (site_cost[gi] + site_cost[gj]
                             + costs[groups[gi]][:, None]
                             + costs[groups[gj]][None, :])
                masked = np.where(ok, pair_cost, np.inf)
                flat = int(np.argmin(masked))
                ai, bj = np.unravel_index(flat, masked.shape)
                if masked[ai, bj] < best_cost - 1e-12:
                    best_cost = float(masked[ai, bj])
                    best_vars = (int(groups[gi][ai]), int(groups[gj][bj]))
    if best_vars is None:
        return None

    place = np.zeros(n_place)
    for v in best_vars:
        place[v] = 1.0
    caps = grid_rhs - grid_rows @ place
    cover = (caps >= 1.0 - 1e-9).astype(float)
    use = np.array([1.0 if np.any(place[g] > 0.5) else 0.0 for g in groups])
    return np.concatenate([place, cover, use])


def make_leaf_enumerator(model: IlpModel, cap: int = 20000):
    """Exact solver for small node subproblems.

    Returns a callable mapping node bounds to None (subproblem too
    large), ``(None,)`` (subproblem infeasible), or ``(x,)`` with the
    node's provably best integral vector.  A node's subproblem is the
    cross product of per-site choices (one open placement state or
    site-off), so once branching has shrunk that product below ``cap``
    the node can be closed by direct enumeration instead of a subtree.
    """
    n_place = model.context["n_place"]
    n_sites = model.context["n_sites"]
    n = model.context["knowledge"].n_grids
    need = model.context["need"]
    groups = model.context["site_groups"]
    use_vars = model.context["use_vars"]
    grid_rows = model.rows[n_sites:n_sites + n, :n_place]
    grid_rhs = model.rhs[n_sites:n_sites + n]
    costs = model.objective[:n_place]
    site_cost = model.objective[use_vars]
    cover_slice = slice(n_place, n_place + n)
    zero_row = np.zeros(n)
    n_vars = len(model.objective)

    def solve(lower: np.ndarray, upper: np.ndarray):
        group_choices: list[list[tuple[float, int]]] = []
        total = 1
        for gi, group in enumerate(groups):
            uv = int(use_vars[gi])
            forced = [int(v) for v in group if lower[v] > 0.5]
            choices: list[tuple[float, int]] = []
            if len(forced) > 1:
                return (None,)
            if forced:
                v = forced[0]
                if upper[v] <= 0.5 or upper[uv] <= 0.5:
                    return (None,)
                choices.append((float(site_cost[gi] + costs[v]), v))
            else:
                if upper[uv] > 0.5:
                    for v in group:
                        if upper[v] > 0.5:
                            choices.append((float(site_cost[gi] + costs[v]),
                                            int(v)))
                if lower[uv] <= 0.5:
                    choices.append((0.0, -1))
                if not choices:
                    return (None,)
            group_choices.append(choices)
            total *= len(choices)
            if total > cap:
                return None

        acc = np.zeros((1, n))
        acc_cost = np.zeros(1)
        for choices in group_choices:
            rows = np.stack([zero_row if v < 0 else -grid_rows[:, v]
                             for (_, v) in choices])
            cvec = np.array([c for (c, _) in choices])
            acc = (acc[:, None, :] + rows[None, :, :]).reshape(-1, n)
            acc_cost = (acc_cost[:, None] + cvec[None, :]).reshape(-1)

        covered = (acc + grid_rhs[None, :]) >= 1.0 - 1e-9
        chi_forced = lower[cover_slice] > 0.5
        chi_open = upper[cover_slice] > 0.5
        feasible = (covered & chi_open[None, :]).sum(axis=1) >= need
        if np.any(chi_forced):
            feasible &= covered[:, chi_forced].all(axis=1)
        if not np.any(feasible):
            return (None,)
        masked = np.where(feasible, acc_cost, np.inf)
        best = int(np.argmin(masked))

        x = np.zeros(n_vars)
        rem = best
        picks: list[int] = []
        for choices in reversed(group_choices):
            rem, r = divmod(rem, len(choices))
            picks.append(r)
        picks.reverse()
        for gi, (choices, r) in enumerate(zip(group_choices, picks)):
            _, v = choices[r]
            if v >= 0:
                x[v] = 1.0
                x[int(use_vars[gi])] = 1.0
        x[cover_slice] = (covered[best] & chi_open).astype(float)
        return (x,)

    return solve


def build_p21(knowledge, scene, cost_params: CostParams,
              coverage_params: CoverageParams) -> IlpModel:
    """Relaxed site-screening model: fractional placements must push
    every grid to the threshold; minimize the same cost function.  Its
    support indicates which sites matter."""
    n = knowledge.n_grids
    p_min = coverage_params.p_min_mw
    m_sq = scene.elements_per_tile_side ** 2
    beta = beta_vector(knowledge)

    var_meta: list[tuple] = []
    var_index: dict[tuple, int] = {}
    costs: list[float] = []
    columns: list[np.ndarray] = []
    site_row_vars: dict[int, list[int]] = {}
    for site in scene.candidate_sites:
        members = []
        for tiles in range(1, scene.max_tiles + 1):
            for j in range(1, len(site.heights) + 1):
                for k in range(1, len(site.orientations) + 1):
                    key = ("place", site.id, tiles, j, k)
                    var_index[key] = len(var_meta)
                    var_meta.append(key)
                    costs.append(cost_params.site_cost
                                 + cost_params.tile_cost * tiles)
                    vec = coupling_vector(knowledge, site.id, j, k)
                    if vec is None:
                        columns.append(np.zeros(n))
                    else:
                        columns.append(cascaded_gain(tiles, m_sq, 1.0) * vec)
                    members.append(var_index[key])
        site_row_vars[site.id] = members

    n_vars = len(var_meta)
    rows: list[np.ndarray] = []
    senses: list[str] = []
    rhs: list[float] = []
    for site in scene.candidate_sites:
        row = np.zeros(n_vars)
        row[site_row_vars[site.id]] = 1.0
        rows.append(row)
        senses.append("<=")
        rhs.append(1.0)
    for gid in range(1, n + 1):
        row = np.zeros(n_vars)
        for v in range(n_vars):
            gain = columns[v][gid - 1]
            if gain != 0.0:
                row[v] = gain / p_min
        rows.append(row)
        senses.append(">=")
        rhs.append(1.0 - beta[gid - 1] / p_min)

    return IlpModel(
        objective=np.array(costs),
        rows=np.array(rows),
        senses=senses,
        rhs=np.array(rhs),
        lower=np.zeros(n_vars),
        upper=np.ones(n_vars),
        integer=np.zeros(n_vars, dtype=bool),
        var_meta=var_meta,
        var_index=var_index,
        context={"knowledge": knowledge, "scene": scene,
                 "cost": cost_params, "coverage": coverage_params,
                 "p_min": p_min, "m_sq": m_sq,
                 "n_place": n_vars, "kind": "screen"},
    )


def lp_relaxation(model: IlpModel, lower=None, upper=None,
                  start_basis=None, start_at_upper=None) -> LpResult:
    """Solve the model's continuous relaxation, optionally with tighter
    per-variable bounds and a warm-start basis (used by the search tree)."""
    lo = model.lower if lower is None else lower
    up = model.upper if upper is None else upper
    return solve_bounded_lp(model.objective, model.rows, model.senses,
                            model.rhs, lo, up,
                            start_basis=start_basis,
                            start_at_upper=start_at_upper)


def decode_solution(model: IlpModel, x: np.ndarray) -> dict[int, Placement]:
    """Integral solution vector to per-site placements, with checks."""
    placements: dict[int, Placement] = {}
    for idx, meta in enumerate(model.var_meta):
        value = float(x[idx])
        if abs(value - round(value)) > _INT_TOL:
            raise ValidationError("variable %r is fractional (%.9f)"
                                  % (meta, value))
        if meta[0] == "place" and round(value) == 1:
            _, site_id, tiles, j, k = meta
            if site_id in placements:
                raise ValidationError("two placements decoded at site %d"
                                      % site_id)
            placements[site_id] = Placement(height_index=j, orient_index=k,
                                            tiles=tiles)
    return placements


def encode_placements(model: IlpModel, placements: dict[int, Placement]) -> np.ndarray:
    """Per-site placements back to a model vector, with coverage
    indicators recomputed from the tables (used to warm-start search)."""
    from ..metrics import effective_power

    x = np.zeros(model.n_vars)
    for site_id, p in placements.items():
        key = ("place", site_id, p.tiles, p.height_index, p.orient_index)
        if key not in model.var_index:
            raise ValidationError("placement %r has no model variable" % (key,))
        x[model.var_index[key]] = 1.0
        use_key = ("use", site_id)
        if use_key in model.var_index:
            x[model.var_index[use_key]] = 1.0
    knowledge = model.context["knowledge"]
    for gid in range(1, knowledge.n_grids + 1):
        key = ("cover", gid)
        if key not in model.var_index:
            continue
        power = effective_power(gid, placements, knowledge, model.context["m_sq"])
        if power >= model.context["p_min"]:
            x[model.var_index[key]] = 1.0
    return x


def _var_name(meta: tuple) -> str:
    if meta[0] == "place":
        return "place_s%d_t%d_h%d_o%d" % meta[1:]
    if meta[0] == "use":
        return "use_s%d" % meta[1]
    return "cover_g%d" % meta[1]


def write_lp(model: IlpModel, path) -> None:
    """Dump the model in LP text format for inspection with other tools."""
    names = [_var_name(meta) for meta in model.var_meta]
    lines = ["\\ deployment planning model", "Minimize", " obj:"]
    terms = []
    for j, cost in enumerate(model.objective):
        if cost != 0.0:
            terms.append(" %+.12g %s" % (cost, names[j]))
    lines.append("".join(terms) if terms else " 0 %s" % names[0])
    lines.append("Subject To")
    sense_txt = {"<=": "<=", ">=": ">=", "=": "="}
    for i in range(model.n_rows):
        row = model.rows[i]
        terms = []
        for j in np.flatnonzero(row):
            terms.append(" %+.12g %s" % (row[j], names[j]))
        lines.append(" r%d:%s %s %.12g"
                     % (i + 1, "".join(terms), sense_txt[model.senses[i]],
                        model.rhs[i]))
    lines.append("Bounds")
    for j, name in enumerate(names):
        lines.append(" %.12g <= %s <= %.12g"
                     % (model.lower[j], name, model.upper[j]))
    if bool(model.integer.any()):
        lines.append("Binary")
        lines.append(" " + " ".join(names[j]
                                    for j in np.flatnonzero(model.integer)))
    lines.append("End")
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")
