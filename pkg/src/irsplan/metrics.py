"""Deployment cost, per-grid effective power, and coverage accounting.

A deployment maps candidate-site ids to a placement (height index,
orientation index, tile count).  Its cost is a per-site use charge plus
a per-tile hardware charge.  A grid counts as covered when its
effective power (direct power plus every deployed surface's cascaded
contribution) reaches the threshold, with equality counting as covered.
All sums run in a canonical order (ascending site id) so that every
code path that recomputes a power obtains bit-identical floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import cascaded_gain, kappa
from .errors import ValidationError
from .knowledge import ChannelKnowledge


@dataclass(frozen=True)
class CostParams:
    """Per-site use cost and per-tile hardware cost."""

    site_cost: float
    tile_cost: float

    def __post_init__(self):
        if self.site_cost < 0.0 or self.tile_cost < 0.0:
            raise ValidationError("cost coefficients must be non-negative")
        if self.site_cost == 0.0 and self.tile_cost == 0.0:
            raise ValidationError("at least one cost coefficient must be positive")


@dataclass(frozen=True)
class CoverageParams:
    """Coverage threshold (linear mW) and target coverage rate."""

    p_min_mw: float
    target_rate: float

    def __post_init__(self):
        if self.p_min_mw <= 0.0:
            raise ValidationError("coverage threshold must be positive")
        if not (0.0 < self.target_rate <= 1.0):
            raise ValidationError("target coverage rate must lie in (0, 1]")


@dataclass(frozen=True)
class Placement:
    """One deployed surface: 1-based height/orientation indices, tiles."""

    height_index: int
    orient_index: int
    tiles: int

    def __post_init__(self):
        if self.height_index < 1 or self.orient_index < 1:
            raise ValidationError("placement indices are 1-based")
        if self.tiles < 1:
            raise ValidationError("a placement uses at least one tile")


@dataclass(eq=False)
class DeploymentSolution:
    """A deployment plus its recomputed cost/power/coverage summary."""

    placements: dict[int, Placement]
    cost_total: float
    cost_site_use: float
    cost_hardware: float
    per_grid_power: dict[int, float]
    coverage_rate: float
    status: str = "feasible"
    proven: bool = False
    provenance: str = ""
    node_count: int | None = None


def required_covered(target_rate: float, n_grids: int) -> int:
    """Smallest covered-grid count meeting the target rate."""
    return max(0, math.ceil(target_rate * n_grids - 1e-9))


def deployment_cost(placements: dict[int, Placement], params: CostParams) -> float:
    """Total cost: site_cost * |sites| + tile_cost * total tiles."""
    tiles = sum(p.tiles for p in placements.values())
    return params.site_cost * len(placements) + params.tile_cost * tiles


def _site_coupling(knowledge: ChannelKnowledge, i: int, j: int, k: int, n: int) -> float:
    incident = knowledge.irs_incident.get((i, j, k))
    departing = knowledge.irs_departing.get((i, j, k, n))
    if incident is None or departing is None:
        return 0.0
    return kappa(incident, departing)


def effective_power(grid_id: int, placements: dict[int, Placement],
                    knowledge: ChannelKnowledge, elements_sq: int) -> float:
    """Direct power plus every placement's cascaded contribution (mW)."""
    if grid_id not in knowledge.direct:
        raise ValidationError("unknown grid id %d" % grid_id)
    power = knowledge.direct[grid_id][0]
    for i in sorted(placements):
        p = placements[i]
        coupling = _site_coupling(knowledge, i, p.height_index, p.orient_index, grid_id)
        power += cascaded_gain(p.tiles, elements_sq, coupling)
    return power


def covered_count(placements: dict[int, Placement], knowledge: ChannelKnowledge,
                  params: CoverageParams, elements_sq: int) -> int:
    count = 0
    for n in sorted(knowledge.direct):
        if effective_power(n, placements, knowledge, elements_sq) >= params.p_min_mw:
            count += 1
    return count


def coverage_rate(placements: dict[int, Placement], knowledge: ChannelKnowledge,
                  params: CoverageParams, elements_sq: int) -> float:
    """Fraction of grids at or above the threshold (equality covers)."""
    n = knowledge.n_grids
    if n == 0:
        raise ValidationError("knowledge has no grids")
    return covered_count(placements, knowledge, params, elements_sq) / n


def beta_vector(knowledge: ChannelKnowledge) -> np.ndarray:
    """Direct powers as an array indexed by grid id - 1."""
    n = knowledge.n_grids
    out = np.empty(n)
    for gid in range(1, n + 1):
        out[gid - 1] = knowledge.direct[gid][0]
    return out


def coupling_vector(knowledge: ChannelKnowledge, i: int, j: int, k: int) -> np.ndarray | None:
    """Per-grid coupling of one site state, or None if the state has no
    usable incident link (contributes nothing anywhere)."""
    incident = knowledge.irs_incident.get((i, j, k))
    if incident is None:
        return None
    n = knowledge.n_grids
    out = np.zeros(n)
    any_entry = False
    for (si, sj, sk, gid), departing in knowledge.irs_departing.items():
        if (si, sj, sk) == (i, j, k):
            out[gid - 1] = kappa(incident, departing)
            any_entry = True
    return out if any_entry else None


def feasibility_bounds(knowledge: ChannelKnowledge, scene,
                       params: CoverageParams) -> tuple[float, float]:
    """(coverage with nothing deployed, optimistic best-case coverage).

    The upper bound lets every site run the per-grid best state at the
    maximum tile count simultaneously, which dominates every real
    deployment, so no feasible placement can exceed it.
    """
    n = knowledge.n_grids
    if n == 0:
        raise ValidationError("knowledge has no grids")
    elements_sq = scene.elements_per_tile_side ** 2
    beta = beta_vector(knowledge)
    low = int(np.count_nonzero(beta >= params.p_min_mw))

    best = beta.copy()
    for site in scene.candidate_sites:
        per_grid = np.zeros(n)
        for j in range(1, len(site.heights) + 1):
            for k in range(1, len(site.orientations) + 1):
                vec = coupling_vector(knowledge, site.id, j, k)
                if vec is not None:
                    np.maximum(per_grid, vec, out=per_grid)
        best += cascaded_gain(scene.max_tiles, elements_sq, 1.0) * per_grid
    high = int(np.count_nonzero(best >= params.p_min_mw))
    return low / n, high / n


def check_feasibility(params: CoverageParams, bounds: tuple[float, float],
                      n_grids: int) -> str:
    """'trivial' if no deployment is needed, 'infeasible' if even the
    optimistic bound misses the target, else 'feasible_band'."""
    need = required_covered(params.target_rate, n_grids)
    low = round(bounds[0] * n_grids)
    high = round(bounds[1] * n_grids)
    if need <= low:
        return "trivial"
    if need > high:
        return "infeasible"
    return "feasible_band"


def evaluate_solution(placements: dict[int, Placement], knowledge: ChannelKnowledge,
                      scene, cost_params: CostParams, coverage_params: CoverageParams,
                      status: str = "feasible", proven: bool = False,
                      provenance: str = "") -> DeploymentSolution:
    """Build a DeploymentSolution by recomputing everything from the
    tables (the cached fields always equal a fresh recomputation)."""
    elements_sq = scene.elements_per_tile_side ** 2
    per_grid = {n: effective_power(n, placements, knowledge, elements_sq)
                for n in sorted(knowledge.direct)}
    covered = sum(1 for p in per_grid.values() if p >= coverage_params.p_min_mw)
    tiles = sum(p.tiles for p in placements.values())
    return DeploymentSolution(
        placements=dict(sorted(placements.items())),
        cost_total=deployment_cost(placements, cost_params),
        cost_site_use=cost_params.site_cost * len(placements),
        cost_hardware=cost_params.tile_cost * tiles,
        per_grid_power=per_grid,
        coverage_rate=covered / len(per_grid),
        status=status,
        proven=proven,
        provenance=provenance,
    )
