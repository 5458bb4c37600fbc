"""Deployment planning for passive reflecting surfaces.

Given a scene (base station, buildings, receiver grids, candidate
mounting sites), the package traces multipath channel tables and then
selects sites, mounting heights, panel orientations and tile counts
that meet a coverage-rate target at minimum cost.  Two planners are
provided: a provably optimal branch-and-bound search and a three-step
successive-refinement pipeline, plus fixed-state and max-tile
baselines.
"""

from .errors import (ConfigError, KnowledgeFormatError, PlannerError,
                     SchemaError, ValidationError)
from .heuristics import (build_context, fixed_state_baseline,
                         max_tile_baseline, successive_refinement)
from .knowledge import ChannelKnowledge, load_knowledge, save_knowledge
from .metrics import (CostParams, CoverageParams, DeploymentSolution,
                      Placement, coverage_rate, deployment_cost,
                      effective_power, evaluate_solution)
from .milp import branch_and_bound, build_p1, build_p21, solve_deployment
from .propagation import generate_knowledge, trace_paths
from .scene import Scenario, Scene, build_scene, load_scenario

__version__ = "0.1.0"

__all__ = [
    "ChannelKnowledge", "ConfigError", "CostParams", "CoverageParams",
    "DeploymentSolution", "KnowledgeFormatError", "Placement", "PlannerError",
    "Scenario", "Scene", "SchemaError", "ValidationError",
    "branch_and_bound", "build_context", "build_p1", "build_p21",
    "build_scene", "coverage_rate", "deployment_cost", "effective_power",
    "evaluate_solution", "fixed_state_baseline", "generate_knowledge",
    "load_knowledge", "load_scenario", "max_tile_baseline",
    "save_knowledge", "solve_deployment", "successive_refinement",
    "trace_paths", "__version__",
]
