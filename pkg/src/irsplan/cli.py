"""Command-line planner: trace channel tables, solve deployments,
export coverage maps, and compare algorithms.

Exit codes: 0 solved (or nothing to deploy), 2 infeasible, 3 timed out,
64 unknown algorithm, 65 malformed scenario/knowledge, 66 missing file.
Set IRSPLAN_LOG=DEBUG (or any level name) for diagnostics on stderr.
All outputs are deterministic: rerunning a command byte-identically
reproduces its files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, heuristics, milp, propagation
from .errors import (ConfigError, KnowledgeFormatError, SchemaError,
                     ValidationError)
from .knowledge import TABLE_FILES, load_knowledge, save_knowledge
from .metrics import Placement, required_covered
from .scene import load_scenario
from .units import mw_to_dbm

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_TIMEOUT = 3
EXIT_UNKNOWN_ALGORITHM = 64
EXIT_BAD_INPUT = 65
EXIT_MISSING_FILE = 66

ALGORITHMS = ("bb", "refine", "fixed-state", "max-tile")


def _configure_logging() -> None:
    level_name = os.environ.get("IRSPLAN_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsplan",
        description="Plan reflecting-surface deployments: pick sites, "
                    "mounting heights, orientations and tile counts that "
                    "meet a coverage target at minimum cost.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, metavar="FILE",
                        help="scenario JSON file")
    common.add_argument("--knowledge", default=None, metavar="DIR",
                        help="load channel tables from DIR instead of tracing")
    common.add_argument("--seed", type=int, default=0,
                        help="recorded in provenance; the pipeline is "
                             "deterministic and does not draw random numbers")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; computation is "
                             "single-threaded")

    p_trace = sub.add_parser("trace", parents=[common],
                             help="trace paths and write channel tables")
    p_trace.add_argument("--out", required=True, metavar="DIR",
                         help="directory for the three CSV tables")

    p_solve = sub.add_parser("solve", parents=[common],
                             help="compute a deployment plan")
    p_solve.add_argument("--algorithm", default="bb", metavar="NAME",
                         help="one of: %s" % ", ".join(ALGORITHMS))
    p_solve.add_argument("--out", default=".", metavar="DIR",
                         help="directory for solution.json and report.json")
    p_solve.add_argument("--time-limit", type=float, default=None,
                         metavar="SECONDS")
    p_solve.add_argument("--dump-lp", default=None, metavar="FILE",
                         help="write the exact model in LP text format")

    p_map = sub.add_parser("map", parents=[common],
                           help="per-grid power map for a saved solution")
    p_map.add_argument("--solution", required=True, metavar="FILE")
    p_map.add_argument("--out", required=True, metavar="FILE",
                       help="output CSV path")

    p_cmp = sub.add_parser("compare", parents=[common],
                           help="run all algorithms over a coverage sweep")
    p_cmp.add_argument("--out", required=True, metavar="DIR",
                       help="directory for compare.csv")
    p_cmp.add_argument("--eta-sweep", default=None, metavar="LIST",
                       help="comma-separated coverage targets "
                            "(default: the scenario's)")
    p_cmp.add_argument("--time-limit", type=float, default=None,
                       metavar="SECONDS")
    return parser


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_tables(args, scenario):
    """Knowledge from --knowledge DIR, or traced on the fly."""
    if args.knowledge is None:
        logger.info("tracing channel tables for %s", args.scenario)
        return propagation.generate_knowledge(scenario.scene)
    directory = Path(args.knowledge)
    for name in TABLE_FILES:
        if not (directory / name).is_file():
            raise FileNotFoundError("knowledge table not found: %s"
                                    % (directory / name))
    knowledge = load_knowledge(directory)
    if knowledge.n_grids != scenario.scene.n_grids:
        raise ValidationError(
            "knowledge covers %d grids but the scenario defines %d"
            % (knowledge.n_grids, scenario.scene.n_grids))
    return knowledge


def _provenance(args, extra: dict) -> dict:
    payload = {
        "package": "irsplan",
        "version": __version__,
        "command": args.command,
        "scenario_sha256": _sha256(Path(args.scenario)),
        "seed": args.seed,
        "threads": args.threads,
    }
    payload.update(extra)
    return payload


def _solution_payload(solution, scenario, algorithm: str) -> dict:
    scene = scenario.scene
    off_x, off_y = scene.frame_offset
    sites = {s.id: s for s in scene.candidate_sites}
    placements = []
    for site_id in sorted(solution.placements):
        p = solution.placements[site_id]
        site = sites[site_id]
        placements.append({
            "site_id": site_id,
            "x": float(site.position[0]) + off_x,
            "y": float(site.position[1]) + off_y,
            "height_index": p.height_index,
            "height_m": site.heights[p.height_index - 1],
            "orient_index": p.orient_index,
            "orientation_rad": site.orientations[p.orient_index - 1],
            "tiles": p.tiles,
        })
    return {
        "algorithm": algorithm,
        "status": solution.status,
        "proven": solution.proven,
        "provenance": solution.provenance,
        "cost_total": solution.cost_total,
        "cost_site_use": solution.cost_site_use,
        "cost_hardware": solution.cost_hardware,
        "coverage_rate": solution.coverage_rate,
        "target_rate": scenario.coverage_params.target_rate,
        "p_min_dbm": mw_to_dbm(scenario.coverage_params.p_min_mw),
        "placements": placements,
    }


def _grid_rows(solution, scenario, knowledge):
    scene = scenario.scene
    off_x, off_y = scene.frame_offset
    p_min = scenario.coverage_params.p_min_mw
    rows = []
    for cell in scene.grids:
        power = solution.per_grid_power[cell.id]
        rows.append({
            "grid_id": cell.id,
            "x": float(cell.center[0]) + off_x,
            "y": float(cell.center[1]) + off_y,
            "beta_dbm": mw_to_dbm(knowledge.direct[cell.id][0]),
            "effective_dbm": mw_to_dbm(power),
            "covered": power >= p_min,
        })
    return rows


def _run_algorithm(name: str, knowledge, scenario, time_limit, dump_lp=None):
    scene = scenario.scene
    cost, coverage = scenario.cost_params, scenario.coverage_params
    if name == "bb":
        return milp.solve_deployment(knowledge, scene, cost, coverage,
                                     time_limit=time_limit, dump_lp=dump_lp)
    if name == "refine":
        return heuristics.successive_refinement(knowledge, scene, cost,
                                                coverage,
                                                time_limit=time_limit)
    if name == "fixed-state":
        return heuristics.fixed_state_baseline(knowledge, scene, cost,
                                               coverage,
                                               time_limit=time_limit)
    if name == "max-tile":
        return heuristics.max_tile_baseline(knowledge, scene, cost, coverage,
                                            time_limit=time_limit)
    raise KeyError(name)


def _status_exit(status: str) -> int:
    if status == "infeasible":
        return EXIT_INFEASIBLE
    if status == "timeout":
        return EXIT_TIMEOUT
    return EXIT_OK


def _cmd_trace(args) -> int:
    scenario = load_scenario(args.scenario)
    knowledge = propagation.generate_knowledge(scenario.scene)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_knowledge(knowledge, out)
    _write_json(out / "provenance.json", _provenance(args, {
        "tables": sorted(TABLE_FILES),
        "n_grids": knowledge.n_grids,
        "n_incident_states": len(knowledge.irs_incident),
        "n_departing_links": len(knowledge.irs_departing),
    }))
    print("wrote %d-grid channel tables to %s" % (knowledge.n_grids, out))
    return EXIT_OK


def _cmd_solve(args) -> int:
    if args.algorithm not in ALGORITHMS:
        print("unknown algorithm %r (expected one of: %s)"
              % (args.algorithm, ", ".join(ALGORITHMS)), file=sys.stderr)
        return EXIT_UNKNOWN_ALGORITHM
    scenario = load_scenario(args.scenario)
    knowledge = _load_tables(args, scenario)
    started = time.perf_counter()
    solution = _run_algorithm(args.algorithm, knowledge, scenario,
                              args.time_limit, dump_lp=args.dump_lp)
    wall_time = time.perf_counter() - started
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = _solution_payload(solution, scenario, args.algorithm)
    _write_json(out / "solution.json", payload)
    need = required_covered(scenario.coverage_params.target_rate,
                            scenario.scene.n_grids)
    report = {
        "algorithm": args.algorithm,
        "status": solution.status,
        "wall_time_s": wall_time,
        "n_grids": scenario.scene.n_grids,
        "required_covered": need,
        "covered": sum(1 for row in _grid_rows(solution, scenario, knowledge)
                       if row["covered"]),
        "solution": payload,
    }
    if solution.node_count is not None:
        report["node_count"] = solution.node_count
    _write_json(out / "report.json", report)
    _write_json(out / "provenance.json", _provenance(args, {
        "algorithm": args.algorithm,
        "time_limit": args.time_limit,
        "knowledge_dir": args.knowledge,
    }))
    print("status=%s cost=%.6g coverage=%.6g sites=%d tiles=%d"
          % (solution.status, solution.cost_total, solution.coverage_rate,
             len(solution.placements),
             sum(p.tiles for p in solution.placements.values())))
    return _status_exit(solution.status)


def _cmd_map(args) -> int:
    scenario = load_scenario(args.scenario)
    knowledge = _load_tables(args, scenario)
    solution_path = Path(args.solution)
    if not solution_path.is_file():
        raise FileNotFoundError("solution file not found: %s" % solution_path)
    try:
        saved = json.loads(solution_path.read_text())
        placements = {int(entry["site_id"]): Placement(
            height_index=int(entry["height_index"]),
            orient_index=int(entry["orient_index"]),
            tiles=int(entry["tiles"]))
            for entry in saved["placements"]}
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError("solution file %s is malformed: %s"
                          % (solution_path, exc)) from None
    from .metrics import evaluate_solution
    solution = evaluate_solution(placements, knowledge, scenario.scene,
                                 scenario.cost_params,
                                 scenario.coverage_params)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["grid_id", "x", "y", "beta_dbm", "effective_dbm",
                         "covered"])
        for row in _grid_rows(solution, scenario, knowledge):
            writer.writerow([row["grid_id"], "%.6f" % row["x"],
                             "%.6f" % row["y"], "%.6f" % row["beta_dbm"],
                             "%.6f" % row["effective_dbm"],
                             int(row["covered"])])
    print("wrote %s" % out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    knowledge = _load_tables(args, scenario)
    if args.eta_sweep is None:
        sweep = [scenario.coverage_params.target_rate]
    else:
        try:
            sweep = [float(v) for v in args.eta_sweep.split(",") if v.strip()]
        except ValueError:
            raise SchemaError("--eta-sweep must be a comma-separated list "
                              "of numbers, got %r" % args.eta_sweep) from None
        if not sweep or any(not 0.0 <= v <= 1.0 for v in sweep):
            raise SchemaError("--eta-sweep values must lie in [0, 1]")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "compare.csv"
    with open(table, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["algorithm", "eta0", "cost", "coverage",
                         "wall_time_s", "status"])
        for eta0 in sweep:
            swept = replace(scenario,
                            coverage_params=replace(scenario.coverage_params,
                                                    target_rate=eta0))
            for name in ALGORITHMS:
                started = time.perf_counter()
                solution = _run_algorithm(name, knowledge, swept,
                                          args.time_limit)
                wall_time = time.perf_counter() - started
                writer.writerow([
                    name, "%.6g" % eta0,
                    "%.6g" % solution.cost_total,
                    "%.6g" % solution.coverage_rate,
                    "%.6f" % wall_time,
                    solution.status,
                ])
                logger.info("compare %s @ %.3g: %s cost %.6g", name, eta0,
                            solution.status, solution.cost_total)
    print("wrote %s" % table)
    return EXIT_OK


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"trace": _cmd_trace, "solve": _cmd_solve,
                "map": _cmd_map, "compare": _cmd_compare}
    try:
        return handlers[args.command](args)
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_MISSING_FILE
    except (SchemaError, ValidationError, ConfigError,
            KnowledgeFormatError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
