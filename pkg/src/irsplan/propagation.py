"""Deterministic multipath tracing and channel-knowledge generation.

Paths are line-of-sight links plus single reflections off vertical
building walls (image method).  Each path carries a field amplitude
``wavelength / (4 pi length)`` scaled by the wall reflection coefficient
per bounce, the unfolded length, and arrival/departure directions
expressed as (elevation, azimuth) of the propagation direction.

The knowledge generator turns traced paths into the three lookup tables
the planners consume: grid direct powers, per-state incident powers at
a panel, and per-state panel-to-grid gains.  All averages are spatial
(over the grid square or over the panel elements), so the tables are
independent of the exact receiver point inside a grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import channel, geometry
from .knowledge import ChannelKnowledge
from .units import dbm_to_mw

logger = logging.getLogger(__name__)

_MIN_SEGMENT = 1e-9


@dataclass(frozen=True)
class Path:
    amplitude: float  # linear field gain; per-path power is amplitude**2
    length: float
    bounces: int
    elev_aoa: float
    azim_aoa: float
    elev_aod: float
    azim_aod: float


@dataclass(frozen=True)
class PathSet:
    paths: tuple[Path, ...]

    def __len__(self) -> int:
        return len(self.paths)


def path_phases(paths, wavelength: float) -> list[float]:
    """Carrier phase of each path at its endpoint: -2 pi length / lambda."""
    scale = -2.0 * math.pi / wavelength
    return [scale * p.length for p in paths]


def trace_paths(tx: np.ndarray, rx: np.ndarray, scene) -> PathSet:
    """All unblocked paths from tx to rx: the direct segment plus one
    specular bounce off every visible vertical wall.

    The result is deduplicated and sorted by (descending amplitude,
    length, bounces, angles), so it does not depend on the order the
    buildings were listed in.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    boxes = [b.box for b in scene.buildings]
    lam = scene.wavelength
    gamma = scene.tracer.reflection_coeff
    found: dict[tuple, Path] = {}

    def add(amplitude, length, bounces, aoa_dir, aod_dir):
        e_phi, e_theta = geometry.direction_angles(aoa_dir)
        d_phi, d_theta = geometry.direction_angles(aod_dir)
        key = (round(length, 9), bounces, round(e_phi, 9), round(e_theta, 9),
               round(d_phi, 9), round(d_theta, 9))
        if key not in found:
            found[key] = Path(amplitude, length, bounces,
                              e_phi, e_theta, d_phi, d_theta)

    span = rx - tx
    dist = float(np.linalg.norm(span))
    if dist < _MIN_SEGMENT:
        raise ValueError("trace endpoints coincide")
    if not geometry.segment_blocked(tx, rx, boxes):
        u = span / dist
        add(lam / (4.0 * math.pi * dist), dist, 0, u, u)

    for box in boxes:
        for wall in geometry.box_walls(box):
            hit = geometry.reflection_point(tx, rx, wall)
            if hit is None:
                continue
            if geometry.segment_blocked(tx, hit, boxes):
                continue
            if geometry.segment_blocked(hit, rx, boxes):
                continue
            d1 = float(np.linalg.norm(hit - tx))
            d2 = float(np.linalg.norm(rx - hit))
            if d1 < _MIN_SEGMENT or d2 < _MIN_SEGMENT:
                continue
            total = d1 + d2
            add(lam * gamma / (4.0 * math.pi * total), total, 1,
                (rx - hit) / d2, (hit - tx) / d1)

    ordered = sorted(found.values(),
                     key=lambda p: (-p.amplitude, p.length, p.bounces,
                                    p.elev_aoa, p.azim_aoa,
                                    p.elev_aod, p.azim_aod))
    return PathSet(tuple(ordered))


def half_space_filter(path_set: PathSet, normal: np.ndarray,
                      mode: str) -> PathSet:
    """Keep only paths interacting with the front face of a panel.

    ``mode`` is "incident" (arrival direction must point into the face)
    or "departing" (departure direction must leave from the face).
    Grazing paths are dropped.  ``normal`` must be a unit vector.
    """
    n = np.asarray(normal, dtype=float)
    if abs(float(np.linalg.norm(n)) - 1.0) > 1e-6:
        raise ValueError("panel normal must be a unit vector")
    if mode not in ("incident", "departing"):
        raise ValueError("mode must be 'incident' or 'departing'")
    kept = []
    for p in path_set.paths:
        if mode == "incident":
            u = geometry.angles_direction(p.elev_aoa, p.azim_aoa)
            side = -float(np.dot(u, n))
        else:
            u = geometry.angles_direction(p.elev_aod, p.azim_aod)
            side = float(np.dot(u, n))
        if side > 0.0:
            kept.append(p)
    return PathSet(tuple(kept))


def cull_paths(path_set: PathSet, threshold_db: float = 6.0) -> PathSet:
    """Drop paths more than threshold_db below the strongest one."""
    if threshold_db < 0.0:
        raise ValueError("cull threshold must be non-negative")
    if not path_set.paths:
        return path_set
    peak = max(p.amplitude * p.amplitude for p in path_set.paths)
    floor = peak * 10.0 ** (-threshold_db / 10.0)
    kept = tuple(p for p in path_set.paths if p.amplitude * p.amplitude >= floor)
    return PathSet(kept)


@dataclass(frozen=True)
class _PanelPath:
    """Arrival direction re-expressed in a panel's local frame."""

    amplitude: float
    elev_aoa: float
    azim_aoa: float


def _panel_frame_paths(paths, normal: np.ndarray) -> list[_PanelPath]:
    # Panel element axes: horizontal tangent (z cross normal) and vertical.
    t = np.array([-normal[1], normal[0], 0.0])
    out = []
    for p in paths:
        u = geometry.angles_direction(p.elev_aoa, p.azim_aoa)
        local = np.array([float(np.dot(u, normal)), float(np.dot(u, t)), u[2]])
        phi, theta = geometry.direction_angles(local)
        out.append(_PanelPath(p.amplitude, phi, theta))
    return out


def generate_knowledge(scene, tx_power_dbm: float | None = None) -> ChannelKnowledge:
    """Trace every link in the scene and build the three channel tables.

    Direct entries always exist; a fully blocked grid gets the tracer's
    power floor with a zero path count.  Incident and departing entries
    exist only for states whose front face sees at least one path after
    culling.  Panel-to-grid gains carry a factor 2 for the half-space
    re-radiation of a reflecting panel.
    """
    from . import scene as scene_mod  # local import: scene builds call back here

    p_tx = dbm_to_mw(scene.tx_power_dbm if tx_power_dbm is None else tx_power_dbm)
    lam = scene.wavelength
    side = scene.grid_side
    m = scene.elements_per_tile_side
    cull_db = scene.tracer.cull_threshold_db
    floor_mw = dbm_to_mw(scene.tracer.beta_floor_dbm)

    direct: dict[int, tuple[float, int]] = {}
    for cell in scene.grids:
        ps = cull_paths(trace_paths(scene.bs_position, cell.center, scene), cull_db)
        if ps.paths:
            gain = channel.exact_average_direct_gain(
                ps.paths, side, lam, path_phases(ps.paths, lam))
            # the floor doubles as the receiver noise floor
            direct[cell.id] = (max(p_tx * gain, floor_mw), len(ps.paths))
        else:
            direct[cell.id] = (floor_mw, 0)

    irs_incident: dict[tuple[int, int, int], tuple[float, int]] = {}
    irs_departing: dict[tuple[int, int, int, int], tuple[float, int]] = {}
    for site in scene.candidate_sites:
        for j, height in enumerate(site.heights, start=1):
            panel = np.array([site.position[0], site.position[1], height])
            incident_all = trace_paths(scene.bs_position, panel, scene)
            departing_all = {cell.id: trace_paths(panel, cell.center, scene)
                             for cell in scene.grids}
            for k, orientation in enumerate(site.orientations, start=1):
                normal = scene_mod.normal_vector(site, orientation)
                inc = cull_paths(half_space_filter(incident_all, normal, "incident"),
                                 cull_db)
                if inc.paths:
                    local = _panel_frame_paths(inc.paths, normal)
                    gain = channel.exact_average_incident_gain(
                        local, m, m, scene.element_spacing, lam,
                        path_phases(inc.paths, lam))
                    if gain > 0.0:
                        irs_incident[(site.id, j, k)] = \
                            (p_tx * gain, len(inc.paths))
                for cell in scene.grids:
                    dep = cull_paths(
                        half_space_filter(departing_all[cell.id], normal, "departing"),
                        cull_db)
                    if dep.paths:
                        gain = channel.exact_average_direct_gain(
                            dep.paths, side, lam, path_phases(dep.paths, lam))
                        if gain > 0.0:
                            irs_departing[(site.id, j, k, cell.id)] = \
                                (2.0 * gain, len(dep.paths))
            logger.debug("site %d height %d: %d incident, %d departing links",
                         site.id, j, len(incident_all),
                         sum(len(ps) for ps in departing_all.values()))

    logger.info("knowledge: %d grids, %d incident states, %d departing links",
                len(direct), len(irs_incident), len(irs_departing))
    return ChannelKnowledge(direct=direct, irs_incident=irs_incident,
                            irs_departing=irs_departing)
