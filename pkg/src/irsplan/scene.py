"""Scene model: region, receiver grids, buildings, candidate sites.

The working frame puts the base station on the x-y origin (scenario
coordinates are translated at build time; the offset is kept so exports
can translate back).  The region of interest is divided into square
grids of side ``grid_side``; grid ids are assigned row-major from the
northwest corner, with x growing eastward and y growing southward, so
grid 1 is centered at (x_min + grid_side/2, y_min + grid_side/2).

A candidate site is a ground point inside the region with a sorted set
of mounting heights and panel orientations.  A panel's boresight at
orientation 0 faces the base station; positive orientations rotate it
counter-clockwise about the vertical axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry
from .errors import SchemaError, ValidationError
from .metrics import CostParams, CoverageParams

# Grids must be large against the wavelength for the average-power
# closed forms to stand in for point statistics.
MIN_GRID_TO_WAVELENGTH = 10.0


@dataclass(frozen=True, eq=False)
class Building:
    box: geometry.Box


@dataclass(frozen=True, eq=False)
class GridCell:
    id: int
    center: np.ndarray  # (x, y, rx_height) in the working frame


@dataclass(frozen=True, eq=False)
class CandidateSite:
    id: int
    position: np.ndarray  # ground point (x, y, 0) in the working frame
    heights: tuple[float, ...]
    orientations: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class IrsConfig:
    """One discrete surface choice: tile count + state indices (1-based)."""

    site_id: int
    tiles: int
    height_index: int
    orient_index: int


@dataclass(frozen=True, eq=False)
class TracerParams:
    reflection_coeff: float = 0.6
    cull_threshold_db: float = 6.0
    beta_floor_dbm: float = -90.0


@dataclass(frozen=True, eq=False)
class Scene:
    region: tuple[float, float, float, float]  # x_min, y_min, x_max, y_max
    grid_side: float
    n_cols: int
    n_rows: int
    grids: tuple[GridCell, ...]
    buildings: tuple[Building, ...]
    bs_position: np.ndarray
    candidate_sites: tuple[CandidateSite, ...]
    wavelength: float
    element_spacing: float
    elements_per_tile_side: int
    max_tiles: int
    rx_height: float
    tx_power_dbm: float
    tracer: TracerParams
    frame_offset: tuple[float, float]  # add to working x,y to recover scenario coords

    @property
    def n_grids(self) -> int:
        return len(self.grids)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A parsed scenario document: geometry plus optimization targets."""

    scene: Scene
    cost_params: CostParams
    coverage_params: CoverageParams


def _need(document: dict, key: str, kind, what: str):
    if key not in document:
        raise SchemaError("scenario missing required key %r" % key)
    value = document[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError("scenario key %r must be %s" % (key, what))
    return value


def _sorted_set(values, what: str) -> tuple[float, ...]:
    if not isinstance(values, list) or not values:
        raise SchemaError("%s must be a non-empty list" % what)
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SchemaError("%s entries must be numbers" % what)
        out.append(float(v))
    ordered = tuple(sorted(out))
    for a, b in zip(ordered, ordered[1:]):
        if a == b:
            raise ValidationError("%s contains duplicate value %r" % (what, a))
    return ordered


def normal_vector(site: CandidateSite, orientation: float) -> np.ndarray:
    """Outward panel normal: the unit direction from the site toward the
    base station, rotated by ``orientation`` about the vertical axis."""
    w = site.position
    norm = math.hypot(float(w[0]), float(w[1]))
    if norm == 0.0:
        raise ValidationError("site %d sits on the base-station axis; "
                              "boresight undefined" % site.id)
    boresight = np.array([-w[0] / norm, -w[1] / norm, 0.0])
    return geometry.rotate_z(boresight, orientation)


def enumerate_configs(site: CandidateSite, max_tiles: int) -> list[IrsConfig]:
    """All (tiles, height, orientation) choices in lexicographic order."""
    if max_tiles < 1:
        raise ValidationError("max_tiles must be at least 1")
    return [IrsConfig(site.id, t, j, k)
            for t in range(1, max_tiles + 1)
            for j in range(1, len(site.heights) + 1)
            for k in range(1, len(site.orientations) + 1)]


def _grid_centers(region, grid_side: float, rx_height: float):
    x_min, y_min, x_max, y_max = region
    width, depth = x_max - x_min, y_max - y_min
    cols = width / grid_side
    rows = depth / grid_side
    n_cols, n_rows = round(cols), round(rows)
    if abs(cols - n_cols) > 1e-9 or abs(rows - n_rows) > 1e-9 or n_cols < 1 or n_rows < 1:
        raise ValidationError(
            "region %.6g x %.6g m does not divide evenly into %.6g m grids"
            % (width, depth, grid_side))
    cells = []
    gid = 1
    for r in range(n_rows):
        for c in range(n_cols):
            center = np.array([x_min + (c + 0.5) * grid_side,
                               y_min + (r + 0.5) * grid_side,
                               rx_height])
            cells.append(GridCell(gid, center))
            gid += 1
    return n_cols, n_rows, cells


def build_scene(document: dict) -> Scene:
    """Validate a scenario document and construct the Scene.

    Raises SchemaError for shape problems and ValidationError naming the
    first violated invariant.  Site entries may each carry their own
    ``heights_m``/``orientations_rad``; otherwise the global sets apply.
    ``"sites": "auto"`` selects candidates automatically from grid
    corners reachable from the base station.
    """
    region_doc = _need(document, "region", dict, "an object")
    for key in ("x_min", "y_min", "x_max", "y_max"):
        if key not in region_doc or not isinstance(region_doc[key], (int, float)):
            raise SchemaError("region needs numeric %r" % key)
    bs_doc = _need(document, "bs", dict, "an object")
    for key in ("x", "y", "z"):
        if key not in bs_doc or not isinstance(bs_doc[key], (int, float)):
            raise SchemaError("bs needs numeric %r" % key)

    grid_side = _need(document, "grid_side_m", float, "a number")
    wavelength = _need(document, "wavelength_m", float, "a number")
    spacing = _need(document, "element_spacing_m", float, "a number")
    elements = _need(document, "elements_per_tile_side", int, "an integer")
    max_tiles = _need(document, "max_tiles", int, "an integer")
    rx_height = _need(document, "rx_height_m", float, "a number")
    tx_power = _need(document, "tx_power_dbm", float, "a number")

    if grid_side <= 0.0 or wavelength <= 0.0 or spacing <= 0.0:
        raise ValidationError("grid_side_m, wavelength_m and element_spacing_m must be positive")
    ratio = grid_side / wavelength
    if ratio < MIN_GRID_TO_WAVELENGTH:
        raise ValidationError(
            "grid-to-wavelength ratio %.4f violates the requirement "
            "grid_side/wavelength >= %.0f" % (ratio, MIN_GRID_TO_WAVELENGTH))
    if elements < 1 or max_tiles < 1:
        raise ValidationError("elements_per_tile_side and max_tiles must be at least 1")
    if rx_height < 0.0:
        raise ValidationError("rx_height_m must be non-negative")

    heights = _sorted_set(_need(document, "heights_m", list, "a list"), "heights_m")
    orients = _sorted_set(_need(document, "orientations_rad", list, "a list"),
                          "orientations_rad")
    if heights[0] <= 0.0:
        raise ValidationError("mounting heights must be positive")

    # Shift everything into the base-station-centered working frame.
    off_x, off_y = float(bs_doc["x"]), float(bs_doc["y"])
    bs_z = float(bs_doc["z"])
    if bs_z <= 0.0:
        raise ValidationError("base-station height must be positive")
    region = (float(region_doc["x_min"]) - off_x, float(region_doc["y_min"]) - off_y,
              float(region_doc["x_max"]) - off_x, float(region_doc["y_max"]) - off_y)
    if region[0] >= region[2] or region[1] >= region[3]:
        raise ValidationError("region extent is empty")

    buildings = []
    for idx, b in enumerate(document.get("buildings", [])):
        if not isinstance(b, dict):
            raise SchemaError("buildings[%d] must be an object" % idx)
        for key in ("x_min", "x_max", "y_min", "y_max", "height"):
            if key not in b or not isinstance(b[key], (int, float)):
                raise SchemaError("buildings[%d] needs numeric %r" % (idx, key))
        box = geometry.Box(float(b["x_min"]) - off_x, float(b["x_max"]) - off_x,
                           float(b["y_min"]) - off_y, float(b["y_max"]) - off_y,
                           float(b["height"]))
        if box.x_min >= box.x_max or box.y_min >= box.y_max or box.height <= 0.0:
            raise ValidationError("buildings[%d] has an empty extent" % idx)
        buildings.append(Building(box))

    n_cols, n_rows, cells = _grid_centers(region, grid_side, rx_height)
    for cell in cells:
        cx, cy = float(cell.center[0]), float(cell.center[1])
        for idx, b in enumerate(buildings):
            if b.box.contains_xy(cx, cy):
                raise ValidationError(
                    "grid %d center (%.6g, %.6g) lies inside buildings[%d]; "
                    "receiver grids cannot sit inside a footprint"
                    % (cell.id, cx + off_x, cy + off_y, idx))

    tracer_doc = document.get("tracer", {})
    if not isinstance(tracer_doc, dict):
        raise SchemaError("tracer must be an object")
    tracer = TracerParams(
        reflection_coeff=float(tracer_doc.get("reflection_coeff", 0.6)),
        cull_threshold_db=float(tracer_doc.get("cull_threshold_db", 6.0)),
        beta_floor_dbm=float(tracer_doc.get("beta_floor_dbm", -90.0)),
    )
    if not (0.0 < tracer.reflection_coeff <= 1.0):
        raise ValidationError("reflection_coeff must lie in (0, 1]")
    if tracer.cull_threshold_db < 0.0:
        raise ValidationError("cull_threshold_db must be non-negative")

    def assemble(sites):
        return Scene(
            region=region, grid_side=grid_side, n_cols=n_cols, n_rows=n_rows,
            grids=tuple(cells), buildings=tuple(buildings),
            bs_position=np.array([0.0, 0.0, bs_z]),
            candidate_sites=tuple(sites), wavelength=wavelength,
            element_spacing=spacing, elements_per_tile_side=elements,
            max_tiles=max_tiles, rx_height=rx_height, tx_power_dbm=tx_power,
            tracer=tracer, frame_offset=(off_x, off_y),
        )

    sites_doc = document.get("sites")
    if sites_doc == "auto":
        sites = auto_select_candidates(assemble(()), heights, orients)
    elif isinstance(sites_doc, list):
        sites = []
        for idx, s in enumerate(sites_doc):
            if not isinstance(s, dict) or "x" not in s or "y" not in s:
                raise SchemaError("sites[%d] needs numeric 'x' and 'y'" % idx)
            pos = np.array([float(s["x"]) - off_x, float(s["y"]) - off_y, 0.0])
            site_h = _sorted_set(s["heights_m"], "sites[%d].heights_m" % idx) \
                if "heights_m" in s else heights
            site_o = _sorted_set(s["orientations_rad"], "sites[%d].orientations_rad" % idx) \
                if "orientations_rad" in s else orients
            sites.append(CandidateSite(idx + 1, pos, site_h, site_o))
    else:
        raise SchemaError("scenario key 'sites' must be a list or \"auto\"")

    for site in sites:
        x, y = float(site.position[0]), float(site.position[1])
        if not (region[0] <= x <= region[2] and region[1] <= y <= region[3]):
            raise ValidationError(
                "site %d at (%.6g, %.6g) lies outside the region of interest"
                % (site.id, x + off_x, y + off_y))
        if math.hypot(x, y) < 1e-9:
            raise ValidationError(
                "site %d coincides with the base-station ground position" % site.id)

    return assemble(sites)


def auto_select_candidates(scene: Scene, heights, orientations,
                           tracer=None) -> list[CandidateSite]:
    """Propose one candidate site per grid at the grid corner farthest
    from the base station, keeping it only when some (height,
    orientation) choice receives at least one front-face path from the
    base station.  Ids run 1..K in grid-id order."""
    from . import propagation  # local import: propagation depends on this module

    if tracer is None:
        tracer = propagation.trace_paths
    half = scene.grid_side / 2.0
    kept = []
    for cell in scene.grids:
        cx, cy = float(cell.center[0]), float(cell.center[1])
        corners = [(cx - half, cy - half), (cx + half, cy - half),
                   (cx - half, cy + half), (cx + half, cy + half)]
        # farthest from the base station; ties toward smaller x then y
        corners.sort(key=lambda c: (-(c[0] * c[0] + c[1] * c[1]), c[0], c[1]))
        x, y = corners[0]
        site = CandidateSite(0, np.array([x, y, 0.0]),
                             tuple(heights), tuple(orientations))
        usable = False
        for h in site.heights:
            paths = tracer(scene.bs_position, np.array([x, y, h]), scene)
            if not paths.paths:
                continue
            for theta in site.orientations:
                normal = normal_vector(site, theta)
                if propagation.half_space_filter(paths, normal, "incident").paths:
                    usable = True
                    break
            if usable:
                break
        if usable:
            kept.append(site)
    return [CandidateSite(idx + 1, s.position, s.heights, s.orientations)
            for idx, s in enumerate(kept)]


def load_scenario(source: str | Path | dict) -> Scenario:
    """Parse a scenario document (path or dict) into a Scenario."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise FileNotFoundError("scenario file not found: %s" % path)
        try:
            document = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError("scenario file %s is not valid JSON: %s" % (path, exc)) from None
    else:
        document = source
    if not isinstance(document, dict):
        raise SchemaError("scenario document must be a JSON object")
    scene = build_scene(document)
    cost_doc = _need(document, "cost", dict, "an object")
    for key in ("site", "tile"):
        if key not in cost_doc or not isinstance(cost_doc[key], (int, float)):
            raise SchemaError("cost needs numeric %r" % key)
    cost = CostParams(float(cost_doc["site"]), float(cost_doc["tile"]))
    p_min_dbm = _need(document, "p_min_dbm", float, "a number")
    eta0 = _need(document, "eta0", float, "a number")
    coverage = CoverageParams(10.0 ** (p_min_dbm / 10.0), eta0)
    return Scenario(scene=scene, cost_params=cost, coverage_params=coverage)
