import json
import math

import numpy as np
import pytest

from irsplan.errors import SchemaError, ValidationError
from irsplan.scene import (
    CandidateSite,
    build_scene,
    enumerate_configs,
    load_scenario,
    normal_vector,
)


def _doc(**over):
    doc = {
        "region": {"x_min": 100.0, "y_min": 50.0, "x_max": 130.0, "y_max": 70.0},
        "bs": {"x": 100.0, "y": 40.0, "z": 10.0},
        "grid_side_m": 10.0,
        "wavelength_m": 0.1,
        "element_spacing_m": 0.05,
        "elements_per_tile_side": 4,
        "max_tiles": 3,
        "rx_height_m": 1.5,
        "tx_power_dbm": 30.0,
        "heights_m": [6.0, 10.0],
        "orientations_rad": [-0.4, 0.0, 0.4],
        "sites": [{"x": 105.0, "y": 65.0}, {"x": 125.0, "y": 55.0}],
        "cost": {"site": 4.0, "tile": 1.0},
        "p_min_dbm": -50.0,
        "eta0": 0.8,
    }
    doc.update(over)
    return doc


def test_build_scene_happy_path():
    scene = build_scene(_doc())
    assert scene.n_grids == 6
    assert (scene.n_cols, scene.n_rows) == (3, 2)
    # working frame is base-station centered
    assert np.allclose(scene.bs_position, [0.0, 0.0, 10.0])
    assert scene.frame_offset == (100.0, 40.0)
    assert scene.region == (0.0, 10.0, 30.0, 30.0)
    # row-major numbering from the corner nearest (x_min, y_min)
    assert scene.grids[0].id == 1
    assert np.allclose(scene.grids[0].center, [5.0, 15.0, 1.5])
    assert np.allclose(scene.grids[3].center, [5.0, 25.0, 1.5])
    assert np.allclose(scene.grids[5].center, [25.0, 25.0, 1.5])
    # sites translated into the working frame, ids 1-based in input order
    assert [s.id for s in scene.candidate_sites] == [1, 2]
    assert np.allclose(scene.candidate_sites[0].position, [5.0, 25.0, 0.0])
    assert np.allclose(scene.candidate_sites[1].position, [25.0, 15.0, 0.0])


def test_heights_sorted_and_deduplicated():
    scene = build_scene(_doc(heights_m=[10.0, 6.0]))
    assert scene.candidate_sites[0].heights == (6.0, 10.0)
    with pytest.raises(ValidationError):
        build_scene(_doc(heights_m=[6.0, 6.0]))
    with pytest.raises(ValidationError):
        build_scene(_doc(heights_m=[-1.0, 6.0]))


def test_missing_and_mistyped_keys():
    doc = _doc()
    del doc["grid_side_m"]
    with pytest.raises(SchemaError):
        build_scene(doc)
    with pytest.raises(SchemaError):
        build_scene(_doc(grid_side_m=True))
    with pytest.raises(SchemaError):
        build_scene(_doc(heights_m="tall"))
    with pytest.raises(SchemaError):
        build_scene(_doc(sites="everywhere"))


def test_grid_wavelength_ratio_enforced():
    with pytest.raises(ValidationError) as exc:
        build_scene(_doc(grid_side_m=0.5, region={
            "x_min": 100.0, "y_min": 50.0, "x_max": 101.0, "y_max": 51.0,
        }, sites=[{"x": 100.9, "y": 50.9}]))
    assert "grid_side/wavelength" in str(exc.value)


def test_region_must_divide_into_grids():
    with pytest.raises(ValidationError):
        build_scene(_doc(grid_side_m=7.0))


def test_building_validation():
    ok = _doc(buildings=[{"x_min": 111.0, "x_max": 114.0,
                          "y_min": 51.0, "y_max": 54.0, "height": 8.0}])
    scene = build_scene(ok)
    assert len(scene.buildings) == 1
    # translated into the working frame
    assert scene.buildings[0].box.x_min == pytest.approx(11.0)
    # a grid center inside a footprint is rejected
    bad = _doc(buildings=[{"x_min": 103.0, "x_max": 108.0,
                           "y_min": 53.0, "y_max": 58.0, "height": 8.0}])
    with pytest.raises(ValidationError):
        build_scene(bad)
    with pytest.raises(ValidationError):
        build_scene(_doc(buildings=[{"x_min": 111.0, "x_max": 111.0,
                                     "y_min": 51.0, "y_max": 54.0, "height": 8.0}]))


def test_site_placement_rules():
    with pytest.raises(ValidationError):
        build_scene(_doc(sites=[{"x": 95.0, "y": 55.0}]))
    # base station is outside the region here, so co-location cannot
    # happen through the region check; move it inside to provoke it
    doc = _doc(bs={"x": 115.0, "y": 60.0, "z": 10.0},
               sites=[{"x": 115.0, "y": 60.0}])
    with pytest.raises(ValidationError):
        build_scene(doc)


def test_per_site_overrides():
    doc = _doc(sites=[
        {"x": 105.0, "y": 65.0, "heights_m": [3.0], "orientations_rad": [0.1]},
        {"x": 125.0, "y": 55.0},
    ])
    scene = build_scene(doc)
    assert scene.candidate_sites[0].heights == (3.0,)
    assert scene.candidate_sites[0].orientations == (0.1,)
    assert scene.candidate_sites[1].heights == (6.0, 10.0)


def test_normal_vector_boresight_and_rotation():
    site = CandidateSite(1, np.array([0.0, 10.0, 0.0]), (6.0,), (0.0,))
    # orientation 0 points straight back at the base station
    assert np.allclose(normal_vector(site, 0.0), [0.0, -1.0, 0.0])
    got = normal_vector(site, math.pi / 2)
    assert np.allclose(got, [1.0, 0.0, 0.0], atol=1e-12)
    on_axis = CandidateSite(2, np.array([0.0, 0.0, 0.0]), (6.0,), (0.0,))
    with pytest.raises(ValidationError):
        normal_vector(on_axis, 0.0)


def test_enumerate_configs_order():
    site = CandidateSite(3, np.array([1.0, 2.0, 0.0]), (6.0, 10.0), (-0.4, 0.0))
    configs = enumerate_configs(site, 2)
    assert len(configs) == 2 * 2 * 2
    first = configs[0]
    assert (first.tiles, first.height_index, first.orient_index) == (1, 1, 1)
    # tiles vary slowest, orientation fastest
    keys = [(c.tiles, c.height_index, c.orient_index) for c in configs]
    assert keys == sorted(keys)
    assert all(c.site_id == 3 for c in configs)
    with pytest.raises(ValidationError):
        enumerate_configs(site, 0)


def test_tracer_defaults_and_validation():
    scene = build_scene(_doc())
    assert scene.tracer.reflection_coeff == 0.6
    assert scene.tracer.cull_threshold_db == 6.0
    assert scene.tracer.beta_floor_dbm == -90.0
    with pytest.raises(ValidationError):
        build_scene(_doc(tracer={"reflection_coeff": 1.5}))
    with pytest.raises(ValidationError):
        build_scene(_doc(tracer={"cull_threshold_db": -1.0}))


def test_auto_candidate_selection():
    scene = build_scene(_doc(sites="auto"))
    # open ground: every grid contributes one reachable candidate
    assert len(scene.candidate_sites) == 6
    assert [s.id for s in scene.candidate_sites] == list(range(1, 7))
    # the candidate sits on the grid corner farthest from the base station
    assert np.allclose(scene.candidate_sites[0].position, [10.0, 20.0, 0.0])
    for site in scene.candidate_sites:
        x, y = float(site.position[0]), float(site.position[1])
        assert scene.region[0] <= x <= scene.region[2]
        assert scene.region[1] <= y <= scene.region[3]


def test_load_scenario_dict_and_file(tmp_path):
    scenario = load_scenario(_doc())
    assert scenario.scene.n_grids == 6
    assert scenario.cost_params.site_cost == 4.0
    assert scenario.cost_params.tile_cost == 1.0
    assert scenario.coverage_params.p_min_mw == pytest.approx(1e-5)
    assert scenario.coverage_params.target_rate == 0.8

    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_doc()))
    from_file = load_scenario(path)
    assert from_file.scene.n_grids == 6

    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_scenario(bad)
    with pytest.raises(SchemaError):
        load_scenario([1, 2, 3])


def test_load_scenario_requires_targets():
    doc = _doc()
    del doc["cost"]
    with pytest.raises(SchemaError):
        load_scenario(doc)
    doc = _doc()
    del doc["eta0"]
    with pytest.raises(SchemaError):
        load_scenario(doc)
