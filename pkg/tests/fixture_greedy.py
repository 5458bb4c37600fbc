"""Hand-simulated greedy fixtures.

Both fixtures were executed by hand against the documented greedy
rules; the expected placements below are transcriptions of that manual
run, not of any program output.  Every number is chosen so each
comparison in the walk-through clears its threshold by a wide margin.

Fixture A (three sites, six grids, every grid must be covered):
every grid starts at power 0.5 against a threshold of 1.0, one element
per tile (so a t-tile placement adds t^2 * coupling), two tiles max.

  site 1 couplings   (1,1): 0.5 on grids 1-3
                     (1,2): 0.2 on grids 1-4
                     (2,1): 0.5 on grids 1-2
                     (2,2): 0.1 on grids 1-6
  site 2 couplings   (1,1): 0.5 on grids 4-5; other states 0.01 everywhere
  site 3 couplings   (1,1): 0.5 on grids 5-6
                     (1,2): 0.13 on grids 4-6; other states 0.01 everywhere

Manual walk-through (need = 6):

* Round 1, no site reaches 6 alone.  Site 1: two tiles on state (1,2)
  add 0.8 to grids 1-4, covering four grids; one tile covers at most
  three (state (1,1) reaches exactly 1.0 on grids 1-3), so the cheapest
  count attaining the best coverage is two tiles, state (1,2).  Site 2
  covers two grids (state (1,1), one tile).  Site 3: two tiles on
  (1,2) add 0.52 to grids 4-6, covering three; one tile covers two.
  Counts (4, 2, 3) pick site 1: tiles 2, state (1, 2).
* Round 2, grids 1-4 now sit at 1.3.  Site 3 with one tile on (1,1)
  lifts grids 5 and 6 to exactly 1.0, covering all six: it reaches the
  target with the fewest tiles (site 2 tops out at five grids covered).
  At one tile state (1,1) covers six while (1,2) covers four, so the
  chosen state is (1,1).  Placed: site 3, tiles 1, state (1, 1).

Expected deployment order: site 1 then site 3; site 2 unused.

Fixture B (swap pass): four grids at 0.5, threshold 1.0, need 4.
Site 1 adds 0.25 to grids 1-3 per squared tile (two tiles cover three
grids, one covers none), site 2 adds 0.5 to grids 1-2, site 3 adds 0.5
to grids 3-4.  Greedy places site 1 (count 3 beats 2) with two tiles,
then site 3 reaches all four.  The swap pass then finds that with site
3 kept, site 2 covers grids 1-2 with a single tile, strictly cheaper
than site 1's two tiles, and swaps 1 -> 2.
"""

from __future__ import annotations

import numpy as np

from irsplan.knowledge import ChannelKnowledge
from irsplan.metrics import CostParams, CoverageParams, Placement
from irsplan.scene import CandidateSite, GridCell, Scenario, Scene, TracerParams


def _scene(n_grids: int, n_sites: int, max_tiles: int) -> Scene:
    side = 10.0
    cells = tuple(GridCell(g + 1, np.array([(g + 0.5) * side, 5.0, 1.5]))
                  for g in range(n_grids))
    sites = tuple(
        CandidateSite(i + 1, np.array([10.0 * i + 5.0, -10.0, 0.0]),
                      (6.0, 10.0), (-0.5, 0.0))
        for i in range(n_sites))
    return Scene(
        region=(0.0, 0.0, n_grids * side, side), grid_side=side,
        n_cols=n_grids, n_rows=1, grids=cells, buildings=(),
        bs_position=np.array([0.0, 0.0, 25.0]), candidate_sites=sites,
        wavelength=0.1, element_spacing=0.05, elements_per_tile_side=1,
        max_tiles=max_tiles, rx_height=1.5, tx_power_dbm=30.0,
        tracer=TracerParams(), frame_offset=(0.0, 0.0))


def _knowledge(n_grids: int, couplings: dict) -> ChannelKnowledge:
    know = ChannelKnowledge()
    for g in range(1, n_grids + 1):
        know.direct[g] = (0.5, 1)
    for (i, j, k), per_grid in couplings.items():
        know.irs_incident[(i, j, k)] = (1.0, 1)
        for g, value in per_grid.items():
            know.irs_departing[(i, j, k, g)] = (value, 1)
    return know


def greedy_fixture():
    """Fixture A: returns (knowledge, scenario, expected order, expected
    placements)."""
    scene = _scene(n_grids=6, n_sites=3, max_tiles=2)
    tiny = {g: 0.01 for g in range(1, 7)}
    couplings = {
        (1, 1, 1): {1: 0.5, 2: 0.5, 3: 0.5},
        (1, 1, 2): {1: 0.2, 2: 0.2, 3: 0.2, 4: 0.2},
        (1, 2, 1): {1: 0.5, 2: 0.5},
        (1, 2, 2): {g: 0.1 for g in range(1, 7)},
        (2, 1, 1): {4: 0.5, 5: 0.5},
        (2, 1, 2): dict(tiny),
        (2, 2, 1): dict(tiny),
        (2, 2, 2): dict(tiny),
        (3, 1, 1): {5: 0.5, 6: 0.5},
        (3, 1, 2): {4: 0.13, 5: 0.13, 6: 0.13},
        (3, 2, 1): dict(tiny),
        (3, 2, 2): dict(tiny),
    }
    knowledge = _knowledge(6, couplings)
    scenario = Scenario(scene=scene,
                        cost_params=CostParams(4.0, 1.0),
                        coverage_params=CoverageParams(1.0, 1.0))
    expected_order = [1, 3]
    expected = {
        1: Placement(height_index=1, orient_index=2, tiles=2),
        3: Placement(height_index=1, orient_index=1, tiles=1),
    }
    return knowledge, scenario, expected_order, expected


def swap_fixture():
    """Fixture B: returns (knowledge, scenario, expected greedy
    placements, expected placements after the swap pass)."""
    scene = _scene(n_grids=4, n_sites=3, max_tiles=2)
    couplings = {
        (1, 1, 1): {1: 0.25, 2: 0.25, 3: 0.25},
        (2, 1, 1): {1: 0.5, 2: 0.5},
        (3, 1, 1): {3: 0.5, 4: 0.5},
    }
    knowledge = _knowledge(4, couplings)
    scenario = Scenario(scene=scene,
                        cost_params=CostParams(4.0, 1.0),
                        coverage_params=CoverageParams(1.0, 1.0))
    greedy_expected = {
        1: Placement(height_index=1, orient_index=1, tiles=2),
        3: Placement(height_index=1, orient_index=1, tiles=1),
    }
    swapped_expected = {
        2: Placement(height_index=1, orient_index=1, tiles=1),
        3: Placement(height_index=1, orient_index=1, tiles=1),
    }
    return knowledge, scenario, greedy_expected, swapped_expected
