import math

import numpy as np
import pytest

from pdrmm.errors import ScenarioError
from pdrmm.imu_ingest import accel_magnitude
from pdrmm.map_model import RouteMap, distances_to_path, rectangle
from pdrmm.pdr_core import PdrConfig, StepDetectionParams, cumulative_heading, detect_steps, run_pdr
from pdrmm.walk_sim import WalkScenario, scenario_from_obj, simulate


def test_125m_rectangle(loop_rectangle):
    sim = simulate(WalkScenario(loop_rectangle))
    assert len(sim.truth) == 178
    assert sim.turn_schedule == (53, 89, 142)
    assert len(sim.stream) == sim.step_samples[-1] + 26


def test_deterministic(acceptance_scenario):
    a, b = simulate(acceptance_scenario), simulate(acceptance_scenario)
    assert a.stream.equals(b.stream, atol=0)
    assert a.truth == b.truth


def test_seed_changes_noise(acceptance_scenario):
    from dataclasses import replace

    a = simulate(acceptance_scenario)
    b = simulate(replace(acceptance_scenario, seed=8))
    assert not np.array_equal(a.stream.accel, b.stream.accel)


def test_truth_on_route(loop_rectangle, l_route):
    for route in (loop_rectangle, l_route):
        sim = simulate(WalkScenario(route))
        assert distances_to_path(sim.truth.xy(), route.polyline()).max() < 1e-9
        assert np.allclose(sim.truth.step_lengths[:5], 0.7)


def test_noise_free_peaks_match_steps(loop_rectangle):
    sim = simulate(WalkScenario(loop_rectangle))
    mag = accel_magnitude(sim.stream)
    steps = detect_steps(mag, sim.stream.t, StepDetectionParams())
    assert [s.sample_index for s in steps] == list(sim.step_samples)


def test_zero_noise_pdr_recovers_corners(grid_rectangle):
    sim = simulate(WalkScenario(grid_rectangle))
    traj = run_pdr(sim.stream, PdrConfig(phi0=sim.truth.origin.phi))
    assert len(traj) == len(sim.truth)
    for corner, k in zip(grid_rectangle.interior_corners, sim.turn_schedule):
        assert math.dist(corner, (traj.points[k - 1].x, traj.points[k - 1].y)) < 1e-3


def test_gyro_bias_drift():
    b = math.radians(0.5)
    sim = simulate(WalkScenario(RouteMap(((0, 0), (70, 0))), gyro_bias=b))
    phi = cumulative_heading(sim.stream.t, sim.stream.gyro[:, 2])
    assert phi[-1] == pytest.approx(b * sim.stream.t[-1], rel=1e-9)


def test_initial_bias_only_in_estimate(grid_rectangle):
    sim = simulate(WalkScenario(grid_rectangle, initial_heading_bias=0.2))
    assert sim.initial_heading_estimate == pytest.approx(sim.truth.origin.phi + 0.2)


def test_route_shorter_than_one_step():
    with pytest.raises(ScenarioError, match="shorter than one step"):
        simulate(WalkScenario(RouteMap(((0, 0), (0.3, 0)))))


@pytest.mark.parametrize(
    "kwargs",
    [{"cadence_hz": 0}, {"rate_hz": 5}, {"accel_noise_std": -1}, {"seed": -1}, {"step_len_m": math.nan}],
)
def test_scenario_validation(grid_rectangle, kwargs):
    with pytest.raises(ScenarioError):
        WalkScenario(grid_rectangle, **kwargs)


def test_scenario_from_obj_aliases():
    s = scenario_from_obj(
        {"route": {"corners": [[0, 0], [5, 0]]}, "initial_heading_bias_deg": 90, "seed": 3}
    )
    assert s.initial_heading_bias == pytest.approx(math.pi / 2)
    assert s.seed == 3 and not s.route.closed


@pytest.mark.parametrize(
    "obj, match",
    [
        ({}, "route"),
        ({"route": {"corners": [[0, 0]]}}, "route"),
        ({"route": {"corners": [[0, 0], [1, 0]]}, "speed": 2}, "speed"),
        ({"route": {"corners": [[0, 0], [1, 0]]}, "cadence_hz": "fast"}, "bad scenario value"),
    ],
)
def test_scenario_from_obj_errors(obj, match):
    with pytest.raises(ScenarioError, match=match):
        scenario_from_obj(obj)


def test_lock_records_derived(grid_rectangle):
    scen = WalkScenario(grid_rectangle, seed=4)
    lock = simulate(scen).lock(scen)
    assert lock["scenario"]["seed"] == 4
    assert lock["derived"]["n_steps"] == 60
    assert scenario_from_obj(lock["scenario"]) == scen
