"""Synthetic walks along a route and the IMU streams they would produce.

The walker starts at the route start facing along the first leg and takes
steps of fixed length, step k landing on the route at arc length k * L.
Every truth point is therefore exactly on the route. The true heading of a
step is the direction of its chord, so a step that cuts a corner carries an
intermediate heading.

Signals, with step k at t_k = k / cadence (rounded to the sample grid):

* accel: gravity + accel_peak * cos(2 pi cadence t) on the device z axis,
  one maximum per step, plus white noise on all three axes.
* gyro z: the true heading rate plus bias plus white noise. Each heading
  change between consecutive steps is a triangular rate pulse whose knots sit
  on sample times, so trapezoidal integration recovers it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ScenarioError, ValidationError
from .imu_ingest import SampleStream
from .map_model import RouteMap, point_at_distance, route_from_obj, segment_lengths
from .pdr_core import TrackPoint, Trajectory

GRAVITY = 9.81


@dataclass(frozen=True)
class WalkScenario:
    route: RouteMap
    cadence_hz: float = 2.0
    step_len_m: float = 0.7
    rate_hz: float = 100.0
    accel_peak: float = 3.0
    gyro_bias: float = 0.0
    gyro_noise_std: float = 0.0
    accel_noise_std: float = 0.0
    initial_heading_bias: float = 0.0
    seed: int = 0
    turn_transition_s: float = 1.0

    def __post_init__(self):
        for name in ("cadence_hz", "step_len_m", "rate_hz", "turn_transition_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ScenarioError(f"{name} must be positive, got {value}")
        for name in ("gyro_noise_std", "accel_noise_std"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ScenarioError(f"{name} must be non-negative, got {value}")
        if self.rate_hz < 4 * self.cadence_hz:
            raise ScenarioError("rate_hz must be at least 4x cadence_hz")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise ScenarioError(f"seed must be a non-negative integer, got {self.seed}")

    def to_json(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["route"] = self.route.to_json()
        return out


_DEGREE_ALIASES = {
    "initial_heading_bias_deg": "initial_heading_bias",
    "gyro_bias_deg_s": "gyro_bias",
}


def scenario_from_obj(obj, route: RouteMap | None = None) -> WalkScenario:
    """Build a scenario from parsed JSON.

    ``route`` may be given inline (``{"corners": ..., "closed": ...}``) or
    supplied by the caller. ``*_deg`` / ``*_deg_s`` aliases are accepted for
    the two angular fields.
    """
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    obj = dict(obj)
    for alias, name in _DEGREE_ALIASES.items():
        if alias in obj:
            if name in obj:
                raise ScenarioError(f"both {alias!r} and {name!r} given")
            obj[name] = math.radians(float(obj.pop(alias)))
    if "route" in obj:
        try:
            route = route_from_obj(obj.pop("route"))
        except ValidationError as exc:
            raise ScenarioError(f"field 'route': {exc}") from None
    if route is None:
        raise ScenarioError("scenario lacks field 'route'")
    known = {f.name for f in fields(WalkScenario)} - {"route"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ScenarioError(f"unknown scenario field(s): {', '.join(unknown)}")
    try:
        kwargs = {k: (int(v) if k == "seed" else float(v)) for k, v in obj.items()}
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario value: {exc}") from None
    return WalkScenario(route=route, **kwargs)


@dataclass(frozen=True)
class SimResult:
    stream: SampleStream
    truth: Trajectory
    turn_schedule: tuple[int, ...]
    step_samples: tuple[int, ...]
    initial_heading_estimate: float

    def lock(self, scenario: WalkScenario) -> dict:
        return {
            "scenario": scenario.to_json(),
            "derived": {
                "n_steps": len(self.truth),
                "n_samples": len(self.stream),
                "turn_schedule": list(self.turn_schedule),
                "origin": {
                    "x": self.truth.origin.x,
                    "y": self.truth.origin.y,
                    "phi0_true": self.truth.origin.phi,
                    "phi0_estimate": self.initial_heading_estimate,
                },
            },
        }


def _wrap(a: float) -> float:
    a = math.atan2(math.sin(a), math.cos(a))
    return math.pi if a == -math.pi else a


def truth_walk(route: RouteMap, step_len: float):
    """Per-step positions (N + 1, 2) including the start, unwrapped chord headings, turn steps."""
    poly = route.polyline()
    seg = segment_lengths(poly)
    total = float(seg.sum())
    n = int(math.floor(total / step_len + 1e-9))
    if n < 1:
        raise ScenarioError(f"route length {total:.6g} m is shorter than one step")
    pos = np.array([point_at_distance(poly, min(k * step_len, total)) for k in range(n + 1)])
    v = poly.vertices
    phi = np.empty(n + 1)
    phi[0] = math.atan2(v[1, 1] - v[0, 1], v[1, 0] - v[0, 0])
    for k in range(1, n + 1):
        dx, dy = pos[k] - pos[k - 1]
        phi[k] = phi[k - 1] + _wrap(math.atan2(dy, dx) - phi[k - 1])
    corner_s = np.cumsum(seg)[: len(route.interior_corners)]
    turns = tuple(int(math.floor(s / step_len + 1e-9)) for s in corner_s if s < n * step_len)
    return pos, phi, turns


def yaw_rate_profile(phi, step_samples, n_samples, rate_hz, transition_s) -> np.ndarray:
    """Triangular rate pulses realising each between-step heading change."""
    h = 1.0 / rate_hz
    omega = np.zeros(n_samples)
    bounds = [0, *step_samples]
    max_width = max(2, int(round(transition_s * rate_hz)))
    for k in range(1, len(phi)):
        delta = phi[k] - phi[k - 1]
        if delta == 0:
            continue
        lo, hi = bounds[k - 1], bounds[k]
        width = min(hi - lo, max_width)
        width -= width % 2
        if width < 2:
            raise ScenarioError("too few samples between steps to encode a turn")
        half = width // 2
        a = lo + (hi - lo - width) // 2
        peak = delta / (h * half)
        j = np.arange(width + 1)
        omega[a : a + width + 1] += peak * (1.0 - np.abs(j - half) / half)
    return omega


def simulate(scenario: WalkScenario) -> SimResult:
    s = scenario
    pos, phi, turns = truth_walk(s.route, s.step_len_m)
    n = len(phi) - 1
    per_step = s.rate_hz / s.cadence_hz
    step_samples = tuple(int(round(k * per_step)) for k in range(1, n + 1))
    n_samples = step_samples[-1] + int(round(0.5 * per_step)) + 1
    t = np.arange(n_samples) / s.rate_hz

    accel = np.zeros((n_samples, 3))
    accel[:, 2] = GRAVITY + s.accel_peak * np.cos(2 * math.pi * s.cadence_hz * t)
    gyro = np.zeros((n_samples, 3))
    gyro[:, 2] = yaw_rate_profile(phi, step_samples, n_samples, s.rate_hz, s.turn_transition_s)
    gyro[:, 2] += s.gyro_bias

    rng = np.random.default_rng(s.seed)
    accel_noise = rng.standard_normal((n_samples, 3))
    gyro_noise = rng.standard_normal((n_samples, 3))
    if s.accel_noise_std > 0:
        accel += s.accel_noise_std * accel_noise
    if s.gyro_noise_std > 0:
        gyro += s.gyro_noise_std * gyro_noise

    stream = SampleStream.from_arrays(t, accel, gyro, s.rate_hz)
    origin = TrackPoint(0, float(pos[0, 0]), float(pos[0, 1]), float(phi[0]))
    points = tuple(
        TrackPoint(k, float(pos[k, 0]), float(pos[k, 1]), float(phi[k])) for k in range(1, n + 1)
    )
    chords = tuple(float(c) for c in np.hypot(*np.diff(pos, axis=0).T))
    truth = Trajectory(origin, points, chords, "truth")
    return SimResult(stream, truth, turns, step_samples, float(phi[0] + s.initial_heading_bias))

