"""Step-and-heading pedestrian dead reckoning.

Steps are peaks of the (smoothed) acceleration magnitude, heading is the
integrated yaw rate sampled at each step, and positions advance by one step
length along the heading:

    x[k+1] = x[k] + l * cos(phi)
    y[k+1] = y[k] + l * sin(phi)

Heading is counterclockwise from the map x-axis, in radians, never wrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from .errors import ConfigError, EmptyTrajectoryError, ParameterError, RangeError
from .imu_ingest import SampleStream, accel_magnitude, default_window, detrend, smooth

AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class StepEvent:
    sample_index: int
    t: float
    peak_value: float


@dataclass(frozen=True)
class StepDetectionParams:
    min_peak: float = 10.8
    refractory: float = 0.3


def detect_steps(signal, t, params: StepDetectionParams = StepDetectionParams()) -> list[StepEvent]:
    """Local maxima at or above ``min_peak``, thinned by a refractory period.

    Candidates are visited in time order and kept only if the last accepted
    step is at least ``refractory`` seconds earlier. The first and last
    samples are never steps (no neighbour on one side); a flat-topped peak is
    reported at the middle of its plateau.
    """
    x = np.asarray(signal, dtype=float)
    t = np.asarray(t, dtype=float)
    if x.shape != t.shape:
        raise ParameterError(f"signal and time lengths differ ({len(x)} vs {len(t)})")
    if not params.refractory > 0:
        raise ParameterError("refractory must be positive")
    if len(x) < 3:
        return []
    candidates, _ = find_peaks(x, height=params.min_peak)
    events: list[StepEvent] = []
    for i in candidates:
        if events and t[i] - events[-1].t < params.refractory:
            continue
        events.append(StepEvent(int(i), float(t[i]), float(x[i])))
    return events


def cumulative_heading(t, rate) -> np.ndarray:
    """Trapezoidal running integral of ``rate`` over ``t``, starting at 0."""
    t = np.asarray(t, dtype=float)
    rate = np.asarray(rate, dtype=float)
    out = np.zeros(len(t))
    if len(t) > 1:
        out[1:] = np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(t))
    return out


def _antiderivative(t, rate, cum, tau: float) -> float:
    if tau < t[0] or tau > t[-1]:
        raise RangeError(f"time {tau} outside stream range [{t[0]}, {t[-1]}]")
    i = int(np.searchsorted(t, tau, side="right")) - 1
    if t[i] == tau:
        return float(cum[i])
    w = (tau - t[i]) / (t[i + 1] - t[i])
    rate_tau = rate[i] + w * (rate[i + 1] - rate[i])
    return float(cum[i] + 0.5 * (tau - t[i]) * (rate[i] + rate_tau))


def integrate_rate(t, rate, t_a: float, t_b: float) -> float:
    """Exact integral over [t_a, t_b] of the linear interpolant of ``rate``.

    At sample times this coincides with the trapezoidal rule, so integrals
    over adjacent intervals add up.
    """
    t = np.asarray(t, dtype=float)
    rate = np.asarray(rate, dtype=float)
    cum = cumulative_heading(t, rate)
    return _antiderivative(t, rate, cum, t_b) - _antiderivative(t, rate, cum, t_a)


@dataclass(frozen=True, eq=False)
class HeadingTrack:
    phi: np.ndarray
    phi0: float


def estimate_heading(
    stream: SampleStream,
    steps: Sequence[StepEvent],
    phi0: float,
    axis: str = "z",
    mode: str = "sample",
) -> HeadingTrack:
    """Per-step heading from the integrated yaw-rate channel.

    ``mode="sample"`` reads the heading at each step timestamp;
    ``mode="window"`` averages it over the samples since the previous step.
    """
    if not steps:
        raise ParameterError("no steps to estimate heading for")
    if axis not in AXES:
        raise ParameterError(f"unknown gyro axis {axis!r}")
    rate = stream.gyro[:, AXES[axis]]
    cum = cumulative_heading(stream.t, rate)
    if mode == "sample":
        phi = [phi0 + _antiderivative(stream.t, rate, cum, s.t) for s in steps]
    elif mode == "window":
        phi = []
        prev = 0
        for s in steps:
            if not 0 <= s.sample_index < len(stream):
                raise RangeError(f"step sample index {s.sample_index} outside stream")
            _antiderivative(stream.t, rate, cum, s.t)  # range check
            phi.append(phi0 + float(cum[prev : s.sample_index + 1].mean()))
            prev = s.sample_index
    else:
        raise ParameterError(f"unknown heading mode {mode!r}")
    return HeadingTrack(np.array(phi), float(phi0))


@dataclass(frozen=True)
class StepLengthModel:
    kind: str = "fixed"
    length: float = 0.7
    gain: float = 0.5
    axis: str = "z"

    def __post_init__(self):
        if self.kind not in ("fixed", "weinberg"):
            raise ConfigError(f"unknown step-length model {self.kind!r}")
        if self.kind == "fixed" and not self.length > 0:
            raise ParameterError(f"fixed step length must be positive, got {self.length}")
        if self.kind == "weinberg" and not self.gain > 0:
            raise ParameterError(f"Weinberg gain must be positive, got {self.gain}")

    @classmethod
    def parse(cls, text: str) -> StepLengthModel:
        """Parse ``fixed:<meters>`` or ``weinberg:<K>``."""
        kind, _, arg = text.partition(":")
        kind = kind.strip()
        if kind not in ("fixed", "weinberg"):
            raise ConfigError(f"unknown step-length model {kind!r}")
        try:
            value = float(arg) if arg else None
        except ValueError:
            raise ConfigError(f"bad step-length parameter {arg!r}") from None
        if kind == "fixed":
            return cls("fixed", length=0.7 if value is None else value)
        return cls("weinberg", gain=0.5 if value is None else value)

    def __str__(self):
        return f"fixed:{self.length!r}" if self.kind == "fixed" else f"weinberg:{self.gain!r}"


def weinberg_length(gain: float, a_max: float, a_min: float) -> float:
    return gain * (a_max - a_min) ** 0.25


def step_length(
    model: StepLengthModel,
    step: StepEvent,
    stream: SampleStream,
    prev_step: StepEvent | None = None,
) -> float:
    """Length of one step. Weinberg uses the vertical accel range since ``prev_step``."""
    if model.kind == "fixed":
        return model.length
    lo = prev_step.sample_index if prev_step is not None else 0
    window = stream.accel[lo : step.sample_index + 1, AXES[model.axis]]
    if window.size == 0:
        raise RangeError(f"empty Weinberg window for step at sample {step.sample_index}")
    return weinberg_length(model.gain, float(window.max()), float(window.min()))


@dataclass(frozen=True)
class TrackPoint:
    k: int
    x: float
    y: float
    phi: float


def propagate(prev: TrackPoint, l: float, phi: float) -> TrackPoint:
    if not l >= 0:
        raise ParameterError(f"step length must be >= 0, got {l}")
    if not math.isfinite(phi):
        raise ParameterError("heading must be finite")
    return TrackPoint(prev.k + 1, prev.x + l * math.cos(phi), prev.y + l * math.sin(phi), phi)


@dataclass(frozen=True)
class Trajectory:
    origin: TrackPoint
    points: tuple[TrackPoint, ...]
    step_lengths: tuple[float, ...] = ()
    step_length_model: str = ""
    steps: tuple[StepEvent, ...] = field(default=(), repr=False)

    def __len__(self):
        return len(self.points)

    def xy(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points]).reshape(-1, 2)

    def vertices(self) -> np.ndarray:
        """Origin followed by every step position, shape (N + 1, 2)."""
        return np.vstack([[self.origin.x, self.origin.y], self.xy()])

    def headings(self) -> np.ndarray:
        return np.array([p.phi for p in self.points])


@dataclass(frozen=True)
class PdrConfig:
    x0: float = 0.0
    y0: float = 0.0
    phi0: float = 0.0
    detection: StepDetectionParams = StepDetectionParams()
    step_model: StepLengthModel = StepLengthModel()
    smooth_window_s: float = 0.25
    detrend_window_s: float | None = None
    yaw_axis: str = "z"
    heading_mode: str = "sample"


def step_signal(stream: SampleStream, config: PdrConfig = PdrConfig()) -> np.ndarray:
    """Scalar signal fed to the peak detector."""
    mag = accel_magnitude(stream)
    rate = stream.rate_hz if math.isfinite(stream.rate_hz) else 1.0
    if config.detrend_window_s:
        mag = detrend(mag, default_window(rate, config.detrend_window_s))
    if config.smooth_window_s:
        mag = smooth(mag, default_window(rate, config.smooth_window_s))
    return mag


def run_pdr(stream: SampleStream, config: PdrConfig = PdrConfig()) -> Trajectory:
    steps = detect_steps(step_signal(stream, config), stream.t, config.detection)
    if not steps:
        raise EmptyTrajectoryError("no steps detected")
    heading = estimate_heading(stream, steps, config.phi0, config.yaw_axis, config.heading_mode)
    origin = TrackPoint(0, float(config.x0), float(config.y0), float(config.phi0))
    points = []
    lengths = []
    prev_pt, prev_step = origin, None
    for step, phi in zip(steps, heading.phi):
        l = step_length(config.step_model, step, stream, prev_step)
        prev_pt = propagate(prev_pt, l, float(phi))
        points.append(prev_pt)
        lengths.append(l)
        prev_step = step
    return Trajectory(origin, tuple(points), tuple(lengths), str(config.step_model), tuple(steps))
