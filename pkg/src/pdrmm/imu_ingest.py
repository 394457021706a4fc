"""IMU log parsing and scalar preprocessing for step detection.

The standard log is a UTF-8 CSV with header ``t,ax,ay,az,gx,gy,gz`` in SI
units (s, m/s^2, rad/s). Foreign layouts are read through a column map
(``{"t": 0, "ax": 3, ...}``) that names the column index of each channel.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Union

import numpy as np

from .errors import EmptyInputError, OrderingError, ParameterError, ParseError

COLUMNS = ("t", "ax", "ay", "az", "gx", "gy", "gz")
STANDARD = "standard"


@dataclass(frozen=True)
class ImuSample:
    t: float
    accel: tuple[float, float, float]
    gyro: tuple[float, float, float]

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ParameterError(f"sample time must be finite and >= 0, got {self.t}")
        if not all(math.isfinite(v) for v in (*self.accel, *self.gyro)):
            raise ParameterError("non-finite channel value")


@dataclass(frozen=True, eq=False)
class SampleStream:
    """Column-oriented sample store: ``t`` (N,), ``accel`` (N, 3), ``gyro`` (N, 3)."""

    t: np.ndarray
    accel: np.ndarray
    gyro: np.ndarray
    rate_hz: float

    def __post_init__(self):
        n = len(self.t)
        if n == 0:
            raise EmptyInputError("sample stream is empty")
        if self.accel.shape != (n, 3) or self.gyro.shape != (n, 3):
            raise ParameterError("accel and gyro must have shape (N, 3)")
        if np.any(np.diff(self.t) <= 0):
            raise OrderingError("timestamps must strictly increase")
        for arr in (self.t, self.accel, self.gyro):
            arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, t, accel, gyro, rate_hz=None) -> SampleStream:
        t = np.array(t, dtype=float)
        accel = np.array(accel, dtype=float).reshape(-1, 3)
        gyro = np.array(gyro, dtype=float).reshape(-1, 3)
        if rate_hz is None:
            rate_hz = estimate_rate(t)
        return cls(t, accel, gyro, float(rate_hz))

    @classmethod
    def from_samples(cls, samples: Iterable[ImuSample], rate_hz=None) -> SampleStream:
        samples = list(samples)
        return cls.from_arrays(
            [s.t for s in samples],
            [s.accel for s in samples],
            [s.gyro for s in samples],
            rate_hz,
        )

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> ImuSample:
        return ImuSample(
            float(self.t[i]), tuple(map(float, self.accel[i])), tuple(map(float, self.gyro[i]))
        )

    @property
    def samples(self) -> list[ImuSample]:
        return [self[i] for i in range(len(self))]

    def equals(self, other: SampleStream, atol=0.0) -> bool:
        return (
            len(self) == len(other)
            and np.allclose(self.t, other.t, rtol=0, atol=atol)
            and np.allclose(self.accel, other.accel, rtol=0, atol=atol)
            and np.allclose(self.gyro, other.gyro, rtol=0, atol=atol)
        )


def estimate_rate(t) -> float:
    t = np.asarray(t, dtype=float)
    if len(t) < 2 or t[-1] <= t[0]:
        return float("nan")
    return (len(t) - 1) / (t[-1] - t[0])


LogFormat = Union[str, Mapping[str, int]]


def _column_indices(fmt: LogFormat, header: list[str] | None):
    if fmt == STANDARD:
        if header is None or [h.strip() for h in header] != list(COLUMNS):
            raise ParseError(f"expected header {','.join(COLUMNS)}", line=1)
        return list(range(len(COLUMNS))), len(COLUMNS)
    if isinstance(fmt, str):
        raise ParameterError(f"unsupported log format {fmt!r}")
    missing = [c for c in COLUMNS if c not in fmt]
    if missing:
        raise ParameterError(f"column map lacks {', '.join(missing)}")
    idx = [int(fmt[c]) for c in COLUMNS]
    if min(idx) < 0:
        raise ParameterError("column indices must be non-negative")
    return idx, None


def parse_imu_log(
    source: IO | str | bytes, fmt: LogFormat = STANDARD, rate_hz: float | None = None
) -> SampleStream:
    """Parse a CSV IMU log.

    ``source`` may be a text/binary file object or the raw content. With a
    column map the first line is treated as a header and skipped, and rows
    may carry extra columns; the standard layout demands exactly seven.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    rows = list(csv.reader(io.StringIO(source)))
    # blank lines come through as []
    numbered = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not numbered:
        raise EmptyInputError("empty IMU log")
    _, header = numbered[0]
    idx, ncols = _column_indices(fmt, header)
    body = numbered[1:]
    if not body:
        raise EmptyInputError("IMU log has a header but no samples")

    data = np.empty((len(body), len(COLUMNS)))
    need = max(idx) + 1
    for j, (line, row) in enumerate(body):
        if ncols is not None and len(row) != ncols:
            raise ParseError(f"expected {ncols} columns, got {len(row)}", line=line)
        if len(row) < need:
            raise ParseError(f"expected at least {need} columns, got {len(row)}", line=line)
        try:
            vals = [float(row[i]) for i in idx]
        except ValueError as exc:
            raise ParseError(f"non-numeric field ({exc})", line=line) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", line=line)
        if vals[0] < 0:
            raise ParseError("negative timestamp", line=line)
        if j and vals[0] <= data[j - 1, 0]:
            kind = "duplicate" if vals[0] == data[j - 1, 0] else "decreasing"
            raise OrderingError(f"{kind} timestamp {vals[0]!r}", line=line)
        data[j] = vals

    return SampleStream.from_arrays(data[:, 0], data[:, 1:4], data[:, 4:7], rate_hz)


def write_imu_log(stream: SampleStream, sink: IO[str]) -> None:
    """Write the standard CSV layout. Values use shortest round-trip repr."""
    sink.write(",".join(COLUMNS) + "\n")
    block = np.column_stack([stream.t, stream.accel, stream.gyro])
    for row in block.tolist():
        sink.write(",".join(repr(v) for v in row) + "\n")


def accel_magnitude(stream: SampleStream) -> np.ndarray:
    return np.linalg.norm(stream.accel, axis=1)


def default_window(rate_hz: float, seconds: float = 0.25) -> int:
    """Quarter-second window forced odd."""
    w = max(1, int(round(seconds * rate_hz)))
    return w if w % 2 else w + 1


def smooth(signal, window: int) -> np.ndarray:
    """Centered moving average; windows are truncated at the edges.

    Averaging runs on the offset from the first sample so a constant signal
    comes back bit-exact, and the result is clipped to the input range to
    absorb rounding.
    """
    if isinstance(window, bool) or int(window) != window or window < 1 or window % 2 == 0:
        raise ParameterError(f"window must be a positive odd integer, got {window}")
    x = np.asarray(signal, dtype=float)
    if window == 1 or len(x) == 0:
        return x.copy()
    ref = x[0]
    kernel = np.ones(int(window))
    half = int(window) // 2
    centre = slice(half, half + len(x))
    sums = np.convolve(x - ref, kernel)[centre]
    counts = np.convolve(np.ones_like(x), kernel)[centre]
    return np.clip(ref + sums / counts, x.min(), x.max())


def detrend(signal, window: int) -> np.ndarray:
    """Subtract the running mean (gravity baseline) from a signal."""
    x = np.asarray(signal, dtype=float)
    return x - smooth(x, window)
