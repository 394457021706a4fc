"""Position error statistics against the ground-truth route.

Error of a point is its distance to the route polyline. Spread is the
population standard deviation over the whole walk.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import EmptyInputError, ParseError, UndefinedRatioError
from .map_model import RouteMap, distances_to_path
from .pdr_core import TrackPoint


@dataclass(frozen=True, eq=False)
class ErrorStats:
    per_point: np.ndarray
    mean: float
    std: float
    max: float
    cdf: tuple[tuple[float, float], ...]
    loop_gap: float | None

    def summary(self, reduction_vs=None) -> dict:
        return {
            "mean_m": self.mean,
            "std_m": self.std,
            "max_m": self.max,
            "loop_gap_m": self.loop_gap,
            "reduction_vs": reduction_vs,
        }


def empirical_cdf(errors) -> tuple[tuple[float, float], ...]:
    """Step-function CDF at each distinct error value."""
    e = np.sort(np.asarray(errors, dtype=float))
    values, counts = np.unique(e, return_counts=True)
    cum = np.cumsum(counts)
    n = cum[-1]
    return tuple((float(v), float(c / n)) for v, c in zip(values, cum))


def evaluate(points, route: RouteMap, origin=None) -> ErrorStats:
    """Score ``points`` ((M, 2) array, or anything with ``xy()``) against ``route``.

    ``loop_gap`` is the distance from the estimated start (``origin``,
    defaulting to the route start) to the last point, reported only for
    closed routes.
    """
    xy = points.xy() if hasattr(points, "xy") else np.asarray(points, dtype=float)
    xy = xy.reshape(-1, 2)
    if len(xy) == 0:
        raise EmptyInputError("cannot evaluate an empty trajectory")
    if origin is None:
        origin = getattr(points, "origin", None)
        origin = route.start if origin is None else (origin.x, origin.y)
    err = distances_to_path(xy, route.polyline())
    mean = float(err.mean())
    std = float(np.sqrt(np.mean((err - mean) ** 2)))
    gap = math.dist(origin, xy[-1]) if route.closed else None
    return ErrorStats(err, mean, std, float(err.max()), empirical_cdf(err), gap)


def reduction_ratio(pdr: ErrorStats, matched: ErrorStats) -> float:
    if pdr.mean == 0:
        raise UndefinedRatioError("baseline mean error is zero")
    return 1.0 - matched.mean / pdr.mean


def export_cdf(stats: ErrorStats, sink: IO[str]) -> None:
    sink.write("error_m,cum_fraction\n")
    for err, frac in stats.cdf:
        sink.write(f"{err!r},{frac!r}\n")


def read_cdf(source: IO[str] | str) -> list[tuple[float, float]]:
    if hasattr(source, "read"):
        source = source.read()
    rows = list(csv.reader(io.StringIO(source)))
    if not rows or rows[0] != ["error_m", "cum_fraction"]:
        raise ParseError("expected header error_m,cum_fraction", line=1)
    out = []
    for line, row in enumerate(rows[1:], start=2):
        try:
            err, frac = map(float, row)
        except ValueError:
            raise ParseError(f"bad CDF row {row!r}", line=line) from None
        out.append((err, frac))
    return out


TRAJ_HEADER = ["k", "x", "y", "phi"]


def write_trajectory_csv(points, sink: IO[str]) -> None:
    """Rows ``k,x,y,phi`` for the step points (the origin is not written)."""
    sink.write(",".join(TRAJ_HEADER) + "\n")
    for p in points:
        sink.write(f"{p.k},{float(p.x)!r},{float(p.y)!r},{float(p.phi)!r}\n")


def read_trajectory_csv(source: IO[str] | str) -> list[TrackPoint]:
    if hasattr(source, "read"):
        source = source.read()
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(source)), start=1) if r]
    if not rows or [c.strip() for c in rows[0][1]] != TRAJ_HEADER:
        raise ParseError("expected header k,x,y,phi", line=1)
    points = []
    for line, row in rows[1:]:
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, got {len(row)}", line=line)
        try:
            k = int(row[0])
            x, y, phi = (float(v) for v in row[1:])
        except ValueError:
            raise ParseError(f"bad trajectory row {row!r}", line=line) from None
        if not all(math.isfinite(v) for v in (x, y, phi)):
            raise ParseError("non-finite trajectory value", line=line)
        points.append(TrackPoint(k, x, y, phi))
    if not points:
        raise EmptyInputError("trajectory file has no rows")
    return points
