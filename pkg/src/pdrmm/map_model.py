"""Known indoor route: ordered corner points plus polyline geometry helpers.

Coordinates are meters in a local level frame with the route start at the
origin by convention (not enforced).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import ParseError, ValidationError

MIN_SEPARATION = 1e-9


@dataclass(frozen=True, eq=False)
class Polyline:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise ValidationError("polyline needs at least 2 (x, y) vertices")
        if not np.all(np.isfinite(v)):
            raise ValidationError("polyline vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class RouteMap:
    """Walked path as ordered corners; ``corners[0]`` is the start.

    A closed route returns to ``corners[0]`` after the last listed corner.
    Interior corners (the ones turn points are matched to) exclude the start
    and finish anchors.
    """

    corners: tuple[tuple[float, float], ...]
    closed: bool = False

    def __post_init__(self):
        pts = [(float(x), float(y)) for x, y in self.corners]
        if self.closed and len(pts) > 2 and _dist(pts[0], pts[-1]) <= MIN_SEPARATION:
            pts = pts[:-1]
        if len(pts) < 2:
            raise ValidationError(f"route needs at least 2 corners, got {len(pts)}")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise ValidationError("route corners must be finite")
        for i in range(1, len(pts)):
            if _dist(pts[i - 1], pts[i]) <= MIN_SEPARATION:
                raise ValidationError(f"corners {i - 1} and {i} coincide")
        object.__setattr__(self, "corners", tuple(pts))

    @property
    def start(self) -> tuple[float, float]:
        return self.corners[0]

    @property
    def finish(self) -> tuple[float, float]:
        return self.corners[0] if self.closed else self.corners[-1]

    @property
    def interior_corners(self) -> tuple[tuple[float, float], ...]:
        return self.corners[1:] if self.closed else self.corners[1:-1]

    def polyline(self) -> Polyline:
        """Traversal path, including the closing leg of a closed route."""
        pts = list(self.corners)
        if self.closed:
            pts.append(pts[0])
        return Polyline(np.array(pts))

    @property
    def length(self) -> float:
        return path_length(self.polyline())

    def to_json(self) -> dict:
        return {"corners": [list(c) for c in self.corners], "closed": self.closed}


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def route_from_obj(obj) -> RouteMap:
    if not isinstance(obj, dict):
        raise ValidationError("route must be a JSON object")
    if "corners" not in obj:
        raise ValidationError("route lacks field 'corners'")
    corners = obj["corners"]
    closed = obj.get("closed", False)
    if not isinstance(closed, bool):
        raise ValidationError("route field 'closed' must be a boolean")
    try:
        pts = [(float(x), float(y)) for x, y in corners]
    except (TypeError, ValueError):
        raise ValidationError("route corners must be [x, y] number pairs") from None
    return RouteMap(tuple(pts), closed)


def load_route(source: IO | str | bytes) -> RouteMap:
    if hasattr(source, "read"):
        source = source.read()
    try:
        obj = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"route file is not valid JSON: {exc.msg}", line=exc.lineno) from None
    return route_from_obj(obj)


def save_route(route: RouteMap, sink: IO[str]) -> None:
    json.dump(route.to_json(), sink)
    sink.write("\n")


def _as_polyline(p) -> Polyline:
    return p if isinstance(p, Polyline) else Polyline(np.asarray(p, dtype=float))


def segment_lengths(p) -> np.ndarray:
    v = _as_polyline(p).vertices
    return np.hypot(*np.diff(v, axis=0).T)


def path_length(p) -> float:
    return float(segment_lengths(p).sum())


def distances_to_path(points, p) -> np.ndarray:
    """Distance from each of ``points`` (M, 2) to the nearest point of ``p``."""
    v = _as_polyline(p).vertices
    q = np.asarray(points, dtype=float).reshape(-1, 2)
    a = v[:-1]
    d = v[1:] - a
    dd = np.einsum("ij,ij->i", d, d)
    rel = q[:, None, :] - a[None, :, :]
    proj = np.einsum("mij,ij->mi", rel, d)
    u = np.clip(np.divide(proj, dd, out=np.zeros_like(proj), where=dd > 0), 0.0, 1.0)
    off = rel - u[..., None] * d[None, :, :]
    return np.hypot(off[..., 0], off[..., 1]).min(axis=1)


def point_to_path_distance(q: Sequence[float], p) -> float:
    return float(distances_to_path([q], p)[0])


def point_at_distance(p, s: float, tol: float = 1e-9) -> np.ndarray:
    """Point at arc length ``s`` along ``p``; ``s`` within ``tol`` of a vertex snaps to it."""
    v = _as_polyline(p).vertices
    cum = np.concatenate([[0.0], np.cumsum(segment_lengths(v))])
    if s < -tol or s > cum[-1] + tol:
        raise ValueError(f"arc length {s} outside [0, {cum[-1]}]")
    near = np.flatnonzero(np.abs(cum - s) <= tol)
    if near.size:
        return v[near[0]].copy()
    i = int(np.searchsorted(cum, s, side="right")) - 1
    frac = (s - cum[i]) / (cum[i + 1] - cum[i])
    return v[i] + frac * (v[i + 1] - v[i])


def rectangle(width: float, height: float, origin=(0.0, 0.0), ccw: bool = True) -> RouteMap:
    """Closed rectangular route starting at ``origin``, walked CCW by default."""
    x0, y0 = origin
    if ccw:
        pts = [(x0, y0), (x0 + width, y0), (x0 + width, y0 + height), (x0, y0 + height)]
    else:
        pts = [(x0, y0), (x0, y0 + height), (x0 + width, y0 + height), (x0 + width, y0)]
    return RouteMap(tuple(pts), closed=True)
