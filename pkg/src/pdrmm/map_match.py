"""Turn-point map matching.

The PDR trajectory is cut at detected turns. Each piece is shifted onto the
previous matched anchor and rotated about it so that its far end points at
the next route corner; the turn vertex is then placed on the corner. The
rotation is the clockwise form

    X' = (X - Xp) cos(theta) + (Y - Yp) sin(theta) + Xp
    Y' = (Y - Yp) cos(theta) - (X - Xp) sin(theta) + Yp

i.e. a rotation by -theta about the pivot (Xp, Yp).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometryError, MismatchError, ParameterError
from .map_model import RouteMap
from .pdr_core import TrackPoint, Trajectory

DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class TurnPoint:
    """A detected turn.

    ``step_index`` indexes ``Trajectory.points`` and names the first step
    taken on the new heading, so the turn happens at the vertex just before
    it (``points[step_index - 1]``, or the origin when ``step_index`` is 0).
    """

    step_index: int
    delta_phi: float


@dataclass(frozen=True)
class TurnParams:
    threshold: float = math.radians(45.0)
    window: int = 3


def detect_turns(
    traj: Trajectory | Sequence[float], params: TurnParams = TurnParams()
) -> list[TurnPoint]:
    """Flag steps where heading moved by ``threshold`` or more over ``window`` steps.

    Flags less than ``window`` steps apart are one turn. A turn's
    ``delta_phi`` is the net heading change across its cluster (from
    ``window`` steps before the first flag to the last flag) and its
    ``step_index`` is the first step by which half of that change has
    happened. Clusters that net out below the threshold (an S-bend inside the
    window) are dropped.
    """
    if params.window < 1 or int(params.window) != params.window:
        raise ParameterError(f"turn window must be a positive integer, got {params.window}")
    if not params.threshold > 0:
        raise ParameterError("turn threshold must be positive")
    phi = traj.headings() if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    w = int(params.window)
    if len(phi) <= w:
        return []
    jump = np.abs(phi[w:] - phi[:-w]) >= params.threshold
    flags = np.flatnonzero(jump) + w
    if not flags.size:
        return []

    flags = flags.tolist()
    clusters = [[flags[0], flags[0]]]
    for f in flags[1:]:
        if f - clusters[-1][1] <= w:
            clusters[-1][1] = f
        else:
            clusters.append([f, f])

    turns = []
    for first, last in clusters:
        base = first - w
        total = phi[last] - phi[base]
        if abs(total) < params.threshold:
            continue
        progress = (phi[base + 1 : last + 1] - phi[base]) * math.copysign(1.0, total)
        half = int(np.argmax(progress >= 0.5 * abs(total)))
        turns.append(TurnPoint(int(base + 1 + half), float(total)))
    return turns


@dataclass(frozen=True)
class CornerAssignment:
    """``pairs[i] = (turn step_index, corner index into route.corners)``."""

    pairs: tuple[tuple[int, int], ...]
    start: tuple[float, float]
    finish: tuple[float, float]
    closed: bool


def associate_corners(turns: Sequence[TurnPoint], route: RouteMap) -> CornerAssignment:
    """Pair the i-th turn with the i-th interior corner."""
    n_interior = len(route.interior_corners)
    if len(turns) != n_interior:
        raise MismatchError(len(turns), n_interior)
    idx = [t.step_index for t in turns]
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ParameterError("turn step indices must strictly increase")
    pairs = tuple((t.step_index, i + 1) for i, t in enumerate(turns))
    return CornerAssignment(pairs, route.start, route.finish, route.closed)


def segment_theta(prev_anchor, pdr_end, corner_end) -> float:
    """Signed angle from (prev -> corner_end) to (prev -> pdr_end), in (-pi, pi].

    ``transform_segment`` with this angle turns the direction of ``pdr_end``
    onto the direction of ``corner_end``.
    """
    px, py = prev_anchor
    ux, uy = corner_end[0] - px, corner_end[1] - py
    vx, vy = pdr_end[0] - px, pdr_end[1] - py
    if math.hypot(ux, uy) <= DEGENERATE_EPS or math.hypot(vx, vy) <= DEGENERATE_EPS:
        raise DegenerateGeometryError("segment end coincides with its anchor")
    theta = math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)
    return math.pi if theta == -math.pi else theta


def rotate_about(xy, pivot, theta: float) -> np.ndarray:
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if theta == 0:
        return xy.copy()  # exact, (x - xp) + xp can round
    dx = xy[:, 0] - pivot[0]
    dy = xy[:, 1] - pivot[1]
    c, s = math.cos(theta), math.sin(theta)
    return np.column_stack([dx * c + dy * s + pivot[0], dy * c - dx * s + pivot[1]])


def transform_segment(points: Sequence[TrackPoint], pivot, theta: float) -> list[TrackPoint]:
    if not points:
        return []
    xy = rotate_about([(p.x, p.y) for p in points], pivot, theta)
    return [
        TrackPoint(p.k, float(x), float(y), p.phi - theta) for p, (x, y) in zip(points, xy)
    ]


@dataclass(frozen=True)
class SegmentTransform:
    segment_id: int
    first_k: int
    last_k: int
    shift: tuple[float, float]
    pivot: tuple[float, float]
    theta: float
    scale: float
    target: tuple[float, float] | None


@dataclass(frozen=True)
class MatchParams:
    turns: TurnParams = TurnParams()
    scale: bool = False


@dataclass(frozen=True)
class MatchedTrajectory:
    origin: TrackPoint
    points: tuple[TrackPoint, ...]
    segment_of: tuple[int, ...]
    segments: tuple[SegmentTransform, ...]
    turns: tuple[TurnPoint, ...]
    assignment: CornerAssignment
    scale: bool

    def __len__(self):
        return len(self.points)

    def xy(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points]).reshape(-1, 2)

    def headings(self) -> np.ndarray:
        return np.array([p.phi for p in self.points])

    def turn_vertex(self, turn: TurnPoint) -> TrackPoint:
        return self.origin if turn.step_index == 0 else self.points[turn.step_index - 1]


def _match_segment(seg_id, verts, anchor, target, scale, snap):
    """Shift ``verts`` (first one is the segment start) onto ``anchor`` and aim at ``target``."""
    start = verts[0]
    shift = (anchor[0] - start.x, anchor[1] - start.y)
    moved = [TrackPoint(p.k, p.x + shift[0], p.y + shift[1], p.phi) for p in verts[1:]]
    theta, factor = 0.0, 1.0
    if target is not None and moved:
        end = (moved[-1].x, moved[-1].y)
        try:
            theta = segment_theta(anchor, end, target)
        except DegenerateGeometryError:
            if snap:
                raise
            target = None
        if target is not None:
            moved = transform_segment(moved, anchor, theta)
            if scale:
                factor = math.dist(target, anchor) / math.dist(end, anchor)
                moved = [
                    TrackPoint(
                        p.k,
                        anchor[0] + factor * (p.x - anchor[0]),
                        anchor[1] + factor * (p.y - anchor[1]),
                        p.phi,
                    )
                    for p in moved
                ]
            if snap:
                last = moved[-1]
                moved[-1] = TrackPoint(last.k, float(target[0]), float(target[1]), last.phi)
    info = SegmentTransform(
        seg_id,
        verts[0].k,
        verts[-1].k,
        shift,
        (float(anchor[0]), float(anchor[1])),
        theta,
        factor,
        None if target is None else (float(target[0]), float(target[1])),
    )
    return moved, info


def match_trajectory(
    traj: Trajectory, route: RouteMap, params: MatchParams = MatchParams()
) -> MatchedTrajectory:
    """Correct a PDR trajectory against the route's corner sequence.

    Segments run from one turn vertex to the next (the first from the origin,
    the last to the final step). Each is pinned to the previous matched
    anchor, rotated toward its assigned corner and, with ``scale`` on,
    stretched radially so its end lands on the corner. Turn vertices are then
    set to their corners and become the next anchor. The last segment is
    aimed at the route's finish anchor but not snapped to it.
    """
    turns = detect_turns(traj, params.turns)
    assignment = associate_corners(turns, route)
    verts = [traj.origin, *traj.points]
    cuts = [0, *(t.step_index for t in turns), len(traj.points)]
    corners = [route.corners[c] for _, c in assignment.pairs]

    origin = TrackPoint(0, float(route.start[0]), float(route.start[1]), traj.origin.phi)
    out: list[TrackPoint] = []
    segment_of: list[int] = []
    infos = []
    anchor = route.start
    for seg_id in range(len(cuts) - 1):
        lo, hi = cuts[seg_id], cuts[seg_id + 1]
        is_last = seg_id == len(cuts) - 2
        target = route.finish if is_last else corners[seg_id]
        moved, info = _match_segment(
            seg_id, verts[lo : hi + 1], anchor, target, params.scale, snap=not is_last
        )
        out.extend(moved)
        segment_of.extend([seg_id] * len(moved))
        infos.append(info)
        if not is_last:
            anchor = target
    return MatchedTrajectory(
        origin, tuple(out), tuple(segment_of), tuple(infos), tuple(turns), assignment, params.scale
    )
