"""Smartphone pedestrian dead reckoning corrected by turn-point map matching."""

from .errors import (
    ConfigError,
    DegenerateGeometryError,
    EmptyInputError,
    EmptyTrajectoryError,
    MismatchError,
    OrderingError,
    ParameterError,
    ParseError,
    PdrmmError,
    RangeError,
    ScenarioError,
    UndefinedRatioError,
    ValidationError,
)
from .eval_metrics import ErrorStats, evaluate, export_cdf, reduction_ratio
from .imu_ingest import ImuSample, SampleStream, accel_magnitude, parse_imu_log, smooth, write_imu_log
from .map_match import (
    CornerAssignment,
    MatchedTrajectory,
    MatchParams,
    TurnParams,
    TurnPoint,
    associate_corners,
    detect_turns,
    match_trajectory,
    segment_theta,
    transform_segment,
)
from .map_model import Polyline, RouteMap, load_route, path_length, point_to_path_distance
from .pdr_core import (
    HeadingTrack,
    PdrConfig,
    StepDetectionParams,
    StepEvent,
    StepLengthModel,
    TrackPoint,
    Trajectory,
    detect_steps,
    estimate_heading,
    propagate,
    run_pdr,
    step_length,
)
from .walk_sim import SimResult, WalkScenario, simulate

__version__ = "0.1.0"
