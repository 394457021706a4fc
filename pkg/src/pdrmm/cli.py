"""Batch front end: ``pdrmm simulate | pdr | match | eval | run-all``.

Exit codes: 0 ok, 1 parse, 2 config, 3 empty pipeline, 4 turn/corner
mismatch, 5 I/O. Every command computes all outputs before writing any.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, PdrmmError
from .eval_metrics import (
    evaluate,
    export_cdf,
    read_trajectory_csv,
    reduction_ratio,
    write_trajectory_csv,
)
from .imu_ingest import STANDARD, SampleStream, parse_imu_log, write_imu_log
from .map_match import MatchedTrajectory, MatchParams, TurnParams, match_trajectory
from .map_model import RouteMap, load_route, save_route
from .pdr_core import (
    PdrConfig,
    StepDetectionParams,
    StepLengthModel,
    TrackPoint,
    Trajectory,
    run_pdr,
)
from .walk_sim import SimResult, WalkScenario, scenario_from_obj, simulate

EXIT_IO = 5


@dataclass
class RunConfig:
    base: Path = Path(".")
    imu: Path | None = None
    route: Path | None = None
    scenario: Path | dict | None = None
    out: Path = Path("out")
    origin: tuple[float, float, float] | None = None
    pdr: PdrConfig = PdrConfig()
    turns: TurnParams = TurnParams()
    scale: bool = False
    columns: dict | None = None
    seed: int | None = None
    traj: list[Path] = field(default_factory=list)


def _read_json(path: Path, what: str):
    if not path.is_file():
        raise ConfigError(f"{what} file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} file {path} is not valid JSON: {exc.msg}") from None


def _number(obj: dict, key: str, default):
    value = obj.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config field {key!r} must be a number")
    return float(value)


def _parse_origin(obj) -> tuple[float, float, float]:
    if not isinstance(obj, dict):
        raise ConfigError("config field 'origin' must be an object")
    if "phi0_deg" in obj:
        phi0 = math.radians(_number(obj, "phi0_deg", 0.0))
    else:
        phi0 = _number(obj, "phi0", 0.0)
    return (_number(obj, "x", 0.0), _number(obj, "y", 0.0), phi0)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional ``--config`` JSON file with command-line overrides."""
    cfg = RunConfig()
    raw: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        raw = _read_json(path, "config")
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        cfg.base = path.parent

    def rel(p):
        return p if isinstance(p, dict) else (cfg.base / p)

    for key in ("imu", "route", "scenario"):
        if key in raw:
            setattr(cfg, key, rel(raw[key]))
    if "out" in raw:
        cfg.out = rel(raw["out"])
    if "traj" in raw:
        cfg.traj = [rel(p) for p in raw["traj"]]
    if "origin" in raw:
        cfg.origin = _parse_origin(raw["origin"])

    det = raw.get("detection", {})
    heading = raw.get("heading", {})
    pdr = PdrConfig(
        detection=StepDetectionParams(
            min_peak=_number(det, "min_peak", 10.8), refractory=_number(det, "refractory", 0.3)
        ),
        step_model=StepLengthModel.parse(raw.get("step_model", "fixed:0.7")),
        smooth_window_s=_number(det, "smooth_window_s", 0.25),
        detrend_window_s=_number(det, "detrend_window_s", None),
        yaw_axis=heading.get("axis", "z"),
        heading_mode=heading.get("mode", "sample"),
    )
    turn = raw.get("turn", {})
    cfg.turns = TurnParams(
        threshold=math.radians(_number(turn, "threshold_deg", 45.0)),
        window=int(_number(turn, "window", 3)),
    )
    cfg.scale = bool(raw.get("scale", False))
    cfg.columns = raw.get("columns")
    if "seed" in raw:
        cfg.seed = int(raw["seed"])

    # command-line flags win over the file
    if getattr(args, "imu", None):
        cfg.imu = Path(args.imu)
    if getattr(args, "route", None):
        cfg.route = Path(args.route)
    if getattr(args, "scenario", None):
        cfg.scenario = Path(args.scenario)
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "traj", None):
        cfg.traj = [Path(p) for p in args.traj]
    if getattr(args, "step_model", None):
        pdr = replace(pdr, step_model=StepLengthModel.parse(args.step_model))
    if getattr(args, "turn_threshold", None) is not None:
        cfg.turns = replace(cfg.turns, threshold=math.radians(args.turn_threshold))
    if getattr(args, "scale", None):
        cfg.scale = args.scale == "on"
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    cfg.pdr = pdr
    return cfg


def _require(path: Path | None, what: str) -> Path:
    if path is None:
        raise ConfigError(f"no {what} given")
    if not Path(path).is_file():
        raise ConfigError(f"{what} not found: {path}")
    return Path(path)


def _load_route(cfg: RunConfig) -> RouteMap:
    return load_route(_require(cfg.route, "route file").read_text(encoding="utf-8"))


def _load_scenario(cfg: RunConfig) -> WalkScenario:
    src = cfg.scenario
    if src is None:
        raise ConfigError("no scenario given")
    if isinstance(src, dict):
        obj, base = src, cfg.base
    else:
        obj, base = _read_json(Path(src), "scenario"), Path(src).parent
    route = None
    if isinstance(obj, dict) and isinstance(obj.get("route"), str):
        obj = dict(obj)
        route = load_route(_require(base / obj.pop("route"), "route file").read_text())
    elif isinstance(obj, dict) and "route" not in obj and cfg.route is not None:
        route = _load_route(cfg)
    if cfg.seed is not None:
        obj = dict(obj, seed=cfg.seed)
    return scenario_from_obj(obj, route)


def _origin(cfg: RunConfig, route: RouteMap | None, fallback=None) -> tuple[float, float, float]:
    """Config origin, else ``fallback``, else the route start facing along its first leg."""
    if cfg.origin is not None:
        return cfg.origin
    if fallback is not None:
        return fallback
    if route is not None:
        (x0, y0), (x1, y1) = route.corners[0], route.corners[1]
        return (x0, y0, math.atan2(y1 - y0, x1 - x0))
    return (0.0, 0.0, 0.0)


def _text(writer, obj) -> str:
    buf = io.StringIO()
    writer(obj, buf)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_all(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def _read_stream(cfg: RunConfig) -> SampleStream:
    fmt = cfg.columns if cfg.columns else STANDARD
    return parse_imu_log(_require(cfg.imu, "IMU log").read_bytes(), fmt)


def _pdr(stream: SampleStream, cfg: RunConfig, origin) -> Trajectory:
    x0, y0, phi0 = origin
    return run_pdr(stream, replace(cfg.pdr, x0=x0, y0=y0, phi0=phi0))


def _match(traj: Trajectory, route: RouteMap, cfg: RunConfig):
    matched = match_trajectory(traj, route, MatchParams(cfg.turns, cfg.scale))
    return matched, match_report(matched, route, cfg)


def match_report(matched: MatchedTrajectory, route: RouteMap, cfg: RunConfig) -> dict:
    pairs = dict(matched.assignment.pairs)
    return {
        "scale": "on" if matched.scale else "off",
        "turn_threshold_deg": math.degrees(cfg.turns.threshold),
        "turn_window": cfg.turns.window,
        "n_turns": len(matched.turns),
        "n_corners": len(route.interior_corners),
        "turns": [
            {
                "step_index": t.step_index,
                "vertex_k": t.step_index,
                "delta_phi": t.delta_phi,
                "corner_index": pairs[t.step_index],
                "corner": list(route.corners[pairs[t.step_index]]),
            }
            for t in matched.turns
        ],
        "segments": [
            {
                "segment_id": s.segment_id,
                "first_k": s.first_k,
                "last_k": s.last_k,
                "shift": list(s.shift),
                "pivot": list(s.pivot),
                "theta": s.theta,
                "scale": s.scale,
                "target": None if s.target is None else list(s.target),
            }
            for s in matched.segments
        ],
    }


def _eval_files(named: list[tuple[str, object]], route: RouteMap, origin) -> dict[str, str]:
    stats = {name: evaluate(pts, route, origin) for name, pts in named}
    base_name = named[0][0]
    summary = {}
    files = {}
    for i, (name, _) in enumerate(named):
        ratio = None
        if i > 0:
            ratio = {base_name: reduction_ratio(stats[base_name], stats[name])}
        summary[name] = stats[name].summary(ratio)
        files[f"cdf_{name}.csv"] = _text(export_cdf, stats[name])
    files["cdf.csv"] = files[f"cdf_{named[-1][0]}.csv"]
    files["stats.json"] = _json(summary)
    return files


def _sim_files(sim: SimResult, scenario: WalkScenario) -> dict[str, str]:
    return {
        "imu.csv": _text(write_imu_log, sim.stream),
        "truth.csv": _text(write_trajectory_csv, sim.truth.points),
        "scenario.lock.json": _json(sim.lock(scenario)),
    }


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    if cfg.scenario is None and getattr(args, "config", None):
        cfg.scenario = Path(args.config)
    scenario = _load_scenario(cfg)
    sim = simulate(scenario)
    _write_all(cfg.out, _sim_files(sim, scenario))
    print(f"simulate: {len(sim.truth)} steps, {len(sim.stream)} samples -> {cfg.out}")
    return 0


def cmd_pdr(args) -> int:
    cfg = load_config(args)
    route = _load_route(cfg) if cfg.route is not None else None
    stream = _read_stream(cfg)
    traj = _pdr(stream, cfg, _origin(cfg, route))
    _write_all(cfg.out, {"pdr_traj.csv": _text(write_trajectory_csv, traj.points)})
    print(f"pdr: {len(traj)} steps")
    return 0


def cmd_match(args) -> int:
    cfg = load_config(args)
    route = _load_route(cfg)
    src = _require(cfg.traj[0] if cfg.traj else cfg.out / "pdr_traj.csv", "trajectory file")
    points = read_trajectory_csv(src.read_text(encoding="utf-8"))
    x0, y0, phi0 = _origin(cfg, route)
    traj = Trajectory(TrackPoint(0, x0, y0, phi0), tuple(points))
    matched, report = _match(traj, route, cfg)
    _write_all(
        cfg.out,
        {
            "matched_traj.csv": _text(write_trajectory_csv, matched.points),
            "match_report.json": _json(report),
        },
    )
    print(f"match: {report['n_turns']} turns matched, scale {report['scale']}")
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args)
    route = _load_route(cfg)
    paths = cfg.traj or [
        p for p in (cfg.out / "pdr_traj.csv", cfg.out / "matched_traj.csv") if p.is_file()
    ]
    if not paths:
        raise ConfigError("no trajectory files to evaluate")
    named = []
    for p in paths:
        pts = read_trajectory_csv(_require(p, "trajectory file").read_text(encoding="utf-8"))
        named.append((Path(p).stem, [(q.x, q.y) for q in pts]))
    if len({n for n, _ in named}) != len(named):
        raise ConfigError("trajectory file names must have distinct stems")
    x0, y0, _ = _origin(cfg, route)
    files = _eval_files(named, route, (x0, y0))
    _write_all(cfg.out, files)
    print(files["stats.json"], end="")
    return 0


def cmd_run_all(args) -> int:
    cfg = load_config(args)
    scenario = _load_scenario(cfg)
    route = scenario.route
    sim = simulate(scenario)
    origin = _origin(
        cfg, route, (sim.truth.origin.x, sim.truth.origin.y, sim.initial_heading_estimate)
    )
    traj = _pdr(sim.stream, cfg, origin)
    matched, report = _match(traj, route, cfg)
    files = _sim_files(sim, scenario)
    files["route.json"] = _text(save_route, route)
    files["pdr_traj.csv"] = _text(write_trajectory_csv, traj.points)
    files["matched_traj.csv"] = _text(write_trajectory_csv, matched.points)
    files["match_report.json"] = _json(report)
    files.update(
        _eval_files([("pdr_traj", traj.xy()), ("matched_traj", matched.xy())], route, origin[:2])
    )
    _write_all(cfg.out, files)
    print(files["stats.json"], end="")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="run-config JSON file")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdrmm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesise an IMU log from a walk scenario")
    _add_common(p)
    p.add_argument("--scenario", help="scenario JSON (defaults to --config)")
    p.add_argument("--route", help="route JSON, if the scenario has none")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pdr", help="dead-reckon a trajectory from an IMU log")
    _add_common(p)
    p.add_argument("--imu")
    p.add_argument("--route", help="route JSON; supplies the default origin")
    p.add_argument("--step-model", help="fixed:<m> or weinberg:<K>")
    p.set_defaults(func=cmd_pdr)

    p = sub.add_parser("match", help="match a PDR trajectory to route corners")
    _add_common(p)
    p.add_argument("--route")
    p.add_argument("--traj", action="append", help="PDR trajectory CSV")
    p.add_argument("--turn-threshold", type=float, help="degrees")
    p.add_argument("--scale", choices=("on", "off"))
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="score trajectories against the route")
    _add_common(p)
    p.add_argument("--route")
    p.add_argument("--traj", action="append", help="trajectory CSV; the first is the baseline")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run-all", help="simulate, pdr, match and eval in one go")
    _add_common(p)
    p.add_argument("--scenario")
    p.add_argument("--step-model")
    p.add_argument("--turn-threshold", type=float, help="degrees")
    p.add_argument("--scale", choices=("on", "off"))
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return ConfigError.exit_code
    try:
        return args.func(args)
    except PdrmmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
