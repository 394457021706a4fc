"""Walk the 125 m test loop and compare raw PDR with turn-point matching.

    python3 scripts/run_scenario.py [--seed N] [--bias-deg B] [--gyro-bias-deg-s G]
"""

import argparse
import math

from pdrmm import MatchParams, PdrConfig, WalkScenario, evaluate, match_trajectory, run_pdr, simulate
from pdrmm.eval_metrics import reduction_ratio
from pdrmm.map_model import rectangle


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--bias-deg", type=float, default=17.0)
    ap.add_argument("--gyro-bias-deg-s", type=float, default=0.1)
    ap.add_argument("--width", type=float, default=45.0)
    ap.add_argument("--height", type=float, default=17.5)
    args = ap.parse_args()

    scen = WalkScenario(
        rectangle(args.width, args.height, ccw=False),
        initial_heading_bias=math.radians(args.bias_deg),
        gyro_bias=math.radians(args.gyro_bias_deg_s),
        gyro_noise_std=0.005,
        accel_noise_std=0.2,
        seed=args.seed,
    )
    sim = simulate(scen)
    traj = run_pdr(sim.stream, PdrConfig(phi0=sim.initial_heading_estimate))
    base = evaluate(traj, scen.route)

    print(f"route {scen.route.length:.1f} m, {len(traj)} steps, loop gap {base.loop_gap:.2f} m")
    print(f"{'method':<16}{'mean [m]':>10}{'std [m]':>10}{'max [m]':>10}{'reduction':>11}")
    print(f"{'PDR':<16}{base.mean:>10.2f}{base.std:>10.2f}{base.max:>10.2f}{'':>11}")
    for scale in (False, True):
        m = evaluate(match_trajectory(traj, scen.route, MatchParams(scale=scale)), scen.route)
        label = f"matched ({'scale' if scale else 'rotate'})"
        print(f"{label:<16}{m.mean:>10.2f}{m.std:>10.2f}{m.max:>10.2f}{reduction_ratio(base, m):>11.1%}")


if __name__ == "__main__":
    main()
