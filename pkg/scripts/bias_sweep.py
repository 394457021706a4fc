"""Sweep initial-heading bias and seed, reporting mean errors before and after matching.

    python3 scripts/bias_sweep.py [--seeds 10] [--biases 12,15,18]
"""

import argparse
import math

import numpy as np

from pdrmm import MatchParams, PdrConfig, WalkScenario, evaluate, match_trajectory, run_pdr, simulate
from pdrmm.errors import MismatchError
from pdrmm.map_model import rectangle


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--biases", default="12,15,18", help="degrees, comma separated")
    ap.add_argument("--gyro-bias-deg-s", type=float, default=0.1)
    ap.add_argument("--scale", choices=("on", "off"), default="on")
    args = ap.parse_args()

    route = rectangle(45.0, 17.5, ccw=False)
    print(f"{'bias':>6}{'gap':>8}{'pdr mean':>10}{'matched':>10}{'max':>8}{'fails':>7}")
    for bias in (float(b) for b in args.biases.split(",")):
        rows, fails = [], 0
        for seed in range(args.seeds):
            scen = WalkScenario(
                route,
                initial_heading_bias=math.radians(bias),
                gyro_bias=math.radians(args.gyro_bias_deg_s),
                gyro_noise_std=0.005,
                accel_noise_std=0.2,
                seed=seed,
            )
            sim = simulate(scen)
            traj = run_pdr(sim.stream, PdrConfig(phi0=sim.initial_heading_estimate))
            try:
                matched = match_trajectory(traj, route, MatchParams(scale=args.scale == "on"))
            except MismatchError:
                fails += 1
                continue
            p, m = evaluate(traj, route), evaluate(matched, route)
            rows.append((p.loop_gap, p.mean, m.mean, m.max))
        if not rows:
            print(f"{bias:>6.1f}{'':>36}{fails:>7}")
            continue
        gap, pm, mm, mx = np.mean(rows, axis=0)
        print(f"{bias:>6.1f}{gap:>8.2f}{pm:>10.2f}{mm:>10.2f}{mx:>8.2f}{fails:>7}")


if __name__ == "__main__":
    main()
