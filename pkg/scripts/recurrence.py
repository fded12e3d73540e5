"""Reduced RPS orbit from (0.5,0.25,0.25 | 0.5,0.25,0.25): trajectory, Phi and first return."""

import argparse
import json
from pathlib import Path

import numpy as np

from egtsquared import IntegratorConfig, build_generalized_rps_reduced, compute_nash, integrate
from egtsquared.analysis import constant_of_motion, recurrence_stats
from egtsquared.io import header_line, write_csv, write_trajectory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.8)
    ap.add_argument("--horizon", type=float, default=2000.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--transient", type=float, default=10.0)
    ap.add_argument("--out", default="results/recurrence")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hdr = header_line("scripts/recurrence.py", vars(args))
    game = build_generalized_rps_reduced(3, args.mu)
    x0 = np.array([0.5, 0.25, 0.25, 0.5, 0.25, 0.25])
    traj = integrate(game, x0, IntegratorConfig(step=args.step, horizon=args.horizon))
    rec = recurrence_stats(traj, args.epsilon, args.transient)
    phi = constant_of_motion(game, compute_nash(game).profile, traj.states)

    write_trajectory(out / "trajectory.csv", traj, hdr)
    write_csv(out / "phi.csv", ["t", "phi"], np.column_stack([traj.times, phi]), hdr)
    summary = {"first_return_time": rec.first_return_time,
               "min_distance_after_transient": rec.min_distance_after_transient,
               "phi_relative_drift": float(np.ptp(phi) / abs(phi[0]))}
    (out / "recurrence.txt").write_text(hdr + "\n" + json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
