"""Time-averaged strategies, utilities and regret for the reduced RPS game and the 5-player chain."""

import argparse
from pathlib import Path

import numpy as np

from egtsquared import IntegratorConfig, build_chain, build_generalized_rps_reduced, integrate
from egtsquared.analysis import regret_all, time_average, time_average_utility
from egtsquared.io import header_line, state_columns, write_csv

STARTS = {
    "rps": np.array([0.5, 0.25, 0.25, 0.5, 0.25, 0.25]),
    "chain": np.array([0.3, 0.4, 0.3, 0.2, 0.1, 0.7, 0.5, 0.3, 0.2, 0.7, 0.2, 0.1, 0.4, 0.2, 0.4]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.8, help="mu of the reduced RPS game")
    ap.add_argument("--chain-mu", default="0.1,0.5,0.8,0.5")
    ap.add_argument("--horizon", type=float, default=5000.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--record-every", type=int, default=10)
    ap.add_argument("--out", default="results/time_averages")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hdr = header_line("scripts/time_averages.py", vars(args))
    games = {"rps": build_generalized_rps_reduced(3, args.mu),
             "chain": build_chain([float(m) for m in args.chain_mu.split(",")])}
    cfg = IntegratorConfig(step=args.step, horizon=args.horizon, record_every=args.record_every)
    for name, game in games.items():
        traj = integrate(game, STARTS[name], cfg)
        t = traj.times[:, None]
        N = game.n_players
        write_csv(out / f"{name}_timeavg.csv", ["t"] + state_columns(game.action_counts),
                  np.hstack([t, time_average(traj)]), hdr)
        write_csv(out / f"{name}_utility.csv", ["t"] + [f"u_{i}" for i in range(N)],
                  np.hstack([t, time_average_utility(game, traj)]), hdr)
        reg = regret_all(game, traj)
        write_csv(out / f"{name}_regret.csv", ["t"] + [f"reg_{i}" for i in range(N)], np.hstack([t, reg]), hdr)
        late = traj.times >= 1
        print(f"{name}: final average {np.round(time_average(traj)[-1], 4).tolist()}, "
              f"max t*Reg {np.max(traj.times[late, None] * reg[late]):.3f}")


if __name__ == "__main__":
    main()
