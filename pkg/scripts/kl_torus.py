"""Weighted KL divergence on a ring of butterfly clusters (4 players per cluster)."""

import argparse
from pathlib import Path

import numpy as np

from egtsquared import IntegratorConfig, build_butterfly, compute_nash, integrate, weighted_kl
from egtsquared.io import header_line, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--clusters", type=int, default=25)
    ap.add_argument("--horizon", type=float, default=200.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--record-every", type=int, default=10)
    ap.add_argument("--concentration", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=303)
    ap.add_argument("--out", default="results/kl_torus")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    game = build_butterfly(args.clusters)
    rng = np.random.default_rng(args.seed)
    x0 = np.concatenate([rng.dirichlet(np.full(n, args.concentration)) for n in game.action_counts])
    traj = integrate(game, x0, IntegratorConfig(step=args.step, horizon=args.horizon,
                                                record_every=args.record_every))
    kl = weighted_kl(game, compute_nash(game).profile, traj.states)
    cols = ["t", "total"] + [f"kl_{i}" for i in range(game.n_players)]
    write_csv(out / "kl.csv", cols, np.column_stack([traj.times, kl.total, kl.components]),
              header_line("scripts/kl_torus.py", vars(args)))
    drift = np.max(np.abs(kl.total - kl.total[0])) / abs(kl.total[0])
    swing = np.max(np.ptp(kl.components, axis=0))
    print(f"players={game.n_players} total relative drift={drift:.2e} largest component swing={swing:.3f}")


if __name__ == "__main__":
    main()
