"""Poincare section y2 - y1 - w2 + w1 = 0 for ten reduced-RPS orbits."""

import argparse
from pathlib import Path

import numpy as np

from egtsquared import IntegratorConfig, build_generalized_rps_reduced, integrate, poincare_section
from egtsquared.io import header_line, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.8)
    ap.add_argument("--horizon", type=float, default=5000.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--out", default="results/poincare")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    game = build_generalized_rps_reduced(3, args.mu)
    starts = np.array([[0.5, 0.01 * k, 0.5 - 0.01 * k, 0.5, 0.25, 0.25] for k in range(1, 11)])
    batch = integrate(game, starts, IntegratorConfig(step=args.step, horizon=args.horizon))
    normal = np.array([-1.0, 1.0, 0.0, 1.0, -1.0, 0.0])
    rows = []
    for b in range(len(starts)):
        crossings = poincare_section(batch.member(b), normal, 0.0)
        rows += [[b + 1, c.t, c.direction, *c.state] for c in crossings]
        print(f"k={b + 1}: {len(crossings)} crossings")
    cols = ["k", "t", "direction"] + [f"x_{i}_{a}" for i in range(2) for a in range(3)]
    write_csv(out / "section.csv", cols, rows, header_line("scripts/poincare.py", vars(args)))


if __name__ == "__main__":
    main()
