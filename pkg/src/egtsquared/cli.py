"""Command-line interface: one subcommand per pipeline stage, composed through files."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import analyze, poincare_section
from .dynamics import IntegrationError, IntegratorConfig, integrate
from .equilibrium import NotRescaledZeroSumError, SolverError, compute_nash
from .game import GameError, utilities, validate, verify_rescaled_zero_sum
from .io import (FormatError, format_csv, header_line, load_game, load_system, read_trajectory,
                 save_game, save_system, state_columns, write_csv, write_trajectory)
from .presets import build_butterfly, build_chain, build_generalized_rps_reduced
from .reduction import build_generalized_rps_system, reduce_to_polymatrix

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _params(args, *names) -> dict:
    return {k: getattr(args, k) for k in names}


def cmd_validate(args):
    game = load_game(args.game)
    problems = validate(game)
    for p in problems:
        print(f"invalid: {p}")
    if problems:
        return EXIT_INVALID
    check = verify_rescaled_zero_sum(game)
    print(f"players={game.n_players} dim={game.dim} eta={list(game.eta)}")
    print(f"rescaled zero-sum: {'yes' if check.ok else 'no'} (residual {check.residual:.3g})")
    return EXIT_OK if check.ok else EXIT_INVALID


def cmd_nash(args):
    game = load_game(args.game)
    res = compute_nash(game)
    doc = {
        "profile": [p.tolist() for p in res.split(game)],
        "values": res.values.tolist(),
        "utilities": utilities(game, res.profile).tolist(),
        "objective": res.objective,
        "interior": res.interior,
        "interiority_margin": res.interiority_margin,
        "nash_residual": res.nash_residual,
    }
    text = header_line("nash", _params(args, "game")) + "\n" + json.dumps(doc, indent=2) + "\n"
    _emit(args.out, text)
    return EXIT_OK


def cmd_reduce(args):
    system = load_system(args.system)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        game = reduce_to_polymatrix(system)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    save_game(game, args.out, header_line("reduce", _params(args, "system")))
    return EXIT_OK


def cmd_preset(args):
    hdr = header_line("preset", _params(args, "name", "n", "mu", "clusters"))
    if args.name == "rps-reduced":
        save_game(build_generalized_rps_reduced(args.n, _single_mu(args.mu)), args.out, hdr)
    elif args.name == "rps-system":
        save_system(build_generalized_rps_system(args.n, _single_mu(args.mu)), args.out, hdr)
    elif args.name == "chain":
        save_game(build_chain(args.mu or [1.0], args.n), args.out, hdr)
    else:
        save_game(build_butterfly(args.clusters, args.n), args.out, hdr)
    return EXIT_OK


def _single_mu(mu):
    if mu is None:
        return 1.0
    if len(mu) != 1:
        raise GameError("this preset takes a single --mu value")
    return mu[0]


def cmd_simulate(args):
    game = load_game(args.game)
    if args.x0 is not None:
        x0 = np.asarray(args.x0)
        if x0.size != game.dim:
            raise GameError(f"--x0 has {x0.size} entries, game needs {game.dim}")
    else:
        rng = np.random.default_rng(args.seed)
        x0 = np.concatenate([rng.dirichlet(np.ones(n)) for n in game.action_counts])
    cfg = IntegratorConfig(args.method, args.step, args.horizon, args.record_every)
    traj = integrate(game, x0, cfg)
    params = _params(args, "game", "horizon", "step", "record_every", "method", "seed")
    params["x0"] = [float(v) for v in x0]
    write_trajectory(args.out, traj, header_line("simulate", params))
    return EXIT_OK


def cmd_analyze(args):
    game = load_game(args.game)
    traj = read_trajectory(args.trajectory)
    if traj.action_counts != game.action_counts:
        raise GameError("trajectory columns do not match the game's action counts")
    rep = analyze(game, traj, x_star=args.x_star, epsilon=args.epsilon, transient=args.transient)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hdr = header_line("analyze", _params(args, "game", "trajectory", "epsilon", "transient", "x_star"))
    N = game.n_players
    t = rep.times[:, None]
    write_csv(out / "phi.csv", ["t", "phi"], np.column_stack([rep.times, rep.phi]), hdr)
    write_csv(out / "kl.csv", ["t", "total"] + [f"kl_{i}" for i in range(N)],
              np.hstack([t, rep.kl_total[:, None], rep.kl_components]), hdr)
    write_csv(out / "timeavg.csv", ["t"] + state_columns(game.action_counts) + [f"u_{i}" for i in range(N)],
              np.hstack([t, rep.time_avg, rep.time_avg_utility]), hdr)
    write_csv(out / "regret.csv", ["t"] + [f"reg_{i}" for i in range(N)], np.hstack([t, rep.regret]), hdr)
    rec = rep.recurrence
    summary = {
        "x_star": rep.x_star.tolist(),
        "notes": rep.notes,
        "recurrence": None if rec is None else {
            "epsilon": rec.epsilon,
            "transient": rec.transient,
            "returned": rec.first_return_time is not None,
            "first_return_time": rec.first_return_time,
            "min_distance_after_transient": rec.min_distance_after_transient,
            "time_of_min_distance": rec.time_of_min_distance,
        },
    }
    (out / "recurrence.txt").write_text(hdr + "\n" + json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_section(args):
    traj = read_trajectory(args.trajectory)
    normal = np.asarray(args.normal)
    if normal.size != traj.states.shape[1]:
        raise GameError(f"--normal has {normal.size} entries, trajectory has {traj.states.shape[1]} coordinates")
    crossings = poincare_section(traj, normal, args.offset)
    rows = np.array([[c.t, c.direction, *c.state] for c in crossings]).reshape(-1, 2 + normal.size)
    text = format_csv(["t", "direction"] + state_columns(traj.action_counts), rows,
                      header_line("section", _params(args, "trajectory", "normal", "offset")))
    if not crossings:  # format_csv pads an empty array to one row
        text = "\n".join(text.splitlines()[:2]) + "\n"
    _emit(args.out, text)
    return EXIT_OK


def _emit(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egtsq", description=__doc__)
    p.add_argument("--version", action="version", version=f"egtsquared {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check invariants and the rescaled zero-sum property")
    s.add_argument("game")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("nash", help="equilibrium via linear programming")
    s.add_argument("game")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_nash)

    s = sub.add_parser("reduce", help="turn a population/environment system into a game file")
    s.add_argument("system")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("preset", help="write a built-in game or system")
    s.add_argument("name", choices=["rps-reduced", "rps-system", "chain", "butterfly"])
    s.add_argument("--n", type=int, default=3, help="actions per player")
    s.add_argument("--mu", type=_floats, default=None, help="mu, or comma list of edge mus for chain")
    s.add_argument("--clusters", type=int, default=1)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_preset)

    s = sub.add_parser("simulate", help="integrate replicator dynamics")
    s.add_argument("game")
    s.add_argument("--x0", type=_floats, default=None, help="flat initial profile; random if omitted")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--horizon", type=_positive, default=100.0)
    s.add_argument("--step", type=_positive, default=0.01)
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--method", choices=["rk4_x", "rk4_z"], default="rk4_x")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("analyze", help="invariants, time averages, regret and recurrence")
    s.add_argument("game")
    s.add_argument("trajectory")
    s.add_argument("--x-star", type=_floats, default=None, help="reference profile; LP equilibrium if omitted")
    s.add_argument("--epsilon", type=_positive, default=0.05)
    s.add_argument("--transient", type=float, default=10.0)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("section", help="hyperplane crossings of a trajectory")
    s.add_argument("trajectory")
    s.add_argument("--normal", type=_floats, required=True, help="use --normal=-1,1,... for a leading minus")
    s.add_argument("--offset", type=float, default=0.0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_section)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, GameError, NotRescaledZeroSumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
