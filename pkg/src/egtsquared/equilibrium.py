"""Nash equilibria of rescaled zero-sum polymatrix games via linear programming."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import PolymatrixGame, as_profile, check_simplex, verify_rescaled_zero_sum
from .lp import LinearProgram, LPError, solve_lp

OBJECTIVE_TOL = 1e-8
NASH_TOL = 1e-8
INTERIOR_MARGIN = 1e-9


class NotRescaledZeroSumError(ValueError):
    """The game fails the zero-sum check, or the LP optimum is not 0."""


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class NashResult:
    profile: np.ndarray
    values: np.ndarray
    objective: float
    interior: bool
    interiority_margin: float
    nash_residual: float

    def split(self, game: PolymatrixGame):
        return game.split(self.profile)


def assemble_nash_lp(game: PolymatrixGame, check: bool = True) -> LinearProgram:
    """min sum_i eta_i v_i  s.t.  v_i >= u_{i a}(x) for all i, a;  x_i in the simplex.

    Variables are the flat profile x followed by one free value v_i per player.
    """
    if check:
        zs = verify_rescaled_zero_sum(game)
        if not zs.ok:
            raise NotRescaledZeroSumError(f"game is not rescaled zero-sum (residual {zs.residual:.3g})")
    d, N = game.dim, game.n_players
    E = np.zeros((d, N))
    for i in range(N):
        E[game.offsets[i]:game.offsets[i + 1], i] = 1.0
    G = np.hstack([game.payoff_matrix, -E])
    A_eq = np.hstack([E.T, np.zeros((N, N))])
    c = np.concatenate([np.zeros(d), np.asarray(game.eta)])
    lower = np.concatenate([np.zeros(d), np.full(N, -np.inf)])
    return LinearProgram(c=c, G=G, h=np.zeros(d), A_eq=A_eq, b_eq=np.ones(N), lower=lower)


def verify_nash(game: PolymatrixGame, x) -> float:
    """Largest gain any player gets from a pure deviation, max_{i,a} u_{i a}(x) - u_i(x).

    Pure deviations suffice because payoffs are linear in a player's own strategy.
    """
    x = as_profile(game, x)
    ua = x @ game.payoff_matrix.T
    u = game.player_sum(x * ua)
    return float(np.max(ua - game.broadcast_players(u), axis=-1))


def is_nash(game: PolymatrixGame, x, tol: float = NASH_TOL) -> bool:
    return verify_nash(game, x) <= tol


def compute_nash(game: PolymatrixGame) -> NashResult:
    """Solve the equilibrium LP and certify the result.

    When several equilibria exist the returned one is whichever vertex the
    pivot order reaches first.
    """
    lp = assemble_nash_lp(game)
    try:
        sol = solve_lp(lp)
    except LPError as exc:
        raise SolverError(f"LP solver failed: {exc}") from exc
    if abs(sol.objective) > OBJECTIVE_TOL:
        raise NotRescaledZeroSumError(f"LP optimum {sol.objective:.3g} is not zero")
    x = np.clip(sol.x[:game.dim], 0.0, None)
    x = x / game.broadcast_players(game.player_sum(x))
    check_simplex(game, x)
    residual = verify_nash(game, x)
    if residual > NASH_TOL:
        raise SolverError(f"LP solution is not an equilibrium (deviation gain {residual:.3g})")
    margin = float(x.min())
    return NashResult(profile=x, values=sol.x[game.dim:], objective=sol.objective,
                      interior=margin > INTERIOR_MARGIN, interiority_margin=margin,
                      nash_residual=residual)
