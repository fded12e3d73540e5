"""Replicator dynamics in strategy space and in log-ratio (cumulative payoff) coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .game import PolymatrixGame, as_profile

BOUNDARY_FLOOR = 1e-15


class IntegrationError(RuntimeError):
    """The numerical orbit left the interior or stopped being finite."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t


def replicator_field(game: PolymatrixGame, x) -> np.ndarray:
    """x_dot_{i a} = x_{i a} (u_{i a}(x) - u_i(x)); works on (..., dim) batches."""
    x = as_profile(game, x)
    ua = x @ game.payoff_matrix.T
    u = game.player_sum(x * ua)
    return x * (ua - game.broadcast_players(u))


def to_z(game: PolymatrixGame, x) -> np.ndarray:
    """Log-ratio coordinates z_{i a} = ln(x_{i a} / x_{i 1}); the first slot of each player is 0."""
    x = as_profile(game, x)
    if np.any(x <= 0):
        raise ValueError("to_z needs a strictly interior profile")
    logx = np.log(x)
    first = logx[..., game.offsets[:-1]]
    return logx - game.broadcast_players(first)


def from_z(game: PolymatrixGame, z) -> np.ndarray:
    """Per-player softmax, shifted by the block max so large |z| cannot overflow."""
    z = np.asarray(z, dtype=float)
    zmax = np.maximum.reduceat(z, game.offsets[:-1], axis=-1)
    e = np.exp(z - game.broadcast_players(zmax))
    return e / game.broadcast_players(game.player_sum(e))


def z_field(game: PolymatrixGame, z) -> np.ndarray:
    """F_{i a}(z) = sum_j sum_b (A^{ij}_{a b} - A^{ij}_{1 b}) softmax(z_j)_b, with F_{i 1} = 0."""
    ua = from_z(game, z) @ game.payoff_matrix.T
    return ua - game.broadcast_players(ua[..., game.offsets[:-1]])


def divergence_estimate(game: PolymatrixGame, z, h_fd: float = 1e-5) -> float:
    """Central-difference trace of DF at z over the free coordinates (a >= 2)."""
    if not 0 < h_fd <= 1e-3:
        raise ValueError("h_fd must lie in (0, 1e-3]")
    z = np.asarray(z, dtype=float)
    anchored = set(game.offsets[:-1].tolist())
    trace = 0.0
    for k in range(game.dim):
        if k in anchored:
            continue
        zp, zm = z.copy(), z.copy()
        zp[k] += h_fd
        zm[k] -= h_fd
        trace += (z_field(game, zp)[k] - z_field(game, zm)[k]) / (2 * h_fd)
    return float(trace)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4_x"
    step: float = 0.01
    horizon: float = 100.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in ("rk4_x", "rk4_z"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.step > 0 or not self.horizon >= self.step:
            raise ValueError("need step > 0 and horizon >= step")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        n = int(round(self.horizon / self.step))
        if abs(n * self.step - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise ValueError(f"horizon {self.horizon} is not a multiple of step {self.step}")
        return n


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples of an orbit. ``states`` has shape (samples, dim), or
    (samples, batch, dim) when several initial conditions were integrated together."""

    times: np.ndarray
    states: np.ndarray
    step: float
    method: str
    action_counts: tuple[int, ...]

    def __len__(self):
        return len(self.times)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def member(self, b: int) -> "Trajectory":
        """One orbit out of a batched trajectory."""
        return Trajectory(self.times, self.states[:, b, :], self.step, self.method, self.action_counts)


def rk4(f: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, h: float, n_steps: int,
        record_every: int = 1, post: Callable[[np.ndarray, float], np.ndarray] | None = None):
    """Classical fixed-step RK4 for an autonomous field ``f``.

    ``post(y, t)`` runs after every step (renormalisation and sanity checks).
    Returns recorded times and states, always including t=0 and the last step.
    """
    y = np.array(y0, dtype=float)
    rec = list(range(0, n_steps + 1, record_every))
    if rec[-1] != n_steps:
        rec.append(n_steps)
    times = np.array(rec, dtype=float) * h
    out = np.empty((len(rec),) + y.shape)
    out[0] = y
    slot = 1
    for k in range(1, n_steps + 1):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if post is not None:
            y = post(y, k * h)
        if slot < len(rec) and rec[slot] == k:
            out[slot] = y
            slot += 1
    return times, out


def integrate(game: PolymatrixGame, x0, cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate replicator dynamics from an interior start (or a batch of starts).

    ``rk4_x`` steps in strategy space and divides each player's block by its
    sum after every step; any coordinate falling below 1e-15 is an error
    rather than being clipped. ``rk4_z`` steps the log-ratio field and maps
    recorded samples back with a softmax.
    """
    x0 = as_profile(game, x0)
    if np.any(x0 <= 0):
        raise ValueError("initial condition must be strictly interior")
    h, n = cfg.step, cfg.n_steps

    if cfg.method == "rk4_x":
        def post(y, t):
            if not np.all(np.isfinite(y)):
                raise IntegrationError("non-finite state", t)
            y = y / game.broadcast_players(game.player_sum(y))
            if np.any(y < BOUNDARY_FLOOR):
                raise IntegrationError("orbit reached the simplex boundary", t)
            return y

        times, states = rk4(lambda y: replicator_field(game, y), x0, h, n, cfg.record_every, post)
    else:
        def post(z, t):
            if not np.all(np.isfinite(z)):
                raise IntegrationError("non-finite state", t)
            return z

        times, zs = rk4(lambda z: z_field(game, z), to_z(game, x0), h, n, cfg.record_every, post)
        states = from_z(game, zs)
    return Trajectory(times, states, h, cfg.method, game.action_counts)
