"""Trajectory diagnostics: invariants, time averages, regret, recurrence and sections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .game import PolymatrixGame, as_profile, utilities

ON_PLANE_TOL = 1e-12


def _interior(x):
    if np.any(x <= 0):
        raise ValueError("profile must be strictly interior")
    return x


def constant_of_motion(game: PolymatrixGame, x_star, x):
    """Phi(x) = sum_i eta_i sum_a x*_{i a} ln x_{i a}. Accepts (..., dim) batches."""
    x = _interior(as_profile(game, x))
    x_star = as_profile(game, x_star)
    return np.sum(game.eta_flat * x_star * np.log(x), axis=-1)


def _xlogx(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)


@dataclass(frozen=True, eq=False)
class WeightedKL:
    total: np.ndarray | float
    components: np.ndarray  # unweighted KL(x*_i || x_i), shape (..., N)


def weighted_kl(game: PolymatrixGame, x_star, x) -> WeightedKL:
    """Psi = sum_i eta_i KL(x*_i || x_i), with 0 ln 0 = 0."""
    x = _interior(as_profile(game, x))
    x_star = as_profile(game, x_star)
    terms = _xlogx(x_star) - x_star * np.log(x)
    comps = game.player_sum(terms)
    return WeightedKL(comps @ np.asarray(game.eta), comps)


def weighted_entropy(game: PolymatrixGame, x_star) -> float:
    """sum_i eta_i H(x*_i); Psi + Phi + this is identically zero."""
    x_star = as_profile(game, x_star)
    return float(-np.sum(game.eta_flat * _xlogx(x_star)))


def _cumulative_mean(times, values):
    """Running trapezoidal average (1/t) int_0^t values; the t=0 entry is values[0]."""
    times = np.asarray(times, dtype=float)
    dt = np.diff(times).reshape((-1,) + (1,) * (values.ndim - 1))
    integral = np.concatenate([np.zeros((1,) + values.shape[1:]),
                               np.cumsum(0.5 * dt * (values[1:] + values[:-1]), axis=0)])
    out = np.empty_like(integral)
    out[0] = values[0]
    tt = times[1:].reshape((-1,) + (1,) * (values.ndim - 1))
    out[1:] = integral[1:] / tt
    return out


def time_average(traj: Trajectory) -> np.ndarray:
    if len(traj) < 2:
        raise ValueError("time averages need at least two samples")
    return _cumulative_mean(traj.times, traj.states)


def time_average_utility(game: PolymatrixGame, traj: Trajectory) -> np.ndarray:
    if len(traj) < 2:
        raise ValueError("time averages need at least two samples")
    return _cumulative_mean(traj.times, utilities(game, traj.states))


def regret_all(game: PolymatrixGame, traj: Trajectory) -> np.ndarray:
    """Reg_i(t) for every player, shape (samples, N); Reg_i(0) is reported as 0.

    Reg_i(t) = max_a (1/t) int_0^t (u_{i a} - u_i) ds, trapezoidal in time.
    """
    x = as_profile(game, traj.states)
    ua = x @ game.payoff_matrix.T
    gain = ua - game.broadcast_players(game.player_sum(x * ua))
    avg = _cumulative_mean(traj.times, gain)
    reg = np.maximum.reduceat(avg, game.offsets[:-1], axis=-1)
    reg[0] = 0.0
    return reg


def regret(game: PolymatrixGame, traj: Trajectory, i: int) -> tuple[np.ndarray, np.ndarray]:
    return traj.times, regret_all(game, traj)[:, i]


@dataclass(frozen=True)
class RecurrenceStats:
    epsilon: float
    transient: float
    first_return_time: float | None
    min_distance_after_transient: float
    time_of_min_distance: float


def recurrence_stats(traj: Trajectory, epsilon: float, transient: float = 10.0) -> RecurrenceStats:
    """Sup-norm returns to the initial state after ``transient``. No return is not an error."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if traj.horizon <= transient:
        raise ValueError("trajectory ends before the transient cutoff")
    late = traj.times > transient
    dist = np.max(np.abs(traj.states[late] - traj.states[0]), axis=-1)
    t_late = traj.times[late]
    hits = np.flatnonzero(dist < epsilon)
    k = int(np.argmin(dist))
    return RecurrenceStats(
        epsilon=float(epsilon),
        transient=float(transient),
        first_return_time=float(t_late[hits[0]]) if hits.size else None,
        min_distance_after_transient=float(dist[k]),
        time_of_min_distance=float(t_late[k]),
    )


@dataclass(frozen=True, eq=False)
class SectionCrossing:
    t: float
    state: np.ndarray
    direction: int


def poincare_section(traj: Trajectory, normal, offset: float = 0.0) -> list[SectionCrossing]:
    """Crossings of the hyperplane <normal, x> = offset, linearly interpolated.

    A sample lying on the plane (within 1e-12) counts only if the nearest
    off-plane samples on either side have opposite signs, so tangential
    touches are ignored.
    """
    normal = np.asarray(normal, dtype=float)
    if not np.any(normal):
        raise ValueError("normal must be nonzero")
    g = traj.states @ normal - offset
    s = np.where(np.abs(g) <= ON_PLANE_TOL, 0, np.sign(g)).astype(int)
    crossings = []
    k, K = 0, len(g)
    while k < K - 1:
        if s[k] != 0 and s[k + 1] == -s[k]:
            lam = g[k] / (g[k] - g[k + 1])
            t = traj.times[k] + lam * (traj.times[k + 1] - traj.times[k])
            x = traj.states[k] + lam * (traj.states[k + 1] - traj.states[k])
            crossings.append(SectionCrossing(float(t), x, int(s[k + 1])))
            k += 1
        elif s[k] != 0 and s[k + 1] == 0:
            m = k + 1
            while m < K and s[m] == 0:
                m += 1
            if m < K and s[m] == -s[k]:
                crossings.append(SectionCrossing(float(traj.times[k + 1]), traj.states[k + 1].copy(),
                                                 int(s[m])))
            k = m
        else:
            k += 1
    return crossings


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    times: np.ndarray
    phi: np.ndarray
    kl_total: np.ndarray
    kl_components: np.ndarray
    time_avg: np.ndarray
    time_avg_utility: np.ndarray
    regret: np.ndarray
    recurrence: RecurrenceStats | None
    x_star: np.ndarray
    notes: list[str] = field(default_factory=list)


def analyze(game: PolymatrixGame, traj: Trajectory, x_star=None, epsilon: float = 0.05,
            transient: float = 10.0) -> AnalysisReport:
    """Full diagnostic report; ``x_star`` defaults to the LP equilibrium."""
    notes = []
    if x_star is None:
        from .equilibrium import compute_nash

        nash = compute_nash(game)
        x_star = nash.profile
        notes.append(f"x* from LP, objective {nash.objective:.3g}, interior={nash.interior}")
    x_star = as_profile(game, x_star)
    kl = weighted_kl(game, x_star, traj.states)
    rec = None
    if traj.horizon > transient:
        rec = recurrence_stats(traj, epsilon, transient)
    else:
        notes.append("horizon shorter than transient; recurrence not scanned")
    return AnalysisReport(
        times=traj.times,
        phi=constant_of_motion(game, x_star, traj.states),
        kl_total=kl.total,
        kl_components=kl.components,
        time_avg=time_average(traj),
        time_avg_utility=time_average_utility(game, traj),
        regret=regret_all(game, traj),
        recurrence=rec,
        x_star=x_star,
        notes=notes,
    )
