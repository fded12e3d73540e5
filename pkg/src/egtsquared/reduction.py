"""Time-evolving population/environment systems and their static polymatrix reduction."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .game import (ANTISYMMETRY_TOL, EdgeGame, GameError, PolymatrixGame, SelfLoop,
                   verify_rescaled_zero_sum)
from .presets import rps_matrix


@dataclass(frozen=True, eq=False)
class Coupling:
    """Population ``pop`` coevolving with environment ``env``.

    ``A_pop_env`` enters the population's payoff drift, ``A_env_pop`` drives the
    environment; both orientations are stored so the raw field needs no sign
    conventions.
    """

    pop: int
    env: int
    A_pop_env: np.ndarray
    A_env_pop: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A_pop_env", np.array(self.A_pop_env, dtype=float, ndmin=2))
        object.__setattr__(self, "A_env_pop", np.array(self.A_env_pop, dtype=float, ndmin=2))


@dataclass(frozen=True, eq=False)
class TimeEvolvingSystem:
    """Populations y_l with base games P_l, environments w_k, bipartite couplings.

    Couplings only ever join a population to an environment, so the
    bipartite structure holds by construction; indices are range-checked.
    ``eta`` is optional preset knowledge carried into the reduced game.
    """

    n: int
    populations: tuple[np.ndarray, ...]
    environments: int
    couplings: tuple[Coupling, ...]
    eta: tuple[float, ...] | None = None

    def __post_init__(self):
        pops = tuple(np.array(P, dtype=float, ndmin=2) for P in self.populations)
        object.__setattr__(self, "populations", pops)
        object.__setattr__(self, "couplings", tuple(self.couplings))
        n = self.n
        for l, P in enumerate(pops):
            if P.shape != (n, n):
                raise GameError(f"population {l}: base matrix shape {P.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(P)) or np.max(np.abs(P + P.T)) > ANTISYMMETRY_TOL:
                raise GameError(f"population {l}: base matrix must be finite and antisymmetric")
        seen = set()
        for c in self.couplings:
            if not 0 <= c.pop < len(pops):
                raise GameError(f"coupling ({c.pop},{c.env}): no population {c.pop}; "
                                "couplings must join a population to an environment")
            if not 0 <= c.env < self.environments:
                raise GameError(f"coupling ({c.pop},{c.env}): no environment {c.env}; "
                                "couplings must join a population to an environment")
            if (c.pop, c.env) in seen:
                raise GameError(f"coupling ({c.pop},{c.env}) given twice")
            seen.add((c.pop, c.env))
            for label, A in (("A_pop_env", c.A_pop_env), ("A_env_pop", c.A_env_pop)):
                if A.shape != (n, n) or not np.all(np.isfinite(A)):
                    raise GameError(f"coupling ({c.pop},{c.env}): {label} must be a finite {n}x{n} matrix")
        if self.eta is not None and len(self.eta) != len(pops) + self.environments:
            raise GameError("eta must have one entry per population and environment")

    @property
    def n_populations(self) -> int:
        return len(self.populations)

    @property
    def n_nodes(self) -> int:
        return self.n_populations + self.environments


@dataclass(frozen=True, eq=False)
class SystemState:
    y: tuple[np.ndarray, ...]
    w: tuple[np.ndarray, ...]


def build_generalized_rps_system(n: int = 3, mu: float = 1.0) -> TimeEvolvingSystem:
    """One RPS population with one environment; environment payoff -I, population drift mu*I."""
    if n < 3:
        raise GameError(f"generalized RPS needs n >= 3, got {n}")
    if mu <= 0:
        raise GameError("mu must be positive")
    I = np.eye(n)
    return TimeEvolvingSystem(n=n, populations=(rps_matrix(n),), environments=1,
                              couplings=(Coupling(0, 0, mu * I, -I),), eta=(1.0, mu))


def raw_field(system: TimeEvolvingSystem, s: SystemState) -> SystemState:
    """Coupled population/environment equations evaluated in their original form.

    Environment k:  w_dot_{k,i} = w_{k,i} sum_l sum_j w_{k,j} ((A^{k,l} y_l)_i - (A^{k,l} y_l)_j)
    Population l:   y_dot_l = y_l * (P_l(w) y_l - y_l^T P_l(w) y_l),
    with P_l(w) = P_l + sum_k W^{l,k} and W^{l,k}_{ij} = (A^{l,k} w_k)_i - (A^{l,k} w_k)_j.
    """
    if len(s.y) != system.n_populations or len(s.w) != system.environments:
        raise GameError("state does not match the system's node counts")
    y = [np.asarray(v, dtype=float) for v in s.y]
    w = [np.asarray(v, dtype=float) for v in s.w]
    if any(v.shape != (system.n,) for v in y + w):
        raise GameError(f"every node needs a length-{system.n} vector")

    Pw = [P.copy() for P in system.populations]
    w_rate = [np.zeros(system.n) for _ in w]
    for c in system.couplings:
        a = c.A_pop_env @ w[c.env]
        Pw[c.pop] += a[:, None] - a[None, :]
        v = c.A_env_pop @ y[c.pop]
        wk = w[c.env]
        w_rate[c.env] += v * wk.sum() - wk @ v
    y_dot = tuple(yl * (P @ yl - yl @ P @ yl) for yl, P in zip(y, Pw))
    w_dot = tuple(wk * r for wk, r in zip(w, w_rate))
    return SystemState(y_dot, w_dot)


def reduce_to_polymatrix(system: TimeEvolvingSystem, warn: bool = True) -> PolymatrixGame:
    """Static polymatrix game whose replicator dynamics reproduce the system.

    Populations come first (players 0..n_y-1), environments after. Each
    population keeps its base game as a self-loop; each coupling becomes an
    edge carrying both oriented matrices. Without preset weights eta is
    all ones, and a failed zero-sum check is reported as a warning.
    """
    n_y = system.n_populations
    game = PolymatrixGame(
        action_counts=(system.n,) * system.n_nodes,
        edges=tuple(EdgeGame(c.pop, n_y + c.env, c.A_pop_env, c.A_env_pop) for c in system.couplings),
        self_loops=tuple(SelfLoop(l, P) for l, P in enumerate(system.populations)),
        eta=system.eta,
        name="reduced-system",
    )
    if warn:
        check = verify_rescaled_zero_sum(game)
        if not check.ok:
            warnings.warn(f"reduced game is not rescaled zero-sum with eta={game.eta} "
                          f"(residual {check.residual:.3g})", stacklevel=2)
    return game


def flatten_state(s: SystemState) -> np.ndarray:
    return np.concatenate([np.asarray(v, dtype=float) for v in (*s.y, *s.w)])


def lift_profile(x, system: TimeEvolvingSystem) -> SystemState:
    x = np.asarray(x, dtype=float)
    if x.shape != (system.n * system.n_nodes,):
        raise GameError(f"profile of length {x.size} does not fit {system.n_nodes} nodes of size {system.n}")
    parts = x.reshape(system.n_nodes, system.n)
    return SystemState(tuple(parts[:system.n_populations]), tuple(parts[system.n_populations:]))


def raw_field_flat(system: TimeEvolvingSystem, x) -> np.ndarray:
    return flatten_state(raw_field(system, lift_profile(x, system)))


def uniform_state(system: TimeEvolvingSystem) -> SystemState:
    u = np.full(system.n, 1.0 / system.n)
    return SystemState((u,) * system.n_populations, (u,) * system.environments)


def random_interior_state(system: TimeEvolvingSystem, rng: np.random.Generator,
                          concentration: float = 1.0) -> SystemState:
    draw = lambda: rng.dirichlet(np.full(system.n, concentration))
    return SystemState(tuple(draw() for _ in range(system.n_populations)),
                       tuple(draw() for _ in range(system.environments)))

