"""Preset games used in the experiments: reduced RPS, the population/environment chain, butterflies."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .game import EdgeGame, GameError, PolymatrixGame, SelfLoop


def rps_matrix(n: int = 3) -> np.ndarray:
    """Circulant generalized rock-paper-scissors matrix.

    Action i beats i-1 and loses to i+1 (cyclically), so row 0 reads
    (0, -1, 0, ..., 0, 1).
    """
    if n < 3:
        raise GameError(f"generalized RPS needs n >= 3, got {n}")
    P = np.zeros((n, n))
    for i in range(n):
        P[i, (i + 1) % n] = -1.0
        P[i, (i - 1) % n] = 1.0
    return P


def build_generalized_rps_reduced(n: int = 3, mu: float = 1.0) -> PolymatrixGame:
    """Two-player static game equivalent to the time-evolving RPS system.

    Player 0 is the population (self-loop P, payoff mu*I against the
    environment), player 1 the environment (payoff -I). eta = (1, mu).
    """
    if mu <= 0:
        raise GameError(f"mu must be positive, got {mu}")
    P = rps_matrix(n)
    I = np.eye(n)
    return PolymatrixGame(
        action_counts=(n, n),
        edges=(EdgeGame(0, 1, mu * I, -I),),
        self_loops=(SelfLoop(0, P),),
        eta=(1.0, mu),
        name=f"rps-reduced(n={n}, mu={mu:g})",
    )


def build_chain(mus: Sequence[float], n: int = 3) -> PolymatrixGame:
    """Line of len(mus)+1 players alternating population / environment.

    Even positions are populations with an RPS self-loop. Edge m joins
    players m and m+1 with A^{m,m+1} = mu_m I and A^{m+1,m} = -I, so the
    one-edge chain is exactly the reduced RPS game. The weights
    eta_0 = 1, eta_{m+1} = eta_m * mu_m cancel each edge pairwise.
    """
    mus = [float(m) for m in mus]
    if not mus:
        raise GameError("chain needs at least one mu")
    if any(m <= 0 for m in mus):
        raise GameError(f"all mu must be positive, got {mus}")
    P = rps_matrix(n)
    I = np.eye(n)
    k = len(mus) + 1
    eta = [1.0]
    for m in mus:
        eta.append(eta[-1] * m)
    return PolymatrixGame(
        action_counts=(n,) * k,
        edges=tuple(EdgeGame(m, m + 1, mu * I, -I) for m, mu in enumerate(mus)),
        self_loops=tuple(SelfLoop(m, P) for m in range(0, k, 2)),
        eta=tuple(eta),
        name=f"chain(mus={mus}, n={n})",
    )


BUTTERFLY_ENVIRONMENTS = (7, 8)


def build_butterfly(n_clusters: int = 1, n: int = 3) -> PolymatrixGame:
    """Butterfly graph, or a ring of butterfly wings for ``n_clusters > 1``.

    ``n_clusters == 1`` gives the 9-node butterfly: populations 0..6,
    environments 7 and 8, with 0-3 attached to 7 and 3-6 attached to 8.

    For ``n_clusters = c > 1`` the wings are closed into a ring of 4c players.
    Unit k holds environment 4k, private populations 4k+1 and 4k+2 and the
    shared population 4k+3, which also attaches to the environment of unit
    k+1 (mod c). Every environment therefore touches four populations, as in
    the single butterfly. Every edge pays I to the population and -I to the
    environment; all weights are 1.
    """
    if n_clusters < 1:
        raise GameError("n_clusters must be >= 1")
    P = rps_matrix(n)
    I = np.eye(n)
    if n_clusters == 1:
        populations = list(range(7))
        links = [(p, 7) for p in range(4)] + [(p, 8) for p in range(3, 7)]
        count = 9
    else:
        c = n_clusters
        populations = [4 * k + r for k in range(c) for r in (1, 2, 3)]
        links = []
        for k in range(c):
            env = 4 * k
            shared_prev = 4 * ((k - 1) % c) + 3
            for p in (4 * k + 1, 4 * k + 2, 4 * k + 3, shared_prev):
                links.append((p, env))
        count = 4 * c
    return PolymatrixGame(
        action_counts=(n,) * count,
        edges=tuple(EdgeGame(p, e, I, -I) for p, e in links),
        self_loops=tuple(SelfLoop(p, P) for p in populations),
        eta=None,
        name=f"butterfly(clusters={n_clusters}, n={n})",
    )


def matching_pennies() -> PolymatrixGame:
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return PolymatrixGame((2, 2), edges=(EdgeGame(0, 1, A, -A.T),), name="matching-pennies")
