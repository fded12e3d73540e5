"""Polymatrix game model: storage, payoffs, validation and the zero-sum check."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

ANTISYMMETRY_TOL = 1e-12
SIMPLEX_TOL = 1e-10


class GameError(ValueError):
    """Raised for structurally malformed games or mismatched profiles."""


@dataclass(frozen=True, eq=False)
class EdgeGame:
    """Bimatrix game on edge (i, j). ``A_ij`` pays i, ``A_ji`` pays j."""

    i: int
    j: int
    A_ij: np.ndarray
    A_ji: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A_ij", np.array(self.A_ij, dtype=float, ndmin=2))
        object.__setattr__(self, "A_ji", np.array(self.A_ji, dtype=float, ndmin=2))


@dataclass(frozen=True, eq=False)
class SelfLoop:
    i: int
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", np.array(self.A, dtype=float, ndmin=2))


@dataclass(frozen=True, eq=False)
class PolymatrixGame:
    """A polymatrix game with rescaling weights ``eta``.

    Profiles are handled as flat float arrays of length ``dim``, player-major
    and action-minor; ``split``/``join`` convert to and from per-player
    vectors. The constructor rejects games whose matrices cannot be placed on
    the graph at all (bad indices or shapes); semantic invariants such as
    antisymmetry or finiteness are reported by :func:`validate`.
    """

    action_counts: tuple[int, ...]
    edges: tuple[EdgeGame, ...] = ()
    self_loops: tuple[SelfLoop, ...] = ()
    eta: tuple[float, ...] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        counts = tuple(int(n) for n in self.action_counts)
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "self_loops", tuple(self.self_loops))
        eta = (1.0,) * len(counts) if self.eta is None else tuple(float(e) for e in self.eta)
        object.__setattr__(self, "eta", eta)
        if len(eta) != len(counts):
            raise GameError(f"eta has {len(eta)} entries for {len(counts)} players")
        for e in self.edges:
            self._check_player(e.i, f"edge ({e.i},{e.j})")
            self._check_player(e.j, f"edge ({e.i},{e.j})")
            if e.A_ij.shape != (counts[e.i], counts[e.j]):
                raise GameError(f"edge ({e.i},{e.j}): A_ij has shape {e.A_ij.shape}, "
                                f"expected {(counts[e.i], counts[e.j])}")
            if e.A_ji.shape != (counts[e.j], counts[e.i]):
                raise GameError(f"edge ({e.i},{e.j}): A_ji has shape {e.A_ji.shape}, "
                                f"expected {(counts[e.j], counts[e.i])}")
        for s in self.self_loops:
            self._check_player(s.i, f"self-loop {s.i}")
            if s.A.shape != (counts[s.i], counts[s.i]):
                raise GameError(f"self-loop {s.i}: shape {s.A.shape}, "
                                f"expected {(counts[s.i], counts[s.i])}")

    def _check_player(self, i, what):
        if not 0 <= i < len(self.action_counts):
            raise GameError(f"{what}: player index {i} out of range")

    @property
    def n_players(self) -> int:
        return len(self.action_counts)

    @cached_property
    def offsets(self) -> np.ndarray:
        """Start index of each player's block in a flat profile (length N+1)."""
        return np.concatenate([[0], np.cumsum(self.action_counts)]).astype(int)

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    @cached_property
    def payoff_matrix(self) -> np.ndarray:
        """Dense block matrix M with block (i, j) = A^{ij}, self-loops on the diagonal.

        ``M @ x`` stacks every player's action utilities u_{i alpha}(x).
        """
        M = np.zeros((self.dim, self.dim))
        o = self.offsets
        for e in self.edges:
            M[o[e.i]:o[e.i + 1], o[e.j]:o[e.j + 1]] += e.A_ij
            M[o[e.j]:o[e.j + 1], o[e.i]:o[e.i + 1]] += e.A_ji
        for s in self.self_loops:
            M[o[s.i]:o[s.i + 1], o[s.i]:o[s.i + 1]] += s.A
        M.setflags(write=False)
        return M

    @cached_property
    def eta_flat(self) -> np.ndarray:
        return np.repeat(np.asarray(self.eta), self.action_counts)

    def split(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=float)
        return [x[..., self.offsets[i]:self.offsets[i + 1]] for i in range(self.n_players)]

    def join(self, parts: Sequence[Sequence[float]]) -> np.ndarray:
        return np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts])

    def player_sum(self, v) -> np.ndarray:
        """Sum a (..., dim) array over each player's block -> (..., N)."""
        return np.add.reduceat(np.asarray(v, dtype=float), self.offsets[:-1], axis=-1)

    def broadcast_players(self, v) -> np.ndarray:
        """Inverse of ``player_sum`` shape-wise: repeat per-player values over actions."""
        return np.repeat(v, self.action_counts, axis=-1)

    def uniform_profile(self) -> np.ndarray:
        return 1.0 / self.broadcast_players(np.asarray(self.action_counts, dtype=float))


def as_profile(game: PolymatrixGame, x) -> np.ndarray:
    """Coerce ``x`` (flat array or per-player vectors) into a flat profile array."""
    if isinstance(x, (list, tuple)) and x and np.ndim(x[0]) == 1:
        x = game.join(x)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != game.dim:
        raise GameError(f"profile has {x.shape[-1]} coordinates, game needs {game.dim}")
    return x


def check_simplex(game: PolymatrixGame, x, tol=SIMPLEX_TOL) -> np.ndarray:
    x = as_profile(game, x)
    if np.any(x < 0) or np.any(np.abs(game.player_sum(x) - 1.0) > tol):
        raise GameError("profile is not a product of probability vectors")
    return x


def validate(game: PolymatrixGame) -> list[str]:
    """Return human-readable invariant violations; empty means the game is well formed."""
    problems = []
    for i, n in enumerate(game.action_counts):
        if n < 1:
            problems.append(f"player {i}: action count {n} is not positive")
    for i, eta in enumerate(game.eta):
        if not (np.isfinite(eta) and eta > 0):
            problems.append(f"player {i}: eta={eta} is not a positive finite number")
    seen = set()
    for e in game.edges:
        key = frozenset((e.i, e.j))
        if e.i == e.j:
            problems.append(f"edge ({e.i},{e.j}): self-loops must be given as self_loops")
        elif key in seen:
            problems.append(f"edge ({e.i},{e.j}): duplicate edge for this pair")
        seen.add(key)
        for label, A in (("A_ij", e.A_ij), ("A_ji", e.A_ji)):
            if not np.all(np.isfinite(A)):
                problems.append(f"edge ({e.i},{e.j}): {label} has non-finite entries")
    loops = set()
    for s in game.self_loops:
        if s.i in loops:
            problems.append(f"self-loop {s.i}: duplicate self-loop")
        loops.add(s.i)
        if not np.all(np.isfinite(s.A)):
            problems.append(f"self-loop {s.i}: non-finite entries")
        elif np.max(np.abs(s.A + s.A.T), initial=0.0) > ANTISYMMETRY_TOL:
            problems.append(f"self-loop {s.i}: matrix is not antisymmetric "
                            f"(max |A + A^T| = {np.max(np.abs(s.A + s.A.T)):.3g})")
    return problems


def action_utilities(game: PolymatrixGame, x, i: int | None = None) -> np.ndarray:
    """u_{i alpha}(x) for player ``i``, or the stacked vector for all players."""
    x = as_profile(game, x)
    ua = x @ game.payoff_matrix.T
    if i is None:
        return ua
    return ua[..., game.offsets[i]:game.offsets[i + 1]]


def utilities(game: PolymatrixGame, x) -> np.ndarray:
    """Every player's payoff u_i(x), shape (..., N)."""
    x = as_profile(game, x)
    return game.player_sum(x * action_utilities(game, x))


def utility(game: PolymatrixGame, x, i: int) -> float:
    x = as_profile(game, x)
    xi = x[..., game.offsets[i]:game.offsets[i + 1]]
    return np.sum(xi * action_utilities(game, x, i), axis=-1)


def rescaled_utility_sum(game: PolymatrixGame, x):
    """sum_i eta_i u_i(x); identically zero for rescaled zero-sum games."""
    return utilities(game, x) @ np.asarray(game.eta)


@dataclass(frozen=True)
class ZeroSumCheck:
    ok: bool
    residual: float

    def __bool__(self):
        return self.ok


def verify_rescaled_zero_sum(game: PolymatrixGame, tol: float = 1e-10) -> ZeroSumCheck:
    """Exact check that sum_i eta_i u_i(x) vanishes on the whole strategy space.

    The total rescaled welfare W(x) is a sum of bilinear edge terms
    x_i^T C^{ij} x_j with C^{ij} = eta_i A^{ij} + eta_j (A^{ji})^T; antisymmetric
    self-loops contribute nothing. W is constant iff, for every player i and
    action pair (a, b), max over x_{-i} of W(b, x_{-i}) - W(a, x_{-i}) is zero.
    That maximum splits over i's neighbours and each piece is attained at a
    pure action, so it is a row-difference max per incident block. A constant
    W is zero iff it vanishes at one pure profile.
    """
    if validate(game):
        raise GameError("invalid game: " + "; ".join(validate(game)))
    o = game.offsets
    M = game.payoff_matrix.copy()
    for s in game.self_loops:
        M[o[s.i]:o[s.i + 1], o[s.i]:o[s.i + 1]] -= s.A
    # row block i of C holds the coefficients of x_i in W, i.e. sum_j x_i^T C^{ij} x_j
    C = game.eta_flat[:, None] * M
    C = C + C.T
    residual = 0.0
    neighbours = [set() for _ in range(game.n_players)]
    for e in game.edges:
        neighbours[e.i].add(e.j)
        neighbours[e.j].add(e.i)
    for i in range(game.n_players):
        rows = C[o[i]:o[i + 1]]
        for a in range(game.action_counts[i]):
            for b in range(game.action_counts[i]):
                if a == b:
                    continue
                diff = rows[b] - rows[a]
                total = sum(diff[o[j]:o[j + 1]].max() for j in neighbours[i])
                residual = max(residual, abs(total))
    anchor = np.zeros(game.dim)
    anchor[o[:-1]] = 1.0
    residual = max(residual, abs(float(rescaled_utility_sum(game, anchor))))
    return ZeroSumCheck(bool(residual <= tol), float(residual))
