"""Dense two-phase simplex with Bland's rule.

Small and deterministic rather than fast: the equilibrium LPs built here have
at most a few hundred rows, and identical inputs must give bit-identical
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10
FEASIBILITY_TOL = 1e-9
MAX_PIVOTS = 200_000


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize c.v  subject to  G v <= h,  A_eq v = b_eq,  v >= lower.

    ``lower`` entries of -inf mark free variables.
    """

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        for name, rows in (("G", self.G), ("A_eq", self.A_eq)):
            arr = np.asarray(rows, dtype=float).reshape(-1, n)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float).ravel())
        object.__setattr__(self, "b_eq", np.asarray(self.b_eq, dtype=float).ravel())
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float).ravel())
        if self.h.size != self.G.shape[0] or self.b_eq.size != self.A_eq.shape[0]:
            raise ValueError("right-hand sides do not match constraint rows")
        if self.lower.size != n:
            raise ValueError("lower bounds must have one entry per variable")
        finite = [self.c, self.G, self.h, self.A_eq, self.b_eq]
        if not all(np.all(np.isfinite(a)) for a in finite) or np.any(np.isnan(self.lower)):
            raise ValueError("linear program has non-finite data")

    @property
    def n_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LPSolution:
    x: np.ndarray
    objective: float
    pivots: int


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, n_cols):
    """Bland's rule on the first ``n_cols`` columns; the last row holds reduced costs."""
    m = T.shape[0] - 1
    pivots = 0
    while True:
        negative = np.flatnonzero(T[-1, :n_cols] < -PIVOT_TOL)
        if negative.size == 0:
            return pivots
        j = negative[0]
        col = T[:m, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            raise UnboundedError(f"objective unbounded along column {j}")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL]
        r = ties[np.argmin([basis[t] for t in ties])]
        _pivot(T, r, j)
        basis[r] = j
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise LPError("pivot limit exceeded")


def solve_lp(lp: LinearProgram) -> LPSolution:
    """Solve ``lp`` and return an optimal vertex; raises on infeasible or unbounded input."""
    n = lp.n_vars
    free = ~np.isfinite(lp.lower)
    shift = np.where(free, 0.0, lp.lower)
    # standard-form columns: one per bounded variable, two (plus/minus) per free one
    cols = [np.eye(n)[:, j] for j in range(n)] + [-np.eye(n)[:, j] for j in np.flatnonzero(free)]
    S = np.array(cols).T  # v - shift = S @ u, u >= 0
    mg, me = lp.G.shape[0], lp.A_eq.shape[0]
    m = mg + me
    nu = S.shape[1]

    A = np.zeros((m, nu + mg))
    A[:mg, :nu] = lp.G @ S
    A[:mg, nu:] = np.eye(mg)
    A[mg:, :nu] = lp.A_eq @ S
    b = np.concatenate([lp.h - lp.G @ shift, lp.b_eq - lp.A_eq @ shift])

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    # a slack can start basic only on an unflipped inequality row
    needs_art = np.ones(m, dtype=bool)
    needs_art[:mg] = flip[:mg]
    art_rows = np.flatnonzero(needs_art)
    n_struct = nu + mg
    n_art = art_rows.size

    T = np.zeros((m + 1, n_struct + n_art + 1))
    T[:m, :n_struct] = A
    T[:m, -1] = b
    basis = [nu + r for r in range(mg)] + [-1] * me
    for k, r in enumerate(art_rows):
        T[r, n_struct + k] = 1.0
        basis[r] = n_struct + k

    pivots = 0
    if n_art:
        T[-1, n_struct:n_struct + n_art] = 1.0
        for r in art_rows:
            T[-1] -= T[r]
        pivots += _run(T, basis, n_struct + n_art)
        if -T[-1, -1] > FEASIBILITY_TOL:
            raise InfeasibleError(f"no feasible point (phase-one residual {-T[-1, -1]:.3g})")
        keep = []
        for r in range(m):
            if basis[r] >= n_struct:
                nz = np.flatnonzero(np.abs(T[r, :n_struct]) > PIVOT_TOL)
                if nz.size == 0:
                    continue  # redundant equality
                _pivot(T, r, nz[0])
                basis[r] = nz[0]
                pivots += 1
            keep.append(r)
        T = np.vstack([T[keep][:, list(range(n_struct)) + [T.shape[1] - 1]], np.zeros(n_struct + 1)])
        basis = [basis[r] for r in keep]

    cost = np.zeros(n_struct)
    cost[:nu] = lp.c @ S
    T[-1, :n_struct] = cost
    T[-1, -1] = 0.0
    for r, bvar in enumerate(basis):
        if cost[bvar] != 0.0:
            T[-1] -= cost[bvar] * T[r]
    pivots += _run(T, basis, n_struct)

    u = np.zeros(n_struct)
    for r, bvar in enumerate(basis):
        u[bvar] = T[r, -1]
    v = shift + S @ u[:nu]
    return LPSolution(v, float(lp.c @ v), pivots)
