"""Acceptance criteria, one test per criterion, each reporting a PASS/FAIL line."""

import numpy as np
from conftest import ACCEPTANCE_LINES

from egtsquared.analysis import (constant_of_motion, poincare_section, recurrence_stats, regret_all,
                                 time_average, weighted_entropy, weighted_kl)
from egtsquared.dynamics import (IntegratorConfig, divergence_estimate, from_z, integrate, replicator_field,
                                 rk4, to_z)
from egtsquared.equilibrium import compute_nash, verify_nash
from egtsquared.game import (EdgeGame, PolymatrixGame, SelfLoop, rescaled_utility_sum, utilities,
                             verify_rescaled_zero_sum)
from egtsquared.presets import (build_butterfly, build_chain, build_generalized_rps_reduced,
                                matching_pennies)
from egtsquared.reduction import (build_generalized_rps_system, flatten_state, random_interior_state,
                                  raw_field_flat, reduce_to_polymatrix)

X_FIG = np.array([0.5, 0.25, 0.25, 0.5, 0.25, 0.25])
CHAIN_MUS = (0.1, 0.5, 0.8, 0.5)
CHAIN_X0 = np.array([0.3, 0.4, 0.3, 0.2, 0.1, 0.7, 0.5, 0.3, 0.2, 0.7, 0.2, 0.1, 0.4, 0.2, 0.4])
SECTION_NORMAL = np.array([-1.0, 1.0, 0.0, 1.0, -1.0, 0.0])  # y2 - y1 - w2 + w1


def report(n, title, ok, detail):
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}: {title} [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def dirichlet_profile(game, rng, concentration=1.0):
    return np.concatenate([rng.dirichlet(np.full(n, concentration)) for n in game.action_counts])


def test_criterion_01_reduction_equivalence():
    system = build_generalized_rps_system(3, 0.8)
    game = reduce_to_polymatrix(system)
    rng = np.random.default_rng(101)
    starts = np.array([flatten_state(random_interior_state(system, rng)) for _ in range(20)])
    cfg = IntegratorConfig(step=0.01, horizon=100.0)
    reduced = integrate(game, starts, cfg).states

    def raw_batch(X):
        return np.array([raw_field_flat(system, x) for x in X])

    def renorm(X, t):
        return X / game.broadcast_players(game.player_sum(X))

    _, raw = rk4(raw_batch, starts, cfg.step, cfg.n_steps, post=renorm)
    dev = float(np.max(np.abs(raw - reduced)))
    report(1, "raw vs reduced trajectories, 20 starts, T=100", dev < 1e-6, f"sup-norm {dev:.2e} < 1e-6")


def test_criterion_02_phi_conservation():
    game = build_generalized_rps_reduced(3, 0.8)
    x_star = compute_nash(game).profile
    drift = {}
    for h in (0.01, 0.005):
        traj = integrate(game, X_FIG, IntegratorConfig(step=h, horizon=1000.0, record_every=int(0.1 / h)))
        phi = constant_of_motion(game, x_star, traj.states)
        drift[h] = float(np.max(np.abs(phi - phi[0])) / abs(phi[0]))
    ratio = drift[0.01] / drift[0.005]
    ok = drift[0.01] < 1e-6 and ratio >= 8
    report(2, "Phi drift and step halving, T=1000", ok,
           f"rel drift {drift[0.01]:.2e} < 1e-6, halving ratio {ratio:.1f} >= 8")


def test_criterion_03_weighted_kl_at_scale():
    game = build_butterfly(25)
    assert game.n_players == 100
    x_star = compute_nash(game).profile
    x0 = dirichlet_profile(game, np.random.default_rng(303), concentration=5.0)
    traj = integrate(game, x0, IntegratorConfig(step=0.01, horizon=200.0, record_every=10))
    kl = weighted_kl(game, x_star, traj.states)
    abs_drift = float(np.max(np.abs(kl.total - kl.total[0])))
    rel_drift = abs_drift / abs(kl.total[0])
    amplitude = float(np.max(np.ptp(kl.components, axis=0)))
    ok = rel_drift < 1e-5 and amplitude > 100 * abs_drift
    report(3, "weighted KL on 100-player butterfly torus, T=200", ok,
           f"rel drift {rel_drift:.2e} < 1e-5, max component swing {amplitude:.3f} > 100 x {abs_drift:.2e}")


def test_criterion_04_volume_preservation():
    rng = np.random.default_rng(404)
    worst = 0.0
    for game in (build_generalized_rps_reduced(3, 0.8), build_chain(CHAIN_MUS), build_butterfly(1)):
        for _ in range(100):
            x = dirichlet_profile(game, rng)
            worst = max(worst, abs(divergence_estimate(game, to_z(game, np.clip(x, 1e-9, None)))))
    control = PolymatrixGame((2,), self_loops=(SelfLoop(0, [[0.0, 1.0], [1.0, 0.0]]),))
    neg = abs(divergence_estimate(control, to_z(control, [0.3, 0.7])))
    ok = worst < 1e-5 and neg > 1e-2
    report(4, "divergence of the z-field", ok,
           f"max |div| {worst:.2e} < 1e-5 over 300 states, symmetric control {neg:.3f} > 1e-2")


def test_criterion_05_lp_equilibrium():
    details, ok = [], True
    games = [build_generalized_rps_reduced(3, mu) for mu in (0.1, 0.5, 0.8)] + [build_chain(CHAIN_MUS)]
    for game in games:
        res = compute_nash(game)
        err = float(np.max(np.abs(res.profile - game.uniform_profile())))
        good = res.interior and abs(res.objective) <= 1e-8 and res.nash_residual <= 1e-8 and err < 1e-9
        ok &= good
        details.append(f"{game.name}: obj {res.objective:.1e}, gain {res.nash_residual:.1e}")
    mp = matching_pennies()
    grid = np.round(np.arange(0, 1.0001, 0.01), 2)
    gains = np.array([[verify_nash(mp, [p, 1 - p, q, 1 - q]) for q in grid] for p in grid])
    p, q = np.unravel_index(np.argmin(gains), gains.shape)
    res = compute_nash(mp)
    mp_ok = (grid[p], grid[q]) == (0.5, 0.5) and np.allclose(res.profile, 0.5, atol=1e-9)
    details.append(f"pennies LP {np.round(res.profile, 6).tolist()} vs grid ({grid[p]}, {grid[q]})")
    report(5, "LP equilibria", ok and mp_ok, "; ".join(details))


def test_criterion_06_time_average_convergence():
    game = build_generalized_rps_reduced(3, 0.8)
    nash = compute_nash(game)
    traj = integrate(game, X_FIG, IntegratorConfig(step=0.01, horizon=5000.0))
    avg = time_average(traj)
    u = utilities(game, traj.states)
    # the running average of utilities from the same trapezoid rule
    u_bar = np.concatenate([[u[0]], np.cumsum(0.5 * 0.01 * (u[1:] + u[:-1]), axis=0) / traj.times[1:, None]])
    x_err = float(np.max(np.abs(avg[-1] - nash.profile)))
    u_err = float(np.max(np.abs(u_bar[-1] - utilities(game, nash.profile))))
    idx = [int(np.searchsorted(traj.times, T - 1e-9)) for T in (500, 1000, 2000, 5000)]
    residuals = [verify_nash(game, avg[k]) for k in idx]
    mono = all(b <= a for a, b in zip(residuals, residuals[1:]))
    ok = x_err < 1e-2 and u_err < 1e-2 and mono
    report(6, "time averages, T=5000", ok,
           f"strategy err {x_err:.1e}, utility err {u_err:.1e}, residuals "
           + " >= ".join(f"{r:.1e}" for r in residuals))


def test_criterion_07_regret_bound():
    runs = [(build_generalized_rps_reduced(3, 0.8), X_FIG), (build_chain(CHAIN_MUS), CHAIN_X0)]
    details, ok = [], True
    for game, x0 in runs:
        traj = integrate(game, x0, IntegratorConfig(step=0.01, horizon=1000.0))
        reg = regret_all(game, traj)
        late = traj.times >= 1.0
        scaled = traj.times[late, None] * reg[late]
        bound = np.log(np.asarray(game.action_counts, dtype=float)) + 5e-3
        worst = float(np.max(scaled - bound))
        ok &= worst <= 0
        details.append(f"{game.name}: max t*Reg {scaled.max():.3f} vs ln n + 5e-3 = {bound.max():.3f}")
    report(7, "t * Reg_i(t) <= ln n_i + 5e-3", ok, "; ".join(details))


def test_criterion_08_recurrence():
    game = build_generalized_rps_reduced(3, 0.8)
    traj = integrate(game, X_FIG, IntegratorConfig(step=0.01, horizon=2000.0))
    rec = recurrence_stats(traj, epsilon=0.05, transient=10.0)
    big = build_butterfly(16)
    assert big.n_players == 64
    x0 = dirichlet_profile(big, np.random.default_rng(808), concentration=5.0)
    big_traj = integrate(big, x0, IntegratorConfig(step=0.01, horizon=500.0, record_every=10))
    big_rec = recurrence_stats(big_traj, epsilon=0.05, transient=10.0)
    ok = rec.first_return_time is not None and np.isfinite(big_rec.min_distance_after_transient)
    report(8, "recurrence within eps=0.05 by T=2000", ok,
           f"first return t={rec.first_return_time}, 64-player scan ran (min distance "
           f"{big_rec.min_distance_after_transient:.3f}, return {big_rec.first_return_time})")


def test_criterion_09_poincare_section():
    game = build_generalized_rps_reduced(3, 0.8)
    x_star = compute_nash(game).profile
    starts = np.array([[0.5, 0.01 * k, 0.5 - 0.01 * k, 0.5, 0.25, 0.25] for k in range(1, 11)])
    batch = integrate(game, starts, IntegratorConfig(step=0.01, horizon=5000.0))
    counts, growth, phi_spread = [], [], []
    for b in range(10):
        crossings = poincare_section(batch.member(b), SECTION_NORMAL, 0.0)
        pts = np.array([c.state for c in crossings])
        times = np.array([c.t for c in crossings])
        counts.append(len(crossings))
        if len(pts) < 2:
            growth.append(np.inf)
            phi_spread.append(np.inf)
            continue
        early = pts[times <= 1250.0]
        growth.append(float(np.max(np.ptp(pts, axis=0)) / np.max(np.ptp(early, axis=0))))
        phi = constant_of_motion(game, x_star, pts)
        phi_spread.append(float(np.ptp(phi) / abs(phi.mean())))
    # closed-curve proxy: the cloud stops growing after the first quarter and sits on one Phi level set
    ok = min(counts) > 50 and max(growth) <= 1.01 and max(phi_spread) < 1e-4
    report(9, "Poincare section, 10 trajectories, T=5000", ok,
           f"crossings min {min(counts)} > 50, diameter growth after T/4 {max(growth):.4f} <= 1.01, "
           f"max Phi spread {max(phi_spread):.1e} < 1e-4")


def test_criterion_10_property_suites():
    rng = np.random.default_rng(1010)
    failures = []
    for trial in range(200):
        N = int(rng.integers(2, 5))
        counts = tuple(int(c) for c in rng.integers(2, 4, size=N))
        eta = rng.uniform(0.2, 3.0, size=N)
        edges = []
        for i in range(N - 1):
            A = rng.normal(size=(counts[i], counts[i + 1]))
            edges.append(EdgeGame(i, i + 1, A, -(eta[i] / eta[i + 1]) * A.T))
        B = rng.normal(size=(counts[0], counts[0]))
        game = PolymatrixGame(counts, tuple(edges), (SelfLoop(0, B - B.T),), tuple(eta))
        x = dirichlet_profile(game, rng) * 0.98 + 0.02 * game.uniform_profile()
        x_star = dirichlet_profile(game, rng) * 0.98 + 0.02 * game.uniform_profile()
        if np.max(np.abs(game.player_sum(replicator_field(game, x)))) > 1e-12:
            failures.append(f"tangency #{trial}")
        if np.max(np.abs(from_z(game, to_z(game, x)) - x)) > 1e-12:
            failures.append(f"z round trip #{trial}")
        psi = weighted_kl(game, x_star, x).total
        if abs(psi + constant_of_motion(game, x_star, x) + weighted_entropy(game, x_star)) > 1e-12:
            failures.append(f"psi-phi identity #{trial}")
        if abs(rescaled_utility_sum(game, x)) > 1e-9:
            failures.append(f"rescaled sum #{trial}")
        if not verify_rescaled_zero_sum(game).ok:
            failures.append(f"zero-sum positive #{trial}")
        bumped = EdgeGame(edges[0].i, edges[0].j, edges[0].A_ij + 0.5, edges[0].A_ji)
        neg = PolymatrixGame(counts, (bumped,) + tuple(edges[1:]), game.self_loops, tuple(eta))
        if verify_rescaled_zero_sum(neg).ok:
            failures.append(f"zero-sum negative #{trial}")
    report(10, "seeded property suites", not failures,
           f"200 random games, {len(failures)} failures" + (f": {failures[:5]}" if failures else ""))
