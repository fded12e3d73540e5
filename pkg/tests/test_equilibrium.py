import numpy as np
import pytest
from hypothesis import given, settings

from egtsquared.equilibrium import (NotRescaledZeroSumError, assemble_nash_lp, compute_nash, is_nash,
                                    verify_nash)
from egtsquared.game import EdgeGame, PolymatrixGame, utilities
from egtsquared.presets import (build_butterfly, build_chain, build_generalized_rps_reduced,
                                matching_pennies)
from strategies import zero_sum_games


@pytest.mark.parametrize("game", [
    build_generalized_rps_reduced(3, 0.1),
    build_generalized_rps_reduced(3, 0.5),
    build_generalized_rps_reduced(3, 0.8),
    build_chain([0.1, 0.5, 0.8, 0.5]),
    build_butterfly(1),
], ids=lambda g: g.name)
def test_uniform_interior_equilibrium(game):
    res = compute_nash(game)
    np.testing.assert_allclose(res.profile, game.uniform_profile(), atol=1e-9)
    assert abs(res.objective) <= 1e-8
    assert res.nash_residual <= 1e-8
    assert res.interior and res.interiority_margin > 0.3


def test_values_equal_equilibrium_utilities():
    g = build_chain([0.1, 0.5, 0.8, 0.5])
    res = compute_nash(g)
    np.testing.assert_allclose(res.values, utilities(g, res.profile), atol=1e-10)
    assert np.dot(g.eta, res.values) == pytest.approx(0.0, abs=1e-10)


def test_matching_pennies_against_grid_search():
    g = matching_pennies()
    grid = np.round(np.arange(0, 1.0001, 0.01), 2)
    best, arg = np.inf, None
    for p in grid:
        for q in grid:
            gain = verify_nash(g, [p, 1 - p, q, 1 - q])
            if gain < best - 1e-12:
                best, arg = gain, (p, q)
    assert arg == (0.5, 0.5) and best <= 1e-12
    res = compute_nash(g)
    np.testing.assert_allclose(res.profile, [0.5, 0.5, 0.5, 0.5], atol=1e-9)


def test_boundary_equilibrium_is_flagged():
    A = np.array([[1.0, 1.0], [0.0, 0.0]])
    g = PolymatrixGame((2, 2), edges=(EdgeGame(0, 1, A, -A.T),))
    res = compute_nash(g)
    assert res.profile[0] == pytest.approx(1.0)
    assert not res.interior
    assert res.nash_residual <= 1e-8


def test_rejects_games_that_are_not_zero_sum():
    g = build_generalized_rps_reduced(3, 0.5)
    bad = PolymatrixGame(g.action_counts, g.edges, g.self_loops, eta=(1.0, 1.0))
    with pytest.raises(NotRescaledZeroSumError):
        compute_nash(bad)
    assemble_nash_lp(bad, check=False)


def test_verify_nash_detects_profitable_deviation():
    g = build_generalized_rps_reduced(3, 0.8)
    x = np.array([0.6, 0.2, 0.2, 1 / 3, 1 / 3, 1 / 3])
    assert verify_nash(g, x) > 0.1
    assert not is_nash(g, x)
    assert is_nash(g, g.uniform_profile())


@settings(max_examples=30)
@given(zero_sum_games())
def test_random_zero_sum_games_have_certified_equilibria(game):
    res = compute_nash(game)
    assert res.nash_residual <= 1e-8
    assert abs(res.objective) <= 1e-8
    np.testing.assert_allclose(game.player_sum(res.profile), 1.0, atol=1e-12)
