import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from egtsquared.dynamics import replicator_field
from egtsquared.game import GameError, verify_rescaled_zero_sum
from egtsquared.presets import build_generalized_rps_reduced, rps_matrix
from egtsquared.reduction import (Coupling, SystemState, TimeEvolvingSystem,
                                  build_generalized_rps_system, flatten_state, lift_profile,
                                  random_interior_state, raw_field, raw_field_flat,
                                  reduce_to_polymatrix, uniform_state)
from strategies import seeds


def literal_rps_environment(y, w, mu):
    """Coupled RPS population / environment equations written out term by term."""
    n = len(y)
    P = rps_matrix(n)
    W = np.subtract.outer(w, w)
    Pw = P + mu * W
    w_dot = np.array([w[i] * sum(w[j] * (y[j] - y[i]) for j in range(n)) for i in range(n)])
    y_dot = y * (Pw @ y - y @ Pw @ y)
    return y_dot, w_dot


@given(st.sampled_from([3, 4, 5]), st.floats(0.05, 3.0), seeds)
def test_raw_field_matches_literal_equations(n, mu, seed):
    rng = np.random.default_rng(seed)
    y, w = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    sys_ = build_generalized_rps_system(n, mu)
    got = raw_field(sys_, SystemState((y,), (w,)))
    y_dot, w_dot = literal_rps_environment(y, w, mu)
    np.testing.assert_allclose(got.y[0], y_dot, atol=1e-13)
    np.testing.assert_allclose(got.w[0], w_dot, atol=1e-13)


@given(st.sampled_from([3, 4]), st.floats(0.05, 3.0), seeds)
def test_reduced_field_matches_raw_field(n, mu, seed):
    sys_ = build_generalized_rps_system(n, mu)
    game = reduce_to_polymatrix(sys_)
    x = flatten_state(random_interior_state(sys_, np.random.default_rng(seed)))
    np.testing.assert_allclose(replicator_field(game, x), raw_field_flat(sys_, x), atol=1e-13)


@st.composite
def random_systems(draw):
    n = draw(st.integers(2, 4))
    n_pop = draw(st.integers(1, 3))
    n_env = draw(st.integers(1, 3))
    rng = np.random.default_rng(draw(seeds))
    pops = []
    for _ in range(n_pop):
        B = rng.normal(size=(n, n))
        pops.append(B - B.T)
    couplings = [Coupling(l, k, rng.normal(size=(n, n)), rng.normal(size=(n, n)))
                 for l in range(n_pop) for k in range(n_env) if rng.random() < 0.7]
    return TimeEvolvingSystem(n, tuple(pops), n_env, tuple(couplings))


@given(random_systems(), seeds)
def test_reduction_is_exact_for_arbitrary_couplings(system, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        game = reduce_to_polymatrix(system)
    x = flatten_state(random_interior_state(system, np.random.default_rng(seed)))
    np.testing.assert_allclose(replicator_field(game, x), raw_field_flat(system, x), atol=1e-12)


@pytest.mark.parametrize("n,mu", [(3, 0.8), (3, 0.1), (5, 2.0)])
def test_reduction_reproduces_preset(n, mu):
    game = reduce_to_polymatrix(build_generalized_rps_system(n, mu))
    ref = build_generalized_rps_reduced(n, mu)
    np.testing.assert_array_equal(game.payoff_matrix, ref.payoff_matrix)
    assert game.eta == ref.eta
    assert verify_rescaled_zero_sum(game).ok


def test_missing_weights_warn():
    base = build_generalized_rps_system(3, 0.5)
    system = TimeEvolvingSystem(base.n, base.populations, base.environments, base.couplings)
    with pytest.warns(UserWarning, match="not rescaled zero-sum"):
        reduce_to_polymatrix(system)


def test_state_round_trip():
    system = build_generalized_rps_system(3, 0.8)
    s = uniform_state(system)
    back = lift_profile(flatten_state(s), system)
    np.testing.assert_array_equal(flatten_state(back), flatten_state(s))
    with pytest.raises(GameError):
        lift_profile(np.ones(5), system)


def test_system_validation():
    P, I = rps_matrix(3), np.eye(3)
    with pytest.raises(GameError, match="antisymmetric"):
        TimeEvolvingSystem(3, (np.ones((3, 3)),), 1, ())
    with pytest.raises(GameError, match="no environment"):
        TimeEvolvingSystem(3, (P,), 1, (Coupling(0, 1, I, -I),))
    with pytest.raises(GameError, match="no population"):
        TimeEvolvingSystem(3, (P,), 1, (Coupling(1, 0, I, -I),))
    with pytest.raises(GameError, match="twice"):
        TimeEvolvingSystem(3, (P,), 1, (Coupling(0, 0, I, -I), Coupling(0, 0, I, -I)))
    with pytest.raises(GameError, match="eta"):
        TimeEvolvingSystem(3, (P,), 1, (), eta=(1.0,))
    with pytest.raises(GameError):
        TimeEvolvingSystem(3, (P,), 1, (Coupling(0, 0, np.eye(2), -I),))
    with pytest.raises(GameError):
        build_generalized_rps_system(3, 0.0)


def test_raw_field_rejects_wrong_state():
    system = build_generalized_rps_system(3, 0.8)
    with pytest.raises(GameError):
        raw_field(system, SystemState((np.ones(3) / 3,), ()))
