import numpy as np
import pytest

from thermalwigner import (
    ChannelParams,
    FockDiagonalState,
    NonConvergenceError,
    evolve_fock_diagonal,
    mean_photon,
    random_zero_vacuum_state,
    spats_weights,
    thermal_weights,
    vacuum_population,
)


def brute_force_spats_mean(bar_n, terms=6000):
    """Independent series oracle: sum l^2 x^l / (nbar (nbar+1)), x = nbar/(1+nbar)."""
    if bar_n == 0.0:
        return 1.0
    x = bar_n / (1.0 + bar_n)
    l = np.arange(1, terms, dtype=float)
    return float(np.sum(l * l * x**l) / (bar_n * (bar_n + 1.0)))


class TestChannelParams:
    def test_loss_channel_is_n_zero(self):
        ch = ChannelParams(0.0, 1.0)
        assert ch.n == 0.0

    @pytest.mark.parametrize("n,gt", [(-0.1, 0.0), (0.0, -1e-9), (np.nan, 0.0), (0.0, np.inf)])
    def test_invalid_params_rejected(self, n, gt):
        with pytest.raises(ValueError):
            ChannelParams(n, gt)


class TestFockDiagonalState:
    def test_weights_are_immutable(self):
        state = thermal_weights(1.0)
        with pytest.raises(ValueError):
            state.weights[0] = 0.3

    def test_cutoff_below_one_rejected(self):
        with pytest.raises(ValueError):
            FockDiagonalState(np.array([1.0]))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            FockDiagonalState(np.array([1.1, -0.1]))

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            FockDiagonalState(np.array([0.5, 0.4]))


class TestSpatsWeights:
    def test_zero_seed_is_single_photon(self):
        state = spats_weights(0.0)
        assert state.weights[1] == 1.0
        assert state.weights[0] == 0.0
        assert np.all(state.weights[2:] == 0.0)

    def test_seed_one_first_weights(self):
        # direct evaluation of l * (1/2)^l / 2
        state = spats_weights(1.0)
        assert state.weights[1] == pytest.approx(1.0 / 4.0, abs=1e-15)
        assert state.weights[2] == pytest.approx(1.0 / 4.0, abs=1e-15)
        assert state.weights[3] == pytest.approx(3.0 / 16.0, abs=1e-15)

    def test_seed_one_normalized_at_cutoff(self):
        state = spats_weights(1.0)
        assert abs(state.weights.sum() - 1.0) < 1e-12

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            spats_weights(-0.5)

    @pytest.mark.parametrize("tail_tol", [0.0, -1e-9, 2e-6])
    def test_tail_tol_domain(self, tail_tol):
        with pytest.raises(ValueError):
            spats_weights(1.0, tail_tol=tail_tol)


class TestThermalWeights:
    def test_zero_is_vacuum(self):
        state = thermal_weights(0.0)
        assert state.weights[0] == 1.0

    def test_geometric_weights(self):
        state = thermal_weights(1.0)
        assert state.weights[0] == pytest.approx(0.5, abs=1e-15)
        assert state.weights[1] == pytest.approx(0.25, abs=1e-15)
        assert state.weights[2] == pytest.approx(0.125, abs=1e-15)

    @pytest.mark.parametrize("n_mean", [0.0, 0.3, 1.0, 4.5])
    def test_mean_photon_roundtrip(self, n_mean):
        assert mean_photon(thermal_weights(n_mean)) == pytest.approx(n_mean, abs=1e-10)

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            thermal_weights(-1.0)


class TestScalarObservables:
    def test_vacuum_mean_photon(self):
        assert mean_photon(thermal_weights(0.0)) == 0.0

    @pytest.mark.parametrize("bar_n", [0.0, 3.0 / 7.0, 1.0, 5.0])
    def test_spats_mean_photon(self, bar_n):
        expected = 2.0 * bar_n + 1.0
        assert mean_photon(spats_weights(bar_n)) == pytest.approx(expected, abs=1e-10)
        assert brute_force_spats_mean(bar_n) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("bar_n", [0.0, 0.5, 1.0, 7.0])
    def test_spats_vacuum_population_is_zero(self, bar_n):
        assert vacuum_population(spats_weights(bar_n)) == 0.0

    def test_vacuum_population_values(self):
        assert vacuum_population(thermal_weights(0.0)) == 1.0
        assert vacuum_population(thermal_weights(1.0)) == pytest.approx(0.5, abs=1e-15)


class TestRandomZeroVacuumState:
    @pytest.mark.parametrize("seed", [1, 17, 123456])
    def test_vacuum_population_zero(self, seed):
        assert vacuum_population(random_zero_vacuum_state(seed, 12)) == 0.0

    def test_normalized(self):
        state = random_zero_vacuum_state(5, 20)
        assert abs(state.weights.sum() - 1.0) < 1e-12

    def test_deterministic(self):
        a = random_zero_vacuum_state(99, 12)
        b = random_zero_vacuum_state(99, 12)
        assert np.array_equal(a.weights, b.weights)

    def test_different_seeds_differ(self):
        a = random_zero_vacuum_state(1, 12)
        b = random_zero_vacuum_state(2, 12)
        assert not np.array_equal(a.weights, b.weights)

    def test_cutoff_below_one_rejected(self):
        with pytest.raises(ValueError):
            random_zero_vacuum_state(1, 0)


class TestEvolveFockDiagonal:
    def test_zero_time_is_identity(self):
        state = spats_weights(1.0)
        assert evolve_fock_diagonal(state, ChannelParams(0.5, 0.0)) is state

    @pytest.mark.parametrize("n,bar_n,gamma_t", [(0.0, 1.0, 0.7), (0.5, 2.0, 0.3), (1.0, 0.4, 1.1)])
    def test_first_moment_law(self, n, bar_n, gamma_t):
        # d<l>/d(gt) = n - <l>  =>  <l>(t) = n + (nbar - n) e^(-gt)
        state = thermal_weights(bar_n)
        evolved = evolve_fock_diagonal(state, ChannelParams(n, gamma_t))
        expected = n + (bar_n - n) * np.exp(-gamma_t)
        assert mean_photon(evolved) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("n", [0.0, 0.5])
    def test_long_time_reaches_thermal_stationary_state(self, n):
        state = spats_weights(1.0)
        evolved = evolve_fock_diagonal(state, ChannelParams(n, 20.0))
        target = thermal_weights(n)
        size = min(evolved.weights.size, target.weights.size)
        assert np.max(np.abs(evolved.weights[:size] - target.weights[:size])) < 1e-6
        assert np.all(np.abs(evolved.weights[size:]) < 1e-6)

    @pytest.mark.parametrize("n,gamma_t", [(0.0, 0.4), (0.5, 0.4), (1.0, 1.0)])
    def test_probability_conservation(self, n, gamma_t):
        state = spats_weights(1.0)
        evolved = evolve_fock_diagonal(state, ChannelParams(n, gamma_t))
        assert abs(evolved.weights.sum() - state.weights.sum()) < 1e-9

    def test_positivity_preserved(self):
        state = random_zero_vacuum_state(3, 12)
        evolved = evolve_fock_diagonal(state, ChannelParams(0.5, 0.6))
        assert np.all(evolved.weights >= 0.0)

    @pytest.mark.parametrize("n", [0.0, 0.5])
    def test_semigroup_property(self, n):
        state = spats_weights(1.0)
        two_legs = evolve_fock_diagonal(
            evolve_fock_diagonal(state, ChannelParams(n, 0.3)), ChannelParams(n, 0.5)
        )
        one_leg = evolve_fock_diagonal(state, ChannelParams(n, 0.8))
        size = min(two_legs.weights.size, one_leg.weights.size)
        assert np.max(np.abs(two_legs.weights[:size] - one_leg.weights[:size])) < 1e-8

    def test_cutoff_enlarged_for_upward_diffusion(self):
        state = random_zero_vacuum_state(7, 12)
        evolved = evolve_fock_diagonal(state, ChannelParams(1.0, 0.5), step_tol=1e-12)
        assert evolved.cutoff > state.cutoff
        assert abs(evolved.weights.sum() - 1.0) < 1e-10

    def test_step_tol_domain(self):
        with pytest.raises(ValueError):
            evolve_fock_diagonal(spats_weights(1.0), ChannelParams(0.0, 0.1), step_tol=0.0)

    def test_loosely_truncated_input_state_evolves(self):
        # initial mass deficit from a coarse tail_tol must not be mistaken
        # for mass leaking through the truncation during evolution
        state = spats_weights(2.0, tail_tol=1e-6)
        evolved = evolve_fock_diagonal(state, ChannelParams(0.5, 0.4), step_tol=1e-10)
        assert abs(evolved.weights.sum() - state.weights.sum()) < 1e-9
