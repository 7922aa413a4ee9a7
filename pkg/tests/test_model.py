"""Model construction, partition sums, and the path-sum oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest

import bagofpaths as bp
from conftest import make_cycle_graph, make_path_graph, random_strong_graph

THETAS = (0.1, 1.0, 5.0)


class TestBuildModelTwoCycle:
    """Closed forms for the 2-cycle with unit costs at theta = 1."""

    def setup_method(self):
        self.graph = make_cycle_graph(2)
        self.model = bp.build_model(self.graph, 1.0)

    def test_walk_weights(self):
        e1 = math.exp(-1.0)
        np.testing.assert_allclose(self.model.W, [[0.0, e1], [e1, 0.0]], atol=1e-16)

    def test_fundamental_matrix(self):
        z11 = 1.0 / (1.0 - math.exp(-2.0))
        z12 = math.exp(-1.0) * z11
        np.testing.assert_allclose(
            self.model.Z, [[z11, z12], [z12, z11]], rtol=1e-14
        )

    def test_partition_sums(self):
        z11 = 1.0 / (1.0 - math.exp(-2.0))
        z12 = math.exp(-1.0) * z11
        assert self.model.partition == pytest.approx(2 * (z11 + z12), rel=1e-14)
        assert self.model.hitting_partition == pytest.approx(
            2 * (1.0 + z12 / z11), rel=1e-14
        )


class TestBuildModelValidation:
    def test_theta_zero_rejected(self):
        with pytest.raises(bp.InputError, match="theta must be positive"):
            bp.build_model(make_cycle_graph(2), 0.0)

    def test_theta_negative_rejected(self):
        with pytest.raises(bp.InputError, match="theta must be positive"):
            bp.build_model(make_cycle_graph(2), -1.0)

    def test_near_singular_system_names_theta(self):
        # As theta approaches 0 the system loses all trustworthy digits.
        with pytest.raises(bp.NumericalError, match="theta=1e-15"):
            bp.build_model(make_cycle_graph(2), 1e-15)

    def test_large_theta_damps_to_identity(self):
        model = bp.build_model(make_cycle_graph(2), 50.0)
        off = model.Z - np.eye(2)
        assert np.abs(off).max() <= math.exp(-50.0) * 1.01


class TestModelInvariants:
    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("theta", THETAS)
    def test_invariants(self, seed, theta):
        graph = random_strong_graph(6, seed)
        model = bp.build_model(graph, theta)
        p_ref = bp.reference_transitions(graph).probs
        assert np.all(model.W <= p_ref + 1e-16)
        assert np.all(model.W.sum(axis=1) < 1.0)
        residual = (np.eye(graph.n) - model.W) @ model.Z - np.eye(graph.n)
        assert np.abs(residual).max() <= 1e-10
        assert np.all(model.dz >= 1.0)
        assert model.partition > 0
        assert model.hitting_partition > 0

    @pytest.mark.parametrize("seed", range(4))
    def test_theta_monotonicity_off_diagonal(self, seed):
        graph = random_strong_graph(6, seed)
        previous = None
        mask = ~np.eye(graph.n, dtype=bool)
        for theta in (0.5, 1.0, 2.0, 4.0):
            z = bp.build_model(graph, theta).Z
            if previous is not None:
                assert np.all(z[mask] < previous[mask])
            previous = z

    @pytest.mark.parametrize("seed", range(4))
    def test_permutation_equivariance(self, seed):
        graph = random_strong_graph(7, seed)
        rng = np.random.default_rng(seed + 100)
        perm = rng.permutation(graph.n)
        permuted = bp.Graph.from_affinity(
            graph.affinity[np.ix_(perm, perm)], directed=True
        )
        z = bp.build_model(graph, 1.0).Z
        z_perm = bp.build_model(permuted, 1.0).Z
        np.testing.assert_allclose(z_perm, z[np.ix_(perm, perm)], atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_symmetric_graph_symmetric_z(self, seed):
        graph = random_strong_graph(7, seed, directed=False)
        z = bp.build_model(graph, 1.0).Z
        np.testing.assert_allclose(z, z.T, atol=1e-12)

    def test_cost_scaling_with_matching_theta_is_bit_identical(self):
        # Doubling all costs while halving theta leaves the model unchanged,
        # exactly, because scaling by powers of two commutes with rounding.
        graph = random_strong_graph(6, 11)
        halved = bp.Graph.from_affinity(graph.affinity / 2.0, directed=True)
        theta = 1.3
        m1 = bp.build_model(graph, theta)
        m2 = bp.build_model(halved, theta / 2.0)
        assert np.array_equal(m1.W, m2.W)
        assert np.array_equal(m1.Z, m2.Z)


class TestBopProbabilities:
    def test_two_cycle_value(self):
        model = bp.build_model(make_cycle_graph(2), 1.0)
        probs = bp.bop_probabilities(model)
        expected = 1.0 / (2.0 * (1.0 + math.exp(-1.0)))
        assert probs[0, 0] == pytest.approx(expected, rel=1e-14)
        assert probs[1, 1] == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("seed", range(4))
    def test_grand_sum_is_one(self, seed):
        model = bp.build_model(random_strong_graph(6, seed), 1.0)
        probs = bp.bop_probabilities(model)
        assert np.all(probs >= 0)
        assert abs(probs.sum() - 1.0) <= 1e-12

    def test_symmetric_for_symmetric_graph(self):
        model = bp.build_model(random_strong_graph(6, 2, directed=False), 1.0)
        probs = bp.bop_probabilities(model)
        np.testing.assert_allclose(probs, probs.T, atol=1e-14)


class TestHittingProbabilities:
    def test_diagonal_is_one(self):
        model = bp.build_model(random_strong_graph(6, 0), 1.0)
        zh, _ = bp.hitting_probabilities(model)
        np.testing.assert_array_equal(np.diag(zh), np.ones(6))

    def test_two_cycle_single_arc_weight(self):
        model = bp.build_model(make_cycle_graph(2), 1.0)
        zh, _ = bp.hitting_probabilities(model)
        # The only hitting walk between the two nodes is the single arc.
        assert zh[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_probabilities_sum_to_one(self):
        model = bp.build_model(random_strong_graph(5, 1), 2.0)
        _, ph = bp.hitting_probabilities(model)
        assert abs(ph.sum() - 1.0) <= 1e-12


class TestPathSumOracle:
    def test_two_cycle_geometric_series(self):
        graph = make_cycle_graph(2)
        estimate = bp.path_sum_oracle(graph, 1.0, 0, 0, 1e-9)
        exact = 1.0 / (1.0 - math.exp(-2.0))
        assert abs(estimate.value - exact) <= 1e-9 + estimate.tail_bound

    def test_two_cycle_hitting_single_arc(self):
        graph = make_cycle_graph(2)
        estimate = bp.path_sum_oracle(graph, 1.0, 0, 1, 1e-9, hitting=True)
        assert abs(estimate.value - math.exp(-1.0)) <= 1e-9 + estimate.tail_bound

    def test_hitting_self_pair_is_empty_walk(self):
        graph = make_cycle_graph(2)
        estimate = bp.path_sum_oracle(graph, 1.0, 0, 0, 1e-9, hitting=True)
        assert estimate.value == 1.0
        assert estimate.tail_bound == 0.0

    def test_path_graph_matches_closed_form(self):
        graph = make_path_graph(3)
        model = bp.build_model(graph, 1.0)
        estimate = bp.path_sum_oracle(graph, 1.0, 0, 2, 1e-9)
        assert abs(estimate.value - model.Z[0, 2]) <= 1e-9 + estimate.tail_bound

    def test_large_graph_rejected(self):
        graph = random_strong_graph(13, 0)
        with pytest.raises(bp.InputError, match="too large"):
            bp.path_sum_oracle(graph, 1.0, 0, 1, 1e-6)

    def test_zero_epsilon_never_converges(self):
        graph = make_cycle_graph(2)
        with pytest.raises(bp.NumericalError, match="did not converge"):
            bp.path_sum_oracle(graph, 1.0, 0, 0, 0.0, max_length=200)

    def test_negative_epsilon_rejected(self):
        with pytest.raises(bp.InputError, match="epsilon"):
            bp.path_sum_oracle(make_cycle_graph(2), 1.0, 0, 0, -1e-6)

    def test_tail_bound_below_epsilon(self):
        estimate = bp.path_sum_oracle(make_cycle_graph(2), 1.0, 0, 1, 1e-7)
        assert 0.0 <= estimate.tail_bound < 1e-7

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("theta", THETAS)
    def test_oracle_matches_model_on_random_graphs(self, seed, theta):
        graph = random_strong_graph(5, seed)
        model = bp.build_model(graph, theta)
        zh, _ = bp.hitting_probabilities(model)
        for i in range(graph.n):
            for j in range(graph.n):
                est = bp.path_sum_oracle(graph, theta, i, j, 1e-8)
                assert abs(model.Z[i, j] - est.value) <= 1e-6 + est.tail_bound
                est_h = bp.path_sum_oracle(graph, theta, i, j, 1e-8, hitting=True)
                assert abs(zh[i, j] - est_h.value) <= 1e-6 + est_h.tail_bound
