"""Graph ingestion, validation, file formats, and the planted-partition generator."""

from __future__ import annotations

import io
from collections import deque

import numpy as np
import pytest

import bagofpaths as bp
from conftest import make_cycle_graph, random_strong_graph


class TestAffinityToCost:
    def test_reciprocal_values(self):
        a = np.array([[0.0, 4.0], [1.0, 0.0]])
        c = bp.affinity_to_cost(a)
        assert c[0, 1] == 0.25
        assert c[1, 0] == 1.0

    def test_absent_arc_is_infinite(self):
        c = bp.affinity_to_cost(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert c[1, 0] == bp.NO_EDGE
        assert c[0, 0] == bp.NO_EDGE

    def test_negative_rejected(self):
        with pytest.raises(bp.InputError):
            bp.affinity_to_cost(np.array([[0.0, -1.0], [1.0, 0.0]]))

    def test_reciprocal_involution(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(0.5, 3.0, size=(6, 6))
        np.fill_diagonal(a, 0.0)
        c = bp.affinity_to_cost(a)
        back = bp.affinity_to_cost(c)
        mask = a > 0
        np.testing.assert_allclose(back[mask], a[mask], rtol=1e-15)


class TestGraphValidation:
    def test_self_loop_rejected(self):
        a = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(bp.InputError, match="self-loop"):
            bp.Graph.from_affinity(a)

    def test_single_node_rejected(self):
        with pytest.raises(bp.InputError, match="strongly connected"):
            bp.Graph.from_affinity(np.zeros((1, 1)))

    def test_asymmetric_undirected_rejected(self):
        a = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(bp.InputError, match="symmetric"):
            bp.Graph.from_affinity(a, directed=False)

    def test_not_strongly_connected(self):
        a = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(bp.InputError, match="strongly connected"):
            bp.Graph.from_affinity(a)

    def test_matrices_are_read_only(self):
        g = make_cycle_graph(3)
        with pytest.raises(ValueError):
            g.affinity[0, 1] = 5.0


def _bfs_reachable(adj: np.ndarray, start: int, reverse: bool = False) -> set[int]:
    n = adj.shape[0]
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in range(n):
            arc = adj[v, u] if reverse else adj[u, v]
            if arc > 0 and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _double_bfs_strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n < 2:
        return False
    return (
        len(_bfs_reachable(adj, 0)) == n
        and len(_bfs_reachable(adj, 0, reverse=True)) == n
    )


class TestStrongConnectivity:
    def test_agrees_with_double_bfs_oracle(self):
        rng = np.random.default_rng(42)
        for trial in range(100):
            n = int(rng.integers(2, 21))
            a = (rng.random((n, n)) < 0.25).astype(float)
            np.fill_diagonal(a, 0.0)
            assert bp.is_strongly_connected(a) == _double_bfs_strongly_connected(a)


class TestReferenceTransitions:
    def test_two_costs(self):
        # Out-arcs with costs 1 and 2 get probabilities 2/3 and 1/3.
        a = np.array(
            [
                [0.0, 1.0, 0.5],
                [1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
            ]
        )
        g = bp.Graph.from_affinity(a)
        p = bp.reference_transitions(g).probs
        np.testing.assert_allclose(p[0], [0.0, 2.0 / 3.0, 1.0 / 3.0], atol=1e-15)

    def test_two_cycle(self):
        g = make_cycle_graph(2)
        np.testing.assert_array_equal(
            bp.reference_transitions(g).probs, [[0.0, 1.0], [1.0, 0.0]]
        )

    @pytest.mark.parametrize("seed", range(5))
    def test_rows_sum_to_one(self, seed):
        g = random_strong_graph(7, seed)
        p = bp.reference_transitions(g).probs
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_support_matches_arcs(self):
        g = random_strong_graph(6, 3)
        p = bp.reference_transitions(g).probs
        assert np.array_equal(p > 0, np.isfinite(g.cost))


class TestEdgeListIO:
    def test_unit_two_cycle(self):
        g = bp.load_edge_list(["0\t1\t1", "1\t0\t1"])
        assert g.n == 2
        assert g.affinity[0, 1] == 1.0 and g.affinity[1, 0] == 1.0
        assert g.cost[0, 1] == 1.0 and g.cost[1, 0] == 1.0

    def test_reciprocal_costs(self):
        g = bp.load_edge_list(["0\t1\t2", "1\t0\t2"])
        assert g.cost[0, 1] == 0.5 and g.cost[1, 0] == 0.5

    def test_directed_missing_return_arc(self):
        with pytest.raises(bp.InputError, match="strongly connected"):
            bp.load_edge_list(["0\t1\t1"], directed=True)

    def test_undirected_single_line(self):
        g = bp.load_edge_list(["0\t1\t1"], directed=False)
        assert g.affinity[1, 0] == 1.0

    def test_parse_error_reports_line(self):
        with pytest.raises(bp.InputError, match="line 2"):
            bp.load_edge_list(["0\t1\t1", "1\tx\t1", "1\t0\t1"])

    def test_nonpositive_weight(self):
        with pytest.raises(bp.InputError, match="positive"):
            bp.load_edge_list(["0\t1\t0", "1\t0\t1"])

    def test_self_loop_line(self):
        with pytest.raises(bp.InputError, match="self-loop"):
            bp.load_edge_list(["0\t0\t1"])

    def test_duplicate_warns_and_last_wins(self):
        with pytest.warns(UserWarning, match="duplicate"):
            g = bp.load_edge_list(["0\t1\t1", "0\t1\t3", "1\t0\t1"])
        assert g.affinity[0, 1] == 3.0

    def test_comments_and_blanks_ignored(self):
        g = bp.load_edge_list(["# header", "", "0\t1\t1", "  ", "1\t0\t1"])
        assert g.n == 2

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nope.tsv"
        with pytest.raises(bp.InputError, match="nope.tsv"):
            bp.load_edge_list(missing)

    @pytest.mark.parametrize("directed", [True, False])
    def test_round_trip_is_bit_exact(self, directed, tmp_path):
        g = random_strong_graph(8, 5, directed=directed)
        path = tmp_path / "edges.tsv"
        bp.write_edge_list(g, path)
        back = bp.load_edge_list(path, directed=directed)
        assert np.array_equal(g.affinity, back.affinity)
        assert np.array_equal(g.cost, back.cost)

    def test_round_trip_via_stream(self):
        g = random_strong_graph(5, 9, directed=True)
        buffer = io.StringIO()
        bp.write_edge_list(g, buffer)
        back = bp.load_edge_list(io.StringIO(buffer.getvalue()), directed=True)
        assert np.array_equal(g.affinity, back.affinity)


class TestLoadLabels:
    def test_basic(self):
        labels = bp.load_labels(["0,0", "1,0", "2,1", "3,1"], n=6, m=2)
        assert labels.m == 2
        np.testing.assert_array_equal(labels.labels, [0, 0, 1, 1, -1, -1])

    def test_header_detected(self):
        labels = bp.load_labels(["node,class", "0,0", "1,0", "2,1", "3,1"], n=4, m=2)
        assert labels.labeled_nodes.size == 4

    def test_conflicting_classes(self):
        with pytest.raises(bp.InputError, match="conflicting"):
            bp.load_labels(["0,0", "0,1", "1,0", "2,1"], n=3, m=2)

    def test_single_seed_class_rejected(self):
        with pytest.raises(bp.DegenerateClassError, match="class 0"):
            bp.load_labels(["0,0", "1,1", "2,1"], n=3, m=2)

    def test_out_of_range_node(self):
        with pytest.raises(bp.InputError, match="out of range"):
            bp.load_labels(["9,0", "1,0"], n=3, m=1)

    def test_out_of_range_class(self):
        with pytest.raises(bp.InputError, match="out of range"):
            bp.load_labels(["0,0", "1,0", "2,5"], n=3, m=2)

    def test_class_count_inferred(self):
        labels = bp.load_labels(["0,0", "1,0", "2,2", "3,2", "4,1", "5,1"], n=6)
        assert labels.m == 3


class TestLabelAssignment:
    def test_from_labels_round_trip(self):
        labels = bp.LabelAssignment.from_labels([1, -1, 0, 1], 2)
        np.testing.assert_array_equal(labels.labels, [1, -1, 0, 1])
        np.testing.assert_array_equal(labels.class_members(1), [0, 3])
        np.testing.assert_array_equal(labels.class_sizes(), [1, 2])

    def test_multiple_assignment_rejected(self):
        y = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(bp.InputError, match="more than one class"):
            bp.LabelAssignment(y)

    def test_non_binary_rejected(self):
        with pytest.raises(bp.InputError, match="0 or 1"):
            bp.LabelAssignment(np.array([[0.5, 0.0], [0.0, 1.0]]))


class TestPlantedPartition:
    def test_same_seed_same_graph(self):
        g1, l1 = bp.generate_planted_partition(2, 10, 0.8, 0.05, seed=7)
        g2, l2 = bp.generate_planted_partition(2, 10, 0.8, 0.05, seed=7)
        assert np.array_equal(g1.affinity, g2.affinity)
        assert np.array_equal(l1.indicator, l2.indicator)

    def test_strongly_connected_output(self):
        g, labels = bp.generate_planted_partition(2, 10, 0.8, 0.05, seed=7)
        assert g.n == 20
        assert labels.m == 2
        assert _double_bfs_strongly_connected(g.affinity)

    def test_ground_truth_blocks(self):
        _, labels = bp.generate_planted_partition(3, 4, 0.9, 0.2, seed=1)
        np.testing.assert_array_equal(labels.labels, np.repeat([0, 1, 2], 4))

    def test_invalid_probabilities(self):
        with pytest.raises(bp.InputError, match="probabilities"):
            bp.generate_planted_partition(2, 5, 0.2, 0.5, seed=0)

    def test_retry_budget_exhausted(self):
        with pytest.raises(bp.InputError, match="failed to sample"):
            bp.generate_planted_partition(2, 5, 1e-9, 0.0, seed=0, max_retries=3)

    def test_unit_affinities(self):
        g, _ = bp.generate_planted_partition(2, 8, 0.7, 0.1, seed=2)
        values = np.unique(g.affinity)
        assert set(values.tolist()) <= {0.0, 1.0}
