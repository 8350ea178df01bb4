import pytest
import numpy as np
import scipy.sparse as sp

from hetalign.common.exception import InvalidGraph, InvalidSetting
from hetalign.graph import (
    Graph,
    edge_homophily,
    homophily_ratio,
    hop_homophily,
    hop_homophily_matrix,
    local_node_homophily,
    low_pass_baseline,
    node_homophily,
    node_homophily_values,
    normalize_adjacency,
    to_storage,
    top_k_per_row,
    top_k_support,
)

from .asset import graph_from_edges, edge_pair, cycle_abab, path3, star, mixed_synthetic


class TestGraph:
    def test_construction(self, path3):
        assert path3.n == 3
        assert path3.num_edges == 2
        assert path3.num_classes == 2
        assert not path3.is_sparse
        assert np.all(path3.neighbors(1) == [0, 2])

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidGraph):
            Graph(adjacency=np.array([[0, 1], [0, 0]]), features=np.zeros((2, 1)))

    def test_rejects_self_loop(self):
        with pytest.raises(InvalidGraph):
            Graph(adjacency=np.array([[1, 0], [0, 0]]), features=np.zeros((2, 1)))

    def test_rejects_non_finite_features(self):
        with pytest.raises(InvalidGraph):
            Graph(adjacency=np.zeros((2, 2)), features=np.array([[0.0], [np.nan]]))

    def test_rejects_label_out_of_range(self):
        with pytest.raises(InvalidGraph):
            Graph(
                adjacency=np.zeros((2, 2)),
                features=np.zeros((2, 1)),
                labels=np.array([0, 3]),
                num_classes=2,
            )

    def test_storage_rule(self):
        small = to_storage(sp.eye(5, format="csr"), dense_limit=10)
        assert isinstance(small, np.ndarray)
        large = to_storage(np.eye(5), dense_limit=4)
        assert sp.issparse(large)
        assert large.has_sorted_indices

    def test_sparse_graph(self):
        n = 6
        rows = np.arange(n)
        cols = (rows + 1) % n
        a = sp.coo_matrix((np.ones(n), (rows, cols)), shape=(n, n))
        g = Graph(adjacency=a + a.T, features=np.zeros((n, 2)))
        assert not g.is_sparse
        assert g.num_edges == n
        assert g.degrees() == pytest.approx(np.full(n, 2.0))

    def test_permute(self, path3):
        g = path3.permute([2, 0, 1])
        assert np.all(g.labels == [1, 0, 0])
        assert g.adjacency[0, 2] == 1.0
        assert g.adjacency[0, 1] == 0.0


class TestNormalize:
    def test_isolated_node(self):
        g = Graph(adjacency=np.zeros((1, 1)), features=np.zeros((1, 1)))
        norm = normalize_adjacency(g)
        assert norm.a_tilde == pytest.approx(np.ones((1, 1)))
        assert norm.l_tilde == pytest.approx(np.zeros((1, 1)))

    def test_single_edge(self, edge_pair):
        norm = normalize_adjacency(edge_pair)
        np.testing.assert_allclose(norm.a_tilde, np.full((2, 2), 0.5), atol=1e-12)

    def test_path_matches_entrywise_formula(self, path3):
        a = path3.adjacency
        degree = a.sum(axis=1)
        expected = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                expected[i, j] = (a[i, j] + (i == j)) / np.sqrt(
                    (degree[i] + 1) * (degree[j] + 1)
                )
        norm = normalize_adjacency(path3)
        np.testing.assert_allclose(norm.a_tilde, expected, atol=1e-9)
        np.testing.assert_allclose(norm.a_tilde + norm.l_tilde, np.eye(3), atol=1e-12)

    def test_laplacian_spectrum(self, mixed_synthetic):
        g = mixed_synthetic
        norm = normalize_adjacency(g)
        eigenvalues = np.linalg.eigvalsh(np.asarray(norm.l_tilde))
        assert eigenvalues.min() >= -1e-9
        assert eigenvalues.max() <= 2 + 1e-9
        assert np.max(np.abs(norm.a_tilde - norm.a_tilde.T)) < 1e-12

    def test_sparse_matches_dense(self, mixed_synthetic):
        g = mixed_synthetic
        dense = normalize_adjacency(g).a_tilde
        sparse = normalize_adjacency(to_storage(g.adjacency, dense_limit=10)).a_tilde
        assert sp.issparse(sparse)
        np.testing.assert_allclose(sparse.toarray(), dense, atol=1e-12)

    def test_rejects_negative_weights(self):
        with pytest.raises(InvalidGraph):
            normalize_adjacency(np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_low_pass_baseline(self, path3):
        x = np.array([[1.0], [0.0], [0.0]])
        a = np.asarray(normalize_adjacency(path3).a_tilde)
        expected = np.linalg.matrix_power(0.5 * (np.eye(3) + a), 2) @ x
        np.testing.assert_allclose(low_pass_baseline(path3, x, 2), expected, atol=1e-12)


class TestHomophily:
    def test_local_triangle(self):
        g = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], labels=np.zeros(3, dtype=int))
        for v in range(3):
            assert local_node_homophily(g, v) == 1.0

    def test_local_star_center(self, star):
        assert local_node_homophily(star, 0) == 0.0

    def test_local_mixed_neighbors(self):
        g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)], labels=np.array([0, 0, 0, 1]))
        assert local_node_homophily(g, 0) == pytest.approx(2 / 3)

    def test_local_isolated_node(self):
        g = graph_from_edges(3, [(0, 1)], labels=np.array([0, 0, 1]))
        with pytest.raises(InvalidGraph, match="isolated"):
            local_node_homophily(g, 2)

    def test_hop_single_edge(self, edge_pair):
        assert hop_homophily(edge_pair, 1) == 1.0

    def test_hop_cycle(self, cycle_abab):
        assert hop_homophily(cycle_abab, 1) == 0.0
        assert hop_homophily(cycle_abab, 2) == 1.0

    def test_hop_errors(self, edge_pair):
        with pytest.raises(InvalidSetting):
            hop_homophily(edge_pair, 0)
        empty = graph_from_edges(3, [], labels=np.array([0, 1, 0]))
        with pytest.raises(InvalidGraph):
            hop_homophily(empty, 1)

    def test_hop_permutation_invariance(self, mixed_synthetic):
        g = mixed_synthetic
        perm = np.random.default_rng(3).permutation(g.n)
        for l in (1, 2, 3):
            assert hop_homophily(g.permute(perm), l) == pytest.approx(hop_homophily(g, l))

    def test_node_homophily_is_mean_of_local(self, mixed_synthetic):
        g = mixed_synthetic
        local = [local_node_homophily(g, v) for v in range(g.n) if len(g.neighbors(v)) > 0]
        assert node_homophily(g) == pytest.approx(np.mean(local))
        values = node_homophily_values(g)
        assert np.all(np.isnan(values) == (g.degrees() == 0))

    def test_edge_homophily_equals_first_hop(self, mixed_synthetic):
        g = mixed_synthetic
        assert edge_homophily(g) == pytest.approx(hop_homophily(g, 1))
        assert homophily_ratio(g, "edge") == pytest.approx(edge_homophily(g))
        assert homophily_ratio(g, "node") == pytest.approx(node_homophily(g))
        assert homophily_ratio(g, "hop", l=2) == pytest.approx(hop_homophily(g, 2))

    def test_weighted_matrix(self):
        m = np.array([[0.0, 0.3, 0.0], [0.5, 0.0, 0.5], [0.0, 0.2, 0.0]])
        assert hop_homophily_matrix(m, np.array([0, 0, 1]), 1) == pytest.approx(2 / 4)


class TestTopK:
    def test_ties_break_to_lower_index(self):
        scores = np.zeros((3, 5))
        rows, cols = top_k_per_row(scores, 2, positive_only=False)
        assert list(zip(rows, cols)) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]

    def test_positive_only(self):
        scores = np.array([[0.0, 2.0, 0.0], [1.0, 0.0, 3.0], [0.0, 0.0, 0.0]])
        rows, cols = top_k_per_row(scores, 2)
        assert list(zip(rows, cols)) == [(0, 1), (1, 2), (1, 0)]

    def test_support_is_symmetric_binary(self):
        rng = np.random.default_rng(0)
        m = rng.random((8, 8))
        np.fill_diagonal(m, 0.0)
        support = top_k_support(m, 2)
        assert np.all((support == 0) | (support == 1))
        assert np.all(support == support.T)
        assert np.all(np.diagonal(support) == 0)
        assert np.all(support.sum(axis=1) >= 2)
