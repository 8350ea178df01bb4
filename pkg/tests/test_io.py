import json
import logging

import pytest
import numpy as np
import scipy.sparse as sp

from hetalign.common.exception import DataError, InvalidSetting
from hetalign.graph import as_dense, edge_homophily
from hetalign.io import (
    DECLARED_STATS,
    DeclaredStats,
    SyntheticSpec,
    align_feature_dims,
    format_metrics,
    generate_synthetic,
    load_dataset,
    load_graph_dir,
    parse_synthetic_spec,
    read_edge_list,
    read_features,
    read_metrics,
    read_structure,
    save_graph_dir,
    validate_stats,
    write_features_binary,
    write_metrics,
    write_structure,
)
from hetalign.pipeline import RunMetrics
from hetalign.reconstruct import reconstruct_structures
from hetalign.setup import HomophilicSolveConfig

from .asset import cycle_abab, graph_from_edges, mixed_synthetic, write_graph_files


class TestLoader:
    def test_two_node_graph(self, tmp_path):
        write_graph_files(tmp_path, [(0, 1)], [[1.0, 0.0], [0.0, 1.0]], labels=[0, 1])
        bundle = load_graph_dir(tmp_path)
        g = bundle.graph
        assert g.n == 2
        assert g.num_edges == 1
        assert np.all(g.labels == [0, 1])
        assert np.all(as_dense(g.adjacency) == [[0, 1], [1, 0]])
        assert bundle.name == tmp_path.name

    def test_self_loop_dropped(self, tmp_path, caplog):
        write_graph_files(tmp_path, [(0, 1), (1, 2), (2, 2)], np.eye(3))
        with caplog.at_level(logging.WARNING, logger="hetalign"):
            g = load_graph_dir(tmp_path).graph
        assert g.num_edges == 2
        assert np.all(np.diagonal(as_dense(g.adjacency)) == 0)
        assert "self-loop" in caplog.text

    def test_duplicates_keep_largest_weight(self, tmp_path, caplog):
        (tmp_path / "edges.txt").write_text("# comment\n0 1 0.5\n1 0 2.0\n\n1 2\n")
        (tmp_path / "features.csv").write_text("0,0\n1,1\n2,2\n")
        with caplog.at_level(logging.WARNING, logger="hetalign"):
            g = load_dataset(tmp_path / "edges.txt", tmp_path / "features.csv").graph
        a = as_dense(g.adjacency)
        assert a[0, 1] == a[1, 0] == 2.0
        assert a[1, 2] == 1.0
        assert g.labels is None
        assert "duplicate" in caplog.text

    def test_parse_error_line(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1\n1 x\n")
        with pytest.raises(DataError, match=r"edges.txt:2\]") as info:
            read_edge_list(path)
        assert info.value.line == 2

    def test_column_count(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1 1.0 3\n")
        with pytest.raises(DataError) as info:
            read_edge_list(path)
        assert info.value.line == 1

    def test_node_out_of_range(self, tmp_path):
        write_graph_files(tmp_path, [(0, 5)], [[0.0], [1.0]])
        with pytest.raises(DataError):
            load_graph_dir(tmp_path)

    def test_feature_rows_inconsistent(self, tmp_path):
        path = tmp_path / "features.csv"
        path.write_text("1,2\n3,4\n5\n")
        with pytest.raises(DataError) as info:
            read_features(path)
        assert info.value.line == 3
        assert info.value.expected == 2 and info.value.actual == 1

    def test_empty_feature_file(self, tmp_path):
        path = tmp_path / "features.csv"
        path.write_text("\n")
        with pytest.raises(DataError):
            read_features(path)

    def test_binary_features(self, tmp_path):
        x = np.random.default_rng(0).normal(size=(5, 3))
        path = tmp_path / "features.bin"
        write_features_binary(path, x)
        np.testing.assert_allclose(read_features(path), x, rtol=1e-6)

    def test_truncated_binary(self, tmp_path):
        path = tmp_path / "features.bin"
        write_features_binary(path, np.ones((4, 2)))
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(DataError, match="wrong size"):
            read_features(path)

    def test_label_count_mismatch(self, tmp_path):
        write_graph_files(tmp_path, [(0, 1)], [[0.0], [1.0]], labels=[0])
        with pytest.raises(DataError, match="Label count"):
            load_graph_dir(tmp_path)

    def test_missing_files(self, tmp_path):
        with pytest.raises(DataError):
            load_graph_dir(tmp_path / "nowhere")

    def test_round_trip(self, tmp_path, mixed_synthetic):
        g = mixed_synthetic
        for binary in (False, True):
            directory = tmp_path / ("bin" if binary else "text")
            save_graph_dir(directory, g, binary=binary)
            loaded = load_graph_dir(directory).graph
            assert np.all(as_dense(loaded.adjacency) == as_dense(g.adjacency))
            assert np.all(loaded.labels == g.labels)
            np.testing.assert_allclose(loaded.features, g.features, rtol=1e-6, atol=1e-6)

    def test_loading_is_idempotent(self, tmp_path, mixed_synthetic):
        save_graph_dir(tmp_path / "a", mixed_synthetic)
        first = load_graph_dir(tmp_path / "a").graph
        save_graph_dir(tmp_path / "b", first)
        second = load_graph_dir(tmp_path / "b").graph
        assert np.all(as_dense(first.adjacency) == as_dense(second.adjacency))
        assert np.all(first.features == second.features)

    def test_structure_round_trip(self, tmp_path, mixed_synthetic):
        g = mixed_synthetic
        s = reconstruct_structures(g, HomophilicSolveConfig(outer_iters=2))
        for name, matrix in (("a_o", s.a_o), ("a_e", s.a_e)):
            path = tmp_path / f"{name}.txt"
            write_structure(path, matrix)
            loaded = read_structure(path, g.n)
            np.testing.assert_allclose(as_dense(loaded), as_dense(matrix), rtol=0, atol=1e-12)
        loaded = read_structure(tmp_path / "a_o.txt", g.n)
        np.testing.assert_allclose(loaded.sum(axis=1), 1.0, atol=1e-9)

    def test_structure_sparse_storage(self, tmp_path, mixed_synthetic):
        s = reconstruct_structures(mixed_synthetic, HomophilicSolveConfig(outer_iters=1))
        path = tmp_path / "a_o.txt"
        write_structure(path, s.a_o)
        loaded = read_structure(path, mixed_synthetic.n, dense_limit=10)
        assert sp.issparse(loaded)
        np.testing.assert_allclose(loaded.toarray(), as_dense(s.a_o), atol=1e-12)

    @pytest.mark.parametrize("text", ["0 1 0.5\n0 1 0.5\n", "0 9 1.0\n"])
    def test_structure_errors(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(DataError):
            read_structure(path, 3)


class TestDeclaredStats:
    def test_published_values(self):
        assert len(DECLARED_STATS) == 13
        assert DECLARED_STATS["Texas"] == DeclaredStats(
            n=183, edges=325, homophily=0.0614, classes=5
        )

    def test_matching_stats(self, cycle_abab):
        validate_stats(cycle_abab, DeclaredStats(n=4, edges=4, homophily=0.0, classes=2))
        validate_stats(cycle_abab, DeclaredStats(n=4, edges=4, homophily=0.04, classes=2))

    @pytest.mark.parametrize(
        "stats, what",
        [
            (DeclaredStats(n=5, edges=4, homophily=0.0, classes=2), "node count"),
            (DeclaredStats(n=4, edges=3, homophily=0.0, classes=2), "edge count"),
            (DeclaredStats(n=4, edges=4, homophily=0.0, classes=3), "class count"),
            (DeclaredStats(n=4, edges=4, homophily=0.5, classes=2), "homophily"),
        ],
    )
    def test_mismatch(self, cycle_abab, stats, what):
        with pytest.raises(DataError, match=what):
            validate_stats(cycle_abab, stats)

    def test_stats_file(self, tmp_path):
        edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
        write_graph_files(tmp_path, edges, np.eye(4), labels=[0, 1, 0, 1])
        (tmp_path / "stats.json").write_text(
            json.dumps({"n": 4, "edges": 5, "homophily": 0.0, "classes": 2})
        )
        with pytest.raises(DataError, match="expected 5, got 4"):
            load_graph_dir(tmp_path)

    def test_unknown_declared_name(self, tmp_path):
        write_graph_files(tmp_path, [(0, 1)], np.eye(2))
        with pytest.raises(DataError, match="Unknown dataset"):
            load_graph_dir(tmp_path, declared="Nowhere")

    def test_declared_name_is_checked(self, tmp_path):
        write_graph_files(tmp_path, [(0, 1)], np.eye(2), labels=[0, 1])
        with pytest.raises(DataError, match="node count"):
            load_graph_dir(tmp_path, declared="Texas")


class TestSynthetic:
    def test_deterministic(self):
        spec = SyntheticSpec(n=120, seed=5)
        a, b = generate_synthetic(spec), generate_synthetic(spec)
        assert np.all(as_dense(a.adjacency) == as_dense(b.adjacency))
        assert np.all(a.features == b.features)
        assert np.all(a.labels == b.labels)

    def test_fully_homophilic(self):
        g = generate_synthetic(SyntheticSpec(n=200, homophily=1.0, seed=1))
        assert edge_homophily(g) == 1.0

    def test_fully_heterophilic(self):
        g = generate_synthetic(SyntheticSpec(n=200, homophily=0.0, seed=1))
        assert edge_homophily(g) <= 0.05

    def test_target_homophily(self):
        g = generate_synthetic(SyntheticSpec(n=500, homophily=0.4, seed=2))
        assert edge_homophily(g) == pytest.approx(0.4, abs=0.05)
        assert np.mean(g.degrees()) == pytest.approx(6.0, rel=0.15)

    def test_monotone_in_homophily(self):
        values = [
            edge_homophily(generate_synthetic(SyntheticSpec(n=300, homophily=h, seed=3)))
            for h in (0.1, 0.3, 0.5, 0.7, 0.9)
        ]
        assert values == sorted(values)

    def test_shared_centers(self):
        a = generate_synthetic(SyntheticSpec(n=50, seed=1, center_seed=9, noise=0.0))
        b = generate_synthetic(SyntheticSpec(n=50, seed=2, center_seed=9, noise=0.0))
        for c in range(a.num_classes):
            if np.any(a.labels == c) and np.any(b.labels == c):
                assert np.all(a.features[a.labels == c][0] == b.features[b.labels == c][0])

    def test_infeasible_degree(self):
        with pytest.raises(InvalidSetting):
            generate_synthetic(SyntheticSpec(n=5, degree=10))

    def test_parse(self):
        spec = parse_synthetic_spec("n=300, h=0.25, c=3, seed=4")
        assert spec == SyntheticSpec(n=300, homophily=0.25, classes=3, seed=4)

    @pytest.mark.parametrize("text", ["n=abc", "bogus=1", "n", "h=1.5"])
    def test_parse_errors(self, text):
        with pytest.raises(InvalidSetting):
            parse_synthetic_spec(text)

    @pytest.mark.slow
    @pytest.mark.parametrize("h", [0.0, 0.2, 0.5, 0.8])
    def test_homophily_across_seeds(self, h):
        for seed in range(10):
            g = generate_synthetic(SyntheticSpec(n=1000, homophily=h, seed=seed))
            assert edge_homophily(g) == pytest.approx(h, abs=0.05)


class TestFeatureAlignment:
    def test_pads_narrower(self, caplog):
        a = graph_from_edges(2, [(0, 1)], features=np.ones((2, 2)))
        b = graph_from_edges(3, [(0, 1)], features=np.ones((3, 5)))
        with caplog.at_level(logging.WARNING, logger="hetalign"):
            a2, b2 = align_feature_dims(a, b)
        assert a2.num_features == b2.num_features == 5
        assert np.all(a2.features[:, 2:] == 0)
        assert np.all(b2.features == b.features)
        assert "Zero-padding" in caplog.text

    def test_equal_dims_untouched(self):
        a = graph_from_edges(2, [(0, 1)])
        b = graph_from_edges(2, [(0, 1)])
        a2, b2 = align_feature_dims(a, b)
        assert a2 is a and b2 is b


class TestMetricsFiles:
    def test_write_and_read(self, tmp_path):
        metrics = RunMetrics(cr=[0.5], re=[1.0], a=[0.1], ce=[0.7], total=[2.3], gamma=[0.5])
        metrics.final_accuracy = 0.75
        metrics.homophily = {"source": {"original": 0.8, "a_o": 0.9, "a_e": 0.1}}
        json_path, record = write_metrics(tmp_path / "out" / "run.json", metrics)
        assert json_path.exists() and record.name == "run.json.txt"
        assert read_metrics(json_path) == metrics
        text = record.read_text()
        assert "final_accuracy: 0.75\n" in text
        assert text == format_metrics(metrics)

    def test_unreadable(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        with pytest.raises(DataError):
            read_metrics(path)
