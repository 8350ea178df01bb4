import json

import pytest
import numpy as np

from hetalign.cli import build_parser, config_from_args, exit_code, main
from hetalign.common.exception import (
    DataError,
    InvalidSetting,
    NumericalAbort,
    PipelineError,
)
from hetalign.io import read_structure

from .asset import write_graph_files

SOURCE = "n=40,c=3,d=6,h=0.8,degree=4,separation=3,seed=1,center_seed=11"
TARGET = "n=36,c=3,d=6,h=0.3,degree=4,separation=3,seed=2,center_seed=11"
QUICK = ["--l", "2", "--epochs", "3", "--lr", "0.01", "--outer-iters", "2", "--loose-ranges"]


def cycle_dir(tmp_path):
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return write_graph_files(tmp_path / "abab", edges, np.eye(4), labels=[0, 1, 0, 1])


class TestArguments:
    def test_task_settings(self):
        args = build_parser().parse_args(["run", "--task", "CO->WI"])
        cfg = config_from_args(args)
        assert cfg.l == 7
        assert cfg.weights.mu1 == cfg.weights.mu2 == 0.1

    def test_flags_override_task(self):
        args = build_parser().parse_args(["run", "--task", "U->B", "--mu1", "0.2", "--l", "3"])
        cfg = config_from_args(args)
        assert (cfg.weights.mu1, cfg.weights.mu2, cfg.l) == (0.2, 0.5, 3)

    def test_exit_codes(self):
        assert exit_code(InvalidSetting("bad")) == 1
        assert exit_code(DataError("bad")) == 2
        assert exit_code(NumericalAbort("bad", name="re")) == 3
        wrapped = PipelineError("bad", stage="train")
        wrapped.__cause__ = NumericalAbort("bad", name="cr")
        assert exit_code(wrapped) == 3


class TestMain:
    def test_usage_errors(self, capsys):
        assert main([]) == 1
        assert main(["run", "--epochs", "many"]) == 1
        assert main(["run", "--ablation", "nothing"]) == 1

    def test_invalid_setting(self):
        assert main(["run", "--synthetic-src", SOURCE, "--synthetic-tgt", TARGET,
                     "--lr", "1.0"]) == 1

    def test_missing_graph_source(self):
        assert main(["run", "--synthetic-tgt", TARGET]) == 1

    def test_missing_directory(self, tmp_path):
        assert main(["homophily", "--graph-dir", str(tmp_path / "missing")]) == 2

    def test_homophily(self, tmp_path, capsys):
        assert main(["homophily", "--graph-dir", str(cycle_dir(tmp_path)), "--max-hop", "2"]) == 0
        out = capsys.readouterr().out
        assert "0.0000" in out and "1.0000" in out

    def test_reconstruct(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code = main(["reconstruct", "--synthetic", SOURCE, "--out-dir", str(out_dir), *QUICK])
        assert code == 0
        a_o = read_structure(out_dir / "a_o.txt", 40)
        a_e = read_structure(out_dir / "a_e.txt", 40)
        np.testing.assert_allclose(a_o.sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_array_equal(a_e, a_e.T)
        assert a_e.sum() > 0
        assert "a_e" in capsys.readouterr().out

    def test_run(self, tmp_path, capsys):
        out = tmp_path / "metrics.json"
        code = main(["run", "--synthetic-src", SOURCE, "--synthetic-tgt", TARGET, *QUICK,
                     "--out", str(out)])
        assert code == 0
        assert "final_accuracy:" in capsys.readouterr().out
        data = json.loads(out.read_text())
        assert len(data["total"]) == 3
        assert "final_accuracy:" in (tmp_path / "metrics.json.txt").read_text()

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        code = main(["run", "--synthetic-src", SOURCE, "--synthetic-tgt", TARGET, *QUICK,
                     "--out", str(blocker / "metrics.json")])
        assert code == 2

    def test_sweep(self, tmp_path, capsys):
        out_dir = tmp_path / "sweep"
        code = main(["sweep", "--synthetic-src", SOURCE, "--synthetic-tgt", TARGET, *QUICK,
                     "--mu1-grid", "0.1", "--mu2-grid", "0.1,0.5", "--l-grid", "2",
                     "--out-dir", str(out_dir)])
        assert code == 0
        names = sorted(p.name for p in out_dir.glob("*.json"))
        assert names == [
            "mu1=0.1_mu2=0.1_l=2_seed=0.json",
            "mu1=0.1_mu2=0.5_l=2_seed=0.json",
        ]
        assert "accuracy" in capsys.readouterr().out
