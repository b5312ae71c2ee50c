import csv
import json

import numpy as np
import pytest

from kernelrep.cli import cli_main
from kernelrep.harness import (
    AGGREGATE_HEADER,
    RESULT_HEADER,
    ExperimentConfig,
    run_experiment,
    write_aggregates,
    write_results,
)

FAST_CONFIG = {
    "dataset": {"name": "blobs", "n": 40, "n_classes": 3, "spread": 0.5},
    "methods": ["raw", "kpca", "simple"],
    "kernels": ["gaussian", "linear"],
    "fractions": [0.5, 0.1, 0.4],
    "seeds": [0, 1],
    "grid": {"num": 3, "start": 0.1, "stop": 10.0},
    "optimizer": {"step": 0.01, "max_iters": 30, "tol": 0.001},
}


def fast_config(**overrides):
    raw = dict(FAST_CONFIG)
    raw.update(overrides)
    return ExperimentConfig.from_dict(raw)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_round_trip_from_dict(self):
        cfg = fast_config()
        assert cfg.n_components == 2
        assert [k.family for k in cfg.kernels] == ["gaussian", "linear"]
        assert cfg.seeds == (0, 1)

    def test_defaults(self):
        cfg = ExperimentConfig.from_dict({"dataset": "circles"})
        assert cfg.seeds == (0, 1, 2, 3, 4)
        assert cfg.fractions == (0.50, 0.05, 0.45)
        assert cfg.n_components == 2
        assert cfg.knn_k == 3
        grid = cfg.bandwidth_grid()
        assert grid.size == 15 and grid[0] == 0.01 and grid[-1] == 100.0

    @pytest.mark.parametrize(
        "patch",
        [
            {"methods": ["raw", "bogus"]},
            {"seeds": []},
            {"fractions": [0.5, 0.5, 0.0]},
            {"lambda": -1.0},
            {"h": 0},
            {"dataset": "unknown-name"},
            {"grid": {"num": 0}},
            {"typo_key": 1},
        ],
    )
    def test_invalid_configs_rejected(self, patch):
        raw = dict(FAST_CONFIG)
        raw.update(patch)
        with pytest.raises((ValueError, TypeError)):
            ExperimentConfig.from_dict(raw)

    def test_csv_dataset(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("a,b,label\n" + "\n".join(f"{i},{i*2},{i%2}" for i in range(20)) + "\n")
        cfg = ExperimentConfig.from_dict(
            {"dataset": {"csv": str(path), "label_column": "label"},
             "methods": ["raw"], "fractions": [0.5, 0.2, 0.3], "seeds": [0]}
        )
        data = cfg.load_dataset()
        assert data.X.shape == (20, 2)


class TestRunExperiment:
    def test_row_structure(self):
        records, aggregates = run_experiment(fast_config())
        # raw contributes one row per seed; others one per kernel per seed
        assert len(records) == 2 * (1 + 2 + 2)
        for rec in records:
            assert rec.metric_name == "accuracy"
            assert 0.0 <= float(rec.metric_value) <= 1.0
        raw_rows = [r for r in records if r.method == "raw"]
        assert all(r.kernel == "none" and r.bandwidth == "n/a" for r in raw_rows)
        linear_rows = [r for r in records if r.kernel == "linear"]
        assert all(r.bandwidth == "n/a" for r in linear_rows)
        gaussian_rows = [r for r in records if r.kernel == "gaussian"]
        assert all(float(r.bandwidth) > 0 for r in gaussian_rows)

    def test_aggregate_counts(self):
        records, aggregates = run_experiment(fast_config())
        assert all(row[-1] == "2" for row in aggregates)  # two seeds everywhere
        keys = {(r[1], r[2]) for r in aggregates}
        assert ("raw", "none") in keys and ("kpca", "gaussian") in keys

    def test_determinism_modulo_timing(self, tmp_path):
        cfg = fast_config()
        a, agg_a = run_experiment(cfg)
        b, agg_b = run_experiment(cfg)
        strip = lambda recs: [tuple(r.row()[:7] + r.row()[8:]) for r in recs]
        assert strip(a) == strip(b)
        assert agg_a == agg_b

    def test_denoise_emits_mse_and_identity_baseline(self):
        cfg = fast_config(methods=["raw", "ae_denoise"], kernels=["gaussian"],
                          optimizer={"step": 0.01, "max_iters": 5, "tol": 0.001},
                          grid={"num": 2, "start": 0.5, "stop": 5.0})
        records, _ = run_experiment(cfg)
        names = {(r.method, r.metric_name) for r in records}
        assert ("ae_denoise", "accuracy") in names
        assert ("ae_denoise", "mse") in names
        assert ("raw", "mse") in names  # identity baseline row

    def test_failed_cells_recorded_not_fatal(self):
        # 6 components > the 4 labeled samples: kpca cells fail, raw survives
        cfg = fast_config(h=6, methods=["raw", "kpca"], kernels=["linear"], seeds=[0])
        records, aggregates = run_experiment(cfg)
        by_method = {r.method: r for r in records}
        assert by_method["raw"].metric_name == "accuracy"
        assert by_method["kpca"].metric_name == "error"
        assert "error" not in {row[3] for row in aggregates}

    def test_csv_headers_and_atomic_write(self, tmp_path):
        records, aggregates = run_experiment(fast_config(seeds=[0]))
        rpath = tmp_path / "results.csv"
        apath = tmp_path / "aggregate.csv"
        write_results(records, rpath)
        write_aggregates(aggregates, apath)
        rows = read_csv(rpath)
        assert rows[0] == RESULT_HEADER.split(",")
        assert len(rows) == len(records) + 1
        arows = read_csv(apath)
        assert arows[0] == AGGREGATE_HEADER.split(",")
        assert not list(tmp_path.glob("*.tmp"))


class TestCli:
    def write_config(self, tmp_path, raw=None):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(raw or FAST_CONFIG))
        return str(path)

    def test_validate_ok(self, tmp_path, capsys):
        assert cli_main(["validate-config", self.write_config(tmp_path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_missing_file(self, tmp_path):
        assert cli_main(["validate-config", str(tmp_path / "nope.json")]) == 1

    def test_validate_bad_config(self, tmp_path):
        path = self.write_config(tmp_path, {"dataset": "circles", "methods": ["nope"]})
        assert cli_main(["validate-config", path]) == 1

    def test_unknown_flag_exits_one(self, capsys):
        assert cli_main(["run", "--bogus-flag"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_generate_writes_csv(self, tmp_path):
        out = tmp_path / "circles.csv"
        assert cli_main(["generate", "--dataset", "circles", "--out", str(out), "--n", "10"]) == 0
        rows = read_csv(out)
        assert rows[0] == ["f0", "f1", "label"]
        assert len(rows) == 11

    def test_run_end_to_end(self, tmp_path, capsys):
        raw = dict(FAST_CONFIG)
        raw["methods"] = ["raw", "kpca"]
        raw["seeds"] = [0]
        code = cli_main([
            "run", "--config", self.write_config(tmp_path, raw),
            "--out", str(tmp_path / "results"), "--quiet",
        ])
        assert code == 0
        rows = read_csv(tmp_path / "results" / "results.csv")
        assert rows[0] == RESULT_HEADER.split(",")
        assert (tmp_path / "results" / "aggregate.csv").exists()

    def test_seed_override(self, tmp_path):
        raw = dict(FAST_CONFIG)
        raw["methods"] = ["raw"]
        code = cli_main([
            "run", "--config", self.write_config(tmp_path, raw),
            "--out", str(tmp_path / "r2"), "--seed-override", "7", "--quiet",
        ])
        assert code == 0
        rows = read_csv(tmp_path / "r2" / "results.csv")
        assert {r[4] for r in rows[1:]} == {"7"}
