import json
import os

import numpy as np
import pytest

from son_ot.cli import run
from son_ot.impl.storage import MatrixCsvStorage

SMALL = {
    "data": {"kind": "gaussian", "K": 2, "m_per": 3, "omega": 0.01, "radius": 2.0, "seed": 1},
    "kernel": {"kind": "indicator"},
    "solver": {"epochs": 5, "log_every": 0},
    "lambda": 1.0,
}


def _read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _with(base, **sections):
    cfg = json.loads(json.dumps(base))
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


class TestErrors:
    def test_missing_config_file(self, tmp_path, capsys):
        path = str(tmp_path / "nowhere.json")
        assert run(["solve", path]) == 2
        err = capsys.readouterr().err
        assert "son-ot solve: error:" in err
        assert path in err

    def test_unknown_key(self, write_config, capsys):
        path = write_config(_with(SMALL, solver={"epoch": 3}))
        assert run(["solve", path]) == 2
        assert "solver.epoch" in capsys.readouterr().err

    def test_zero_clusters(self, write_config):
        assert run(["gen", write_config(_with(SMALL, data={"K": 0}))]) == 2

    def test_empty_methods(self, write_config):
        assert run(["compare", write_config(_with(SMALL, compare={"methods": []}))]) == 2

    def test_exact_over_size_cap(self, write_config, out_dir):
        path = write_config(_with(SMALL, data={"m_per": 11}, compare={"methods": ["exact"]}))
        assert run(["compare", path]) == 4
        assert not os.path.exists(os.path.join(out_dir, "compare.json"))

    def test_divergence_exit_code(self, write_config, capsys):
        path = write_config(_with(SMALL, data={"radius": 100.0}, solver={"step": 1e308, "epochs": 2}))
        assert run(["solve", path]) == 3
        assert "smaller step" in capsys.readouterr().err

    def test_bad_thread_count(self, write_config, monkeypatch):
        monkeypatch.setenv("SONOT_THREADS", "many")
        assert run(["compare", write_config(SMALL)]) == 2

    def test_bad_override(self, write_config):
        assert run(["solve", write_config(SMALL), "--set", "solver.epochs"]) == 2


class TestSolve:
    def test_artifacts(self, write_config, out_dir):
        assert run(["solve", write_config(SMALL)]) == 0
        plan = MatrixCsvStorage(os.path.join(out_dir, "coupling.csv")).read()
        assert plan.shape == (6, 6)
        np.testing.assert_allclose(plan.sum(axis=1), np.full(6, 1 / 6), atol=1e-12)
        support = MatrixCsvStorage(os.path.join(out_dir, "support.csv")).read()
        assert support.shape == (6, 6)
        assert set(np.unique(support)) <= {0.0, 1.0}
        blocks = MatrixCsvStorage(os.path.join(out_dir, "blocks.csv")).read()
        assert blocks.shape == (2, 2)
        report = _read_json(os.path.join(out_dir, "report.json"))
        assert report["schema_version"] == 1
        assert [row["epoch"] for row in report["objective_trace"]] == [1, 2, 3, 4, 5]
        assert report["m"] == 6 and report["lambda"] == 1.0
        assert int(support.sum()) == report["support_size"]
        assert report["source_classes"] == [0, 1]
        assert 0.0 <= report["off_association_fraction"] <= 1.0
        assert report["experiment"]["solver"]["epochs"] == 5
        run_doc = _read_json(os.path.join(out_dir, "runs", "solve-seed0", "run.json"))
        assert run_doc["status"] == "completed" and run_doc["last_epoch"] == 5

    def test_rerun_is_identical(self, write_config, out_dir):
        path = write_config(SMALL)
        assert run(["solve", path]) == 0
        first = MatrixCsvStorage(os.path.join(out_dir, "coupling.csv")).read()
        assert run(["solve", path]) == 0
        np.testing.assert_array_equal(MatrixCsvStorage(os.path.join(out_dir, "coupling.csv")).read(), first)

    def test_set_and_output_dir(self, write_config, tmp_path):
        other = str(tmp_path / "elsewhere")
        assert run(["solve", write_config(SMALL), "--set", "solver.epochs=2", "--output-dir", other]) == 0
        report = _read_json(os.path.join(other, "report.json"))
        assert len(report["objective_trace"]) == 2

    def test_dotted_flags(self, write_config, out_dir):
        assert run(["solve", write_config(SMALL), "--solver.epochs=2", "--lambda=0.5"]) == 0
        report = _read_json(os.path.join(out_dir, "report.json"))
        assert len(report["objective_trace"]) == 2
        assert report["lambda"] == 0.5

    def test_unknown_flag_rejected(self, write_config, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["solve", write_config(SMALL), "--solver.epochs"])
        assert exc.value.code == 2
        assert "unrecognized arguments" in capsys.readouterr().err

    def test_progress_on_stderr(self, write_config, capsys):
        assert run(["solve", write_config(_with(SMALL, solver={"log_every": 5}))]) == 0
        lines = [l for l in capsys.readouterr().err.splitlines() if l.startswith("epoch=")]
        assert lines and lines[0].startswith("epoch=5 obj=")


class TestCertify:
    def test_separated_clusters(self, write_config, out_dir):
        path = write_config(_with(SMALL, data={"m_per": 4}))
        assert run(["certify", path]) == 0
        cert = _read_json(os.path.join(out_dir, "certificate.json"))
        assert cert["part1_holds"] is True
        assert cert["window_nonempty"] is True
        assert cert["classes"] == [0, 1]
        assert cert["delta"] > 0
        assert cert["thm1_ratio"] is not None
        assert cert["thm3_bound"] is None

    def test_general_size_bound_with_theta(self, write_config, out_dir):
        assert run(["certify", write_config(_with(SMALL, theta=5.0))]) == 0
        cert = _read_json(os.path.join(out_dir, "certificate.json"))
        assert cert["thm3_bound"] is not None
        assert set(cert["thm3_part2"]["slacks"]) >= {"cost_rows", "kernel_cols"}

    def test_constant_cost(self, write_config, out_dir):
        data = {"centers_s": [[0.0, 0.0], [0.0, 0.0]], "omega": 0.0}
        assert run(["certify", write_config(_with(SMALL, data=data))]) == 0
        cert = _read_json(os.path.join(out_dir, "certificate.json"))
        assert cert["delta"] == 0.0
        assert cert["part1_holds"] is False

    def test_missing_labels(self, write_config, tmp_path, capsys):
        src = tmp_path / "s.csv"
        src.write_text("0.0,1.0\n1.0,0.0\n", encoding="utf-8")
        data = {"kind": "csv", "source_path": str(src), "target_path": str(src), "has_labels": False}
        assert run(["certify", write_config({"data": data, "kernel": {"kind": "none"}})]) == 2
        assert "labels" in capsys.readouterr().err

    def test_disabled(self, write_config):
        assert run(["certify", write_config(_with(SMALL, certificate={"enabled": False}))]) == 2

    def test_too_many_clusters(self, write_config):
        data = {"K": 11, "m_per": 1, "radius": 50.0}
        assert run(["certify", write_config(_with(SMALL, data=data))]) == 4

    def test_dropped_class_uses_shared_classes(self, write_config, out_dir):
        data = {"K": 3, "drop_target_class": 2}
        assert run(["certify", write_config(_with(SMALL, data=data))]) == 0
        assert _read_json(os.path.join(out_dir, "certificate.json"))["classes"] == [0, 1]


class TestCompare:
    def test_rows_in_method_order(self, write_config, out_dir):
        path = write_config(_with(SMALL, compare={"methods": ["son", "sinkhorn", "exact"]}))
        assert run(["compare", path]) == 0
        doc = _read_json(os.path.join(out_dir, "compare.json"))
        assert doc["methods"] == ["son", "sinkhorn", "exact"]
        assert [row["method"] for row in doc["rows"]] == ["son", "sinkhorn", "exact"]
        for row in doc["rows"]:
            assert row["feasibility_gap"] <= 1e-6
            assert 0.0 <= row["knn1_accuracy"] <= 1.0
            assert "transport_cost" in row
        exact = doc["rows"][2]
        assert exact["transport_cost"] <= doc["rows"][1]["transport_cost"] + 1e-6

    def test_parallel_matches_sequential(self, write_config, out_dir, monkeypatch):
        path = write_config(_with(SMALL, compare={"methods": ["son", "sinkhorn"]}))
        assert run(["compare", path]) == 0
        seq = _read_json(os.path.join(out_dir, "compare.json"))["rows"]
        monkeypatch.setenv("SONOT_THREADS", "2")
        assert run(["compare", path]) == 0
        par = _read_json(os.path.join(out_dir, "compare.json"))["rows"]
        for a, b in zip(seq, par):
            assert a["method"] == b["method"]
            assert a["objective"] == b["objective"]


class TestGen:
    def test_deterministic(self, write_config, out_dir):
        path = write_config(SMALL)
        assert run(["gen", path]) == 0
        with open(os.path.join(out_dir, "source.csv"), "rb") as f:
            first = f.read()
        assert run(["gen", path]) == 0
        with open(os.path.join(out_dir, "source.csv"), "rb") as f:
            assert f.read() == first
        assert first.startswith(b"label,x0,x1\n")

    def test_drop_class(self, write_config, out_dir):
        assert run(["gen", write_config(_with(SMALL, data={"K": 3, "drop_target_class": 2}))]) == 0
        with open(os.path.join(out_dir, "target.csv"), encoding="utf-8") as f:
            labels = {line.split(",")[0] for line in f.read().splitlines()[1:]}
        assert labels == {"0", "1"}

    def test_path_based(self, write_config, out_dir):
        cfg = {"data": {"kind": "path_based", "n_per_class": 4}}
        assert run(["gen", write_config(cfg)]) == 0
        with open(os.path.join(out_dir, "source.csv"), encoding="utf-8") as f:
            assert len(f.read().splitlines()) == 13
