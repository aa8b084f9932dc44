import json

import pytest

from son_ot.cli import apply_overrides, load_config
from son_ot.cli.config_loader import parse_override, read_config_dict
from son_ot.core import ConfigError, ExperimentConfig, SamplingScheme, SolverConfig, ValidationError


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig.from_dict({})
        assert cfg.lam == 1.0 and cfg.theta is None
        assert cfg.solver.epochs == 100
        assert cfg.compare.methods == ["son", "sinkhorn"]

    def test_lambda_alias(self):
        cfg = ExperimentConfig.from_dict({"lambda": 0.25, "theta": 3.0})
        assert cfg.lam == 0.25 and cfg.theta == 3.0
        assert cfg.to_dict()["lambda"] == 0.25

    def test_unknown_nested_key_names_path(self):
        with pytest.raises(ConfigError, match="solver.epoch'"):
            ExperimentConfig.from_dict({"solver": {"epoch": 3}})

    def test_unknown_sampling_key(self):
        with pytest.raises(ConfigError, match="solver.sampling.prob"):
            ExperimentConfig.from_dict({"solver": {"sampling": {"prob": 0.5}}})

    def test_unknown_root_key(self):
        with pytest.raises(ConfigError, match="'lamda'"):
            ExperimentConfig.from_dict({"lamda": 1.0})

    def test_section_must_be_object(self):
        with pytest.raises(ConfigError, match="must be an object"):
            ExperimentConfig.from_dict({"data": 3})

    @pytest.mark.parametrize("doc", [
        {"lambda": -1.0},
        {"theta": 0.0},
        {"solver": {"rho_acc": 1.0}},
        {"solver": {"relaxed": True}},
        {"data": {"K": 0}},
        {"data": {"metric": "cosine"}},
        {"compare": {"methods": []}},
        {"compare": {"methods": ["son", "magic"]}},
        {"certificate": {"a": 0.5}},
        {"solver": {"sampling": {"kind": "split_pools"}}},
    ])
    def test_invalid_values(self, doc):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(doc)

    def test_sampling_and_snapshots(self):
        cfg = ExperimentConfig.from_dict({"solver": {"sampling": {"kind": "split_pools", "p_obj": 0.7},
                                                     "snapshot_epochs": [5, 10]}})
        assert cfg.solver.sampling == SamplingScheme.split_pools(0.7)
        assert cfg.solver.snapshot_epochs == (5, 10)

    def test_round_trip_through_dict(self):
        cfg = ExperimentConfig.from_dict({"lambda": 0.5, "solver": {"epochs": 7, "snapshot_epochs": [2]}})
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()


class TestSolverConfig:
    def test_validation(self):
        with pytest.raises(ValidationError):
            SolverConfig(epochs=-1).validate()
        with pytest.raises(ValidationError):
            SolverConfig(step=0.0).validate()
        with pytest.raises(ValidationError):
            SolverConfig(snapshot_epochs=(0,)).validate()


class TestOverrides:
    def test_parse_json_and_string(self):
        assert parse_override("solver.epochs=20") == (["solver", "epochs"], 20)
        assert parse_override("output_dir=runs/a") == (["output_dir"], "runs/a")
        assert parse_override("solver.jit=false") == (["solver", "jit"], False)

    def test_bad_override(self):
        with pytest.raises(ConfigError):
            parse_override("solver.epochs")
        with pytest.raises(ConfigError):
            parse_override("=3")

    def test_nested_creation(self):
        data = apply_overrides({}, ["solver.sampling.kind=uniform", "lambda=0.5"])
        assert data == {"solver": {"sampling": {"kind": "uniform"}}, "lambda": 0.5}

    def test_cannot_descend_into_scalar(self):
        with pytest.raises(ConfigError):
            apply_overrides({"lambda": 1.0}, ["lambda.x=1"])


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        path = str(tmp_path / "absent.json")
        with pytest.raises(ConfigError, match="absent.json"):
            load_config(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            read_config_dict(str(path))

    def test_non_object(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            read_config_dict(str(path))

    def test_overrides_applied(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"lambda": 2.0, "solver": {"epochs": 5}}), encoding="utf-8")
        cfg = load_config(str(path), ["solver.epochs=9", "data.seed=4"])
        assert cfg.solver.epochs == 9 and cfg.data.seed == 4 and cfg.lam == 2.0
