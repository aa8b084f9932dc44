import math

import numpy as np
import pytest

from son_ot.connectors.sinks import DatasetCsvSink, RunArtifactSink
from son_ot.connectors.sources import Dataset, load_labeled_csv
from son_ot.core import DataError, DimensionError
from son_ot.impl.storage import SCHEMA_VERSION, JsonDocumentStorage, MatrixCsvStorage, load_problem, save_problem
from tests.conftest import random_spec


class TestMatrixCsvStorage:
    def test_exact_floats(self, tmp_path, rng):
        grid = rng.random((3, 4)) * 1e-3
        store = MatrixCsvStorage(str(tmp_path / "m.csv"))
        store.write(grid)
        np.testing.assert_array_equal(store.read(), grid)

    def test_header_line(self, tmp_path):
        store = MatrixCsvStorage(str(tmp_path / "m.csv"))
        store.write(np.zeros((2, 5)))
        assert (tmp_path / "m.csv").read_text(encoding="utf-8").splitlines()[0] == "# rows=2 cols=5"

    def test_bool_grid(self, tmp_path):
        store = MatrixCsvStorage(str(tmp_path / "s.csv"))
        store.write(np.array([[True, False]]))
        assert (tmp_path / "s.csv").read_text(encoding="utf-8").splitlines()[1] == "1,0"

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("rows=1\n1.0\n", encoding="utf-8")
        with pytest.raises(DataError) as err:
            MatrixCsvStorage(str(path)).read()
        assert err.value.line == 1

    def test_header_body_mismatch(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("# rows=2 cols=2\n1.0,2.0\n", encoding="utf-8")
        with pytest.raises(DataError, match="header says 2x2"):
            MatrixCsvStorage(str(path)).read()

    def test_missing_and_clear(self, tmp_path):
        store = MatrixCsvStorage(str(tmp_path / "m.csv"))
        with pytest.raises(DataError):
            store.read()
        store.write(np.ones((1, 1)))
        assert store.exists()
        store.clear()
        assert not store.exists()

    def test_rejects_vector(self, tmp_path):
        with pytest.raises(DimensionError):
            MatrixCsvStorage(str(tmp_path / "m.csv")).write(np.ones(3))


class TestJsonDocumentStorage:
    def test_schema_version_and_numpy(self, tmp_path):
        store = JsonDocumentStorage(str(tmp_path / "r.json"))
        store.write({"a": np.arange(3), "b": np.float64(0.5), "c": (1, 2)})
        doc = store.read()
        assert doc["schema_version"] == SCHEMA_VERSION
        assert doc["a"] == [0, 1, 2] and doc["b"] == 0.5 and doc["c"] == [1, 2]

    def test_infinity_round_trip(self, tmp_path):
        store = JsonDocumentStorage(str(tmp_path / "r.json"))
        store.write({"bound": math.inf})
        assert store.read()["bound"] == math.inf

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text("{\n  'a': 1\n}\n", encoding="utf-8")
        with pytest.raises(DataError) as err:
            JsonDocumentStorage(str(path)).read()
        assert err.value.line == 2

    def test_missing_schema_version(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text('{"a": 1}', encoding="utf-8")
        with pytest.raises(DataError, match="schema_version"):
            JsonDocumentStorage(str(path)).read()


class TestProblemFiles:
    def test_save_and_load(self, tmp_path, rng):
        spec = random_spec(rng, 3, 4, lam=0.7, theta=2.0)
        path = str(tmp_path / "problem.json")
        save_problem(spec, path)
        assert (tmp_path / "problem_cost.csv").exists()
        loaded = load_problem(path)
        np.testing.assert_array_equal(loaded.cost.entries, spec.cost.entries)
        np.testing.assert_array_equal(loaded.marginals.mu, spec.marginals.mu)
        np.testing.assert_array_equal(loaded.kernels.S, spec.kernels.S)
        assert loaded.lam == 0.7 and loaded.theta == 2.0

    def test_missing_keys(self, tmp_path):
        JsonDocumentStorage(str(tmp_path / "p.json")).write({"mu": [1.0]})
        with pytest.raises(DataError, match="missing keys"):
            load_problem(str(tmp_path / "p.json"))


class TestSinks:
    def test_dataset_csv_is_lossless(self, tmp_path, rng):
        data = Dataset.from_raw_labels(rng.normal(size=(5, 2)), [4, 4, 1, 1, 4])
        path = str(tmp_path / "d" / "source.csv")
        DatasetCsvSink(path).write(data)
        back = load_labeled_csv(path)
        np.testing.assert_array_equal(back.points, data.points)
        np.testing.assert_array_equal(back.raw_labels(), data.raw_labels())
        assert (tmp_path / "d" / "source.csv").read_text(encoding="utf-8").startswith("label,x0,x1\n")

    def test_unlabeled_dataset(self, tmp_path):
        path = str(tmp_path / "t.csv")
        DatasetCsvSink(path).write(Dataset(np.ones((2, 3))))
        assert (tmp_path / "t.csv").read_text(encoding="utf-8").splitlines()[0] == "x0,x1,x2"

    def test_run_artifacts(self, tmp_path):
        sink = RunArtifactSink(str(tmp_path / "run"))
        p = sink.write_matrix("coupling.csv", np.eye(2))
        q = sink.write_report("report.json", {"ok": True})
        assert p.endswith("coupling.csv") and q.endswith("report.json")
        np.testing.assert_array_equal(MatrixCsvStorage(p).read(), np.eye(2))
        assert JsonDocumentStorage(q).read()["ok"] is True
