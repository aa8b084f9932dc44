import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np

from son_ot.core.exceptions import DataError
from son_ot.core.storage import IArtifactStorage
from son_ot.core.types import CostMatrix, KernelWeights, Marginals, ProblemSpec
from son_ot.impl.storage.csv_storage import MatrixCsvStorage

_storage_logger = logging.getLogger("SonOT.Storage")

SCHEMA_VERSION = 1


def _to_json(obj: Any):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


class JsonDocumentStorage(IArtifactStorage):
    """
    JSON 报告存储：自动写入 schema_version，键排序，UTF-8。
    非有限浮点（inf / nan）按 JSON 扩展写出（Infinity / NaN）。
    """
    def __init__(self, file_path: str):
        self.file_path = file_path
        os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)

    def write(self, doc: Dict[str, Any]) -> None:
        payload = {"schema_version": SCHEMA_VERSION, **doc}
        with open(self.file_path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True, ensure_ascii=False, default=_to_json)
            f.write("\n")
        _storage_logger.info(f"💾 报告已写入: {self.file_path}")

    def read(self) -> Dict[str, Any]:
        if not self.exists():
            raise DataError(f"{self.file_path}: file not found")
        try:
            with open(self.file_path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except json.JSONDecodeError as e:
            raise DataError(f"{self.file_path}: invalid JSON: {e.msg}", line=e.lineno)
        if not isinstance(doc, dict) or "schema_version" not in doc:
            raise DataError(f"{self.file_path}: missing schema_version")
        return doc

    def exists(self) -> bool:
        return os.path.exists(self.file_path)

    def clear(self) -> None:
        if self.exists():
            os.remove(self.file_path)


def save_problem(spec: ProblemSpec, path: str, lambda_rows: float = 1.0, lambda_cols: float = 1.0,
                 cost_file: Optional[str] = None) -> None:
    """ProblemSpec → JSON 文档 + 同目录的代价矩阵 CSV（cost_path 为相对 JSON 的路径）"""
    base = os.path.dirname(os.path.abspath(path))
    cost_file = cost_file or os.path.splitext(os.path.basename(path))[0] + "_cost.csv"
    MatrixCsvStorage(os.path.join(base, cost_file)).write(spec.cost.entries)
    JsonDocumentStorage(path).write({
        "cost_path": cost_file,
        "mu": spec.marginals.mu,
        "nu": spec.marginals.nu,
        "lambda": spec.lam,
        "lambda_rows": lambda_rows,
        "lambda_cols": lambda_cols,
        "theta": spec.theta,
        "kernel": {"R": spec.kernels.R, "S": spec.kernels.S},
    })


def load_problem(path: str) -> ProblemSpec:
    doc = JsonDocumentStorage(path).read()
    required = ("cost_path", "mu", "nu", "lambda", "kernel")
    missing = [k for k in required if k not in doc]
    if missing:
        raise DataError(f"{path}: missing keys {missing}")
    cost_path = doc["cost_path"]
    if not os.path.isabs(cost_path):
        cost_path = os.path.join(os.path.dirname(os.path.abspath(path)), cost_path)
    cost = CostMatrix(MatrixCsvStorage(cost_path).read())
    kernel = doc["kernel"]
    return ProblemSpec(
        cost=cost,
        marginals=Marginals(np.asarray(doc["mu"]), np.asarray(doc["nu"])),
        kernels=KernelWeights(np.asarray(kernel["R"], dtype=np.float64), np.asarray(kernel["S"], dtype=np.float64)),
        lam=float(doc["lambda"]),
        theta=doc.get("theta"),
    )
