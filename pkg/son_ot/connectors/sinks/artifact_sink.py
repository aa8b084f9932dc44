import os
from typing import Any, Dict

import numpy as np

from son_ot.impl.storage.csv_storage import MatrixCsvStorage
from son_ot.impl.storage.json_storage import JsonDocumentStorage


class RunArtifactSink:
    """
    一次实验的产物目录：矩阵写 CSV，报告写 JSON。
    写出顺序由调用方串行化（对比命令中各方法并行计算、统一写出）。
    """
    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_matrix(self, name: str, grid: np.ndarray) -> str:
        p = self.path(name)
        MatrixCsvStorage(p).write(grid)
        return p

    def write_report(self, name: str, doc: Dict[str, Any]) -> str:
        p = self.path(name)
        JsonDocumentStorage(p).write(doc)
        return p
