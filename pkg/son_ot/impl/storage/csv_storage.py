import logging
import os

import numpy as np
import pandas as pd

from son_ot.core.exceptions import DataError, DimensionError
from son_ot.core.storage import IArtifactStorage

_storage_logger = logging.getLogger("SonOT.Storage")


class MatrixCsvStorage(IArtifactStorage):
    """
    基于 Pandas 实现的稠密矩阵 CSV 存储。
    首行为 `# rows=m cols=n`，之后按行主序逐行写出；浮点数以 %.17g 写出，可无损读回。
    布尔矩阵（支撑模式）以 0/1 写出。
    """
    def __init__(self, file_path: str):
        self.file_path = file_path
        os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)

    def write(self, grid) -> None:
        grid = np.asarray(grid)
        if grid.ndim != 2:
            raise DimensionError(f"matrix CSV needs a 2-D grid, got shape {grid.shape}")
        if grid.dtype == bool:
            grid = grid.astype(np.int64)
        m, n = grid.shape
        with open(self.file_path, "w", encoding="utf-8", newline="") as f:
            f.write(f"# rows={m} cols={n}\n")
            pd.DataFrame(grid).to_csv(f, header=False, index=False, float_format="%.17g", lineterminator="\n")
        _storage_logger.info(f"💾 矩阵已写入: {self.file_path} ({m}x{n})")

    def _read_header(self):
        with open(self.file_path, "r", encoding="utf-8") as f:
            first = f.readline().strip()
        try:
            tag, rows, cols = first.split()
            if tag != "#" or not rows.startswith("rows=") or not cols.startswith("cols="):
                raise ValueError(first)
            return int(rows[5:]), int(cols[5:])
        except ValueError:
            raise DataError(f"{self.file_path}: malformed matrix header {first!r}", line=1)

    def read(self) -> np.ndarray:
        if not self.exists():
            raise DataError(f"{self.file_path}: file not found")
        m, n = self._read_header()
        try:
            df = pd.read_csv(self.file_path, skiprows=1, header=None, dtype=np.float64, encoding="utf-8",
                             float_precision="round_trip")
        except pd.errors.EmptyDataError:
            raise DataError(f"{self.file_path}: no data rows")
        except ValueError as e:
            raise DataError(f"{self.file_path}: non-numeric matrix entry ({e})")
        grid = df.to_numpy(dtype=np.float64)
        if grid.shape != (m, n):
            raise DataError(f"{self.file_path}: header says {m}x{n} but body is {grid.shape[0]}x{grid.shape[1]}")
        return grid

    def exists(self) -> bool:
        return os.path.exists(self.file_path)

    def clear(self) -> None:
        if self.exists():
            os.remove(self.file_path)
