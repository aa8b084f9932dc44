import logging
import os
import re

import numpy as np
import pandas as pd

from son_ot.connectors.sources.dataset import Dataset
from son_ot.core.exceptions import DataError

_data_logger = logging.getLogger("SonOT.Data")

_LINE_RE = re.compile(r"line (\d+)")


def _first_row(mask: np.ndarray) -> int:
    return int(np.argmax(mask))


class LabeledCsvSource:
    """
    带标签的 CSV 数据源：每行 `label,f1,f2,...`（has_labels=False 时为 `f1,f2,...`）。
    基于 Pandas 读取为字符串网格后再做数值转换，出错时给出首个出错的文件行号。
    首行所有字段都不是数字时视为表头；空行跳过。
    """
    def __init__(self, path: str, has_labels: bool = True):
        self.path = path
        self.has_labels = has_labels

    def _read_cells(self) -> pd.DataFrame:
        try:
            return pd.read_csv(self.path, header=None, dtype=str, keep_default_na=False,
                               skip_blank_lines=False, encoding="utf-8")
        except pd.errors.EmptyDataError:
            raise DataError(f"{self.path}: no data rows")
        except pd.errors.ParserError as e:
            detail = str(e).strip().splitlines()[-1]
            found = _LINE_RE.search(detail)
            raise DataError(f"{self.path}: ragged row ({detail})", line=int(found.group(1)) if found else None)

    def load(self) -> Dataset:
        if not os.path.exists(self.path):
            raise DataError(f"{self.path}: file not found")
        raw = self._read_cells()
        # header=None 且不跳过空行：第 i 行数据即文件第 i+1 行
        lines = raw.index.to_numpy() + 1
        cells = raw.to_numpy(dtype=object)
        missing = pd.isna(cells)
        text = np.char.strip(np.where(missing, "", cells).astype(str))

        keep = ~(text == "").all(axis=1)
        if keep[0] and pd.to_numeric(pd.Series(text[0]), errors="coerce").isna().all():
            keep[0] = False
        if not keep.any():
            raise DataError(f"{self.path}: no data rows")
        text, missing, lines = text[keep], missing[keep], lines[keep]

        widths = (~missing).sum(axis=1)
        width = int(widths[0])
        if width < (2 if self.has_labels else 1):
            raise DataError(f"{self.path}: row has no feature columns", line=int(lines[0]))
        ragged = widths != width
        if ragged.any():
            r = _first_row(ragged)
            raise DataError(f"{self.path}: ragged row ({widths[r]} fields, expected {width})", line=int(lines[r]))

        body = text[:, :width]
        values = pd.DataFrame(body).apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.isnan(values)
        if bad.any():
            r = _first_row(bad.any(axis=1))
            c = _first_row(bad[r])
            raise DataError(f"{self.path}: non-numeric field {body[r, c]!r}", line=int(lines[r]))
        if self.has_labels:
            fractional = values[:, 0] != np.floor(values[:, 0])
            if fractional.any():
                r = _first_row(fractional)
                raise DataError(f"{self.path}: label must be an integer, got {body[r, 0]!r}", line=int(lines[r]))

        _data_logger.info(f"📥 读取数据集: {self.path} ({values.shape[0]} 行)")
        if self.has_labels:
            return Dataset.from_raw_labels(values[:, 1:], values[:, 0].astype(np.int64))
        return Dataset(values)


def load_labeled_csv(path: str, has_labels: bool = True) -> Dataset:
    return LabeledCsvSource(path, has_labels).load()
