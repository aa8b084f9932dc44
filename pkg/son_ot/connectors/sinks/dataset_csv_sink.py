import logging
import os

import pandas as pd

from son_ot.connectors.sources.dataset import Dataset

_data_logger = logging.getLogger("SonOT.Data")


class DatasetCsvSink:
    """
    数据集 CSV 输出：表头 `label,x0,x1,...`（无标签时省略 label 列），
    标签写原始类别号，浮点以 %.17g 写出，可由 LabeledCsvSource 无损读回。
    """
    def __init__(self, file_path: str):
        self.file_path = file_path
        os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)

    def write(self, data: Dataset) -> None:
        df = pd.DataFrame(data.points, columns=[f"x{k}" for k in range(data.dim)])
        if data.has_labels:
            df.insert(0, "label", data.raw_labels())
        df.to_csv(self.file_path, index=False, float_format="%.17g", encoding="utf-8", lineterminator="\n")
        _data_logger.info(f"💾 数据集已写入: {self.file_path} ({len(data)} 点)")
