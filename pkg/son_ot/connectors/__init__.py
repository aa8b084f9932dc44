"""Connectors: 数据源和产物输出适配器"""
from .sources import Dataset, load_labeled_csv, load_datasets
from .sinks import DatasetCsvSink, RunArtifactSink

__all__ = [
    "Dataset",
    "load_labeled_csv",
    "load_datasets",
    "DatasetCsvSink",
    "RunArtifactSink",
]
