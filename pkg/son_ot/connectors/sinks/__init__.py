"""产物输出适配器"""
from .dataset_csv_sink import DatasetCsvSink
from .artifact_sink import RunArtifactSink

__all__ = ["DatasetCsvSink", "RunArtifactSink"]
