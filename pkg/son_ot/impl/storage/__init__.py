from .csv_storage import MatrixCsvStorage
from .json_storage import JsonDocumentStorage, save_problem, load_problem, SCHEMA_VERSION

__all__ = ["MatrixCsvStorage", "JsonDocumentStorage", "save_problem", "load_problem", "SCHEMA_VERSION"]
