"""数据源：数据集、合成生成器、核与代价、CSV 读取、实验场景"""
from .dataset import Dataset
from .synthetic import gen_gaussian_pairs, gen_path_based, circle_centers, ARC_RADIUS, ARC_SIGMA
from .kernels import build_class_kernels, build_indicator_kernels, cost_matrix, median_bandwidth
from .csv_source import LabeledCsvSource, load_labeled_csv
from .scenarios import (
    load_datasets,
    build_kernels,
    build_problem,
    shared_classes,
    cluster_structure,
    planted_block_instance,
    PlantedInstance,
)

__all__ = [
    "Dataset",
    "gen_gaussian_pairs",
    "gen_path_based",
    "circle_centers",
    "ARC_RADIUS",
    "ARC_SIGMA",
    "build_class_kernels",
    "build_indicator_kernels",
    "cost_matrix",
    "median_bandwidth",
    "LabeledCsvSource",
    "load_labeled_csv",
    "load_datasets",
    "build_kernels",
    "build_problem",
    "shared_classes",
    "cluster_structure",
    "planted_block_instance",
    "PlantedInstance",
]
