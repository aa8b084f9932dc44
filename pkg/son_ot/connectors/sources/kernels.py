"""类别核与代价矩阵构造"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from son_ot.connectors.sources.dataset import Dataset
from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.core.types import CostMatrix, KernelWeights

METRICS = ("sqeuclidean", "euclidean")


def median_bandwidth(data: Dataset) -> float:
    """同侧成对距离的中位数；没有点对或距离全为 0 时取 1"""
    if len(data) < 2:
        return 1.0
    med = float(np.median(pdist(data.points)))
    return med if med > 0 else 1.0


def _gaussian(data: Dataset, sigma: float) -> np.ndarray:
    sq = squareform(pdist(data.points, "sqeuclidean")) if len(data) > 1 else np.zeros((1, 1))
    return np.exp(-sq / (2.0 * sigma ** 2))


def _same_class(data: Dataset) -> np.ndarray:
    return data.labels[:, None] == data.labels[None, :]


def _finish(K: np.ndarray, scale: float) -> np.ndarray:
    K = scale * K
    np.fill_diagonal(K, 0.0)
    return 0.5 * (K + K.T)


def build_class_kernels(src: Dataset, tgt: Dataset, sigma_s: Optional[float] = None, sigma_t: Optional[float] = None,
                        lambda_rows: float = 1.0, lambda_cols: float = 1.0, supervised: bool = True) -> KernelWeights:
    """
    R = lambda_rows·exp(−‖y_l − y_k‖²/(2σ_s²))，监督模式下跨类别置 0；
    S = lambda_cols·exp(−‖y_l − y_k‖²/(2σ_t²))，目标侧不做掩码。对角线为 0。
    """
    if supervised and not src.has_labels:
        raise ValidationError("supervised kernels need source labels")
    if lambda_rows < 0 or lambda_cols < 0:
        raise ValidationError("lambda_rows and lambda_cols must be >= 0")
    for name, s in (("sigma_s", sigma_s), ("sigma_t", sigma_t)):
        if s is not None and not s > 0:
            raise ValidationError(f"{name} must be > 0, got {s!r}")
    R = _gaussian(src, sigma_s or median_bandwidth(src))
    if supervised:
        R = np.where(_same_class(src), R, 0.0)
    S = _gaussian(tgt, sigma_t or median_bandwidth(tgt))
    kernels = KernelWeights(_finish(R, lambda_rows), _finish(S, lambda_cols))
    return kernels


def build_indicator_kernels(src: Dataset, tgt: Dataset, lambda_rows: float = 1.0, lambda_cols: float = 1.0,
                            supervised: bool = True) -> KernelWeights:
    """R = 同类指示（非监督时全 1），S = 全 1；对角线为 0"""
    if supervised and not src.has_labels:
        raise ValidationError("supervised kernels need source labels")
    R = _same_class(src).astype(np.float64) if supervised else np.ones((len(src), len(src)))
    S = np.ones((len(tgt), len(tgt)))
    return KernelWeights(_finish(R, lambda_rows), _finish(S, lambda_cols))


def cost_matrix(src: Dataset, tgt: Dataset, metric: str = "sqeuclidean") -> CostMatrix:
    """成对代价：sqeuclidean 为 ‖a − b‖²，euclidean 为 ‖a − b‖"""
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}, got {metric!r}")
    if src.dim != tgt.dim:
        raise DimensionError(f"feature dims differ: source {src.dim} vs target {tgt.dim}")
    D = cdist(src.points, tgt.points, metric)
    # cdist 的舍入可能给出 −0.0 一类的极小负值
    return CostMatrix(np.maximum(D, 0.0))
