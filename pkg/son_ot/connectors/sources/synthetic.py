"""合成数据：高斯簇对、路径型数据（两个团块 + 环绕圆弧）。相同种子给出逐位相同的数据。"""
from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

import numpy as np

from son_ot.connectors.sources.dataset import Dataset
from son_ot.core.exceptions import DimensionError, ValidationError

_data_logger = logging.getLogger("SonOT.Data")

# 路径型数据的形状参数（近似）：圆弧半径、径向抖动、弧所跨角度
ARC_RADIUS = 3.0
ARC_SIGMA = 0.15
ARC_SPAN_DEG = 270.0
BLOB_CENTERS = ((-1.0, 0.0), (1.0, 0.0))
BLOB_SIGMA = 0.3


def circle_centers(K: int, dim: int, radius: float) -> np.ndarray:
    """K 个中心等分放在前两维的圆上；dim = 1 时等距放在直线上"""
    centers = np.zeros((K, dim))
    if dim == 1:
        centers[:, 0] = radius * np.arange(K)
        return centers
    angles = 2.0 * math.pi * np.arange(K) / K
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    return centers


def _centers(given, K: int, dim: int, radius: float, side: str) -> np.ndarray:
    if given is None:
        return circle_centers(K, dim, radius)
    c = np.asarray(given, dtype=np.float64)
    if c.shape != (K, dim):
        raise DimensionError(f"{side} centers must have shape ({K}, {dim}), got {c.shape}")
    return c


def gen_gaussian_pairs(K: int, m_per: int, dim: int = 2, centers_s=None, centers_t=None,
                       omega: float = 0.05, seed: int = 0, radius: float = 4.0) -> Tuple[Dataset, Dataset]:
    """
    每个域每簇 m_per 个样本，各向同性噪声标准差 omega；标签即簇编号，按簇依次排列。
    未给中心时放在半径 radius 的圆上（两域中心相同）。
    """
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    if m_per < 1 or dim < 1:
        raise ValidationError(f"m_per and dim must be >= 1, got m_per={m_per}, dim={dim}")
    if omega < 0:
        raise ValidationError(f"omega must be >= 0, got {omega!r}")
    cs = _centers(centers_s, K, dim, radius, "source")
    ct = _centers(centers_t, K, dim, radius, "target") if centers_t is not None else cs.copy()
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(K), m_per)
    src = cs[labels] + omega * rng.standard_normal((K * m_per, dim))
    tgt = ct[labels] + omega * rng.standard_normal((K * m_per, dim))
    _data_logger.info(f"🧪 高斯簇对: K={K}, 每簇={m_per}, dim={dim}, ω={omega}, seed={seed}")
    return Dataset(src, labels), Dataset(tgt, labels)


def gen_path_based(n_per_class: int, seed: int = 0, drop_class: Optional[int] = None) -> Dataset:
    """
    路径型数据的参数化近似：类别 0、1 为圆内的两个高斯团块，类别 2 为包围它们的约 270° 圆弧。
    圆弧的径向抖动截断在 ±3σ 以内。
    """
    if n_per_class < 1:
        raise ValidationError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    parts = []
    for c, center in enumerate(BLOB_CENTERS):
        parts.append(np.asarray(center) + BLOB_SIGMA * rng.standard_normal((n_per_class, 2)))
    # 缺口朝下：弧从 −45° 逆时针延伸到 225°
    start = math.radians(-45.0)
    theta = start + math.radians(ARC_SPAN_DEG) * rng.random(n_per_class)
    jitter = np.clip(rng.standard_normal(n_per_class), -3.0, 3.0) * ARC_SIGMA
    r = ARC_RADIUS + jitter
    parts.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
    labels = np.repeat(np.arange(3), n_per_class)
    data = Dataset(np.vstack(parts), labels)
    if drop_class is not None:
        data = data.drop_class(drop_class)
    _data_logger.info(f"🧪 路径型数据: 每类={n_per_class}, 去掉类别={drop_class}, seed={seed}")
    return data
