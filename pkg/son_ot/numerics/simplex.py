"""质量为 s 的单纯形上的欧氏投影，以及行 / 列柱面单纯形约束 S_l(μ_l)、S^k(ν_k) 上的投影。"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.numerics._kernels import penalty_prox_into, project_simplex_into


class Axis(Enum):
    ROW = "row"
    COL = "col"


@dataclass(frozen=True)
class WeightedSimplex:
    """{x ≥ 0, Σx = mass}；作为柱面约束使用时 axis/index 指明作用的行或列"""
    dim: int
    mass: float
    axis: Optional[Axis] = None
    index: Optional[int] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"simplex dimension must be >= 1, got {self.dim}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValidationError(f"simplex mass must be > 0, got {self.mass!r}")
        if (self.axis is None) != (self.index is None):
            raise ValidationError("axis and index must be given together")

    @classmethod
    def row(cls, l: int, dim: int, mass: float) -> "WeightedSimplex":
        return cls(dim, float(mass), Axis.ROW, l)

    @classmethod
    def col(cls, k: int, dim: int, mass: float) -> "WeightedSimplex":
        return cls(dim, float(mass), Axis.COL, k)


def project_simplex(v, mass: float) -> np.ndarray:
    """argmin_{x ≥ 0, Σx = mass} ‖x − v‖₂"""
    if not (np.isfinite(mass) and mass > 0):
        raise ValidationError(f"simplex mass must be > 0, got {mass!r}")
    v = np.ascontiguousarray(np.asarray(v, dtype=np.float64).ravel())
    if v.size == 0:
        raise DimensionError("cannot project an empty vector")
    if not np.all(np.isfinite(v)):
        raise ValidationError("project_simplex received non-finite input")
    out = np.empty_like(v)
    project_simplex_into(v, float(mass), out)
    return out


def penalty_prox(v, mass: float, weight: float) -> np.ndarray:
    """argmin_{x ≥ 0} ½‖x − v‖² + (weight/2)(Σx − mass)²：松弛模式下替代柱面投影"""
    if weight < 0:
        raise ValidationError(f"penalty weight must be >= 0, got {weight!r}")
    v = np.ascontiguousarray(np.asarray(v, dtype=np.float64).ravel())
    if not np.all(np.isfinite(v)):
        raise ValidationError("penalty_prox received non-finite input")
    out = np.empty_like(v)
    penalty_prox_into(v, float(mass), float(weight), out)
    return out


def project_cylinder(X: np.ndarray, c: WeightedSimplex) -> Tuple[np.ndarray, np.ndarray]:
    """只替换第 l 行（或第 k 列）为其在质量 c.mass 单纯形上的投影。

    返回 (新网格, 变动坐标掩码)；输入网格不被修改。
    """
    if c.axis is None:
        raise ValidationError("project_cylinder needs a row or column constraint")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"grid must be 2-D, got shape {X.shape}")
    size = X.shape[0] if c.axis is Axis.ROW else X.shape[1]
    if not 0 <= c.index < size:
        raise DimensionError(f"{c.axis.value} index {c.index} out of range [0, {size})")
    length = X.shape[1] if c.axis is Axis.ROW else X.shape[0]
    if c.dim != length:
        raise DimensionError(f"simplex dimension {c.dim} does not match slice length {length}")
    out = X.copy()
    if c.axis is Axis.ROW:
        out[c.index, :] = project_simplex(X[c.index, :], c.mass)
    else:
        out[:, c.index] = project_simplex(X[:, c.index], c.mass)
    return out, out != X
