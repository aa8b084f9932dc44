"""评估：重心映射、1-NN 迁移精度、块结构指标"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np
from scipy.spatial.distance import cdist

from son_ot.connectors.sources.dataset import Dataset
from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.core.types import Coupling
from son_ot.theory.certificates import ClusterStructure

_eval_logger = logging.getLogger("SonOT.Eval")

# 计入块内变异系数的块质量下限（相对总质量）
BLOCK_MASS_FLOOR = 1e-6

PlanLike = Union[Coupling, np.ndarray]


def _plan(X: PlanLike) -> np.ndarray:
    return X.plan if isinstance(X, Coupling) else np.asarray(X, dtype=np.float64)


@dataclass(frozen=True)
class TransportedPoints:
    """重心映射的结果；zero_rows 标记质量为 0、被映射到目标重心的源点"""
    dataset: Dataset
    zero_rows: np.ndarray


def barycentric_map(X: PlanLike, tgt: Dataset, labels=None) -> TransportedPoints:
    """源点 i ↦ Σ_j X_ij·y_j / Σ_j X_ij；零质量行映射到目标点重心并标记"""
    plan = _plan(X)
    if plan.shape[1] != len(tgt):
        raise DimensionError(f"plan has {plan.shape[1]} columns but target has {len(tgt)} points")
    mass = plan.sum(axis=1)
    zero = mass <= 0
    out = np.empty((plan.shape[0], tgt.dim))
    out[~zero] = (plan[~zero] @ tgt.points) / mass[~zero, None]
    out[zero] = tgt.points.mean(axis=0)
    if zero.any():
        _eval_logger.warning(f"⚠️ {int(zero.sum())} 个源点的行质量为 0，已映射到目标重心")
    data = Dataset(out) if labels is None else Dataset(out, labels)
    return TransportedPoints(data, zero)


def knn1_accuracy(train_pts, train_labels, test_pts, test_labels) -> float:
    """1-NN（欧氏距离，距离相同取下标最小者）的分类精度"""
    train = np.atleast_2d(np.asarray(train_pts, dtype=np.float64))
    test = np.atleast_2d(np.asarray(test_pts, dtype=np.float64))
    ytr = np.asarray(train_labels).ravel()
    yte = np.asarray(test_labels).ravel()
    if train.shape[0] == 0 or ytr.size == 0:
        raise ValidationError("1-NN needs a nonempty training set")
    if test.shape[0] == 0 or yte.size == 0:
        raise ValidationError("1-NN needs a nonempty test set")
    if train.shape[0] != ytr.size or test.shape[0] != yte.size:
        raise DimensionError("points and labels differ in length")
    if train.shape[1] != test.shape[1]:
        raise DimensionError(f"feature dims differ: train {train.shape[1]} vs test {test.shape[1]}")
    # argmin 返回首个最小值，即最小下标
    nearest = np.argmin(cdist(test, train), axis=1)
    return float(np.mean(ytr[nearest] == yte))


@dataclass(frozen=True)
class BlockMassReport:
    block_mass: np.ndarray
    off_association_fraction: float
    within_block_cv: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "block_mass": self.block_mass.tolist(),
            "off_association_fraction": self.off_association_fraction,
            "within_block_cv": self.within_block_cv,
        }


def block_mass_report(X: PlanLike, cs: ClusterStructure) -> BlockMassReport:
    """
    block_mass[α, β] = X 在 S_α × T_β 上的质量；
    off_association_fraction = Σ_{β≠π(α)} block_mass / 总质量；
    within_block_cv = 质量超过 1e−6·总质量的块内元素变异系数的最大值
    """
    plan = _plan(X)
    if plan.shape != (cs.m, cs.n):
        raise DimensionError(f"plan shape {plan.shape} does not match clusters ({cs.m}, {cs.n})")
    Ps, Pt = cs.source_onehot(), cs.target_onehot()
    blocks = Ps.T @ plan @ Pt
    total = float(plan.sum())
    associated = np.zeros_like(blocks, dtype=bool)
    associated[np.arange(cs.K), cs.association] = True
    off = float(blocks[~associated].sum()) / total if total > 0 else 0.0
    cv = 0.0
    for a in range(cs.K):
        for b in range(cs.K):
            if total <= 0 or blocks[a, b] <= BLOCK_MASS_FLOOR * total:
                continue
            entries = plan[np.ix_(cs.source_labels == a, cs.target_labels == b)]
            mean = entries.mean()
            cv = max(cv, float(entries.std() / mean) if mean > 0 else 0.0)
    return BlockMassReport(blocks, off, cv)


def class_mass_transfer(X: PlanLike, cs: ClusterStructure) -> np.ndarray:
    """每个源簇送往其关联目标簇的质量占比"""
    report = block_mass_report(X, cs)
    rows = report.block_mass.sum(axis=1)
    kept = report.block_mass[np.arange(cs.K), cs.association]
    return np.divide(kept, rows, out=np.zeros_like(kept), where=rows > 0)


def class_block_mass(X: PlanLike, src: Dataset, tgt: Dataset) -> np.ndarray:
    """按类别聚合的质量网格（源类别数 × 目标类别数，行列顺序为 class_ids）；无标签时退化为 1×1"""
    plan = _plan(X)
    if plan.shape != (len(src), len(tgt)):
        raise DimensionError(f"plan shape {plan.shape} does not match datasets ({len(src)}, {len(tgt)})")
    if not (src.has_labels and tgt.has_labels):
        return np.array([[plan.sum()]])
    Ps = np.eye(src.num_classes)[src.labels]
    Pt = np.eye(tgt.num_classes)[tgt.labels]
    return Ps.T @ plan @ Pt


def matched_class_transfer(X: PlanLike, src: Dataset, tgt: Dataset) -> Dict[int, float]:
    """
    对两侧都出现的每个原始类别 c：源类别 c 的质量中送往目标类别 c 的比例。
    类别数不一致时只统计匹配上的类别。
    """
    grid = class_block_mass(X, src, tgt)
    col = {cid: b for b, cid in enumerate(tgt.class_ids.tolist())}
    out: Dict[int, float] = {}
    for a, cid in enumerate(src.class_ids.tolist()):
        if cid not in col:
            continue
        row = grid[a].sum()
        out[int(cid)] = float(grid[a, col[cid]] / row) if row > 0 else 0.0
    return out


def off_association_by_class(X: PlanLike, src: Dataset, tgt: Dataset) -> float:
    """匹配类别的源行中，送往其他目标类别的质量占这些行总质量的比例"""
    grid = class_block_mass(X, src, tgt)
    col = {cid: b for b, cid in enumerate(tgt.class_ids.tolist())}
    total = kept = 0.0
    for a, cid in enumerate(src.class_ids.tolist()):
        if cid not in col:
            continue
        total += grid[a].sum()
        kept += grid[a, col[cid]]
    return float((total - kept) / total) if total > 0 else 0.0


def support_pattern(X: PlanLike, threshold: float) -> np.ndarray:
    return _plan(X) > threshold
