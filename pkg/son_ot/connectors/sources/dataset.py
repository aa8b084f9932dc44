from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError


@dataclass(frozen=True)
class Dataset:
    """
    点集及可选的类别标签。
    labels 取连续编号 0..K−1；class_ids[k] 记录编号 k 对应的原始类别号
    （去掉某个类别后，两侧按原始类别号对齐）。
    """
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    class_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise DimensionError(f"dataset points must be a nonempty (N, dim) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("dataset points contain non-finite values")
        object.__setattr__(self, "points", pts)
        if self.labels is None:
            return
        lab = np.asarray(self.labels, dtype=np.int64).ravel()
        if lab.size != pts.shape[0]:
            raise DimensionError(f"{lab.size} labels for {pts.shape[0]} points")
        present = np.unique(lab)
        if present[0] != 0 or present[-1] != present.size - 1:
            raise ValidationError(f"labels must cover a contiguous range 0..K-1, got {present.tolist()}")
        ids = np.arange(present.size) if self.class_ids is None else np.asarray(self.class_ids, dtype=np.int64)
        if ids.size != present.size:
            raise DimensionError(f"{ids.size} class ids for {present.size} classes")
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "class_ids", ids)

    @classmethod
    def from_raw_labels(cls, points, raw_labels: Sequence[int]) -> "Dataset":
        """任意整数类别号 → 连续编号 + class_ids"""
        raw = np.asarray(raw_labels, dtype=np.int64)
        ids, lab = np.unique(raw, return_inverse=True)
        return cls(points, lab, ids)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    @property
    def num_classes(self) -> int:
        return 0 if self.labels is None else int(self.class_ids.size)

    def raw_labels(self) -> Optional[np.ndarray]:
        return None if self.labels is None else self.class_ids[self.labels]

    def drop_class(self, class_id: int) -> "Dataset":
        """去掉原始类别号为 class_id 的全部点"""
        if self.labels is None:
            raise ValidationError("cannot drop a class from an unlabeled dataset")
        raw = self.raw_labels()
        if class_id not in set(raw.tolist()):
            raise ValidationError(f"class {class_id} not present (classes: {sorted(set(raw.tolist()))})")
        keep = raw != class_id
        if not keep.any():
            raise ValidationError("dropping the only class leaves an empty dataset")
        return Dataset.from_raw_labels(self.points[keep], raw[keep])

    def restrict_to(self, class_ids: Sequence[int]) -> "Dataset":
        """只保留给定原始类别号的点"""
        if self.labels is None:
            raise ValidationError("cannot restrict an unlabeled dataset")
        raw = self.raw_labels()
        keep = np.isin(raw, np.asarray(class_ids))
        if not keep.any():
            raise ValidationError(f"no points with classes {list(class_ids)}")
        return Dataset.from_raw_labels(self.points[keep], raw[keep])
