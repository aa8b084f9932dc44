"""每一项的加速记忆向量及其运行总和。

布局（稠密存储，只在各自支撑上非零）：
  g_row[l, k, 0, :] / g_row[l, k, 1, :]  行对 (l, k) 在第 l 行 / 第 k 行上的分量，长度 n
  g_col[l, k, 0, :] / g_col[l, k, 1, :]  列对 (l, k) 在第 l 列 / 第 k 列上的分量，长度 m
  h_row[l, :]                             行单纯形约束 l 的记忆向量
  h_col[k, :]                             列单纯形约束 k 的记忆向量
  total                                   上面全部向量之和（m×n）

内存为 O(P·(m+n))，m, n ≤ 300 时可接受。
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from son_ot.core.exceptions import ValidationError
from son_ot.core.types import TermIndex, TermKind


@dataclass
class MemoryStore:
    g_row: np.ndarray
    g_col: np.ndarray
    h_row: np.ndarray
    h_col: np.ndarray
    total: np.ndarray

    @classmethod
    def zeros(cls, m: int, n: int) -> "MemoryStore":
        return cls(
            g_row=np.zeros((m, m, 2, n)),
            g_col=np.zeros((n, n, 2, m)),
            h_row=np.zeros((m, n)),
            h_col=np.zeros((n, m)),
            total=np.zeros((m, n)),
        )

    @property
    def m(self) -> int:
        return self.total.shape[0]

    @property
    def n(self) -> int:
        return self.total.shape[1]

    def recompute_total(self) -> np.ndarray:
        """从头累加所有 g、h"""
        rows = self.g_row[:, :, 0, :].sum(axis=1) + self.g_row[:, :, 1, :].sum(axis=0)
        cols = self.g_col[:, :, 0, :].sum(axis=1) + self.g_col[:, :, 1, :].sum(axis=0)
        return rows + cols.T + self.h_row + self.h_col.T

    def consistency_error(self) -> float:
        return float(np.abs(self.recompute_total() - self.total).max(initial=0.0))

    def check_consistency(self, rtol: float = 1e-8) -> bool:
        """‖Σg + Σh − total‖∞ ≤ rtol·(1 + ‖total‖∞)"""
        scale = 1.0 + float(np.abs(self.total).max(initial=0.0))
        return self.consistency_error() <= rtol * scale

    def vector(self, t: TermIndex) -> np.ndarray:
        """项 t 的记忆向量，展开为 m×n 网格（支撑外为零）"""
        out = np.zeros((self.m, self.n))
        if t.kind is TermKind.ROW_PAIR:
            out[t.first] = self.g_row[t.first, t.second, 0]
            out[t.second] = self.g_row[t.first, t.second, 1]
        elif t.kind is TermKind.COL_PAIR:
            out[:, t.first] = self.g_col[t.first, t.second, 0]
            out[:, t.second] = self.g_col[t.first, t.second, 1]
        elif t.kind is TermKind.ROW_SIMPLEX:
            out[t.first] = self.h_row[t.first]
        elif t.kind is TermKind.COL_SIMPLEX:
            out[:, t.first] = self.h_col[t.first]
        else:
            raise ValidationError(f"unknown term kind {t.kind!r}")
        return out

    def off_support_is_zero(self) -> bool:
        """未使用的对角槽 g_row[l, l] / g_col[k, k] 必须为零"""
        diag_r = self.g_row[np.arange(self.m), np.arange(self.m)]
        diag_c = self.g_col[np.arange(self.n), np.arange(self.n)]
        return not (np.any(diag_r) or np.any(diag_c))
