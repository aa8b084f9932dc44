"""簇环路枚举：K×K 簇均值代价上的强循环单调性。"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from son_ot.core.exceptions import DimensionError, UnsupportedSizeError, ValidationError

# 环路穷举上限（K = 10 时约 10⁶ 条有向简单环）
MAX_CYCLE_CLUSTERS = 10


@dataclass(frozen=True)
class MonotonicityResult:
    """δ* 及取到最小值的环路（按访问顺序，首元素为环上最小下标）"""
    delta: float
    loop: Tuple[int, ...]

    def __float__(self) -> float:
        return self.delta


def _check_grid(Dbar) -> np.ndarray:
    Dbar = np.asarray(Dbar, dtype=np.float64)
    if Dbar.ndim != 2 or Dbar.shape[0] != Dbar.shape[1]:
        raise DimensionError(f"cluster cost grid must be square, got shape {Dbar.shape}")
    if not np.all(np.isfinite(Dbar)):
        raise ValidationError("cluster cost grid contains non-finite entries")
    return Dbar


def monotonicity_delta(Dbar) -> MonotonicityResult:
    """
    δ* = min over 简单环 (α_1 … α_k)，k ∈ [2, K]，of
         (Σ_l Dbar[α_l, α_{l+1}] − Σ_l Dbar[α_l, α_l]) / k
    对所有 δ < δ* 条件严格成立；δ* ≤ 0 表示不成立。K = 1 时没有环，返回 +inf。
    """
    Dbar = _check_grid(Dbar)
    K = Dbar.shape[0]
    if K > MAX_CYCLE_CLUSTERS:
        raise UnsupportedSizeError(f"cycle enumeration supports K <= {MAX_CYCLE_CLUSTERS}, got K={K}")
    # 边权 w(a, b) = Dbar[a, b] − Dbar[a, a]，环的均值即所求
    W = Dbar - np.diag(Dbar)[:, None]
    best = np.inf
    best_loop: Tuple[int, ...] = ()
    path = [0] * K
    used = [False] * K

    def dfs(start: int, node: int, depth: int, acc: float):
        nonlocal best, best_loop
        if depth >= 2:
            value = (acc + W[node, start]) / depth
            if value < best:
                best = value
                best_loop = tuple(path[:depth])
        for nxt in range(start + 1, K):
            if not used[nxt]:
                used[nxt] = True
                path[depth] = nxt
                dfs(start, nxt, depth + 1, acc + W[node, nxt])
                used[nxt] = False

    for s in range(K):
        used[s] = True
        path[0] = s
        dfs(s, s, 1, 0.0)
        used[s] = False
    return MonotonicityResult(float(best), best_loop)


def loop_value(Dbar, loop) -> float:
    """单条环路的 (off − diag)/k"""
    Dbar = _check_grid(Dbar)
    k = len(loop)
    if k < 2:
        raise ValidationError("a loop needs at least two clusters")
    off = sum(Dbar[loop[i], loop[(i + 1) % k]] for i in range(k))
    diag = sum(Dbar[a, a] for a in loop)
    return float((off - diag) / k)
