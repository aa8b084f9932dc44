"""领域值类型：代价矩阵、边缘分布、传输方案、核权重、问题定义与目标项索引。

所有公开下标均从 0 开始。值类型构造后不可变（底层数组被设为只读），可安全并发读取。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError

# 边缘分布总质量允许的相对偏差
MASS_BALANCE_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CostMatrix:
    """m×n 非负传输代价矩阵 D"""
    entries: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.entries, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise DimensionError(f"cost matrix must be a non-empty 2-D grid, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValidationError("cost matrix contains non-finite entries")
        if np.any(d < 0):
            raise ValidationError("cost matrix contains negative entries")
        object.__setattr__(self, "entries", _frozen(d))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]

    def col(self, j: int) -> np.ndarray:
        return self.entries[:, j]


@dataclass(frozen=True)
class Marginals:
    """源 / 目标两侧的正质量 mu、nu，总质量相等"""
    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).ravel()
        nu = np.asarray(self.nu, dtype=np.float64).ravel()
        if mu.size < 1 or nu.size < 1:
            raise DimensionError("marginals must be non-empty")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(nu))):
            raise ValidationError("marginals contain non-finite entries")
        if np.any(mu <= 0) or np.any(nu <= 0):
            raise ValidationError("marginal masses must be strictly positive")
        smu, snu = mu.sum(), nu.sum()
        if abs(smu - snu) > MASS_BALANCE_RTOL * smu:
            raise ValidationError(f"unbalanced marginals: sum(mu)={smu!r} vs sum(nu)={snu!r}")
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "nu", _frozen(nu))

    @classmethod
    def uniform(cls, m: int, n: int, total: float = 1.0) -> "Marginals":
        # 目标侧按源侧总和重新归一，避免 1/m 与 1/n 的舍入差异
        mu = np.full(m, total / m)
        nu = np.full(n, total / n)
        nu *= mu.sum() / nu.sum()
        return cls(mu, nu)

    @property
    def m(self) -> int:
        return self.mu.size

    @property
    def n(self) -> int:
        return self.nu.size

    @property
    def total(self) -> float:
        return float(self.mu.sum())

    def independent_coupling(self) -> np.ndarray:
        """独立耦合 outer(mu, nu) / sum(mu)，按构造可行"""
        return np.outer(self.mu, self.nu) / self.total


def feasibility_gap(plan: np.ndarray, marginals: Marginals) -> float:
    """可行性缺口：||X·1 − mu||₁ + ||Xᵀ·1 − nu||₁"""
    plan = np.asarray(plan, dtype=np.float64)
    return float(np.abs(plan.sum(axis=1) - marginals.mu).sum()
                 + np.abs(plan.sum(axis=0) - marginals.nu).sum())


@dataclass(frozen=True)
class Coupling:
    """m×n 非负传输方案，附带可行性缺口；缺口需显式给出，通常经 from_plan 构造"""
    plan: np.ndarray
    feasibility_gap: float

    def __post_init__(self):
        p = np.asarray(self.plan, dtype=np.float64)
        if p.ndim != 2:
            raise DimensionError(f"coupling must be a 2-D grid, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("coupling contains non-finite entries")
        if np.any(p < 0):
            raise ValidationError("coupling entries must be nonnegative")
        if not (np.isfinite(self.feasibility_gap) and self.feasibility_gap >= 0):
            raise ValidationError(f"feasibility gap must be finite and nonnegative, got {self.feasibility_gap!r}")
        object.__setattr__(self, "plan", _frozen(p))

    @classmethod
    def from_plan(cls, plan: np.ndarray, marginals: Marginals) -> "Coupling":
        plan = np.asarray(plan, dtype=np.float64)
        if plan.shape != (marginals.m, marginals.n):
            raise DimensionError(f"plan shape {plan.shape} does not match marginals ({marginals.m}, {marginals.n})")
        return cls(plan, feasibility_gap(plan, marginals))

    @classmethod
    def clamped(cls, plan: np.ndarray, marginals: Marginals) -> "Coupling":
        """把中间迭代值截断到非负象限后封装"""
        return cls.from_plan(np.maximum(np.asarray(plan, dtype=np.float64), 0.0), marginals)

    @property
    def shape(self):
        return self.plan.shape

    def recompute_gap(self, marginals: Marginals) -> float:
        return feasibility_gap(self.plan, marginals)


def _check_kernel(name: str, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DimensionError(f"kernel {name} must be square, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValidationError(f"kernel {name} contains non-finite entries")
    if np.any(k < 0):
        raise ValidationError(f"kernel {name} contains negative entries")
    scale = max(1.0, float(np.abs(k).max(initial=0.0)))
    if np.abs(k - k.T).max(initial=0.0) > 1e-12 * scale:
        raise ValidationError(f"kernel {name} is not symmetric")
    if np.any(np.diag(k) != 0):
        raise ValidationError(f"kernel {name} must have a zero diagonal")
    # 精确对称化，消除构造时的舍入差异
    return 0.5 * (k + k.T)


@dataclass(frozen=True)
class KernelWeights:
    """行核 R（m×m）与列核 S（n×n）：对称、非负、零对角。两侧的 λ₁/λ₂ 已折算进来。"""
    R: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", _frozen(_check_kernel("R", self.R)))
        object.__setattr__(self, "S", _frozen(_check_kernel("S", self.S)))

    @classmethod
    def constant(cls, m: int, n: int, r: float = 1.0, s: float = 1.0) -> "KernelWeights":
        R = np.full((m, m), float(r))
        S = np.full((n, n), float(s))
        np.fill_diagonal(R, 0.0)
        np.fill_diagonal(S, 0.0)
        return cls(R, S)

    @classmethod
    def zeros(cls, m: int, n: int) -> "KernelWeights":
        return cls(np.zeros((m, m)), np.zeros((n, n)))

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def max_entry(self) -> float:
        return float(max(self.R.max(initial=0.0), self.S.max(initial=0.0)))


@dataclass(frozen=True)
class ProblemSpec:
    """SON 正则化 OT 问题：代价、边缘分布、核、全局强度 λ 与可选的边缘惩罚权重 θ"""
    cost: CostMatrix
    marginals: Marginals
    kernels: KernelWeights
    lam: float = 0.0
    theta: Optional[float] = None

    def __post_init__(self):
        m, n = self.cost.shape
        if (self.marginals.m, self.marginals.n) != (m, n):
            raise DimensionError(
                f"marginals ({self.marginals.m}, {self.marginals.n}) do not match cost ({m}, {n})")
        if (self.kernels.m, self.kernels.n) != (m, n):
            raise DimensionError(
                f"kernels ({self.kernels.m}, {self.kernels.n}) do not match cost ({m}, {n})")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValidationError(f"lambda must be a finite nonnegative number, got {self.lam!r}")
        if self.theta is not None and (not np.isfinite(self.theta) or self.theta < 0):
            raise ValidationError(f"theta must be a finite nonnegative number, got {self.theta!r}")

    @property
    def m(self) -> int:
        return self.cost.m

    @property
    def n(self) -> int:
        return self.cost.n

    @property
    def num_pair_terms(self) -> int:
        return num_pair_terms(self.m, self.n)

    @property
    def num_constraints(self) -> int:
        return self.m + self.n

    def with_cost(self, entries: np.ndarray) -> "ProblemSpec":
        return ProblemSpec(CostMatrix(entries), self.marginals, self.kernels, self.lam, self.theta)


def num_pair_terms(m: int, n: int) -> int:
    """P = m(m−1) + n(n−1)，按有序对计数"""
    return m * (m - 1) + n * (n - 1)


class TermKind(Enum):
    ROW_PAIR = "row_pair"
    COL_PAIR = "col_pair"
    ROW_SIMPLEX = "row_simplex"
    COL_SIMPLEX = "col_simplex"


@dataclass(frozen=True)
class TermIndex:
    """有限和分解中的一项：行对 / 列对（有序，l≠k）或行 / 列单纯形约束"""
    kind: TermKind
    first: int
    second: Optional[int] = field(default=None)

    def __post_init__(self):
        if self.is_pair:
            if self.second is None or self.first == self.second:
                raise ValidationError(f"pair term needs two distinct indices, got ({self.first}, {self.second})")
        elif self.second is not None:
            raise ValidationError("constraint term takes a single index")

    @property
    def is_pair(self) -> bool:
        return self.kind in (TermKind.ROW_PAIR, TermKind.COL_PAIR)

    @classmethod
    def row_pair(cls, l: int, k: int) -> "TermIndex":
        return cls(TermKind.ROW_PAIR, l, k)

    @classmethod
    def col_pair(cls, l: int, k: int) -> "TermIndex":
        return cls(TermKind.COL_PAIR, l, k)

    @classmethod
    def row_simplex(cls, l: int) -> "TermIndex":
        return cls(TermKind.ROW_SIMPLEX, l)

    @classmethod
    def col_simplex(cls, k: int) -> "TermIndex":
        return cls(TermKind.COL_SIMPLEX, k)

    # ---- 扁平编号：与 enumerate_terms 的顺序一致 ----

    @classmethod
    def from_flat(cls, idx: int, m: int, n: int) -> "TermIndex":
        n_row = m * (m - 1)
        n_col = n * (n - 1)
        if idx < 0 or idx >= n_row + n_col + m + n:
            raise ValidationError(f"term index {idx} out of range for m={m}, n={n}")
        if idx < n_row:
            l, r = divmod(idx, m - 1)
            return cls.row_pair(l, r if r < l else r + 1)
        idx -= n_row
        if idx < n_col:
            l, r = divmod(idx, n - 1)
            return cls.col_pair(l, r if r < l else r + 1)
        idx -= n_col
        if idx < m:
            return cls.row_simplex(idx)
        return cls.col_simplex(idx - m)

    def to_flat(self, m: int, n: int) -> int:
        if self.kind in (TermKind.ROW_PAIR, TermKind.COL_PAIR):
            size = m if self.kind is TermKind.ROW_PAIR else n
            l, k = self.first, self.second
            offset = 0 if self.kind is TermKind.ROW_PAIR else m * (m - 1)
            return offset + l * (size - 1) + (k if k < l else k - 1)
        base = m * (m - 1) + n * (n - 1)
        return base + (self.first if self.kind is TermKind.ROW_SIMPLEX else m + self.first)

    def support(self, m: int, n: int) -> np.ndarray:
        """该项涉及的坐标（布尔掩码，m×n）"""
        mask = np.zeros((m, n), dtype=bool)
        if self.kind is TermKind.ROW_PAIR:
            mask[[self.first, self.second], :] = True
        elif self.kind is TermKind.COL_PAIR:
            mask[:, [self.first, self.second]] = True
        elif self.kind is TermKind.ROW_SIMPLEX:
            mask[self.first, :] = True
        else:
            mask[:, self.first] = True
        return mask
