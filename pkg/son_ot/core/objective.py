"""完整目标、松弛目标，以及目标函数的有限和分解（有序行对 / 列对 + 行列单纯形约束）。"""
from __future__ import annotations

from typing import List, NamedTuple, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.core.types import Coupling, ProblemSpec, TermIndex, TermKind

CouplingLike = Union[Coupling, np.ndarray]


def _as_plan(spec: ProblemSpec, X: CouplingLike) -> np.ndarray:
    plan = X.plan if isinstance(X, Coupling) else np.asarray(X, dtype=np.float64)
    if plan.shape != (spec.m, spec.n):
        raise DimensionError(f"coupling shape {plan.shape} does not match problem ({spec.m}, {spec.n})")
    return plan


def son_penalty(spec: ProblemSpec, X: CouplingLike) -> float:
    """Σ_{l,k} R[l][k]·‖x_l − x_k‖ + Σ_{l,k} S[l][k]·‖x^l − x^k‖（有序对求和，不含 λ）"""
    plan = _as_plan(spec, X)
    rows = float((spec.kernels.R * cdist(plan, plan)).sum()) if spec.m > 1 else 0.0
    cols = float((spec.kernels.S * cdist(plan.T, plan.T)).sum()) if spec.n > 1 else 0.0
    return rows + cols


def full_objective(spec: ProblemSpec, X: CouplingLike) -> float:
    """⟨D,X⟩ + λ·SON(X)"""
    plan = _as_plan(spec, X)
    linear = float((spec.cost.entries * plan).sum())
    if spec.lam == 0.0:
        return linear
    return linear + spec.lam * son_penalty(spec, plan)


def relaxed_objective(spec: ProblemSpec, X: CouplingLike) -> float:
    """去掉可行约束、以 (θ/2)(‖X·1 − μ‖² + ‖Xᵀ·1 − ν‖²) 惩罚边缘偏差的目标"""
    if spec.theta is None:
        raise ValidationError("relaxed objective requires theta")
    plan = _as_plan(spec, X)
    r = plan.sum(axis=1) - spec.marginals.mu
    c = plan.sum(axis=0) - spec.marginals.nu
    return full_objective(spec, plan) + 0.5 * spec.theta * (float(r @ r) + float(c @ c))


def enumerate_terms(m: int, n: int) -> List[TermIndex]:
    """确定性顺序：全部 RowPair(l,k) l≠k，全部 ColPair，再是 RowSimplex(0..m−1)，ColSimplex(0..n−1)"""
    if m < 1 or n < 1:
        raise ValidationError(f"m and n must be >= 1, got m={m}, n={n}")
    terms = [TermIndex.row_pair(l, k) for l in range(m) for k in range(m) if k != l]
    terms += [TermIndex.col_pair(l, k) for l in range(n) for k in range(n) if k != l]
    terms += [TermIndex.row_simplex(l) for l in range(m)]
    terms += [TermIndex.col_simplex(k) for k in range(n)]
    return terms


def linear_divisors(m: int, n: int) -> Tuple[float, float]:
    """行对 / 列对线性部分的除数。

    每行在 2(m−1) 个有序行对中出现，每列在 2(n−1) 个有序列对中出现；
    取 4(m−1)、4(n−1) 使两侧各重建 ½⟨D,X⟩。只有一侧存在对项时（m=1 或 n=1），
    该侧改用 2(·−1) 以重建完整的 ⟨D,X⟩。两侧都不存在时返回 inf（无线性项）。
    """
    if m > 1 and n > 1:
        return 4.0 * (m - 1), 4.0 * (n - 1)
    if m > 1:
        return 2.0 * (m - 1), np.inf
    if n > 1:
        return np.inf, 2.0 * (n - 1)
    return np.inf, np.inf


class TermParameters(NamedTuple):
    rho: float
    zeta: np.ndarray
    eta: np.ndarray
    support: np.ndarray


def term_parameters(spec: ProblemSpec, t: TermIndex) -> TermParameters:
    """对项 t 的模板函数参数 (ρ, ζ, η, 支撑)"""
    if not t.is_pair:
        raise ValidationError(f"term_parameters expects a pair term, got {t.kind.value}")
    row_div, col_div = linear_divisors(spec.m, spec.n)
    D = spec.cost.entries
    if t.kind is TermKind.ROW_PAIR:
        rho = spec.lam * float(spec.kernels.R[t.first, t.second])
        zeta, eta = D[t.first] / row_div, D[t.second] / row_div
    else:
        rho = spec.lam * float(spec.kernels.S[t.first, t.second])
        zeta, eta = D[:, t.first] / col_div, D[:, t.second] / col_div
    return TermParameters(rho, zeta, eta, t.support(spec.m, spec.n))


def term_slices(plan: np.ndarray, t: TermIndex) -> Tuple[np.ndarray, np.ndarray]:
    """取出对项作用的两行（或两列），即模板函数的 (p, q)"""
    if t.kind is TermKind.ROW_PAIR:
        return plan[t.first], plan[t.second]
    if t.kind is TermKind.COL_PAIR:
        return plan[:, t.first], plan[:, t.second]
    raise ValidationError(f"term_slices expects a pair term, got {t.kind.value}")
