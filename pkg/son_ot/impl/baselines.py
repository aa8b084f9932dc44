"""对比基线：对数域 Sinkhorn（熵正则）与小规模精确 LP 求解器"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from son_ot.core.config import SinkhornConfig
from son_ot.core.exceptions import DimensionError, SonOTError, UnsupportedSizeError
from son_ot.core.types import CostMatrix, Coupling, Marginals

_baseline_logger = logging.getLogger("SonOT.Baselines")

# 精确求解器的规模上限（m·n）
EXACT_OT_MAX_ENTRIES = 400

CostLike = Union[CostMatrix, np.ndarray]


def _cost(D: CostLike, marg: Marginals) -> np.ndarray:
    entries = D.entries if isinstance(D, CostMatrix) else CostMatrix(D).entries
    if entries.shape != (marg.m, marg.n):
        raise DimensionError(f"cost shape {entries.shape} does not match marginals ({marg.m}, {marg.n})")
    return entries


@dataclass(frozen=True)
class SinkhornResult:
    coupling: Coupling
    converged: bool
    violation: float
    iterations: int
    epsilon: float


def sinkhorn(D: CostLike, marg: Marginals, cfg: SinkhornConfig = None) -> SinkhornResult:
    """
    对数域交替缩放 exp(−D/ε)：u = log μ − LSE(−D/ε + v)，v = log ν − LSE(−D/ε + u)。
    边缘违背（ℓ₁）≤ tol 时停止；达到 max_iters 仍未收敛时返回 converged=False 并记录警告。
    """
    cfg = cfg or SinkhornConfig()
    cfg.validate()
    C = _cost(D, marg)
    eps = cfg.epsilon * float(C.mean()) if cfg.relative else cfg.epsilon
    if not eps > 0:
        # 全零代价时任意 ε 都给出独立耦合
        eps = cfg.epsilon
    logK = -C / eps
    log_mu, log_nu = np.log(marg.mu), np.log(marg.nu)
    u = np.zeros(marg.m)
    v = np.zeros(marg.n)
    violation = np.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        u = log_mu - logsumexp(logK + v[None, :], axis=1)
        v = log_nu - logsumexp(logK + u[:, None], axis=0)
        # v 更新后列和精确，只需检查行和
        rows = np.exp(logsumexp(logK + u[:, None] + v[None, :], axis=1))
        violation = float(np.abs(rows - marg.mu).sum())
        if violation <= cfg.tol:
            break
    plan = np.exp(logK + u[:, None] + v[None, :])
    converged = violation <= cfg.tol
    if not converged:
        _baseline_logger.warning(
            f"⚠️ Sinkhorn 未收敛: ε={eps:.4g}, 迭代={it}, 边缘违背={violation:.3e} (tol={cfg.tol:.1e})")
    else:
        _baseline_logger.info(f"✅ Sinkhorn 收敛: ε={eps:.4g}, 迭代={it}, 边缘违背={violation:.3e}")
    return SinkhornResult(Coupling.from_plan(plan, marg), converged, violation, it, eps)


@dataclass(frozen=True)
class ExactResult:
    """精确最优方案及其对偶变量 p（行）、q（列）"""
    coupling: Coupling
    objective: float
    p: np.ndarray
    q: np.ndarray
    certified: bool

    def reduced_costs(self, D: CostLike) -> np.ndarray:
        C = D.entries if isinstance(D, CostMatrix) else np.asarray(D, dtype=np.float64)
        return C - self.p[:, None] - self.q[None, :]


def exact_ot(D: CostLike, marg: Marginals, tol: float = 1e-9) -> ExactResult:
    """
    min ⟨D, X⟩ s.t. X ∈ B(μ, ν)，HiGHS 对偶单纯形求解。
    结果通过互补松弛检查认证：p_i + q_j ≤ D_ij，且在支撑上取等号（容差 tol·(1 + max D)）。
    """
    C = _cost(D, marg)
    m, n = C.shape
    if m * n > EXACT_OT_MAX_ENTRIES:
        raise UnsupportedSizeError(
            f"exact_ot supports m*n <= {EXACT_OT_MAX_ENTRIES}, got {m}x{n}={m * n}")
    A_eq = np.zeros((m + n, m * n))
    for i in range(m):
        A_eq[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([marg.mu, marg.nu])
    res = linprog(
        C.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise SonOTError(f"exact_ot failed: {res.message}")
    plan = np.maximum(res.x.reshape(m, n), 0.0)
    duals = np.asarray(res.eqlin.marginals, dtype=np.float64)
    p, q = duals[:m], duals[m:]

    scale = tol * (1.0 + float(C.max()))
    reduced = C - p[:, None] - q[None, :]
    support = plan > scale
    dual_feasible = bool(reduced.min() >= -scale)
    slack_ok = bool(np.all(np.abs(reduced[support]) <= scale))
    certified = dual_feasible and slack_ok
    objective = float((C * plan).sum())
    if not certified:
        _baseline_logger.warning(
            f"⚠️ 互补松弛检查未通过: min 约化代价={reduced.min():.3e}, "
            f"支撑上最大 |约化代价|={np.abs(reduced[support]).max(initial=0.0):.3e}")
    return ExactResult(Coupling.from_plan(plan, marg), objective, p, q, certified)
