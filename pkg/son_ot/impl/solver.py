"""
加速随机增量近端-投影求解器。

每次迭代随机选取一个目标对项（两行 / 两列上的模板函数）或一个行 / 列单纯形约束，
在 X_t + step·g 处做近端（或投影）一步，再用 rho_acc 与 alpha 更新该项的记忆向量。
一个 epoch = P + Q 次迭代。中间迭代值可以暂时离开非负象限；只有报告的 Coupling
经过 round_to_feasible（或截断）处理。
"""
from __future__ import annotations

import logging
import time
import uuid
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from son_ot.core.config import SolverConfig
from son_ot.core.exceptions import DimensionError, DivergenceError, ValidationError
from son_ot.core.hooks import ISolverHooks, SolverHooksAdapter, StderrProgressHooks
from son_ot.core.objective import full_objective, linear_divisors, relaxed_objective
from son_ot.core.types import Coupling, ProblemSpec, feasibility_gap
from son_ot.impl._epoch import run_epoch
from son_ot.impl.memory import MemoryStore
from son_ot.impl.rounding import round_to_feasible
from son_ot.impl.sampling import draw_terms

_solver_logger = logging.getLogger("SonOT.Solver")

TraceRow = Tuple[int, float, float]


@dataclass(frozen=True)
class SolveReport:
    """一次求解的结果：最终方案、逐 epoch 轨迹 (epoch, objective, gap)、支撑模式"""
    coupling: Coupling
    objective_trace: Tuple[TraceRow, ...]
    support_pattern: np.ndarray
    iterations: int
    wall_time: float
    support_snapshots: Dict[int, np.ndarray] = field(default_factory=dict)
    config: Optional[SolverConfig] = None

    @property
    def best_envelope(self) -> np.ndarray:
        """best-so-far 目标值，按构造单调不增"""
        if not self.objective_trace:
            return np.empty(0)
        return np.minimum.accumulate(np.array([row[1] for row in self.objective_trace]))

    def to_dict(self) -> Dict:
        return {
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "feasibility_gap": self.coupling.feasibility_gap,
            "objective_trace": [
                {"epoch": e, "objective": obj, "feasibility_gap": gap} for e, obj, gap in self.objective_trace
            ],
            "best_envelope": self.best_envelope.tolist(),
            "support_size": int(self.support_pattern.sum()),
            "support_snapshots": {str(e): int(s.sum()) for e, s in sorted(self.support_snapshots.items())},
            "config": self.config.to_dict() if self.config else None,
        }


def jit_scale(m: int, n: int) -> float:
    """K / K_i：K = P + Q，K_i = 2(m−1) + 2(n−1) + 2（每个矩阵元素被同样多的项覆盖）"""
    K = m * (m - 1) + n * (n - 1) + m + n
    K_i = 2 * (m - 1) + 2 * (n - 1) + 2
    return K / K_i


def jit_restrict(total: np.ndarray, support: Union[np.ndarray, Iterable[Tuple[int, int]]], m: int, n: int) -> np.ndarray:
    """把记忆总和限制到支撑上并乘以 K/K_i；支撑可以是 m×n 布尔掩码或坐标集合"""
    total = np.asarray(total, dtype=np.float64)
    if total.shape != (m, n):
        raise DimensionError(f"total shape {total.shape} does not match ({m}, {n})")
    if isinstance(support, np.ndarray) and support.dtype == bool:
        if support.shape != (m, n):
            raise DimensionError(f"support mask shape {support.shape} does not match ({m}, {n})")
        mask = support
    else:
        mask = np.zeros((m, n), dtype=bool)
        for i, j in support:
            mask[i, j] = True
    if not mask.any():
        raise ValidationError("jit_restrict needs a nonempty support")
    return np.where(mask, jit_scale(m, n) * total, 0.0)


def _initial_plan(spec: ProblemSpec, X0) -> np.ndarray:
    if X0 is None:
        return spec.marginals.independent_coupling()
    plan = np.array(X0.plan if isinstance(X0, Coupling) else X0, dtype=np.float64)
    if plan.shape != (spec.m, spec.n):
        raise DimensionError(f"X0 shape {plan.shape} does not match problem ({spec.m}, {spec.n})")
    if not np.all(np.isfinite(plan)):
        raise ValidationError("X0 contains non-finite entries")
    return plan


class SonSolver:
    """
    单次求解的执行器：持有迭代值与记忆向量，求解期间独占使用。
    不同求解器实例之间没有共享的可变状态，可以在不同线程 / 进程中并行。
    """

    def __init__(self, spec: ProblemSpec, cfg: SolverConfig, hooks: Optional[ISolverHooks] = None,
                 run_id: Optional[str] = None):
        if cfg.relaxed and spec.theta is None:
            raise ValidationError("relaxed solve requires spec.theta")
        self.spec = spec
        self.cfg = cfg.resolve(spec)
        self.run_id = run_id or f"solve_{uuid.uuid4().hex[:8]}"
        self.hooks = SolverHooksAdapter(hooks if hooks is not None else StderrProgressHooks(self.cfg.log_every))
        self.memory = MemoryStore.zeros(spec.m, spec.n)
        self.X: Optional[np.ndarray] = None
        self.iterations = 0

    def _objective(self, plan: np.ndarray) -> float:
        if self.cfg.relaxed:
            return relaxed_objective(self.spec, plan)
        return full_objective(self.spec, plan)

    def _report_coupling(self, plan: np.ndarray) -> Coupling:
        clamped = np.maximum(plan, 0.0)
        if self.cfg.round_output:
            return round_to_feasible(clamped, self.spec.marginals)
        return Coupling.from_plan(clamped, self.spec.marginals)

    def _support(self, coupling: Coupling) -> np.ndarray:
        return coupling.plan > self.cfg.support_threshold

    def run(self, X0=None) -> SolveReport:
        spec, cfg = self.spec, self.cfg
        m, n = spec.m, spec.n
        P, Q = spec.num_pair_terms, spec.num_constraints
        self.X = np.ascontiguousarray(_initial_plan(spec, X0))
        start = time.time()

        if cfg.epochs == 0:
            coupling = X0 if isinstance(X0, Coupling) else Coupling.from_plan(np.maximum(self.X, 0.0), spec.marginals)
            return SolveReport(coupling, (), self._support(coupling), 0, time.time() - start, {}, cfg)

        rng = np.random.default_rng(cfg.seed)
        row_div, col_div = linear_divisors(m, n)
        alpha_scale = cfg.alpha * (jit_scale(m, n) if cfg.jit else 1.0)
        theta = float(spec.theta) if spec.theta is not None else 0.0
        D = np.ascontiguousarray(spec.cost.entries)
        R = np.ascontiguousarray(spec.kernels.R)
        S = np.ascontiguousarray(spec.kernels.S)
        mu = np.ascontiguousarray(spec.marginals.mu)
        nu = np.ascontiguousarray(spec.marginals.nu)
        mem = self.memory
        snapshot_at = set(cfg.snapshot_epochs)

        trace: List[TraceRow] = []
        snapshots: Dict[int, np.ndarray] = {}
        self.hooks.on_solve_start(self.run_id, {
            "m": m, "n": n, "P": P, "Q": Q, "step": cfg.step, "alpha": cfg.alpha,
            "rho_acc": cfg.rho_acc, "epochs": cfg.epochs, "seed": cfg.seed, "jit": cfg.jit,
            "alpha_scale": alpha_scale,
        })
        _solver_logger.info(
            f"🎬 [{self.run_id}] 开始求解: m={m}, n={n}, P={P}, Q={Q}, step={cfg.step:.4g}, epochs={cfg.epochs}")
        try:
            for epoch in range(1, cfg.epochs + 1):
                terms = draw_terms(rng, cfg.sampling, P, Q, P + Q)
                bad = run_epoch(self.X, mem.g_row, mem.g_col, mem.h_row, mem.h_col, mem.total, terms,
                                D, R, S, mu, nu, float(spec.lam), float(row_div), float(col_div),
                                float(cfg.step), float(cfg.rho_acc), float(alpha_scale),
                                bool(cfg.relaxed), theta)
                if bad >= 0:
                    self.iterations += int(bad) + 1
                    raise DivergenceError(self.iterations, cfg.step)
                self.iterations += P + Q
                obj = self._objective(self.X)
                gap = feasibility_gap(self.X, spec.marginals)
                trace.append((epoch, obj, gap))
                self.hooks.on_epoch(self.run_id, epoch, obj, gap)
                if epoch in snapshot_at:
                    snapshots[epoch] = self._support(self._report_coupling(self.X))
        except Exception as e:
            _solver_logger.error(f"🚨 [{self.run_id}] 求解失败: {e}")
            self.hooks.on_solve_end(self.run_id, False, e)
            raise

        coupling = self._report_coupling(self.X)
        wall = time.time() - start
        self.hooks.on_solve_end(self.run_id, True)
        _solver_logger.info(
            f"🏁 [{self.run_id}] 求解完成: 迭代={self.iterations}, 目标={trace[-1][1]:.6g}, "
            f"缺口={trace[-1][2]:.3e}, 耗时={wall:.2f}s")
        return SolveReport(coupling, tuple(trace), self._support(coupling), self.iterations, wall, snapshots, cfg)


def solve(spec: ProblemSpec, cfg: Optional[SolverConfig] = None, X0=None,
          hooks: Optional[ISolverHooks] = None, run_id: Optional[str] = None) -> SolveReport:
    """以默认独立耦合（或给定 X0）为起点运行 cfg.epochs 个 epoch"""
    return SonSolver(spec, cfg or SolverConfig(), hooks, run_id).run(X0)
