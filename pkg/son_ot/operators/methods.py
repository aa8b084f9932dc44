"""传输方法算子：SON 求解器、熵正则 Sinkhorn、精确 LP"""
import logging
import time
from typing import Any, Dict, List, Optional, Type

from son_ot.core.config import SinkhornConfig, SolverConfig
from son_ot.core.objective import full_objective
from son_ot.core.operators import BaseTransportMethod, MethodResult
from son_ot.core.types import ProblemSpec
from son_ot.impl.baselines import exact_ot, sinkhorn
from son_ot.impl.solver import SonSolver

logger = logging.getLogger("SonOT.Operators")


def _transport_cost(spec: ProblemSpec, plan) -> float:
    return float((spec.cost.entries * plan).sum())


class SonMethod(BaseTransportMethod):
    """SON 正则化求解器；ctx 可携带 hooks 与 run_id"""
    name = "son"

    def __init__(self, cfg: Optional[SolverConfig] = None):
        self.cfg = cfg or SolverConfig()

    def run(self, spec: ProblemSpec, ctx: Optional[Dict[str, Any]] = None) -> MethodResult:
        ctx = ctx or {}
        start = time.time()
        report = SonSolver(spec, self.cfg, ctx.get("hooks"), ctx.get("run_id")).run()
        plan = report.coupling.plan
        return MethodResult(
            method=self.name,
            coupling=report.coupling,
            objective=full_objective(spec, plan),
            wall_time=time.time() - start,
            extra={
                "transport_cost": _transport_cost(spec, plan),
                "iterations": report.iterations,
                "support_size": int(report.support_pattern.sum()),
                "final_trace_objective": report.objective_trace[-1][1] if report.objective_trace else None,
            },
        )


class SinkhornMethod(BaseTransportMethod):
    name = "sinkhorn"

    def __init__(self, cfg: Optional[SinkhornConfig] = None):
        self.cfg = cfg or SinkhornConfig()

    def run(self, spec: ProblemSpec, ctx: Optional[Dict[str, Any]] = None) -> MethodResult:
        start = time.time()
        res = sinkhorn(spec.cost, spec.marginals, self.cfg)
        plan = res.coupling.plan
        return MethodResult(
            method=self.name,
            coupling=res.coupling,
            objective=full_objective(spec, plan),
            wall_time=time.time() - start,
            extra={
                "transport_cost": _transport_cost(spec, plan),
                "converged": res.converged,
                "violation": res.violation,
                "iterations": res.iterations,
                "epsilon": res.epsilon,
                "min_entry": float(plan.min()),
            },
        )


class ExactMethod(BaseTransportMethod):
    """精确 LP（忽略 SON 项），超过规模上限时抛 UnsupportedSizeError"""
    name = "exact"

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def run(self, spec: ProblemSpec, ctx: Optional[Dict[str, Any]] = None) -> MethodResult:
        start = time.time()
        res = exact_ot(spec.cost, spec.marginals, self.tol)
        return MethodResult(
            method=self.name,
            coupling=res.coupling,
            objective=full_objective(spec, res.coupling.plan),
            wall_time=time.time() - start,
            extra={"transport_cost": res.objective, "certified": res.certified},
        )


class MethodRegistry:
    """
    方法注册表：名称 → 算子类。
    create() 按名称实例化，未注册的名称抛 KeyError 并列出已注册名称。
    """

    def __init__(self):
        self._type_registry: Dict[str, Type[BaseTransportMethod]] = {
            "son": SonMethod,
            "sinkhorn": SinkhornMethod,
            "exact": ExactMethod,
        }

    def register(self, name: str, method_cls: Type[BaseTransportMethod]) -> None:
        self._type_registry[name] = method_cls

    def names(self) -> List[str]:
        return list(self._type_registry)

    def create(self, name: str, *args, **kwargs) -> BaseTransportMethod:
        if name not in self._type_registry:
            raise KeyError(f"未注册的传输方法: {name}. 已注册: {self.names()}")
        method = self._type_registry[name](*args, **kwargs)
        logger.debug(f"🔧 创建方法算子: {name}")
        return method


default_registry = MethodRegistry()
