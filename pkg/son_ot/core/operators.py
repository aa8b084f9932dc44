from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Protocol, runtime_checkable

from son_ot.core.types import Coupling, ProblemSpec


@dataclass(frozen=True)
class MethodResult:
    """一种传输方法在同一实例上的运行结果"""
    method: str
    coupling: Coupling
    objective: float
    wall_time: float
    extra: Dict[str, Any] = field(default_factory=dict)


@runtime_checkable
class ITransportMethod(Protocol):
    """
    传输方法算子接口。
    每个方法接收同一个 ProblemSpec，返回 MethodResult；方法之间不共享可变状态。
    """
    name: str

    def run(self, spec: ProblemSpec, ctx: Optional[Dict[str, Any]] = None) -> MethodResult:
        ...


class BaseTransportMethod(ITransportMethod):
    """
    传输方法基类。子类实现 run。
    """
    name = "base"

    def run(self, spec: ProblemSpec, ctx: Optional[Dict[str, Any]] = None) -> MethodResult:
        raise NotImplementedError(f"方法 {self.__class__.__name__} 必须实现 run 方法。")
