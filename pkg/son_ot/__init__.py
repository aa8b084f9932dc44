"""son-ot: SON 正则化最优传输求解库"""
from . import core
from . import numerics
from . import impl
from . import theory
from . import operators

# 常用核心组件导出
from .core import (
    CostMatrix,
    Marginals,
    Coupling,
    KernelWeights,
    ProblemSpec,
    full_objective,
    SolverConfig,
    SinkhornConfig,
    ExperimentConfig,
    SonOTError,
)

from .impl import (
    SonSolver,
    SolveReport,
    solve,
    round_to_feasible,
    sinkhorn,
    exact_ot,
)

from .theory import (
    ClusterStructure,
    CertificateReport,
    theorem2_check,
    certify,
)

from .operators import MethodRegistry, default_registry

__version__ = "1.0.0"

__all__ = [
    "core",
    "numerics",
    "impl",
    "theory",
    "operators",
    # Types
    "CostMatrix",
    "Marginals",
    "Coupling",
    "KernelWeights",
    "ProblemSpec",
    "full_objective",
    # Config
    "SolverConfig",
    "SinkhornConfig",
    "ExperimentConfig",
    "SonOTError",
    # Solvers
    "SonSolver",
    "SolveReport",
    "solve",
    "round_to_feasible",
    "sinkhorn",
    "exact_ot",
    # Certificates
    "ClusterStructure",
    "CertificateReport",
    "theorem2_check",
    "certify",
    # Methods
    "MethodRegistry",
    "default_registry",
]
