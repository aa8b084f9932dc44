"""son-ot 核心接口层：值类型、目标函数、配置、钩子与存储契约"""
from .types import (
    CostMatrix,
    Marginals,
    Coupling,
    KernelWeights,
    ProblemSpec,
    TermKind,
    TermIndex,
    feasibility_gap,
    num_pair_terms,
)
from .objective import (
    full_objective,
    relaxed_objective,
    son_penalty,
    enumerate_terms,
    term_parameters,
    term_slices,
    linear_divisors,
)
from .config import (
    SamplingScheme,
    SolverConfig,
    SinkhornConfig,
    DataSpec,
    KernelSpec,
    CertificateSpec,
    CompareSpec,
    ExperimentConfig,
)
from .exceptions import (
    SonOTError,
    DimensionError,
    ValidationError,
    ConfigError,
    DataError,
    DivergenceError,
    UnsupportedSizeError,
)
from .hooks import ISolverHooks, CompositeSolverHooks, SolverHooksAdapter, StderrProgressHooks, JsonFileReportHooks
from .storage import IArtifactStorage
from .operators import ITransportMethod, BaseTransportMethod, MethodResult

__all__ = [
    # Types
    "CostMatrix",
    "Marginals",
    "Coupling",
    "KernelWeights",
    "ProblemSpec",
    "TermKind",
    "TermIndex",
    "feasibility_gap",
    "num_pair_terms",

    # Objective
    "full_objective",
    "relaxed_objective",
    "son_penalty",
    "enumerate_terms",
    "term_parameters",
    "term_slices",
    "linear_divisors",

    # Config
    "SamplingScheme",
    "SolverConfig",
    "SinkhornConfig",
    "DataSpec",
    "KernelSpec",
    "CertificateSpec",
    "CompareSpec",
    "ExperimentConfig",

    # Exceptions
    "SonOTError",
    "DimensionError",
    "ValidationError",
    "ConfigError",
    "DataError",
    "DivergenceError",
    "UnsupportedSizeError",

    # Contracts
    "ISolverHooks",
    "CompositeSolverHooks",
    "StderrProgressHooks",
    "JsonFileReportHooks",
    "SolverHooksAdapter",
    "IArtifactStorage",
    "ITransportMethod",
    "BaseTransportMethod",
    "MethodResult",
]
