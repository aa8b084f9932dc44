"""簇结构恢复证书"""
from .cycles import MonotonicityResult, monotonicity_delta, loop_value, MAX_CYCLE_CLUSTERS
from .certificates import (
    ClusterStructure,
    CertificateReport,
    DiameterResult,
    Part2Verdict,
    cluster_mean_costs,
    associated_costs,
    effective_diameter,
    lambda_capacity,
    theorem2_check,
    theorem1_ratio,
    aggregate_kernels,
    theorem3_bound,
    theorem3_part2_check,
    certify,
)

__all__ = [
    "MonotonicityResult",
    "monotonicity_delta",
    "loop_value",
    "MAX_CYCLE_CLUSTERS",
    "ClusterStructure",
    "CertificateReport",
    "DiameterResult",
    "Part2Verdict",
    "cluster_mean_costs",
    "associated_costs",
    "effective_diameter",
    "lambda_capacity",
    "theorem2_check",
    "theorem1_ratio",
    "aggregate_kernels",
    "theorem3_bound",
    "theorem3_part2_check",
    "certify",
]
