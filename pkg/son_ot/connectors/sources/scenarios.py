"""
实验场景装配：按 DataSpec / KernelSpec 生成数据、核与问题定义。

支持的场景：等类别数的高斯簇、3→2 与 2→3 类别数不一致（drop_*_class）、
去掉一个类别的路径型数据、非监督模式（kernel.supervised = false）、外部 CSV。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from son_ot.connectors.sources.csv_source import load_labeled_csv
from son_ot.connectors.sources.dataset import Dataset
from son_ot.connectors.sources.kernels import build_class_kernels, build_indicator_kernels, cost_matrix
from son_ot.connectors.sources.synthetic import circle_centers, gen_gaussian_pairs, gen_path_based
from son_ot.core.config import DataSpec, ExperimentConfig, KernelSpec
from son_ot.core.exceptions import ValidationError
from son_ot.core.types import KernelWeights, Marginals, ProblemSpec
from son_ot.theory.certificates import CertificateReport, ClusterStructure, theorem2_check

_data_logger = logging.getLogger("SonOT.Data")


def load_datasets(data: DataSpec) -> Tuple[Dataset, Dataset]:
    data.validate()
    if data.kind == "gaussian":
        src, tgt = gen_gaussian_pairs(data.K, data.m_per, data.dim, data.centers_s, data.centers_t,
                                      data.omega, data.seed, data.radius)
    elif data.kind == "path_based":
        src = gen_path_based(data.n_per_class, data.seed)
        tgt = gen_path_based(data.n_per_class, data.seed + 1)
    else:
        src = load_labeled_csv(data.source_path, data.has_labels)
        tgt = load_labeled_csv(data.target_path, data.has_labels)
    if data.drop_source_class is not None:
        src = src.drop_class(data.drop_source_class)
    if data.drop_target_class is not None:
        tgt = tgt.drop_class(data.drop_target_class)
    return src, tgt


def build_kernels(spec: KernelSpec, src: Dataset, tgt: Dataset) -> KernelWeights:
    spec.validate()
    if spec.kind == "gaussian":
        return build_class_kernels(src, tgt, spec.sigma_s, spec.sigma_t, spec.lambda_rows, spec.lambda_cols,
                                   spec.supervised)
    if spec.kind == "indicator":
        return build_indicator_kernels(src, tgt, spec.lambda_rows, spec.lambda_cols, spec.supervised)
    return KernelWeights.zeros(len(src), len(tgt))


def build_problem(cfg: ExperimentConfig, src: Dataset, tgt: Dataset) -> ProblemSpec:
    """均匀边缘（两侧总质量 1）+ 代价 + 核"""
    return ProblemSpec(
        cost=cost_matrix(src, tgt, cfg.data.metric),
        marginals=Marginals.uniform(len(src), len(tgt)),
        kernels=build_kernels(cfg.kernel, src, tgt),
        lam=cfg.lam,
        theta=cfg.theta,
    )


def shared_classes(src: Dataset, tgt: Dataset) -> Tuple[Dataset, Dataset]:
    """只保留两侧都出现的原始类别"""
    if not (src.has_labels and tgt.has_labels):
        raise ValidationError("shared classes need labels on both sides")
    common = sorted(set(src.class_ids.tolist()) & set(tgt.class_ids.tolist()))
    if not common:
        raise ValidationError("source and target share no class")
    return src.restrict_to(common), tgt.restrict_to(common)


def cluster_structure(src: Dataset, tgt: Dataset, marginals: Marginals) -> ClusterStructure:
    """按原始类别号关联两侧的簇：π(α) = 与源簇 α 类别号相同的目标簇"""
    if not (src.has_labels and tgt.has_labels):
        raise ValidationError("cluster structure needs labels on both sides")
    if sorted(src.class_ids.tolist()) != sorted(tgt.class_ids.tolist()):
        raise ValidationError(
            f"class sets differ: source {src.class_ids.tolist()} vs target {tgt.class_ids.tolist()}")
    where = {cid: b for b, cid in enumerate(tgt.class_ids.tolist())}
    pi = [where[cid] for cid in src.class_ids.tolist()]
    return ClusterStructure.from_labels(src.labels, tgt.labels, marginals, pi)


@dataclass(frozen=True)
class PlantedInstance:
    spec: ProblemSpec
    clusters: ClusterStructure
    certificate: CertificateReport
    source: Dataset
    target: Dataset


def planted_block_instance(seed: int = 0, K: int = 2, m_per: int = 4, dim: int = 2, omega: float = 0.01,
                           radius: float = 2.0, fraction: float = 0.999, metric: str = "sqeuclidean") -> PlantedInstance:
    """
    分离良好的高斯簇（均匀质量，同类指示核 R、全 1 核 S），
    λ 取证书窗口上端的 fraction 倍，使块对角恢复条件成立。
    """
    src, tgt = gen_gaussian_pairs(K, m_per, dim, circle_centers(K, dim, radius), None, omega, seed)
    marginals = Marginals.uniform(len(src), len(tgt))
    cost = cost_matrix(src, tgt, metric)
    cs = cluster_structure(src, tgt, marginals)
    window_check = theorem2_check(cost, cs, 0.0, R_mode=1)
    lam = fraction * window_check.lambda_window[1]
    if lam <= 0:
        raise ValidationError("planted instance has no positive lambda window; increase the cluster separation")
    report = theorem2_check(cost, cs, lam, R_mode=1)
    spec = ProblemSpec(cost, marginals, build_indicator_kernels(src, tgt), lam)
    _data_logger.info(f"🧪 植入块实例: K={K}, 每簇={m_per}, λ={lam:.6g}, 第一部分={report.part1_holds}")
    return PlantedInstance(spec, cs, report, src, tgt)
