"""
子命令实现：solve / certify / compare / gen。
每个命令接收已校验的 ExperimentConfig，把产物写到 cfg.output_dir；
库函数抛出的异常由 main 统一映射为退出码。
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from son_ot.connectors.sinks import DatasetCsvSink, RunArtifactSink
from son_ot.connectors.sources import (
    Dataset,
    build_problem,
    circle_centers,
    cluster_structure,
    load_datasets,
    shared_classes,
)
from son_ot.core.config import ExperimentConfig
from son_ot.core.exceptions import ConfigError, UnsupportedSizeError, ValidationError
from son_ot.core.hooks import CompositeSolverHooks, JsonFileReportHooks, StderrProgressHooks
from son_ot.core.objective import full_objective
from son_ot.core.operators import MethodResult
from son_ot.core.types import ProblemSpec
from son_ot.evaluation import barycentric_map, class_block_mass, knn1_accuracy, off_association_by_class
from son_ot.impl.baselines import EXACT_OT_MAX_ENTRIES
from son_ot.impl.solver import SonSolver
from son_ot.operators import MethodRegistry, default_registry
from son_ot.theory.certificates import certify
from son_ot.theory.cycles import MAX_CYCLE_CLUSTERS

logger = logging.getLogger("SonOT.CLI")

THREADS_ENV = "SONOT_THREADS"


def _labels_ready(src: Dataset, tgt: Dataset) -> bool:
    return src.has_labels and tgt.has_labels


def _class_ids(data: Dataset) -> Optional[List[int]]:
    return data.class_ids.tolist() if data.has_labels else None


def cmd_solve(cfg: ExperimentConfig) -> int:
    src, tgt = load_datasets(cfg.data)
    spec = build_problem(cfg, src, tgt)
    run_id = f"solve-seed{cfg.solver.seed}"
    hooks = CompositeSolverHooks([
        StderrProgressHooks(cfg.solver.log_every),
        JsonFileReportHooks(os.path.join(cfg.output_dir, "runs")),
    ])
    report = SonSolver(spec, cfg.solver, hooks, run_id).run()
    plan = report.coupling.plan

    sink = RunArtifactSink(cfg.output_dir)
    sink.write_matrix("coupling.csv", plan)
    sink.write_matrix("support.csv", report.support_pattern)
    sink.write_matrix("blocks.csv", class_block_mass(plan, src, tgt))
    doc = report.to_dict()
    doc.update({
        "run_id": run_id,
        "m": spec.m,
        "n": spec.n,
        "lambda": spec.lam,
        "objective": full_objective(spec, plan),
        "transport_cost": float((spec.cost.entries * plan).sum()),
        "source_classes": _class_ids(src),
        "target_classes": _class_ids(tgt),
        "off_association_fraction": off_association_by_class(plan, src, tgt) if _labels_ready(src, tgt) else None,
        "experiment": cfg.to_dict(),
    })
    sink.write_report("report.json", doc)
    logger.info(f"✅ solve 完成，产物目录: {cfg.output_dir}")
    return 0


def _gaussian_centers(cfg: ExperimentConfig, K: int) -> Optional[Tuple[np.ndarray, np.ndarray, float, int]]:
    """仅对未去类别的高斯簇数据给出真实中心"""
    data = cfg.data
    if data.kind != "gaussian" or K < 2:
        return None
    if data.drop_source_class is not None or data.drop_target_class is not None:
        return None
    cs = np.asarray(data.centers_s, dtype=np.float64) if data.centers_s is not None \
        else circle_centers(data.K, data.dim, data.radius)
    ct = np.asarray(data.centers_t, dtype=np.float64) if data.centers_t is not None else cs
    return cs, ct, data.omega, data.m_per


def cmd_certify(cfg: ExperimentConfig) -> int:
    cert = cfg.certificate
    if not cert.enabled:
        raise ConfigError("certificate.enabled is false; nothing to certify")
    src, tgt = load_datasets(cfg.data)
    if not _labels_ready(src, tgt):
        raise ValidationError("certify needs class labels on both source and target")
    if cert.shared_classes_only:
        src, tgt = shared_classes(src, tgt)
    spec = build_problem(cfg, src, tgt)
    cs = cluster_structure(src, tgt, spec.marginals)
    if cs.K > MAX_CYCLE_CLUSTERS:
        raise UnsupportedSizeError(f"certify supports K <= {MAX_CYCLE_CLUSTERS} clusters, got K={cs.K}")
    with_thm3 = cert.theorem3 and cfg.theta is not None
    report = certify(
        spec.cost, cs, cfg.lam, cert.R_mode,
        kernels=spec.kernels if with_thm3 else None,
        theta=cfg.theta if with_thm3 else None,
        centers=_gaussian_centers(cfg, cs.K),
        C=cert.C, a=cert.a, c=cert.c, d_const=cert.d,
    )
    doc = report.to_dict()
    doc["classes"] = src.class_ids.tolist()
    doc["window_nonempty"] = report.window_nonempty
    RunArtifactSink(cfg.output_dir).write_report("certificate.json", doc)
    logger.info(f"📐 certify 完成: part1_holds={report.part1_holds}")
    return 0


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _method_args(cfg: ExperimentConfig, name: str) -> Tuple:
    if name == "son":
        return (cfg.solver,)
    if name == "sinkhorn":
        return (cfg.compare.sinkhorn,)
    return ()


def _score(result: MethodResult, spec: ProblemSpec, src: Dataset, tgt: Dataset) -> Dict[str, Any]:
    plan = result.coupling.plan
    row: Dict[str, Any] = {
        "method": result.method,
        "objective": result.objective,
        "feasibility_gap": result.coupling.recompute_gap(spec.marginals),
        "wall_time": result.wall_time,
        "off_association_fraction": None,
        "knn1_accuracy": None,
    }
    if _labels_ready(src, tgt):
        row["off_association_fraction"] = off_association_by_class(plan, src, tgt)
        moved = barycentric_map(plan, tgt).dataset
        row["knn1_accuracy"] = knn1_accuracy(moved.points, src.raw_labels(), tgt.points, tgt.raw_labels())
    row.update(result.extra)
    return row


def cmd_compare(cfg: ExperimentConfig, registry: MethodRegistry = default_registry) -> int:
    methods = list(cfg.compare.methods)
    if not methods:
        raise ConfigError("compare.methods must not be empty")
    src, tgt = load_datasets(cfg.data)
    spec = build_problem(cfg, src, tgt)
    if "exact" in methods and spec.m * spec.n > EXACT_OT_MAX_ENTRIES:
        raise UnsupportedSizeError(
            f"exact method supports m*n <= {EXACT_OT_MAX_ENTRIES}, got {spec.m}x{spec.n}={spec.m * spec.n}")
    operators = [registry.create(name, *_method_args(cfg, name)) for name in methods]
    workers = min(_thread_count(), len(operators))
    logger.info(f"🚀 compare: 方法={methods}, 并行={workers}")

    def _run(op):
        return op.run(spec, {"run_id": f"compare-{op.name}-seed{cfg.solver.seed}",
                             "hooks": StderrProgressHooks(cfg.solver.log_every)})

    if workers <= 1:
        results = [_run(op) for op in operators]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, operators))

    # 结果按方法顺序串行写出
    rows = [_score(r, spec, src, tgt) for r in results]
    RunArtifactSink(cfg.output_dir).write_report("compare.json", {
        "m": spec.m,
        "n": spec.n,
        "lambda": spec.lam,
        "methods": methods,
        "rows": rows,
        "experiment": cfg.to_dict(),
    })
    logger.info(f"✅ compare 完成: {len(rows)} 个方法")
    return 0


def cmd_gen(cfg: ExperimentConfig) -> int:
    src, tgt = load_datasets(cfg.data)
    DatasetCsvSink(os.path.join(cfg.output_dir, "source.csv")).write(src)
    DatasetCsvSink(os.path.join(cfg.output_dir, "target.csv")).write(tgt)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "certify": cmd_certify,
    "compare": cmd_compare,
    "gen": cmd_gen,
}
