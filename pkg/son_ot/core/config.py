"""配置模型：求解器、Sinkhorn 基线与实验配置。

实验配置来自单个 JSON 文件；解析时逐层拒绝未知键（报错信息给出带点路径），
所有取值范围在任何计算开始之前校验完毕。
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

from son_ot.core.exceptions import ConfigError, ValidationError


def _check_keys(data: Dict[str, Any], cls, path: str, extra: Tuple[str, ...] = ()) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"'{path or '<root>'}' must be an object")
    allowed = {f.name for f in fields(cls)} | set(extra)
    for key in data:
        if key not in allowed:
            dotted = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key '{dotted}'")


@dataclass
class SamplingScheme:
    """项抽样方式：uniform 在 P+Q 项上均匀；split_pools 以概率 p_obj 先选目标项池，再池内均匀"""
    kind: str = "uniform"
    p_obj: Optional[float] = None

    def validate(self) -> None:
        if self.kind not in ("uniform", "split_pools"):
            raise ValidationError(f"sampling.kind must be 'uniform' or 'split_pools', got {self.kind!r}")
        if self.kind == "split_pools":
            if self.p_obj is None or not 0.0 <= self.p_obj <= 1.0:
                raise ValidationError(f"sampling.p_obj must be in [0, 1], got {self.p_obj!r}")

    @classmethod
    def uniform(cls) -> "SamplingScheme":
        return cls("uniform")

    @classmethod
    def split_pools(cls, p_obj: float) -> "SamplingScheme":
        return cls("split_pools", p_obj)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "sampling") -> "SamplingScheme":
        _check_keys(data, cls, path)
        return cls(**data)


@dataclass
class SolverConfig:
    """
    加速随机增量近端-投影求解器的配置。
    step / alpha / support_threshold 为 None 时由 resolve() 按问题数据填默认值。

    记忆更新中的 total 始终只在当前项的支撑上生效。jit=True 时它再乘以 K/K_i；
    jit=False 为“限制、不缩放”的变体，total 在支撑上直接以 alpha 加权，
    不是对全部记忆之和做稠密修正的形式。
    """
    step: Optional[float] = None
    rho_acc: float = 0.9
    alpha: Optional[float] = None
    epochs: int = 100
    seed: int = 0
    # 限制在支撑上的 total 是否乘以 K/K_i
    jit: bool = True
    sampling: SamplingScheme = field(default_factory=SamplingScheme)
    round_output: bool = True
    support_threshold: Optional[float] = None
    log_every: int = 10
    # 以 θ 惩罚替代行列单纯形约束（需要 ProblemSpec.theta）
    relaxed: bool = False
    # 记录这些 epoch 结束时的支撑模式（早停分析）
    snapshot_epochs: Tuple[int, ...] = ()

    def validate(self) -> None:
        if not 0.0 < self.rho_acc < 1.0:
            raise ValidationError(f"rho_acc must be in (0, 1), got {self.rho_acc!r}")
        if self.step is not None and not (math.isfinite(self.step) and self.step > 0):
            raise ValidationError(f"step must be > 0, got {self.step!r}")
        if self.alpha is not None and not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValidationError(f"alpha must be > 0, got {self.alpha!r}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs!r}")
        if self.log_every < 0:
            raise ValidationError(f"log_every must be >= 0, got {self.log_every!r}")
        if self.support_threshold is not None and self.support_threshold < 0:
            raise ValidationError(f"support_threshold must be >= 0, got {self.support_threshold!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if any(e < 1 for e in self.snapshot_epochs):
            raise ValidationError("snapshot_epochs must be positive epoch numbers")
        self.sampling.validate()

    def resolve(self, spec) -> "SolverConfig":
        """
        填充数据相关的默认值：
        step = 0.5 / (λ·max_kernel·√(m+n) + max(D))；alpha = 1/(P+Q)；
        support_threshold = 1e−3·Σμ/(m·n)
        """
        self.validate()
        m, n = spec.m, spec.n
        step = self.step
        if step is None:
            scale = spec.lam * spec.kernels.max_entry * math.sqrt(m + n) + float(spec.cost.entries.max())
            step = 0.5 / scale if scale > 0 else 0.5
        alpha = self.alpha if self.alpha is not None else 1.0 / (spec.num_pair_terms + spec.num_constraints)
        thr = self.support_threshold
        if thr is None:
            thr = 1e-3 * spec.marginals.total / (m * n)
        return replace(self, step=step, alpha=alpha, support_threshold=thr)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["snapshot_epochs"] = list(self.snapshot_epochs)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "solver") -> "SolverConfig":
        _check_keys(data, cls, path)
        data = dict(data)
        if "sampling" in data:
            data["sampling"] = SamplingScheme.from_dict(data["sampling"], f"{path}.sampling")
        if "snapshot_epochs" in data:
            data["snapshot_epochs"] = tuple(int(e) for e in data["snapshot_epochs"])
        return cls(**data)


@dataclass
class SinkhornConfig:
    """熵正则基线：epsilon 为代价单位下的正则强度，tol 为边缘违背容差"""
    epsilon: float = 0.1
    max_iters: int = 5000
    tol: float = 1e-9
    # epsilon 按 mean(D) 的倍数解释
    relative: bool = False

    def validate(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon!r}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.tol <= 0:
            raise ValidationError(f"tol must be > 0, got {self.tol!r}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "sinkhorn") -> "SinkhornConfig":
        _check_keys(data, cls, path)
        return cls(**data)


@dataclass
class DataSpec:
    """
    数据来源：kind = gaussian | path_based | csv。
    gaussian/path_based 为合成数据（种子决定），csv 读取带标签的外部数据。
    """
    kind: str = "gaussian"
    seed: int = 0
    # gaussian
    K: int = 2
    m_per: int = 4
    dim: int = 2
    omega: float = 0.05
    radius: float = 4.0
    centers_s: Optional[List[List[float]]] = None
    centers_t: Optional[List[List[float]]] = None
    # path_based
    n_per_class: int = 20
    # 类别数不一致的场景：从源 / 目标中去掉某个类别
    drop_source_class: Optional[int] = None
    drop_target_class: Optional[int] = None
    # csv
    source_path: Optional[str] = None
    target_path: Optional[str] = None
    has_labels: bool = True
    metric: str = "sqeuclidean"

    def validate(self) -> None:
        if self.kind not in ("gaussian", "path_based", "csv"):
            raise ValidationError(f"data.kind must be gaussian, path_based or csv, got {self.kind!r}")
        if self.kind == "gaussian":
            if self.K < 1:
                raise ValidationError(f"data.K must be >= 1, got {self.K!r}")
            if self.m_per < 1 or self.dim < 1:
                raise ValidationError("data.m_per and data.dim must be >= 1")
            if self.omega < 0:
                raise ValidationError(f"data.omega must be >= 0, got {self.omega!r}")
        if self.kind == "path_based" and self.n_per_class < 1:
            raise ValidationError(f"data.n_per_class must be >= 1, got {self.n_per_class!r}")
        if self.kind == "csv" and not (self.source_path and self.target_path):
            raise ValidationError("data.source_path and data.target_path are required for csv data")
        if self.metric not in ("sqeuclidean", "euclidean"):
            raise ValidationError(f"data.metric must be sqeuclidean or euclidean, got {self.metric!r}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "data") -> "DataSpec":
        _check_keys(data, cls, path)
        return cls(**data)


@dataclass
class KernelSpec:
    """
    核构造：kind = gaussian（类别掩码的高斯核）| indicator（同类为 1 / 全 1）| none。
    sigma 为 None 时取该侧成对距离中位数。
    """
    kind: str = "gaussian"
    supervised: bool = True
    sigma_s: Optional[float] = None
    sigma_t: Optional[float] = None
    lambda_rows: float = 1.0
    lambda_cols: float = 1.0

    def validate(self) -> None:
        if self.kind not in ("gaussian", "indicator", "none"):
            raise ValidationError(f"kernel.kind must be gaussian, indicator or none, got {self.kind!r}")
        for name in ("sigma_s", "sigma_t"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValidationError(f"kernel.{name} must be > 0, got {v!r}")
        if self.lambda_rows < 0 or self.lambda_cols < 0:
            raise ValidationError("kernel.lambda_rows and kernel.lambda_cols must be >= 0")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "kernel") -> "KernelSpec":
        _check_keys(data, cls, path)
        return cls(**data)


@dataclass
class CertificateSpec:
    """证书计算开关与常数"""
    enabled: bool = True
    R_mode: int = 1
    C: float = 1.0
    theorem3: bool = True
    a: float = 0.25
    c: float = 0.25
    d: float = 0.25
    # 只保留两侧都出现的类别（类别数不一致的场景）
    shared_classes_only: bool = True

    def validate(self) -> None:
        if self.R_mode not in (0, 1):
            raise ValidationError(f"certificate.R_mode must be 0 or 1, got {self.R_mode!r}")
        if not self.C > 0:
            raise ValidationError(f"certificate.C must be > 0, got {self.C!r}")
        if min(self.a, self.c, self.d) <= 0 or 2 * self.a + self.c + self.d > 1:
            raise ValidationError("certificate constants need a, c, d > 0 and 2a + c + d <= 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "certificate") -> "CertificateSpec":
        _check_keys(data, cls, path)
        return cls(**data)


@dataclass
class CompareSpec:
    """方法对比：methods ⊆ {son, sinkhorn, exact}"""
    methods: List[str] = field(default_factory=lambda: ["son", "sinkhorn"])
    sinkhorn: SinkhornConfig = field(default_factory=lambda: SinkhornConfig(epsilon=0.1, relative=True))

    def validate(self) -> None:
        if not self.methods:
            raise ValidationError("compare.methods must not be empty")
        unknown = [m for m in self.methods if m not in ("son", "sinkhorn", "exact")]
        if unknown:
            raise ValidationError(f"unknown compare method(s): {unknown}")
        self.sinkhorn.validate()

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "compare") -> "CompareSpec":
        _check_keys(data, cls, path)
        data = dict(data)
        if "sinkhorn" in data:
            data["sinkhorn"] = SinkhornConfig.from_dict(data["sinkhorn"], f"{path}.sinkhorn")
        return cls(**data)


@dataclass
class ExperimentConfig:
    """一次实验的全部配置（数据、核、求解器、证书、对比、输出目录）"""
    data: DataSpec = field(default_factory=DataSpec)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    solver: SolverConfig = field(default_factory=SolverConfig)
    certificate: CertificateSpec = field(default_factory=CertificateSpec)
    compare: CompareSpec = field(default_factory=CompareSpec)
    lam: float = 1.0
    theta: Optional[float] = None
    output_dir: str = "son_ot_out"

    # JSON 中使用 "lambda"（Python 关键字），映射到 lam
    _ALIASES = {"lambda": "lam"}

    def validate(self) -> None:
        try:
            self.data.validate()
            self.kernel.validate()
            self.solver.validate()
            self.certificate.validate()
            self.compare.validate()
            if not (math.isfinite(self.lam) and self.lam >= 0):
                raise ValidationError(f"lambda must be >= 0, got {self.lam!r}")
            if self.theta is not None and not self.theta > 0:
                raise ValidationError(f"theta must be > 0, got {self.theta!r}")
            if self.solver.relaxed and self.theta is None:
                raise ValidationError("solver.relaxed requires theta")
        except ValidationError as e:
            raise ConfigError(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "data": asdict(self.data),
            "kernel": asdict(self.kernel),
            "solver": self.solver.to_dict(),
            "certificate": asdict(self.certificate),
            "compare": {"methods": list(self.compare.methods), "sinkhorn": self.compare.sinkhorn.to_dict()},
            "lambda": self.lam,
            "theta": self.theta,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        _check_keys(data, cls, "", extra=tuple(cls._ALIASES))
        kwargs: Dict[str, Any] = {}
        parsers = {
            "data": DataSpec.from_dict,
            "kernel": KernelSpec.from_dict,
            "solver": SolverConfig.from_dict,
            "certificate": CertificateSpec.from_dict,
            "compare": CompareSpec.from_dict,
        }
        try:
            for key, value in data.items():
                name = cls._ALIASES.get(key, key)
                kwargs[name] = parsers[name](value) if name in parsers else value
            cfg = cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"invalid config value: {e}") from e
        cfg.validate()
        return cfg
