"""
簇结构恢复证书。

给定源 / 目标两侧的簇划分与簇关联 π，计算：
  - 簇均值代价 D_{α,β} 与强循环单调性 δ*
  - 有效簇直径 Δ 与容量 Λ，以及块对角解成立的 λ 窗口和非关联质量上界
  - 高斯簇中心条件的比值、一般簇规模下的松弛问题误差界与块结构充分条件

下标全部从 0 开始；簇编号取值 0..K−1。
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.core.types import CostMatrix, KernelWeights, Marginals
from son_ot.theory.cycles import monotonicity_delta

_cert_logger = logging.getLogger("SonOT.Certificates")

CostLike = Union[CostMatrix, np.ndarray]

# 源 / 目标簇质量视为相等的容差
MASS_MATCH_TOL = 1e-12


def _entries(D: CostLike) -> np.ndarray:
    return D.entries if isinstance(D, CostMatrix) else CostMatrix(D).entries


def _labels(labels, side: str) -> np.ndarray:
    lab = np.asarray(labels)
    if lab.ndim != 1 or lab.size == 0:
        raise DimensionError(f"{side} labels must be a nonempty 1-D sequence")
    if not np.issubdtype(lab.dtype, np.integer):
        if not np.all(np.equal(np.mod(lab, 1), 0)):
            raise ValidationError(f"{side} labels must be integer cluster ids")
        lab = lab.astype(np.int64)
    if lab.min() < 0:
        raise ValidationError(f"{side} labels must be >= 0")
    return lab.astype(np.int64)


@dataclass(frozen=True)
class ClusterStructure:
    """
    两侧的簇划分与关联。
    sizes_s[α] = n_α（源簇规模），sizes_t[β] = m_β（目标簇规模），
    omega[α] = Σ_{i∈S_α} μ_i，omega_t[β] = Σ_{j∈T_β} ν_j。
    feasible 当且仅当每个 α 都有 omega[α] = omega_t[π(α)]（容差 1e−12）。
    """
    source_labels: np.ndarray
    target_labels: np.ndarray
    association: np.ndarray
    sizes_s: np.ndarray
    sizes_t: np.ndarray
    omega: np.ndarray
    omega_t: np.ndarray
    feasible: bool
    mu: np.ndarray
    nu: np.ndarray

    @classmethod
    def from_labels(cls, source_labels, target_labels, marginals: Marginals,
                    association: Optional[Sequence[int]] = None) -> "ClusterStructure":
        s = _labels(source_labels, "source")
        t = _labels(target_labels, "target")
        if (s.size, t.size) != (marginals.m, marginals.n):
            raise DimensionError(
                f"labels ({s.size}, {t.size}) do not match marginals ({marginals.m}, {marginals.n})")
        K = int(max(s.max(), t.max())) + 1
        sizes_s = np.bincount(s, minlength=K)
        sizes_t = np.bincount(t, minlength=K)
        if np.any(sizes_s == 0) or np.any(sizes_t == 0):
            empty = [f"source {a}" for a in np.flatnonzero(sizes_s == 0)]
            empty += [f"target {b}" for b in np.flatnonzero(sizes_t == 0)]
            raise ValidationError(f"empty clusters: {', '.join(empty)}")
        pi = np.arange(K) if association is None else np.asarray(association, dtype=np.int64)
        if pi.shape != (K,) or sorted(pi.tolist()) != list(range(K)):
            raise ValidationError(f"association must be a permutation of 0..{K - 1}, got {pi.tolist()}")
        omega = np.bincount(s, weights=marginals.mu, minlength=K)
        omega_t = np.bincount(t, weights=marginals.nu, minlength=K)
        feasible = bool(np.all(np.abs(omega - omega_t[pi]) <= MASS_MATCH_TOL * max(1.0, marginals.total)))
        return cls(s, t, pi, sizes_s, sizes_t, omega, omega_t, feasible,
                   np.array(marginals.mu), np.array(marginals.nu))

    @property
    def K(self) -> int:
        return int(self.association.size)

    @property
    def m(self) -> int:
        return int(self.source_labels.size)

    @property
    def n(self) -> int:
        return int(self.target_labels.size)

    @property
    def equal_sizes(self) -> bool:
        sizes = np.concatenate([self.sizes_s, self.sizes_t])
        return bool(np.all(sizes == sizes[0]))

    def source_onehot(self) -> np.ndarray:
        return np.eye(self.K)[self.source_labels]

    def target_onehot(self) -> np.ndarray:
        return np.eye(self.K)[self.target_labels]

    def relabel(self, perm: Sequence[int]) -> "ClusterStructure":
        """簇 α 改名为 perm[α]（两侧同时），π 随之变换"""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.argsort(perm)
        s = perm[self.source_labels]
        t = perm[self.target_labels]
        pi = perm[self.association[inv]]
        return ClusterStructure(s, t, pi, self.sizes_s[inv], self.sizes_t[inv],
                                self.omega[inv], self.omega_t[inv], self.feasible, self.mu, self.nu)


def cluster_mean_costs(D: CostLike, cs: ClusterStructure) -> np.ndarray:
    """D_{α,β} = Σ_{i∈S_α, j∈T_β} D_ij / (n_α·m_β)"""
    C = _entries(D)
    if C.shape != (cs.m, cs.n):
        raise DimensionError(f"cost shape {C.shape} does not match labels ({cs.m}, {cs.n})")
    block = cs.source_onehot().T @ C @ cs.target_onehot()
    return block / np.outer(cs.sizes_s, cs.sizes_t)


def associated_costs(Dbar: np.ndarray, cs: ClusterStructure) -> np.ndarray:
    """D̃_{α,α′} = D_{α, π(α′)}"""
    return np.asarray(Dbar)[:, cs.association]


@dataclass(frozen=True)
class DiameterResult:
    Delta: float
    equal_sizes: bool


def effective_diameter(D: CostLike, cs: ClusterStructure) -> DiameterResult:
    """
    Δ = max( 同一源簇内 ‖row_i − row_i′‖/√n ， 同一目标簇内 ‖col_j − col_j′‖/√m )。
    m ≠ n 时每个切片用自身长度归一，并在结果中标记。
    """
    C = _entries(D)
    m, n = C.shape
    best = 0.0
    for a in range(cs.K):
        rows = C[cs.source_labels == a]
        if rows.shape[0] > 1:
            diff = rows[:, None, :] - rows[None, :, :]
            best = max(best, float(np.sqrt((diff ** 2).sum(axis=2)).max()) / math.sqrt(n))
        cols = C[:, cs.target_labels == a].T
        if cols.shape[0] > 1:
            diff = cols[:, None, :] - cols[None, :, :]
            best = max(best, float(np.sqrt((diff ** 2).sum(axis=2)).max()) / math.sqrt(m))
    if m != n:
        _cert_logger.warning(f"⚠️ 两侧规模不同 (m={m}, n={n})，Δ 按各自切片长度归一")
    return DiameterResult(best, m == n)


def lambda_capacity(cs_or_omega, R_mode: int = 1) -> float:
    """
    T_{α,β} = Σ_γ (ω_α/√(ω_α²+ω_γ²) + ω_β/√(ω_β²+ω_γ²)) − √2
    Λ_{α,β} = ((1+R)/2·T_{α,β} + (ω_α + R·ω_β)/(ω_β√2))⁻¹
    返回 max_{α≠β} Λ_{α,β}
    """
    omega = cs_or_omega.omega if isinstance(cs_or_omega, ClusterStructure) else np.asarray(cs_or_omega, dtype=np.float64)
    if R_mode not in (0, 1):
        raise ValidationError(f"R_mode must be 0 or 1, got {R_mode!r}")
    K = omega.size
    if K < 2:
        raise ValidationError(f"lambda_capacity needs K >= 2, got K={K}")
    if np.any(omega <= 0):
        raise ValidationError("cluster masses must be positive")
    R = float(R_mode)
    # ratio[α, γ] = ω_α / √(ω_α² + ω_γ²)
    ratio = omega[:, None] / np.sqrt(omega[:, None] ** 2 + omega[None, :] ** 2)
    row_sum = ratio.sum(axis=1)
    best = -np.inf
    for a in range(K):
        for b in range(K):
            if a == b:
                continue
            T = row_sum[a] + row_sum[b] - math.sqrt(2.0)
            inv = (1.0 + R) / 2.0 * T + (omega[a] + R * omega[b]) / (omega[b] * math.sqrt(2.0))
            best = max(best, 1.0 / inv)
    return float(best)


@dataclass
class Part2Verdict:
    """块结构充分条件的逐族判定；slack = 右侧 − 左侧，取该族最小值"""
    holds: bool
    slacks: Dict[str, float]
    violations: List[Dict[str, Any]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        return {"holds": self.holds, "slacks": dict(self.slacks), "violations": list(self.violations)}


@dataclass
class CertificateReport:
    """证书汇总：δ*, Δ, Λ, λ 窗口, 第一 / 第二部分结论, 中心条件比值, 一般规模误差界"""
    K: int
    cluster_size: int
    lam: float
    R_mode: int
    delta: float
    delta_loop: Tuple[int, ...]
    Delta: float
    Lambda: float
    lambda_window: Tuple[float, float]
    part1_holds: bool
    part2_bound: float
    thm1_ratio: Optional[float] = None
    thm3_bound: Optional[float] = None
    thm3_part2: Optional[Part2Verdict] = None
    equal_sizes: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def window_nonempty(self) -> bool:
        lo, hi = self.lambda_window
        return lo <= hi

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["delta_loop"] = list(self.delta_loop)
        data["lambda_window"] = list(self.lambda_window)
        data["lambda"] = data.pop("lam")
        data["thm3_part2"] = self.thm3_part2.to_dict() if self.thm3_part2 is not None else None
        return data


def theorem2_check(D: CostLike, cs: ClusterStructure, lam: float, R_mode: int = 1) -> CertificateReport:
    """
    等规模簇（每簇 m 个点）下的块对角恢复条件：
      第一部分：Δ√K ≤ λ√m ≤ Λδ*（且 δ* > 0）
      第二部分：δ·Σ_{β≠π(α)} X_{α,β} ≤ λ(1+R)√m·Σ_{α≠α′}√(ω_α²+ω_α′²)
    """
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")
    if not cs.equal_sizes:
        raise ValidationError("theorem2_check needs equal cluster sizes; use theorem3_bound for general sizes")
    return _block_recovery_report(D, cs, lam, R_mode, int(cs.sizes_s[0]))


def _block_recovery_report(D: CostLike, cs: ClusterStructure, lam: float, R_mode: int, size: int) -> CertificateReport:
    K = cs.K
    Dbar = cluster_mean_costs(D, cs)
    mono = monotonicity_delta(associated_costs(Dbar, cs))
    diam = effective_diameter(D, cs)
    Lam = lambda_capacity(cs, R_mode)
    root_m = math.sqrt(size)
    lower = diam.Delta * math.sqrt(K) / root_m
    upper = Lam * mono.delta / root_m
    if mono.delta > 0:
        part1 = diam.Delta * math.sqrt(K) <= lam * root_m <= Lam * mono.delta
        pair_sum = sum(math.sqrt(cs.omega[a] ** 2 + cs.omega[b] ** 2)
                       for a in range(K) for b in range(K) if a != b)
        part2 = lam * (1.0 + R_mode) * root_m * pair_sum / mono.delta
    else:
        part1 = False
        part2 = math.inf
    report = CertificateReport(
        K=K, cluster_size=size, lam=float(lam), R_mode=R_mode,
        delta=mono.delta, delta_loop=mono.loop, Delta=diam.Delta, Lambda=Lam,
        lambda_window=(lower, upper), part1_holds=bool(part1), part2_bound=float(part2),
        equal_sizes=diam.equal_sizes,
    )
    if not diam.equal_sizes:
        report.notes.append("domain sizes differ; Delta uses per-slice normalizers")
    _cert_logger.info(
        f"📐 δ*={mono.delta:.6g}, Δ={diam.Delta:.6g}, Λ={Lam:.6g}, "
        f"窗口=[{lower:.6g}, {upper:.6g}], λ={lam:.6g}, 第一部分={'✅' if part1 else '❌'}")
    return report


def theorem1_ratio(centers_s, centers_t, omega: float, n: int, K: int, C: float = 1.0) -> float:
    """
    ((D² − d²)/(K√K)) / (C·√(E² + ω²)·log(nK))
    D = min_{α≠β}‖θ^s_α − θ^t_β‖，d = max_α‖θ^s_α − θ^t_α‖，E = max_{α,β}‖θ^s_α − θ^t_β‖。
    比值 ≥ 1 表示常数 C 下条件成立。
    """
    cs_ = np.atleast_2d(np.asarray(centers_s, dtype=np.float64))
    ct_ = np.atleast_2d(np.asarray(centers_t, dtype=np.float64))
    if cs_.shape != ct_.shape or cs_.shape[0] != K:
        raise DimensionError(f"need K={K} centers per side with equal dims, got {cs_.shape} and {ct_.shape}")
    if K < 2:
        raise ValidationError(f"theorem1_ratio needs K >= 2, got K={K}")
    if not C > 0:
        raise ValidationError(f"C must be > 0, got {C!r}")
    if omega < 0:
        raise ValidationError(f"omega must be >= 0, got {omega!r}")
    dist = np.linalg.norm(cs_[:, None, :] - ct_[None, :, :], axis=2)
    off = dist[~np.eye(K, dtype=bool)]
    D_min = float(off.min())
    d_max = float(np.diag(dist).max())
    E = float(dist.max())
    lhs = (D_min ** 2 - d_max ** 2) / (K * math.sqrt(K))
    rhs = C * math.sqrt(E ** 2 + omega ** 2) * math.log(n * K)
    if rhs <= 0:
        return math.inf if lhs > 0 else 0.0
    return float(lhs / rhs)


def aggregate_kernels(kernels: KernelWeights, cs: ClusterStructure) -> Tuple[np.ndarray, np.ndarray]:
    """R_{α,α′} = Σ_{i∈S_α, i′∈S_α′} R_{i,i′}；S_{β,β′} 同理"""
    Ps, Pt = cs.source_onehot(), cs.target_onehot()
    return Ps.T @ kernels.R @ Ps, Pt.T @ kernels.S @ Pt


def _delta_constants(Dtilde: np.ndarray) -> Tuple[float, float]:
    diag = np.diag(Dtilde)
    delta0 = float(np.abs(2.0 * Dtilde - diag[:, None] - diag[None, :]).max())
    delta1 = 0.5 * (delta0 + float(np.abs(diag).max()))
    return delta0, delta1


def theorem3_bound(D: CostLike, cs: ClusterStructure, lam: float, theta: float, kernels: KernelWeights) -> float:
    """
    一般簇规模下松弛问题的非关联质量上界 Σ_{β≠π(α)} X_{α,β} ≤ RHS/δ*。
    σ_α = (ω_α + ω^t_{π(α)})/2，δ_α = (ω_α − ω^t_{π(α)})/2。δ* ≤ 0 时返回 +inf。
    """
    if not theta > 0:
        raise ValidationError(f"theta must be > 0, got {theta!r}")
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")
    C = _entries(D)
    Dtilde = associated_costs(cluster_mean_costs(C, cs), cs)
    mono = monotonicity_delta(Dtilde)
    if mono.delta <= 0:
        return math.inf
    K, pi = cs.K, cs.association
    n_a = cs.sizes_s.astype(np.float64)
    m_pa = cs.sizes_t[pi].astype(np.float64)
    sigma = 0.5 * (cs.omega + cs.omega_t[pi])
    dlt = 0.5 * (cs.omega - cs.omega_t[pi])
    R_agg, S_agg = aggregate_kernels(kernels, cs)

    son_part = 0.0
    for a in range(K):
        for b in range(K):
            if a == b:
                continue
            r_term = R_agg[a, b] / (n_a[a] * n_a[b]) * math.sqrt(
                n_a[b] ** 2 * sigma[a] ** 2 / m_pa[a] + n_a[a] ** 2 * sigma[b] ** 2 / m_pa[b])
            s_term = S_agg[pi[a], pi[b]] / (m_pa[a] * m_pa[b]) * math.sqrt(
                m_pa[b] ** 2 * sigma[a] ** 2 / n_a[a] + m_pa[a] ** 2 * sigma[b] ** 2 / n_a[b])
            son_part += r_term + s_term
    delta0, delta1 = _delta_constants(Dtilde)
    penalty = 0.5 * theta * (float((dlt ** 2 / n_a).sum()) + float((dlt ** 2 / m_pa).sum()))
    spread = delta1 ** 2 * cs.m / theta
    imbalance = delta0 * (float(np.abs(dlt).sum()) - float(np.abs(dlt).max()))
    rhs = lam * son_part + penalty + spread + imbalance
    return float(rhs / mono.delta)


def _pair_family(values: np.ndarray, caps: np.ndarray, labels: np.ndarray, family: str,
                 verdict: Part2Verdict, atol: float) -> None:
    """对同簇的 (i, i′)，检查 values[i, i′] ≤ caps[i, i′]"""
    same = (labels[:, None] == labels[None, :]) & ~np.eye(labels.size, dtype=bool)
    if not same.any():
        verdict.slacks[family] = math.inf
        return
    slack = caps - values
    verdict.slacks[family] = float(slack[same].min())
    bad = same & (slack < -atol)
    for i, j in zip(*np.nonzero(bad)):
        if i < j:
            verdict.violations.append({"family": family, "pair": [int(i), int(j)],
                                       "lhs": float(values[i, j]), "rhs": float(caps[i, j])})


def theorem3_part2_check(D: CostLike, cs: ClusterStructure, kernels: KernelWeights, lam: float, theta: float,
                         a: float, c: float, d_const: float, atol: float = 1e-12) -> Part2Verdict:
    """
    块结构 X_ij = X_{α,β} 的充分条件，逐族检查同簇点对：
      cost_rows / cost_cols：切片差范数 ≤ 2aλ·簇规模·核值
      mass_rows / mass_cols：|μ_i − μ_i′| ≤ cλ·n_α·R_ii′/(θ√n)，列侧对称
      kernel_rows / kernel_cols：核聚合差 ≤ d·簇规模·核值
    核值为 0 的同簇点对只有左侧为 0 时才满足，违例逐对列出。
    """
    if min(a, c, d_const) <= 0 or 2 * a + c + d_const > 1 + 1e-15:
        raise ValidationError("need a, c, d > 0 and 2a + c + d <= 1")
    if not theta > 0:
        raise ValidationError(f"theta must be > 0, got {theta!r}")
    C = _entries(D)
    mu, nu = cs.mu, cs.nu
    m, n = C.shape
    R, S = kernels.R, kernels.S
    n_of_row = cs.sizes_s[cs.source_labels].astype(np.float64)
    m_of_col = cs.sizes_t[cs.target_labels].astype(np.float64)
    verdict = Part2Verdict(True, {})

    row_diff = np.sqrt(((C[:, None, :] - C[None, :, :]) ** 2).sum(axis=2))
    col_diff = np.sqrt(((C.T[:, None, :] - C.T[None, :, :]) ** 2).sum(axis=2))
    _pair_family(row_diff, 2 * a * lam * n_of_row[:, None] * R, cs.source_labels, "cost_rows", verdict, atol)
    _pair_family(col_diff, 2 * a * lam * m_of_col[:, None] * S, cs.target_labels, "cost_cols", verdict, atol)

    _pair_family(np.abs(mu[:, None] - mu[None, :]), c * lam * n_of_row[:, None] * R / (theta * math.sqrt(n)),
                 cs.source_labels, "mass_rows", verdict, atol)
    _pair_family(np.abs(nu[:, None] - nu[None, :]), c * lam * m_of_col[:, None] * S / (theta * math.sqrt(m)),
                 cs.target_labels, "mass_cols", verdict, atol)

    _pair_family(_kernel_aggregate_gap(R, cs.source_labels, cs.sizes_t[cs.association]),
                 d_const * n_of_row[:, None] * R, cs.source_labels, "kernel_rows", verdict, atol)
    inv = np.argsort(cs.association)
    _pair_family(_kernel_aggregate_gap(S, cs.target_labels, cs.sizes_s[inv]),
                 d_const * m_of_col[:, None] * S, cs.target_labels, "kernel_cols", verdict, atol)

    verdict.holds = not verdict.violations
    if not verdict.holds:
        _cert_logger.info(f"📐 块结构充分条件不成立: {len(verdict.violations)} 处违例")
    return verdict


def _kernel_aggregate_gap(W: np.ndarray, labels: np.ndarray, partner_sizes: np.ndarray) -> np.ndarray:
    """
    对同簇 (i, i′)：t_{α′} = (W_{i,α′} − W_{i′,α′})/√(s_α + s_α′)，α′ ≠ α，
    返回 √((Σ t)² + Σ t²)。W_{i,α′} = Σ_{k∈α′} W_{ik}；s 为关联簇在另一侧的规模。
    """
    K = int(labels.max()) + 1
    agg = W @ np.eye(K)[labels]
    size = labels.size
    out = np.zeros((size, size))
    for i in range(size):
        a = labels[i]
        others = np.array([b for b in range(K) if b != a], dtype=np.int64)
        if others.size == 0:
            continue
        denom = np.sqrt(partner_sizes[a] + partner_sizes[others])
        t = (agg[i, others][None, :] - agg[:, others]) / denom[None, :]
        out[i] = np.sqrt(t.sum(axis=1) ** 2 + (t ** 2).sum(axis=1))
    return out


def certify(D: CostLike, cs: ClusterStructure, lam: float, R_mode: int = 1,
            kernels: Optional[KernelWeights] = None, theta: Optional[float] = None,
            centers: Optional[Tuple[np.ndarray, np.ndarray, float, int]] = None, C: float = 1.0,
            a: float = 0.25, c: float = 0.25, d_const: float = 0.25) -> CertificateReport:
    """
    汇总全部证书。
    簇规模不等时，λ 窗口按最小簇规模计算并在 notes 中说明；
    centers = (源中心, 目标中心, 噪声标准差, 每簇样本数) 时给出中心条件比值；
    kernels 与 theta 同时给出时计算一般规模误差界与块结构充分条件。
    """
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")
    if cs.equal_sizes:
        report = _block_recovery_report(D, cs, lam, R_mode, int(cs.sizes_s[0]))
    else:
        size = int(min(cs.sizes_s.min(), cs.sizes_t.min()))
        report = _block_recovery_report(D, cs, lam, R_mode, size)
        report.notes.append(f"unequal cluster sizes; lambda window uses the smallest cluster ({size})")
    if not cs.feasible:
        report.notes.append("cluster masses differ across the association")
    if centers is not None:
        centers_s, centers_t, noise, per_cluster = centers
        report.thm1_ratio = theorem1_ratio(centers_s, centers_t, noise, per_cluster, cs.K, C)
    if kernels is not None and theta is not None:
        report.thm3_bound = theorem3_bound(D, cs, lam, theta, kernels)
        report.thm3_part2 = theorem3_part2_check(D, cs, kernels, lam, theta, a, c, d_const)
    return report
