"""模板函数 φ_{ρ,ζ,η}(p,q) = ⟨p,ζ⟩ + ⟨q,η⟩ + ρ‖p−q‖₂ 及其闭式近端算子。

符号约定：ρ 始终表示模板 / SON 系数；求解器的加速常数另名为 rho_acc。
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.numerics._kernels import pair_prox_into, shrink_factor


def _vec(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())


def _same_length(*vectors: np.ndarray) -> None:
    sizes = {v.size for v in vectors}
    if len(sizes) > 1:
        raise DimensionError(f"vector length mismatch: {sorted(sizes)}")


@dataclass(frozen=True)
class PairPoint:
    """模板函数的参数对 (p, q)，两者等长"""
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p, q = _vec(self.p), _vec(self.q)
        _same_length(p, q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __iter__(self):
        yield self.p
        yield self.q

    def concat(self) -> np.ndarray:
        return np.concatenate([self.p, self.q])


def template_value(rho: float, zeta, eta, pt: PairPoint) -> float:
    zeta, eta = _vec(zeta), _vec(eta)
    _same_length(zeta, eta, pt.p)
    return float(pt.p @ zeta + pt.q @ eta + rho * np.linalg.norm(pt.p - pt.q))


def shrink(lam: float, c) -> np.ndarray:
    """块软阈值：λ‖·‖₂ 的近端算子；c = 0 时返回 0"""
    if lam < 0:
        raise ValidationError(f"shrink threshold must be >= 0, got {lam!r}")
    c = _vec(c)
    return shrink_factor(float(lam), c) * c


def pair_prox(lam: float, a, b) -> PairPoint:
    """((a+b)/2 + shrink(λ,(a−b)/2), (a+b)/2 − shrink(λ,(a−b)/2))"""
    if lam < 0:
        raise ValidationError(f"pair_prox threshold must be >= 0, got {lam!r}")
    a, b = _vec(a), _vec(b)
    _same_length(a, b)
    x, y = np.empty_like(a), np.empty_like(b)
    pair_prox_into(float(lam), a, b, x, y)
    return PairPoint(x, y)


def template_prox(step: float, rho: float, zeta, eta, pt: PairPoint) -> PairPoint:
    """argmin_{x,y} (1/2·step)(‖x−p‖² + ‖y−q‖²) + φ_{ρ,ζ,η}(x,y) = pair_prox(step·ρ, p − step·ζ, q − step·η)"""
    if not step > 0:
        raise ValidationError(f"step must be > 0, got {step!r}")
    if rho < 0:
        raise ValidationError(f"rho must be >= 0, got {rho!r}")
    zeta, eta = _vec(zeta), _vec(eta)
    _same_length(zeta, eta, pt.p)
    return pair_prox(step * rho, pt.p - step * zeta, pt.q - step * eta)
