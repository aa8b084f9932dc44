"""可行性修复：把非负方案修复到 B(μ, ν) 上（仅用于报告输出）"""
from __future__ import annotations

from typing import Union

import numpy as np

from son_ot.core.exceptions import DimensionError, ValidationError
from son_ot.core.types import Coupling, Marginals


def round_to_feasible(X: Union[Coupling, np.ndarray], marg: Marginals) -> Coupling:
    """
    先按行缩放使行和不超过 μ，再按列缩放使列和不超过 ν，
    最后把剩余质量按 outer(行缺口, 列缺口) / 总缺口 补齐。
    总质量为 0 时返回独立耦合。
    """
    plan = np.array(X.plan if isinstance(X, Coupling) else X, dtype=np.float64)
    if plan.shape != (marg.m, marg.n):
        raise DimensionError(f"plan shape {plan.shape} does not match marginals ({marg.m}, {marg.n})")
    if not np.all(np.isfinite(plan)) or np.any(plan < 0):
        raise ValidationError("round_to_feasible needs a finite nonnegative plan")
    if plan.sum() <= 0:
        return Coupling.from_plan(marg.independent_coupling(), marg)

    rows = plan.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        plan *= np.where(rows > marg.mu, marg.mu / rows, 1.0)[:, None]
    cols = plan.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        plan *= np.where(cols > marg.nu, marg.nu / cols, 1.0)[None, :]

    dr = np.maximum(marg.mu - plan.sum(axis=1), 0.0)
    dc = np.maximum(marg.nu - plan.sum(axis=0), 0.0)
    deficit = dr.sum()
    if deficit > 0:
        plan += np.outer(dr, dc) / deficit
    return Coupling.from_plan(plan, marg)
