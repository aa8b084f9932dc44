"""项抽样：均匀抽样，或先按概率 p_obj 选目标项池 / 约束池、再池内均匀。

返回值是 enumerate_terms 顺序下的扁平编号；0..P−1 为对项，P..P+Q−1 为约束项。
"""
from __future__ import annotations

import numpy as np

from son_ot.core.config import SamplingScheme
from son_ot.core.exceptions import ValidationError
from son_ot.core.types import TermIndex


def _check_counts(P: int, Q: int) -> None:
    if P < 0 or Q < 0 or P + Q < 1:
        raise ValidationError(f"need P + Q >= 1, got P={P}, Q={Q}")


def sample_term(rng: np.random.Generator, scheme: SamplingScheme, P: int, Q: int) -> int:
    """抽取一个项编号"""
    return int(draw_terms(rng, scheme, P, Q, 1)[0])


def sample_term_index(rng: np.random.Generator, scheme: SamplingScheme, m: int, n: int) -> TermIndex:
    P = m * (m - 1) + n * (n - 1)
    return TermIndex.from_flat(sample_term(rng, scheme, P, m + n), m, n)


def draw_terms(rng: np.random.Generator, scheme: SamplingScheme, P: int, Q: int, size: int) -> np.ndarray:
    """一次抽取 size 个项编号（一个 epoch 的调度）"""
    _check_counts(P, Q)
    scheme.validate()
    if scheme.kind == "uniform":
        return rng.integers(0, P + Q, size=size, dtype=np.int64)
    # 某个池为空时，全部落到另一个池
    if P == 0:
        return P + rng.integers(0, Q, size=size, dtype=np.int64)
    if Q == 0:
        return rng.integers(0, P, size=size, dtype=np.int64)
    pick_obj = rng.random(size) < scheme.p_obj
    obj = rng.integers(0, P, size=size, dtype=np.int64)
    con = P + rng.integers(0, Q, size=size, dtype=np.int64)
    return np.where(pick_obj, obj, con)
