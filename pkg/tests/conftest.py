"""共享测试夹具"""
import json
import os

import numpy as np
import pytest

from son_ot.connectors.sources import planted_block_instance
from son_ot.core import CostMatrix, KernelWeights, Marginals, ProblemSpec


def random_kernel(rng: np.random.Generator, size: int) -> np.ndarray:
    K = rng.random((size, size))
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 0.0)
    return K


def random_spec(rng: np.random.Generator, m: int, n: int, lam: float = 1.0, theta=None) -> ProblemSpec:
    mu = rng.random(m) + 0.1
    nu = rng.random(n) + 0.1
    nu *= mu.sum() / nu.sum()
    return ProblemSpec(
        CostMatrix(rng.random((m, n))),
        Marginals(mu, nu),
        KernelWeights(random_kernel(rng, m), random_kernel(rng, n)),
        lam,
        theta,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tiny_spec():
    """2×2，D 为反对角，R = S = 反对角 1，λ = 1"""
    ones = np.array([[0.0, 1.0], [1.0, 0.0]])
    return ProblemSpec(CostMatrix(ones), Marginals.uniform(2, 2), KernelWeights(ones, ones), 1.0)


@pytest.fixture(scope="session")
def planted():
    return planted_block_instance(seed=0)


@pytest.fixture
def write_config(tmp_path):
    """把配置字典写成 JSON 文件，output_dir 默认指向 tmp_path/out"""
    def _write(cfg: dict, name: str = "config.json") -> str:
        cfg = dict(cfg)
        cfg.setdefault("output_dir", str(tmp_path / "out"))
        path = tmp_path / name
        path.write_text(json.dumps(cfg), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def out_dir(tmp_path):
    return os.path.join(str(tmp_path), "out")
