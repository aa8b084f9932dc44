import time

import numpy as np
import pytest

from son_ot.core import Coupling, ProblemSpec, SinkhornConfig, SolverConfig, UnsupportedSizeError
from son_ot.core.operators import BaseTransportMethod, ITransportMethod, MethodResult
from son_ot.operators import ExactMethod, MethodRegistry, SinkhornMethod, SonMethod, default_registry
from tests.conftest import random_spec


class IndependentMethod(BaseTransportMethod):
    name = "independent"

    def run(self, spec: ProblemSpec, ctx=None) -> MethodResult:
        start = time.time()
        plan = spec.marginals.independent_coupling()
        return MethodResult(self.name, Coupling.from_plan(plan, spec.marginals),
                            float((spec.cost.entries * plan).sum()), time.time() - start)


class TestRegistry:
    def test_default_names(self):
        assert default_registry.names() == ["son", "sinkhorn", "exact"]

    def test_create_passes_arguments(self):
        cfg = SolverConfig(epochs=3)
        method = MethodRegistry().create("son", cfg)
        assert isinstance(method, SonMethod) and method.cfg is cfg

    def test_unknown_name(self):
        with pytest.raises(KeyError, match="已注册"):
            MethodRegistry().create("magic")

    def test_register_custom(self, rng):
        registry = MethodRegistry()
        registry.register("independent", IndependentMethod)
        assert "independent" in registry.names()
        assert "independent" not in default_registry.names()
        result = registry.create("independent").run(random_spec(rng, 3, 4))
        assert result.method == "independent"
        assert result.coupling.feasibility_gap <= 1e-12

    def test_base_requires_run(self, rng):
        with pytest.raises(NotImplementedError):
            BaseTransportMethod().run(random_spec(rng, 2, 2))


class TestMethods:
    def test_protocol(self):
        for method in (SonMethod(), SinkhornMethod(), ExactMethod()):
            assert isinstance(method, ITransportMethod)

    def test_son_extras(self, rng):
        spec = random_spec(rng, 3, 3)
        result = SonMethod(SolverConfig(epochs=4, log_every=0)).run(spec, {"run_id": "m1"})
        assert result.extra["iterations"] == 4 * (3 * 2 * 2 + 6)
        assert result.extra["transport_cost"] == pytest.approx(float((spec.cost.entries * result.coupling.plan).sum()))

    def test_sinkhorn_extras(self, rng):
        spec = random_spec(rng, 3, 3)
        result = SinkhornMethod(SinkhornConfig(epsilon=1.0)).run(spec)
        assert result.extra["converged"]
        assert result.extra["min_entry"] > 0

    def test_exact_is_lower_bound_on_transport_cost(self, rng):
        spec = random_spec(rng, 4, 4)
        exact = ExactMethod().run(spec)
        ent = SinkhornMethod(SinkhornConfig(epsilon=0.5)).run(spec)
        assert exact.extra["certified"]
        assert exact.extra["transport_cost"] <= ent.extra["transport_cost"] + 1e-9
        np.testing.assert_allclose(exact.coupling.plan.sum(axis=1), spec.marginals.mu, atol=1e-9)

    def test_exact_size_cap(self, rng):
        with pytest.raises(UnsupportedSizeError):
            ExactMethod().run(random_spec(rng, 21, 20))
