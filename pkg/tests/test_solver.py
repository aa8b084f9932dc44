import io
import json

import numpy as np
import pytest

from son_ot.core import (
    CostMatrix,
    Coupling,
    DimensionError,
    DivergenceError,
    KernelWeights,
    Marginals,
    ProblemSpec,
    SamplingScheme,
    SolverConfig,
    TermIndex,
    ValidationError,
    relaxed_objective,
)
from son_ot.core.hooks import CompositeSolverHooks, JsonFileReportHooks, StderrProgressHooks
from son_ot.impl import (
    SonSolver,
    draw_terms,
    jit_restrict,
    jit_scale,
    round_to_feasible,
    sample_term,
    sample_term_index,
    solve,
)
from son_ot.numerics import project_simplex
from tests.conftest import random_spec

QUIET = dict(log_every=0)


class RecordingHooks:
    def __init__(self):
        self.events = []

    def on_solve_start(self, rid, info):
        self.events.append(("start", rid, info["m"], info["n"]))

    def on_epoch(self, rid, epoch, obj, gap):
        self.events.append(("epoch", epoch))

    def on_solve_end(self, rid, ok, err=None):
        self.events.append(("end", ok))


def _project_transport(Y, marg, sweeps=20):
    # Dykstra 交替投影到行 / 列柱面单纯形的交集
    X = Y.copy()
    p = np.zeros_like(X)
    q = np.zeros_like(X)
    for _ in range(sweeps):
        Z = X + p
        R = np.vstack([project_simplex(Z[i], marg.mu[i]) for i in range(X.shape[0])])
        p = Z - R
        Z = R + q
        X = np.column_stack([project_simplex(Z[:, j], marg.nu[j]) for j in range(X.shape[1])])
        q = Z - X
    return X


def _projected_subgradient(D, marg, epochs):
    step = 0.5 / D.max()
    X = marg.independent_coupling()
    for _ in range(epochs):
        X = _project_transport(X - step * D, marg)
    return round_to_feasible(np.maximum(X, 0.0), marg).plan


class TestSolve:
    def test_single_entry(self):
        spec = ProblemSpec(CostMatrix([[1.0]]), Marginals([2.0], [2.0]), KernelWeights.zeros(1, 1), 1.0)
        report = solve(spec, SolverConfig(epochs=3, **QUIET))
        np.testing.assert_allclose(report.coupling.plan, [[2.0]])
        assert report.iterations == 3 * 2

    def test_zero_epochs_returns_start(self, rng):
        spec = random_spec(rng, 3, 4)
        X0 = Coupling.from_plan(spec.marginals.independent_coupling(), spec.marginals)
        report = solve(spec, SolverConfig(epochs=0, **QUIET), X0=X0)
        assert report.coupling is X0
        assert report.objective_trace == ()
        assert report.iterations == 0

    def test_seed_determinism(self, rng):
        spec = random_spec(rng, 4, 3)
        cfg = SolverConfig(epochs=5, seed=11, **QUIET)
        a, b = solve(spec, cfg), solve(spec, cfg)
        assert a.objective_trace == b.objective_trace
        np.testing.assert_array_equal(a.coupling.plan, b.coupling.plan)

    def test_different_seeds_differ(self, rng):
        spec = random_spec(rng, 4, 4)
        a = solve(spec, SolverConfig(epochs=3, seed=1, **QUIET))
        b = solve(spec, SolverConfig(epochs=3, seed=2, **QUIET))
        assert a.objective_trace != b.objective_trace

    def test_trace_and_envelope(self, rng):
        spec = random_spec(rng, 4, 4)
        report = solve(spec, SolverConfig(epochs=8, **QUIET))
        epochs = [row[0] for row in report.objective_trace]
        assert epochs == list(range(1, 9))
        env = report.best_envelope
        assert np.all(np.diff(env) <= 0)
        assert report.iterations == 8 * (spec.num_pair_terms + spec.num_constraints)

    def test_rounded_output_is_feasible(self, rng):
        spec = random_spec(rng, 5, 4)
        report = solve(spec, SolverConfig(epochs=4, **QUIET))
        assert report.coupling.feasibility_gap <= 1e-12
        assert report.support_pattern.shape == (5, 4)

    def test_memory_consistency(self, rng):
        spec = random_spec(rng, 4, 5)
        solver = SonSolver(spec, SolverConfig(epochs=6, jit=True, **QUIET))
        solver.run()
        assert solver.memory.check_consistency()
        assert solver.memory.off_support_is_zero()

    def test_memory_consistency_without_jit(self, rng):
        spec = random_spec(rng, 3, 3)
        solver = SonSolver(spec, SolverConfig(epochs=6, jit=False, **QUIET))
        solver.run()
        assert solver.memory.check_consistency()

    @pytest.mark.parametrize("jit", [True, False])
    def test_memory_total_scale(self, rng, jit):
        class StartInfo:
            info = None

            def on_solve_start(self, rid, info):
                self.info = info

        spec = random_spec(rng, 3, 4)
        hooks = StartInfo()
        solve(spec, SolverConfig(epochs=1, jit=jit, **QUIET), hooks=hooks)
        expected = hooks.info["alpha"] * (jit_scale(3, 4) if jit else 1.0)
        assert hooks.info["alpha_scale"] == pytest.approx(expected)

    def test_memory_vector_support(self, rng):
        spec = random_spec(rng, 3, 4)
        solver = SonSolver(spec, SolverConfig(epochs=4, **QUIET))
        solver.run()
        t = TermIndex.row_pair(0, 2)
        v = solver.memory.vector(t)
        assert not v[~t.support(3, 4)].any()

    def test_snapshots(self, rng):
        spec = random_spec(rng, 3, 3)
        report = solve(spec, SolverConfig(epochs=4, snapshot_epochs=(1, 3), **QUIET))
        assert sorted(report.support_snapshots) == [1, 3]
        assert report.support_snapshots[3].shape == (3, 3)

    def test_hooks_called(self, rng):
        spec = random_spec(rng, 2, 3)
        hooks = RecordingHooks()
        solve(spec, SolverConfig(epochs=3), hooks=hooks, run_id="r1")
        assert hooks.events[0] == ("start", "r1", 2, 3)
        assert [e for e in hooks.events if e[0] == "epoch"] == [("epoch", 1), ("epoch", 2), ("epoch", 3)]
        assert hooks.events[-1] == ("end", True)

    def test_progress_lines(self, rng):
        spec = random_spec(rng, 2, 2)
        stream = io.StringIO()
        solve(spec, SolverConfig(epochs=4), hooks=StderrProgressHooks(2, stream))
        lines = stream.getvalue().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("epoch=2 obj=") and " gap=" in lines[0]
        assert lines[1].startswith("epoch=4 ")

    def test_default_hooks(self, rng, capsys):
        spec = random_spec(rng, 3, 3)
        report = solve(spec, SolverConfig(epochs=2, log_every=1))
        assert len(report.objective_trace) == 2
        lines = capsys.readouterr().err.splitlines()
        assert [line.split()[0] for line in lines if line.startswith("epoch=")] == ["epoch=1", "epoch=2"]

    def test_partial_hooks(self, rng):
        class EpochOnly:
            def __init__(self):
                self.epochs = []

            def on_epoch(self, rid, epoch, obj, gap):
                self.epochs.append(epoch)

        hooks = EpochOnly()
        report = solve(random_spec(rng, 2, 3), SolverConfig(epochs=3, **QUIET), hooks=hooks)
        assert hooks.epochs == [1, 2, 3]
        assert len(report.objective_trace) == 3

    def test_zero_lambda_matches_projected_subgradient(self):
        rng = np.random.default_rng(17)
        epochs = 200
        for _ in range(3):
            D = rng.random((4, 4)) + 0.5
            marg = Marginals.uniform(4, 4)
            spec = ProblemSpec(CostMatrix(D), marg, KernelWeights.zeros(4, 4), 0.0)
            report = solve(spec, SolverConfig(epochs=epochs, **QUIET))
            son = float((D * report.coupling.plan).sum())
            ref = float((D * _projected_subgradient(D, marg, epochs)).sum())
            assert abs(son - ref) <= 0.01 * ref

    def test_divergence(self):
        rng = np.random.default_rng(3)
        spec = ProblemSpec(CostMatrix(1e5 * (rng.random((3, 3)) + 1.0)), Marginals.uniform(3, 3),
                           KernelWeights.constant(3, 3), 1.0)
        with pytest.raises(DivergenceError) as err:
            solve(spec, SolverConfig(step=1e308, epochs=2, **QUIET))
        assert err.value.iteration >= 1
        assert "smaller step" in str(err.value)

    def test_composite_hooks_and_run_report(self, tmp_path):
        rng = np.random.default_rng(3)
        spec = ProblemSpec(CostMatrix(1e5 * (rng.random((3, 3)) + 1.0)), Marginals.uniform(3, 3),
                           KernelWeights.constant(3, 3), 1.0)
        recorder = RecordingHooks()
        hooks = CompositeSolverHooks([recorder, JsonFileReportHooks(str(tmp_path)), None])
        with pytest.raises(DivergenceError):
            solve(spec, SolverConfig(step=1e308, epochs=2, **QUIET), hooks=hooks, run_id="boom")
        assert recorder.events[-1] == ("end", False)
        with open(tmp_path / "boom" / "run.json", encoding="utf-8") as f:
            doc = json.load(f)
        assert doc["status"] == "failed" and "smaller step" in doc["error"]
        assert doc["info"]["m"] == 3

    def test_bad_start_shape(self, rng):
        spec = random_spec(rng, 3, 3)
        with pytest.raises(DimensionError):
            solve(spec, SolverConfig(epochs=1, **QUIET), X0=np.zeros((2, 3)))

    def test_relaxed_mode(self, rng):
        spec = random_spec(rng, 3, 4, lam=0.5, theta=5.0)
        solver = SonSolver(spec, SolverConfig(epochs=5, relaxed=True, **QUIET))
        report = solver.run()
        assert report.objective_trace[-1][1] == pytest.approx(relaxed_objective(spec, solver.X))

    def test_relaxed_requires_theta(self, rng):
        spec = random_spec(rng, 3, 3)
        with pytest.raises(ValidationError):
            SonSolver(spec, SolverConfig(relaxed=True))

    def test_resolved_defaults(self, rng):
        spec = random_spec(rng, 3, 4, lam=2.0)
        cfg = SolverConfig().resolve(spec)
        expected_step = 0.5 / (2.0 * spec.kernels.max_entry * np.sqrt(7) + spec.cost.entries.max())
        assert cfg.step == pytest.approx(expected_step)
        assert cfg.alpha == pytest.approx(1.0 / (6 + 12 + 7))
        assert cfg.support_threshold == pytest.approx(1e-3 * spec.marginals.total / 12)


class TestJit:
    def test_scale_two_by_two(self):
        assert jit_scale(2, 2) == pytest.approx(4 / 3)

    def test_full_support(self, rng):
        total = rng.normal(size=(2, 2))
        np.testing.assert_allclose(jit_restrict(total, np.ones((2, 2), bool), 2, 2), total * 4 / 3)

    def test_partial_support(self, rng):
        total = rng.normal(size=(3, 2))
        out = jit_restrict(total, [(0, 1), (2, 0)], 3, 2)
        scale = jit_scale(3, 2)
        assert out[0, 1] == pytest.approx(scale * total[0, 1])
        assert out[2, 0] == pytest.approx(scale * total[2, 0])
        assert np.count_nonzero(out) == 2

    def test_zero_total(self):
        assert not jit_restrict(np.zeros((2, 3)), np.ones((2, 3), bool), 2, 3).any()

    def test_empty_support(self):
        with pytest.raises(ValidationError):
            jit_restrict(np.ones((2, 2)), np.zeros((2, 2), bool), 2, 2)


class TestRounding:
    def test_feasible_unchanged(self, rng):
        marg = Marginals.uniform(3, 4)
        X = marg.independent_coupling()
        np.testing.assert_allclose(round_to_feasible(X, marg).plan, X, atol=1e-15)

    def test_zero_plan(self):
        marg = Marginals([0.2, 0.8], [0.5, 0.5])
        np.testing.assert_allclose(round_to_feasible(np.zeros((2, 2)), marg).plan, marg.independent_coupling())

    def test_doubled_plan(self):
        marg = Marginals.uniform(2, 2)
        X = np.array([[0.5, 0.0], [0.0, 0.5]])
        out = round_to_feasible(2 * X, marg)
        np.testing.assert_allclose(out.plan, X)
        assert out.feasibility_gap <= 1e-12

    def test_random_plans_become_feasible(self, rng):
        for _ in range(20):
            m, n = rng.integers(1, 7, size=2)
            marg = Marginals.uniform(int(m), int(n))
            out = round_to_feasible(rng.random((m, n)) * rng.uniform(0.1, 3), marg)
            assert out.feasibility_gap <= 1e-12
            assert np.all(out.plan >= 0)

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            round_to_feasible(np.array([[-0.1, 1.0]]), Marginals([0.9], [0.45, 0.45]))


class TestSampling:
    def test_no_constraints(self, rng):
        draws = [sample_term(rng, SamplingScheme.uniform(), 5, 0) for _ in range(200)]
        assert max(draws) < 5

    def test_split_pools_zero(self, rng):
        draws = draw_terms(rng, SamplingScheme.split_pools(0.0), 8, 5, 1000)
        assert draws.min() >= 8

    def test_split_pools_one(self, rng):
        draws = draw_terms(rng, SamplingScheme.split_pools(1.0), 8, 5, 1000)
        assert draws.max() < 8

    def test_uniform_frequencies(self):
        rng = np.random.default_rng(7)
        N, K = 1_000_000, 13
        counts = np.bincount(draw_terms(rng, SamplingScheme.uniform(), 8, 5, N), minlength=K)
        expected = N / K
        sigma = np.sqrt(N * (1 / K) * (1 - 1 / K))
        assert np.all(np.abs(counts - expected) <= 5 * sigma)

    def test_split_pool_ratio(self):
        rng = np.random.default_rng(8)
        draws = draw_terms(rng, SamplingScheme.split_pools(0.3), 8, 5, 200_000)
        assert np.mean(draws < 8) == pytest.approx(0.3, abs=0.01)

    def test_index_form(self, rng):
        t = sample_term_index(rng, SamplingScheme.uniform(), 2, 2)
        assert isinstance(t, TermIndex)

    def test_seeded(self):
        a = draw_terms(np.random.default_rng(5), SamplingScheme.uniform(), 8, 5, 50)
        b = draw_terms(np.random.default_rng(5), SamplingScheme.uniform(), 8, 5, 50)
        np.testing.assert_array_equal(a, b)

    def test_empty_pool_rejected(self, rng):
        with pytest.raises(ValidationError):
            sample_term(rng, SamplingScheme.uniform(), 0, 0)
