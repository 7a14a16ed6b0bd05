"""Test random streams, Brownian increments and Euler-Maruyama."""

import numpy as np
import pytest

from src.common.errors import ConfigError, SimulationBlowUp
from src.problems import BsbParams, make_bsb
from src.simulate import (
    PathBatch,
    SeedDomain,
    TimeGrid,
    aggregate_increments,
    euler_x_step,
    euler_y_step,
    fit_log_slope,
    iter_forward_chunks,
    roll_forward,
    sample_increments,
    simulate_exact_pathbatch,
    simulate_forward_only,
    stream_for,
    terminal_strong_error,
)


def test_streams_are_reproducible_and_disjoint():
    a = stream_for(7, SeedDomain.TRAIN).generator(3).standard_normal(5)
    b = stream_for(7, SeedDomain.TRAIN).generator(3).standard_normal(5)
    c = stream_for(7, SeedDomain.VERIFY).generator(3).standard_normal(5)
    d = stream_for(7, SeedDomain.TRAIN).substream(1).generator(3).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    print("✅ Streams are reproducible and disjoint!")


def test_increments_independent_of_chunking_and_workers():
    grid = TimeGrid(n_steps=6, horizon=1.0)
    stream = stream_for(1, SeedDomain.TRAIN)
    whole = sample_increments(20, grid, 3, stream)
    parts = np.concatenate([
        sample_increments(8, grid, 3, stream, path_offset=0),
        sample_increments(12, grid, 3, stream, path_offset=8),
    ])
    threaded = sample_increments(20, grid, 3, stream, workers=4)
    assert np.array_equal(whole, parts)
    assert np.array_equal(whole, threaded)
    print("✅ Increments do not depend on chunking or workers!")


def test_increment_statistics():
    grid = TimeGrid(n_steps=4, horizon=1.0)
    dw = sample_increments(4000, grid, 5, stream_for(0, SeedDomain.DIAGNOSTIC))
    assert dw.shape == (4000, 4, 5)
    assert abs(dw.mean()) < 0.01
    assert dw.var() == pytest.approx(grid.dt, rel=0.05)
    print("✅ Increments are N(0, dt)!")


def test_aggregation():
    grid = TimeGrid(n_steps=12, horizon=1.0)
    fine = sample_increments(3, grid, 2, stream_for(0, SeedDomain.TRAIN))
    coarse = aggregate_increments(fine, 3)
    assert coarse.shape == (3, 3, 2)
    assert np.allclose(coarse[:, 0], fine[:, :4].sum(axis=1))
    assert np.allclose(coarse.sum(axis=1), fine.sum(axis=1))
    with pytest.raises(ValueError):
        aggregate_increments(fine, 5)
    print("✅ Aggregation works!")


def test_euler_steps_for_bsb():
    """X_{n+1} = X + sigma X dW and the Y step with the driver."""
    problem = make_bsb(BsbParams(d=3))
    x = np.array([[1.0, 0.5, 1.0]])
    y = np.array([2.0])
    z = np.array([[0.1, 0.2, 0.3]])
    dw = np.array([[0.01, -0.02, 0.03]])
    dt = 0.1

    x_next = euler_x_step(problem, 0.0, x, y, z, dw, dt)
    assert np.allclose(x_next, x + 0.4 * x * dw)

    y_next = euler_y_step(problem, 0.0, x, y, z, dw, dt)
    phi = 0.05 * (2.0 - np.sum(z * x))
    assert y_next[0] == pytest.approx(2.0 + phi * dt + np.sum(z * 0.4 * x * dw))
    print("✅ Euler steps are correct!")


def test_blow_up_reports_path():
    problem = make_bsb(BsbParams(d=2))
    x = np.array([[1.0, 1.0], [np.inf, 1.0]])
    with pytest.raises(SimulationBlowUp) as info:
        euler_x_step(problem, 0.0, x, np.zeros(2), np.zeros((2, 2)), np.zeros((2, 2)), 0.1, station=4)
    assert info.value.path == 1
    assert info.value.station == 5
    print("✅ Blow-ups carry diagnostics!")


def test_coupled_problem_rejected_for_forward_only():
    problem = make_bsb(BsbParams(d=2))
    coupled = type(problem)(**{**problem.__dict__, "is_decoupled": False})
    grid = TimeGrid(n_steps=2, horizon=1.0)
    with pytest.raises(ConfigError):
        roll_forward(coupled, coupled.initial_states(1), np.zeros((1, 2, 2)), grid)
    print("✅ Coupled problems are rejected!")


def test_forward_chunks_match_single_batch():
    problem = make_bsb(BsbParams(d=3))
    grid = TimeGrid(n_steps=5, horizon=1.0)
    stream = stream_for(2, SeedDomain.VERIFY)
    whole = simulate_forward_only(problem, grid, stream, 7)
    chunks = np.concatenate([batch.X for _, batch in iter_forward_chunks(problem, grid, stream, 7, chunk=3)])
    assert np.array_equal(whole.X, chunks)
    assert whole.is_finite()
    print("✅ Forward chunks match a single batch!")


def test_exact_pathbatch_and_dump(tmp_path):
    problem = make_bsb(BsbParams(d=2))
    grid = TimeGrid(n_steps=4, horizon=1.0)
    batch = simulate_exact_pathbatch(problem, grid, stream_for(0, SeedDomain.VERIFY), 3)
    assert np.allclose(batch.Y[:, 2], problem.exact_u(grid.time(2), batch.X[:, 2]))

    path = batch.to_csv(tmp_path / "paths.csv", header_comment="seed=0")
    lines = path.read_text().splitlines()
    assert lines[0] == "# seed=0"
    assert lines[1] == "path_id,n,t,X_1,X_2,Y,Z_1,Z_2"
    assert len(lines) == 2 + 3 * 5
    assert lines[2].startswith("0,0,0,1,")

    with pytest.raises(ValueError):
        PathBatch(grid=grid, dW=batch.dW, X=batch.X[:, :-1])
    print("✅ Exact path batches and dumps work!")


def test_fit_log_slope():
    ns = np.array([12, 48, 192, 768])
    assert fit_log_slope(ns, 3.0 * ns ** -0.5) == pytest.approx(-0.5)
    print("✅ Log-slope fit works!")


def test_strong_order_one_half():
    """E|Y_N - g(X_N)| of the exact-Z recursion decays like N^{-1/2}."""
    problem = make_bsb(BsbParams(d=10))
    n_list = [12, 48, 192, 768]
    errors = terminal_strong_error(problem, n_list, 2000, stream_for(0, SeedDomain.DIAGNOSTIC))
    assert all(errors[a] > errors[b] for a, b in zip(n_list, n_list[1:]))
    slope = fit_log_slope(n_list, [errors[n] for n in n_list])
    assert -0.65 <= slope <= -0.35
    print(f"✅ Strong order: slope {slope:.3f}")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    test_streams_are_reproducible_and_disjoint()
    test_increments_independent_of_chunking_and_workers()
    test_increment_statistics()
    test_aggregation()
    test_euler_steps_for_bsb()
    test_blow_up_reports_path()
    test_coupled_problem_rejected_for_forward_only()
    test_forward_chunks_match_single_batch()
    with tempfile.TemporaryDirectory() as tmp:
        test_exact_pathbatch_and_dump(Path(tmp))
    test_fit_log_slope()
    test_strong_order_one_half()

    print("\n" + "=" * 70)
    print("ALL SIMULATE TESTS PASSED! ✅")
    print("=" * 70)
