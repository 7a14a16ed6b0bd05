"""Test schedules, the Adam optimizer and the trainer."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.adapters import NetworkSolutionAdapter, load_adapter
from src.common.artifacts import read_csv
from src.common.errors import CheckpointError
from src.networks import MlpConfig, init_params
from src.problems import BsbParams, make_bsb
from src.registry import load_builtin_presets
from src.schemes import SchemeConfig, SchemeName
from src.training import AdamState, Stage, TrainSchedule, Trainer, adam_step, geometric_schedule
from src.training.trainer import FINAL_CHECKPOINT, LOSS_LOG, checkpoint_name


def _setup(seed=0):
    problem = make_bsb(BsbParams(d=2))
    adapter = NetworkSolutionAdapter(init_params(MlpConfig(input_dim=3, hidden_layers=2, hidden_width=6), seed))
    scheme = SchemeConfig(scheme=SchemeName.S2, n_steps=4, batch=8)
    schedule = load_builtin_presets().build("smoke")
    return problem, adapter, scheme, schedule


def test_geometric_schedule():
    """Learning rates drop by the decay factor at each stage boundary."""
    schedule = geometric_schedule("demo", 1e-3, 0.1, 3, 2)
    assert schedule.total_steps == 6
    assert [schedule.lr_at(s) for s in range(6)] == pytest.approx([1e-3, 1e-3, 1e-4, 1e-4, 1e-5, 1e-5])
    assert [step for step, _ in schedule.iter_steps(3)] == [3, 4, 5]
    with pytest.raises(ValueError):
        schedule.lr_at(6)
    with pytest.raises(ValidationError):
        Stage(learning_rate=0.0, steps=1)
    print("✅ Geometric schedule works!")


def test_schedule_presets():
    registry = load_builtin_presets()
    full = registry.build("full")
    assert full.total_steps == 50000
    assert full.lr_at(0) == pytest.approx(1e-3)
    assert full.lr_at(49999) == pytest.approx(1e-7)
    assert registry.build("desk-bsb").total_steps == 3000
    assert isinstance(registry.build("smoke", steps_per_stage=1), TrainSchedule)
    print("✅ Schedule presets work!")


def test_adam_first_step():
    """The first bias-corrected step moves each coordinate by about lr * sign(g)."""
    params = [np.array([1.0, -2.0]), np.array([[0.5]])]
    grads = [np.array([0.3, -4.0]), np.array([[1e-3]])]
    state = AdamState.zeros_like(params)
    new, state = adam_step(params, grads, state, lr=0.01)
    assert state.step == 1
    assert np.allclose(new[0], [0.99, -1.99], atol=1e-7)
    assert np.allclose(new[1], [[0.49]], atol=1e-5)
    assert np.array_equal(params[0], [1.0, -2.0])
    print("✅ Adam first step works!")


def test_adam_state_round_trip():
    params = [np.ones(3), np.zeros((2, 2))]
    _, state = adam_step(params, [np.ones(3), np.ones((2, 2))], AdamState.zeros_like(params), lr=0.1)
    restored = AdamState.from_arrays(state.to_arrays(), params)
    assert restored.step == 1
    assert all(np.array_equal(a, b) for a, b in zip(restored.second_moment, state.second_moment))
    with pytest.raises(CheckpointError):
        AdamState.from_arrays({}, params)
    print("✅ Adam state survives checkpoints!")


def test_training_is_deterministic(tmp_path):
    """Same configs and seed give identical losses, parameters and loss logs."""
    problem, adapter, scheme, schedule = _setup()
    first = Trainer(problem, scheme, schedule, seed=3, output_dir=tmp_path / "a").train(adapter)
    second = Trainer(problem, scheme, schedule, seed=3, output_dir=tmp_path / "b").train(adapter)

    assert not first.aborted
    assert len(first.history) == schedule.total_steps
    assert [r.total for r in first.history] == [r.total for r in second.history]
    assert all(np.array_equal(a, b) for a, b in zip(first.adapter.parameters(), second.adapter.parameters()))
    assert (tmp_path / "a" / LOSS_LOG).read_bytes() == (tmp_path / "b" / LOSS_LOG).read_bytes()

    rows = read_csv(tmp_path / "a" / LOSS_LOG)
    assert [int(row["step"]) for row in rows] == list(range(schedule.total_steps))
    assert float(rows[-1]["lr"]) == pytest.approx(1e-4)
    assert (tmp_path / "a" / "metadata.json").exists()
    print("✅ Training is deterministic!")


def test_resume_replays_the_uninterrupted_run(tmp_path):
    problem, adapter, scheme, schedule = _setup()
    full = Trainer(problem, scheme, schedule, seed=1, output_dir=tmp_path / "full",
                   checkpoint_every=3).train(adapter)
    assert (tmp_path / "full" / checkpoint_name(3)).exists()

    resumed = Trainer(problem, scheme, schedule, seed=1, output_dir=tmp_path / "resumed").train(
        adapter, resume_from=tmp_path / "full" / checkpoint_name(3))
    assert [r.step for r in resumed.history] == [3, 4, 5]
    assert all(np.array_equal(a, b) for a, b in zip(full.adapter.parameters(), resumed.adapter.parameters()))

    loaded, metadata, _ = load_adapter(tmp_path / "resumed" / FINAL_CHECKPOINT)
    assert metadata["step"] == schedule.total_steps
    assert np.array_equal(loaded.parameters()[0], full.adapter.parameters()[0])

    with pytest.raises(CheckpointError):
        Trainer(problem, scheme, schedule, seed=2).train(adapter, resume_from=tmp_path / "full" / checkpoint_name(3))
    print("✅ Resume replays the original run!")


def test_numeric_abort_is_recorded(tmp_path):
    """A NaN parameter stops training at step 0 and is flagged in the checkpoint."""
    problem, adapter, scheme, schedule = _setup()
    broken = [p.copy() for p in adapter.parameters()]
    broken[0][:] = np.nan
    result = Trainer(problem, scheme, schedule, seed=0, output_dir=tmp_path).train(adapter.with_parameters(broken))

    assert result.aborted
    assert result.history == []
    assert result.metadata["abort"]["step"] == 0
    _, metadata, _ = load_adapter(tmp_path / FINAL_CHECKPOINT)
    assert metadata["aborted"] is True
    print("✅ Numeric aborts are recorded!")


def test_short_desk_training_reduces_the_loss():
    """100 Adam steps of the desk-fc network on the d=10 BSB problem."""
    registry = load_builtin_presets()
    problem = make_bsb(BsbParams(d=10))
    adapter = NetworkSolutionAdapter(init_params(registry.build("desk-fc"), seed=0))
    scheme = SchemeConfig(scheme=SchemeName.S2, n_steps=12, batch=32)
    schedule = geometric_schedule("short-desk", 1e-3, 0.1, 1, 100)

    result = Trainer(problem, scheme, schedule, seed=0, log_every=50).train(adapter)
    assert not result.aborted
    totals = [record.total for record in result.history]
    first, last = float(np.mean(totals[:10])), float(np.mean(totals[-10:]))
    assert last < first
    print(f"✅ Desk training reduces the loss ({first:.4e} -> {last:.4e})!")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    test_geometric_schedule()
    test_schedule_presets()
    test_adam_first_step()
    test_adam_state_round_trip()
    with tempfile.TemporaryDirectory() as tmp:
        test_training_is_deterministic(Path(tmp))
    with tempfile.TemporaryDirectory() as tmp:
        test_resume_replays_the_uninterrupted_run(Path(tmp))
    with tempfile.TemporaryDirectory() as tmp:
        test_numeric_abort_is_recorded(Path(tmp))
    test_short_desk_training_reduces_the_loss()

    print("\n" + "=" * 70)
    print("ALL TRAINING TESTS PASSED! ✅")
    print("=" * 70)
