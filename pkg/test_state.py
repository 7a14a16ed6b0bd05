"""Test the shared study state."""

from src.cli.config import RunConfig
from src.state import StudyState, create_initial_state


def test_initial_state():
    """Inputs are copied in and every accumulator starts empty."""
    config = RunConfig(dim=2)
    n_list = [12, 48]
    state = create_initial_state(config, n_list=n_list, output_dir="runs/demo")

    assert state["config"] is config
    assert state["n_list"] == [12, 48]
    assert state["n_list"] is not n_list
    assert state["architectures"] == []
    assert state["output_dir"] == "runs/demo"
    for key in ("adapters", "loss_histories", "reports", "y0_errors", "field_reports", "execution_metadata"):
        assert state[key] == {}
    for key in ("pending", "aborted", "table_rows", "artifacts", "errors"):
        assert state[key] == []
    print("✅ Initial state creation works!")


def test_comparison_state():
    state = create_initial_state(RunConfig(), architectures=["desk-fc", "desk-ms4"])
    assert state["architectures"] == ["desk-fc", "desk-ms4"]
    assert state["n_list"] == []
    assert state["output_dir"] is None
    print("✅ Comparison state works!")


def test_state_keys_are_declared():
    """Every key the factory fills is part of the TypedDict."""
    state = create_initial_state(RunConfig())
    assert set(state) == set(StudyState.__annotations__)
    print("✅ State keys are declared!")


if __name__ == "__main__":
    test_initial_state()
    test_comparison_state()
    test_state_keys_are_declared()

    print("\n" + "=" * 70)
    print("ALL STATE TESTS PASSED! ✅")
    print("=" * 70)
