"""Test solution adapters."""

import numpy as np
import pytest

from src.adapters import (
    DeepBsdeAdapter,
    ExactSolutionAdapter,
    NetworkSolutionAdapter,
    ScaledSolutionAdapter,
    create_adapter,
    load_adapter,
)
from src.autodiff import AdTape, grad_wrt_leaves, ops
from src.common.errors import AutodiffError, ConfigError
from src.networks import DeepBsdeConfig, MlpConfig, MscaleConfig, init_params
from src.problems import BsbParams, make_bsb


def _network(seed=0):
    return NetworkSolutionAdapter(init_params(MlpConfig(input_dim=3, hidden_layers=2, hidden_width=5), seed))


def test_exact_adapter():
    """Values and gradients come from the closed form, per-row times included."""
    problem = make_bsb(BsbParams(d=2))
    adapter = ExactSolutionAdapter(problem)
    x = np.array([[1.0, 0.5], [0.8, 1.2]])

    u, z = adapter.predict_with_grad(0.3, x)
    assert np.allclose(u, problem.exact_u(0.3, x))
    assert np.allclose(z, problem.exact_grad(0.3, x))

    u_rows, _ = adapter.predict_with_grad(np.array([0.0, 1.0]), x)
    assert u_rows[0] == pytest.approx(problem.exact_u(0.0, x[:1])[0])
    assert u_rows[1] == pytest.approx(problem.g(x[1:])[0])
    assert adapter.parameters() == []
    print("✅ Exact adapter works!")


def test_scaled_adapter():
    problem = make_bsb(BsbParams(d=2))
    adapter = create_adapter("scaled", inner=ExactSolutionAdapter(problem), factor=1.01)
    x = problem.initial_states(3)
    assert np.allclose(adapter.predict(0.0, x), 1.01 * problem.exact_u(0.0, x))
    _, z = adapter.predict_with_grad(0.0, x)
    assert np.allclose(z, 1.01 * problem.exact_grad(0.0, x))
    print("✅ Scaled adapter works!")


def test_network_adapter_binding():
    """Bound leaves receive gradients; with_parameters returns a new adapter."""
    adapter = _network()
    tape = AdTape()
    leaves = adapter.bind(tape)
    assert len(leaves) == len(adapter.parameters())

    u, _ = adapter.value_and_grad(tape, 0.5, np.array([[0.1, 0.2]]))
    grads = grad_wrt_leaves(ops.total_sum(u), leaves)
    assert all(g.shape == p.shape for g, p in zip(grads, adapter.parameters()))
    assert np.any(grads[-1] != 0.0)

    shifted = adapter.with_parameters([p + 1.0 for p in adapter.parameters()])
    assert shifted is not adapter
    assert not np.array_equal(shifted.parameters()[0], adapter.parameters()[0])
    with pytest.raises(ConfigError):
        adapter.with_parameters(adapter.parameters()[:-1])
    print("✅ Network adapter binding works!")


def test_batch_shape_is_checked():
    adapter = _network()
    with pytest.raises(AutodiffError):
        adapter.predict_with_grad(0.0, np.ones((2, 3)))
    with pytest.raises(AutodiffError):
        adapter.predict_with_grad(0.0, np.ones(2))
    print("✅ Batch shapes are checked!")


def test_deep_bsde_adapter_only_knows_t0():
    params = init_params(DeepBsdeConfig(dim=2, n_steps=3, hidden_layers=1, hidden_width=4, y0_init=1.5), seed=0)
    adapter = DeepBsdeAdapter(params)
    x = np.ones((4, 2))
    assert np.array_equal(adapter.predict(0.0, x), np.full(4, 1.5))
    _, z = adapter.predict_with_grad(0.0, x)
    assert np.allclose(z, params.z0)
    with pytest.raises(ConfigError):
        adapter.predict(0.5, x)
    with pytest.raises(ConfigError):
        DeepBsdeAdapter(_network().params)
    print("✅ Deep BSDE adapter works!")


def test_save_and_load_adapter(tmp_path):
    for params in (
        init_params(MscaleConfig(input_dim=3, n_subnets=2, hidden_layers=1, hidden_width=4), seed=1),
        init_params(DeepBsdeConfig(dim=2, n_steps=2, hidden_layers=1, hidden_width=3), seed=1),
    ):
        original = create_adapter("deep_bsde" if isinstance(params.config, DeepBsdeConfig) else "network",
                                  params=params)
        path = original.save(tmp_path / f"{type(original).__name__}.npz", metadata={"step": 4})
        loaded, metadata, _ = load_adapter(path, expected_hash=original.architecture_hash)
        assert type(loaded) is type(original)
        assert metadata["step"] == 4
        x = np.array([[0.3, 0.4]])
        assert np.array_equal(loaded.predict(0.0, x), original.predict(0.0, x))
    print("✅ Adapters survive checkpoints!")


def test_unknown_adapter_type():
    with pytest.raises(ConfigError):
        create_adapter("spline")
    print("✅ Unknown adapter types are rejected!")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    test_exact_adapter()
    test_scaled_adapter()
    test_network_adapter_binding()
    test_batch_shape_is_checked()
    test_deep_bsde_adapter_only_knows_t0()
    with tempfile.TemporaryDirectory() as tmp:
        test_save_and_load_adapter(Path(tmp))
    test_unknown_adapter_type()

    print("\n" + "=" * 70)
    print("ALL ADAPTER TESTS PASSED! ✅")
    print("=" * 70)
