"""Test the Deep BSDE and Scheme 1-3 losses."""

import dataclasses

import numpy as np
import pytest
from pydantic import ValidationError

from src.adapters import DeepBsdeAdapter, ExactSolutionAdapter, NetworkSolutionAdapter
from src.autodiff import AdTape, grad_wrt_leaves
from src.autodiff import backend as B
from src.common.errors import ConfigError, NumericAbort
from src.networks import DeepBsdeConfig, MlpConfig, init_params
from src.problems import BsbParams, make_bsb
from src.schemes import (
    LossNormalization,
    Scheme3Diffusion,
    SchemeConfig,
    SchemeName,
    deep_bsde_loss,
    scheme_loss,
)
from src.simulate import SeedDomain, TimeGrid, aggregate_increments, sample_increments, stream_for
from src.training.trainer import training_increments


def _tiny_network(d=2, seed=0):
    return NetworkSolutionAdapter(init_params(MlpConfig(input_dim=d + 1, hidden_layers=1, hidden_width=4), seed))


def _increments(m, n, d, seed=0):
    return sample_increments(m, TimeGrid(n_steps=n, horizon=1.0), d, stream_for(seed, SeedDomain.DIAGNOSTIC))


def _total(adapter, problem, config, dw, **kwargs):
    tape = AdTape()
    adapter.bind(tape)
    return scheme_loss(adapter, tape, problem, config, dw, **kwargs)


def _gradient_matches_finite_differences(adapter, problem, config, dw, h=1e-6):
    tape = AdTape()
    leaves = adapter.bind(tape)
    grads = grad_wrt_leaves(scheme_loss(adapter, tape, problem, config, dw).total, leaves)

    params = adapter.parameters()
    fds = []
    for k, tensor in enumerate(params):
        fd = np.zeros_like(tensor)
        for index in np.ndindex(tensor.shape):
            shifted = []
            for sign in (1.0, -1.0):
                moved = [p.copy() for p in params]
                moved[k][index] += sign * h
                shifted.append(_total(adapter.with_parameters(moved), problem, config, dw).total.item())
            fd[index] = (shifted[0] - shifted[1]) / (2 * h)
        fds.append(fd)
    scale = max(max(float(np.max(np.abs(fd))) for fd in fds), 1e-8)
    for k, fd in enumerate(fds):
        assert np.max(np.abs(grads[k] - fd)) <= 1e-4 * scale, f"tensor {k}"


def _coupled_bsb(d=2, coupling=0.2):
    """BSB with drift and diffusion scaled by Y, so X depends on the solution."""
    problem = make_bsb(BsbParams(d=d))

    def mu(t, x, y, z):
        return coupling * B.mul_rows(x, y)

    def sigma(t, x, y):
        return B.mul_rows(problem.sigma(t, x, y), 1.0 + coupling * y)

    return dataclasses.replace(problem, name="bsb-coupled", mu=mu, sigma=sigma, is_decoupled=False)


@pytest.mark.parametrize("seed", range(20))
def test_parameter_gradients_match_finite_differences(seed):
    """d=2, N=2, M=2, width 4 for every scheme, on 20 random instances."""
    problem = make_bsb(BsbParams(d=2))
    dw = _increments(2, 2, 2, seed=seed)
    for scheme in (SchemeName.S1, SchemeName.S2, SchemeName.S3):
        config = SchemeConfig(scheme=scheme, n_steps=2, batch=2)
        _gradient_matches_finite_differences(_tiny_network(seed=seed), problem, config, dw)

    deep = DeepBsdeAdapter(init_params(DeepBsdeConfig(dim=2, n_steps=2, hidden_layers=1, hidden_width=4),
                                       seed=seed))
    config = SchemeConfig(scheme=SchemeName.DEEP_BSDE, n_steps=2, batch=2)
    _gradient_matches_finite_differences(deep, problem, config, dw)
    print(f"✅ Loss gradients match finite differences (seed {seed})!")


def test_stepwise_rollout_matches_stacked():
    """Station-by-station and stacked evaluation agree for a decoupled problem."""
    problem = make_bsb(BsbParams(d=3))
    adapter = _tiny_network(d=3, seed=4)
    dw = _increments(5, 4, 3)
    for scheme in (SchemeName.S1, SchemeName.S2):
        config = SchemeConfig(scheme=scheme, n_steps=4, batch=5)
        stacked = _total(adapter, problem, config, dw, stacked=True).values()
        stepwise = _total(adapter, problem, config, dw, stacked=False).values()
        assert stepwise.total == pytest.approx(stacked.total, rel=1e-10)
        assert stepwise.pathwise == pytest.approx(stacked.pathwise, rel=1e-10)
    print("✅ Stepwise and stacked rollouts agree!")


def test_scheme3_collapses_to_scheme2_when_decoupled():
    """With X independent of Y both branches share X, so Scheme 3 equals Scheme 2."""
    problem = make_bsb(BsbParams(d=2))
    adapter = _tiny_network(seed=5)
    dw = _increments(6, 3, 2)
    s2 = _total(adapter, problem, SchemeConfig(scheme=SchemeName.S2, n_steps=3, batch=6), dw).values()
    for diffusion in Scheme3Diffusion:
        config = SchemeConfig(scheme=SchemeName.S3, n_steps=3, batch=6, scheme3_diffusion=diffusion)
        s3 = _total(adapter, problem, config, dw, stacked=False).values()
        assert s3.total == pytest.approx(s2.total, rel=1e-10)
    print("✅ Scheme 3 collapses to Scheme 2!")


def test_coupled_problem_for_every_scheme():
    """Stepwise rollouts handle a Y-dependent forward SDE; stacking is refused."""
    problem = _coupled_bsb()
    decoupled = make_bsb(BsbParams(d=2))
    adapter = _tiny_network(seed=2)
    dw = _increments(4, 3, 2, seed=1)
    for scheme in (SchemeName.S1, SchemeName.S2, SchemeName.S3):
        config = SchemeConfig(scheme=scheme, n_steps=3, batch=4)
        coupled = _total(adapter, problem, config, dw).values()
        plain = _total(adapter, decoupled, config, dw).values()
        assert np.isfinite(coupled.total) and coupled.total >= 0.0
        assert coupled.total != pytest.approx(plain.total, rel=1e-9)
        with pytest.raises(ValueError):
            _total(adapter, problem, config, dw, stacked=True)

    deep = DeepBsdeAdapter(init_params(DeepBsdeConfig(dim=2, n_steps=3, hidden_layers=1, hidden_width=4), seed=2))
    record = _total(deep, problem, SchemeConfig(scheme=SchemeName.DEEP_BSDE, n_steps=3, batch=4), dw).values()
    assert np.isfinite(record.total)
    print("✅ Coupled problems run under every scheme!")


def test_scheme3_diffusion_variants_on_a_coupled_problem():
    """
    The variants first disagree in X2 at station 2, which reaches the loss
    through the Euler Y at station 3: equal for N=2, different for N=3.
    """
    problem = _coupled_bsb()
    adapter = _tiny_network(seed=5)
    for n in (2, 3):
        dw = _increments(6, n, 2, seed=4)
        totals = {}
        for diffusion in Scheme3Diffusion:
            config = SchemeConfig(scheme=SchemeName.S3, n_steps=n, batch=6, scheme3_diffusion=diffusion)
            totals[diffusion] = _total(adapter, problem, config, dw).values().total
        printed, branch = totals[Scheme3Diffusion.AS_PRINTED], totals[Scheme3Diffusion.BRANCH2]
        if n == 2:
            assert printed == pytest.approx(branch, rel=1e-12)
        else:
            assert abs(printed - branch) > 1e-9 * abs(branch)
        print(f"   N={n}: as_printed {printed:.9f}, branch2 {branch:.9f}")
    print("✅ Scheme 3 diffusion variants differ when coupled!")


def test_coupled_gradients_match_finite_differences():
    """Gradients stay exact when X itself depends on the parameters."""
    problem = _coupled_bsb()
    dw = _increments(2, 3, 2, seed=6)
    for scheme in (SchemeName.S1, SchemeName.S2):
        config = SchemeConfig(scheme=scheme, n_steps=3, batch=2)
        _gradient_matches_finite_differences(_tiny_network(seed=7), problem, config, dw)
    for diffusion in Scheme3Diffusion:
        config = SchemeConfig(scheme=SchemeName.S3, n_steps=3, batch=2, scheme3_diffusion=diffusion)
        _gradient_matches_finite_differences(_tiny_network(seed=7), problem, config, dw)

    deep = DeepBsdeAdapter(init_params(DeepBsdeConfig(dim=2, n_steps=3, hidden_layers=1, hidden_width=4), seed=8))
    config = SchemeConfig(scheme=SchemeName.DEEP_BSDE, n_steps=3, batch=2)
    _gradient_matches_finite_differences(deep, problem, config, dw)
    print("✅ Coupled loss gradients match finite differences!")


def test_breakdown_is_consistent():
    """Components are non-negative and the total is their weighted sum."""
    problem = make_bsb(BsbParams(d=2))
    adapter = _tiny_network(seed=6)
    dw = _increments(4, 3, 2)
    for scheme in (SchemeName.S1, SchemeName.S2, SchemeName.S3):
        record = _total(adapter, problem, SchemeConfig(scheme=scheme, n_steps=3, batch=4), dw).values()
        assert min(record.pathwise, record.terminal_value, record.terminal_grad) >= 0.0
        weighted = record.pathwise + 0.02 * record.terminal_value + 0.02 * record.terminal_grad
        assert record.total == pytest.approx(weighted, abs=1e-12)

    no_penalty = SchemeConfig(scheme=SchemeName.S1, n_steps=3, batch=4, beta1=0.0, beta2=0.0)
    record = _total(adapter, problem, no_penalty, dw).values()
    assert record.total == record.pathwise
    print("✅ Loss breakdowns are consistent!")


def test_summed_normalization():
    """Summed losses are M*N (pathwise) and M (terminal) times the averaged ones."""
    problem = make_bsb(BsbParams(d=2))
    adapter = _tiny_network(seed=7)
    dw = _increments(4, 3, 2)
    averaged = _total(adapter, problem, SchemeConfig(n_steps=3, batch=4), dw).values()
    summed_config = SchemeConfig(n_steps=3, batch=4, loss_normalization=LossNormalization.SUMMED)
    summed = _total(adapter, problem, summed_config, dw).values()
    assert summed.pathwise == pytest.approx(12 * averaged.pathwise, rel=1e-12)
    assert summed.terminal_value == pytest.approx(4 * averaged.terminal_value, rel=1e-12)
    assert summed.total == pytest.approx(summed.pathwise + summed.terminal_value + summed.terminal_grad)
    print("✅ Summed normalization works!")


def test_exact_solution_terminal_terms_vanish():
    problem = make_bsb(BsbParams(d=2))
    dw = _increments(50, 12, 2)
    record = _total(ExactSolutionAdapter(problem), problem, SchemeConfig(n_steps=12, batch=50), dw).values()
    assert record.terminal_value == pytest.approx(0.0, abs=1e-12)
    assert record.terminal_grad == pytest.approx(0.0, abs=1e-12)
    assert record.y0 == pytest.approx(problem.exact_u(0.0, problem.x0.reshape(1, -1))[0])
    print("✅ Exact solution has no terminal mismatch!")


def test_exact_solution_pathwise_decay():
    """
    With u = exact_u the Euler-rolled Y drifts from u(t_n, X_n) by the global
    strong error, so the Scheme 2 pathwise term scales like dt.
    """
    problem = make_bsb(BsbParams(d=2))
    fine = _increments(1000, 192, 2, seed=11)
    exact = ExactSolutionAdapter(problem)
    pathwise = {}
    for n in (12, 48, 192):
        dw = aggregate_increments(fine, n)
        for scheme in (SchemeName.S2, SchemeName.S3):
            record = _total(exact, problem, SchemeConfig(scheme=scheme, n_steps=n, batch=1000), dw).values()
            pathwise[scheme, n] = record.pathwise

    for scheme in (SchemeName.S2, SchemeName.S3):
        assert pathwise[scheme, 12] > pathwise[scheme, 48] > pathwise[scheme, 192] > 0.0
    ratio = pathwise[SchemeName.S2, 48] / pathwise[SchemeName.S2, 12]
    assert 1 / 6 <= ratio <= 1 / 2.5
    print(f"✅ Pathwise decay ratio 12 -> 48: {ratio:.3f}")


def test_shared_noise_across_step_counts():
    """Runs at N and 4N see the same Brownian paths through noise_steps."""
    problem = make_bsb(BsbParams(d=2))
    coarse = training_increments(problem, SchemeConfig(n_steps=12, batch=3, noise_steps=48), seed=0, step=5)
    fine = training_increments(problem, SchemeConfig(n_steps=48, batch=3, noise_steps=48), seed=0, step=5)
    assert np.allclose(coarse, aggregate_increments(fine, 12))
    with pytest.raises(ValidationError):
        SchemeConfig(n_steps=48, noise_steps=100)
    print("✅ Increments are shared across N!")


def test_increment_shape_is_checked():
    problem = make_bsb(BsbParams(d=2))
    with pytest.raises(ValueError):
        _total(_tiny_network(), problem, SchemeConfig(n_steps=3, batch=4), _increments(4, 2, 2))
    print("✅ Increment shapes are checked!")


def test_non_finite_loss_aborts():
    problem = make_bsb(BsbParams(d=2))
    adapter = _tiny_network(seed=8)
    broken = [p.copy() for p in adapter.parameters()]
    broken[0][0, 0] = np.nan
    with pytest.raises(NumericAbort):
        _total(adapter.with_parameters(broken), problem, SchemeConfig(n_steps=2, batch=2), _increments(2, 2, 2))
    print("✅ Non-finite losses abort!")


def test_deep_bsde_loss():
    problem = make_bsb(BsbParams(d=2))
    params = init_params(DeepBsdeConfig(dim=2, n_steps=3, hidden_layers=1, hidden_width=4), seed=0)
    config = SchemeConfig(scheme=SchemeName.DEEP_BSDE, n_steps=3, batch=8)
    loss = deep_bsde_loss(params, problem, config, _increments(8, 3, 2))
    assert np.isfinite(loss.item()) and loss.item() >= 0.0

    with pytest.raises(ConfigError):
        deep_bsde_loss(params, problem, SchemeConfig(scheme=SchemeName.DEEP_BSDE, n_steps=4, batch=8),
                       _increments(8, 4, 2))
    with pytest.raises(ConfigError):
        _total(_tiny_network(), problem, config, _increments(8, 3, 2))
    print("✅ Deep BSDE loss works!")


if __name__ == "__main__":
    for seed in range(20):
        test_parameter_gradients_match_finite_differences(seed)
    test_stepwise_rollout_matches_stacked()
    test_scheme3_collapses_to_scheme2_when_decoupled()
    test_coupled_problem_for_every_scheme()
    test_scheme3_diffusion_variants_on_a_coupled_problem()
    test_coupled_gradients_match_finite_differences()
    test_breakdown_is_consistent()
    test_summed_normalization()
    test_exact_solution_terminal_terms_vanish()
    test_exact_solution_pathwise_decay()
    test_shared_noise_across_step_counts()
    test_increment_shape_is_checked()
    test_non_finite_loss_aborts()
    test_deep_bsde_loss()

    print("\n" + "=" * 70)
    print("ALL SCHEME TESTS PASSED! ✅")
    print("=" * 70)
