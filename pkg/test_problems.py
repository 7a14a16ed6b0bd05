"""Test the BSB problem definitions."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.autodiff import AdTape, grad_wrt_leaves, ops
from src.common.errors import ConfigError
from src.problems import (
    BsbParams,
    OscBsbParams,
    make_bsb,
    make_osc_bsb,
    anchor_x0,
    pde_residual,
    relative_pde_residual,
)
from src.registry import load_builtin_presets


def test_anchor_and_closed_form():
    """u(0, x0) = e^{0.21} * 62.5 for the published d = 100 setting."""
    assert np.array_equal(anchor_x0(4), [1.0, 0.5, 1.0, 0.5])
    problem = make_bsb(BsbParams())
    value = problem.exact_u(0.0, problem.x0.reshape(1, -1))[0]
    assert value == pytest.approx(62.5 * np.exp(0.21))
    assert value == pytest.approx(77.105, rel=1e-4)
    print("✅ Closed form works!")


def test_terminal_consistency():
    """exact_u(T, .) = g and exact_grad(T, .) = grad_g for both problems."""
    rng = np.random.default_rng(1)
    x = rng.uniform(0.2, 1.5, size=(5, 6))
    for problem in (make_bsb(BsbParams(d=6)), make_osc_bsb(OscBsbParams(d=6))):
        assert np.allclose(problem.exact_u(problem.horizon, x), problem.g(x))
        assert np.allclose(problem.exact_grad(problem.horizon, x), problem.grad_g(x))
    print("✅ Terminal conditions are consistent!")


def test_exact_solutions_solve_the_pde():
    """Finite-difference residual of the closed forms is negligible."""
    rng = np.random.default_rng(2)
    for problem in (make_bsb(BsbParams(d=10)), make_osc_bsb(OscBsbParams(d=10))):
        for _ in range(3):
            t = float(rng.uniform(0.0, 0.9))
            x = rng.uniform(0.3, 1.2, size=10)
            assert relative_pde_residual(problem, t, x) < 1e-4
    print("✅ Exact solutions satisfy the PDE!")


def test_residual_detects_a_wrong_solution():
    problem = make_bsb(BsbParams(d=4))
    wrong = make_bsb(BsbParams(d=4, r=0.1))
    broken = type(problem)(**{**problem.__dict__, "exact_u": wrong.exact_u, "exact_grad": wrong.exact_grad})
    assert abs(pde_residual(broken, 0.2, problem.x0)) > 1e-3
    print("✅ Residual detects a wrong solution!")


def test_zero_amplitude_oscillation_is_plain_bsb():
    plain = make_bsb(BsbParams(d=5))
    flat = make_osc_bsb(OscBsbParams(d=5, alpha=0.0))
    rng = np.random.default_rng(3)
    x = rng.uniform(0.1, 1.0, size=(4, 5))
    y = rng.normal(size=4)
    z = rng.normal(size=(4, 5))
    assert np.allclose(flat.exact_u(0.3, x), plain.exact_u(0.3, x))
    assert np.allclose(flat.phi(0.3, x, y, z), plain.phi(0.3, x, y, z))
    assert np.allclose(flat.g(x), plain.g(x))
    print("✅ alpha = 0 reduces to the plain problem!")


def test_traced_terminal_gradient():
    """grad_g agrees with reverse-mode differentiation of g on a tape."""
    problem = make_osc_bsb(OscBsbParams(d=3))
    x_data = np.array([[0.5, 1.0, 0.7], [1.2, 0.3, 0.9]])
    tape = AdTape()
    x = tape.leaf(x_data)
    grad = grad_wrt_leaves(ops.total_sum(problem.g(x)), [x])[0]
    assert np.allclose(grad, problem.grad_g(x_data))
    print("✅ Traced terminal data works!")


def test_parameter_validation():
    with pytest.raises(ValidationError):
        BsbParams(d=3, x0=[1.0, 2.0])
    with pytest.raises(ValidationError):
        BsbParams(sigma_scalar=0.0)
    with pytest.raises(ValidationError):
        OscBsbParams(gamma=float("inf"))
    print("✅ Parameter validation works!")


def test_problem_presets():
    registry = load_builtin_presets()
    problem = registry.build("bsb", d=7)
    assert problem.dim == 7 and problem.is_decoupled
    osc = registry.build("bsb-osc", d=4, gamma=8.0)
    assert osc.params["gamma"] == 8.0
    with pytest.raises(ConfigError):
        registry.build("bsb", gamma=8.0)
    with pytest.raises(ConfigError):
        registry.build("heat")
    print("✅ Problem presets work!")


if __name__ == "__main__":
    test_anchor_and_closed_form()
    test_terminal_consistency()
    test_exact_solutions_solve_the_pde()
    test_residual_detects_a_wrong_solution()
    test_zero_amplitude_oscillation_is_plain_bsb()
    test_traced_terminal_gradient()
    test_parameter_validation()
    test_problem_presets()

    print("\n" + "=" * 70)
    print("ALL PROBLEM TESTS PASSED! ✅")
    print("=" * 70)
