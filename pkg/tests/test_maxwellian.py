"""Continuous and moment-matched discrete Maxwellians."""

import numpy as np
import pytest

from ldvgas.errors import MaxwellianConvergenceError
from ldvgas.grid import MomentVector, VelocityGrid, build_local_grid, moments
from ldvgas.maxwellian import (
    GasModel,
    continuous_maxwellian,
    discrete_maxwellian,
)


def residual_scales(U, R):
    """Per-component scales that make mixed-unit residuals comparable."""
    sigma = np.sqrt(R * U.temperature(R))
    return np.array([U.rho, U.rho * (abs(U.velocity) + sigma), U.energy])


def test_gas_model_tau_power_law():
    gas = GasModel(R=208.1, C=1.08e-9, omega=-0.19)
    rho, T = 1e-4, 0.00480208
    assert np.isclose(gas.tau(rho, T), 1.08e-9 * T**-0.19 / rho, rtol=1e-15)


def test_gas_model_validation():
    with pytest.raises(ValueError):
        GasModel(R=-1.0)
    with pytest.raises(ValueError):
        GasModel(R=1.0, regime="magic")
    with pytest.raises(ValueError):
        GasModel(R=1.0, regime="finite-tau", C=0.0)
    # the collisionless and fluid limits need no relaxation constant
    GasModel(R=1.0, regime="free-transport")
    GasModel(R=1.0, regime="fluid")


def test_continuous_maxwellian_peak_value():
    U = MomentVector.from_primitive(1.0, 0.0, 1.0, R=1.0)
    assert np.isclose(
        float(continuous_maxwellian(U, 1.0, np.array(0.0))),
        0.3989422804014327,
        rtol=1e-15,
    )


def test_continuous_maxwellian_is_even_around_u():
    U = MomentVector.from_primitive(2.0, 1.5, 0.3, R=2.0)
    v = np.linspace(-3, 3, 7)
    left = continuous_maxwellian(U, 2.0, 1.5 - v)
    right = continuous_maxwellian(U, 2.0, 1.5 + v)
    np.testing.assert_allclose(left, right, rtol=1e-14)


def test_discrete_maxwellian_matches_target_moments():
    R = 208.1
    U = MomentVector.from_primitive(1e-4, 0.0, 0.00480208, R)
    g = build_local_grid(U, 30, R)
    M = discrete_maxwellian(U, g, R)
    got = moments(M, g).as_array()
    err = np.abs(got - U.as_array()) / residual_scales(U, R)
    assert err.max() < 1e-10, f"scaled residual {err}"


def test_discrete_maxwellian_random_states():
    # broad sweep over magnitudes, velocities, and coarse grids
    rng = np.random.default_rng(2024)
    for trial in range(100):
        R = float(rng.choice([1.0, 208.1]))
        T = 10.0 ** rng.uniform(-5, 3)
        rho = 10.0 ** rng.uniform(-8, 2)
        u = rng.uniform(-3, 3) * np.sqrt(R * T)
        K = int(rng.integers(10, 101))
        U = MomentVector.from_primitive(rho, u, T, R)
        g = build_local_grid(U, K, R)
        M = discrete_maxwellian(U, g, R)
        err = np.abs(moments(M, g).as_array() - U.as_array()) / residual_scales(U, R)
        assert err.max() < 1e-10, f"trial {trial}: K={K} residual {err.max():.2e}"
        assert M.min() > 0.0, f"trial {trial}: negative node value"


def test_discrete_maxwellian_params_reproduce_values():
    R = 208.1
    U = MomentVector.from_primitive(1e-7, 640.0, 612.0, R)
    g = build_local_grid(U, 41, R)
    M, params = discrete_maxwellian(U, g, R, return_params=True)
    a0, a1, a2 = params.alpha
    assert a2 < 0.0
    rebuilt = np.exp(a0 + a1 * g.nodes + a2 * g.nodes**2)
    np.testing.assert_allclose(rebuilt, M, rtol=1e-9)
    assert params.residual < 1e-12


def test_discrete_maxwellian_translation_covariance():
    # same thermal shape, grid and mean velocity both shifted: values agree
    R = 1.0
    shift = 57.0
    U0 = MomentVector.from_primitive(0.5, 0.0, 2.0, R)
    U1 = MomentVector.from_primitive(0.5, shift, 2.0, R)
    g0 = build_local_grid(U0, 25, R)
    g1 = VelocityGrid(g0.nodes + shift)
    M0 = discrete_maxwellian(U0, g0, R)
    M1 = discrete_maxwellian(U1, g1, R)
    np.testing.assert_allclose(M0, M1, rtol=1e-9)


def test_discrete_maxwellian_unreachable_state_raises():
    # mean velocity far outside the grid support has no solution
    g = VelocityGrid.uniform(-1.0, 1.0, 9)
    U = MomentVector.from_primitive(1.0, 5.0, 0.01, R=1.0)
    with pytest.raises(MaxwellianConvergenceError):
        discrete_maxwellian(U, g, 1.0)
