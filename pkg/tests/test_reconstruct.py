"""ENO reconstruction: exactness, stencil choice, exact integrals."""

import numpy as np
import pytest

from ldvgas.grid import MomentVector, VelocityGrid, build_local_grid
from ldvgas.maxwellian import continuous_maxwellian
from ldvgas.reconstruct import Reconstruction, _select_stencil


@pytest.mark.parametrize("points", [2, 3, 4])
def test_reproduces_polynomials_of_matching_degree(points):
    rng = np.random.default_rng(40 + points)
    g = VelocityGrid.uniform(-4.0, 4.0, 23)
    coeffs = rng.uniform(-1, 1, size=points)  # degree points-1
    poly = np.polynomial.Polynomial(coeffs)
    recon = Reconstruction(g, poly(g.nodes), points=points)
    v = rng.uniform(-4.0, 4.0, size=100)
    expect = poly(v)
    scale = np.abs(expect).max()
    np.testing.assert_allclose(recon(v), expect, atol=1e-12 * scale)


def test_exact_at_source_nodes():
    rng = np.random.default_rng(5)
    g = VelocityGrid.uniform(-2.0, 6.0, 17)
    values = rng.uniform(0, 1, size=17)
    for points in (2, 3, 4):
        recon = Reconstruction(g, values, points=points)
        out = recon(g.nodes)
        assert np.array_equal(out, values), f"points={points}"


def test_zero_outside_support_with_a_collar():
    # a hair past the boundary the edge interpolant holds on, so a grid
    # whose bounds wobble by an ulp sees no jump; any real distance out
    # the value is exactly zero
    g = VelocityGrid.uniform(-1.0, 1.0, 11)
    recon = Reconstruction(g, np.ones(11), points=4)
    assert recon(1.0 + 1e-12) == pytest.approx(1.0, rel=1e-12)
    assert recon(-1.0 - 1e-12) == pytest.approx(1.0, rel=1e-12)
    assert recon(1.0 + 1e-8) == 0.0  # past the collar
    assert recon(-1.0 - 1e-8) == 0.0
    assert recon(1.0 + 0.5 * 0.2) == 0.0  # half a spacing is far outside
    assert recon(50.0) == 0.0
    # the support boundary itself still evaluates exactly
    assert recon(1.0) == 1.0 and recon(-1.0) == 1.0


def test_stencil_avoids_the_rough_side():
    # smooth on the left of the bracket, a jump on the right: the stencil
    # must grow left.  Mirrored data must grow right.
    nodes = np.arange(8.0)
    sizes = np.array([8])
    smooth_left = np.array([0.0, 0.1, 0.2, 0.3, 0.4, 5.0, 9.0, 14.0])
    from ldvgas.reconstruct import _dd_table

    D = _dd_table(smooth_left[None, :], nodes[None, :], sizes, 4)
    s = _select_stencil(D, sizes, np.array([[3]]), 4)
    assert s[0, 0] <= 2, "stencil should extend into the smooth side"

    rough_left = smooth_left[::-1].copy()
    D = _dd_table(rough_left[None, :], nodes[None, :], sizes, 4)
    s = _select_stencil(D, sizes, np.array([[3]]), 4)
    assert s[0, 0] == 3, "stencil should stay right of the jump"


def test_tied_divided_differences_go_left():
    # quadratic data: all second differences equal, so every choice ties
    nodes = np.arange(9.0)
    values = nodes**2
    g = VelocityGrid(nodes)
    recon = Reconstruction(g, values, points=3)
    D = recon._table
    s = _select_stencil(D, np.array([9]), np.array([[4]]), 3)
    assert s[0, 0] == 3, "tie must extend the stencil leftward"


def test_boundary_stencils_stay_in_grid():
    rng = np.random.default_rng(9)
    g = VelocityGrid.uniform(0.0, 1.0, 6)
    values = rng.uniform(size=6)
    recon = Reconstruction(g, values, points=4)
    # querying inside the first and last intervals must not blow up and
    # must stay exact for cubics there
    cubic = np.polynomial.Polynomial([0.3, -1.0, 2.0, 0.5])
    recon_cubic = Reconstruction(g, cubic(g.nodes), points=4)
    probes = np.array([0.01, 0.15, 0.85, 0.99])
    np.testing.assert_allclose(recon_cubic(probes), cubic(probes), rtol=1e-12)
    assert np.all(np.isfinite(recon(probes)))


def test_two_point_variant_keeps_data_non_negative():
    rng = np.random.default_rng(3)
    g = VelocityGrid.uniform(-5.0, 5.0, 41)
    values = rng.uniform(0.0, 1.0, size=41)
    values[::7] = 0.0
    recon = Reconstruction(g, values, points=2)
    v = rng.uniform(-5.0, 5.0, size=2000)
    assert np.all(recon(v) >= 0.0)


def test_degree_reduces_when_grid_is_tiny():
    g = VelocityGrid.uniform(0.0, 1.0, 3)
    line = 2.0 + 3.0 * g.nodes
    recon = Reconstruction(g, line, points=4)
    probes = np.array([0.2, 0.6, 0.9])
    np.testing.assert_allclose(recon(probes), 2.0 + 3.0 * probes, rtol=1e-13)


def test_integrals_match_dense_quadrature_oracle():
    R = 208.1
    U = MomentVector.from_primitive(1e-4, 0.6, 0.0048, R)
    g = build_local_grid(U, 30, R)
    values = continuous_maxwellian(U, R, g.nodes)
    recon = Reconstruction(g, values, points=4)

    v = np.linspace(g.vmin, g.vmax, 200001)
    fv = recon(v)
    basis = {"1": 1.0, "v+": np.maximum(v, 0), "v-": np.minimum(v, 0)}
    for weight, wv in basis.items():
        ref = np.trapezoid(fv * wv, v)
        got = recon.integrate_moments(weight)
        assert np.isclose(got, ref, rtol=1e-7, atol=1e-18), weight

    m = np.stack([np.ones_like(v), v, 0.5 * v * v])
    for weight, wv in [("m", 1.0), ("v+m", np.maximum(v, 0)), ("v-m", np.minimum(v, 0))]:
        ref = np.trapezoid(fv * wv * m, v, axis=1)
        got = recon.integrate_moments(weight)
        np.testing.assert_allclose(got, ref, rtol=1e-6, atol=1e-18)


def test_integral_halves_sum_to_full_first_moment():
    rng = np.random.default_rng(12)
    g = VelocityGrid.uniform(-3.3, 2.1, 19)
    recon = Reconstruction(g, rng.uniform(0, 1, size=19), points=3)
    total = recon.integrate_moments("m")
    plus = recon.integrate_moments("v+")
    minus = recon.integrate_moments("v-")
    assert np.isclose(plus + minus, total[1], rtol=1e-12)
    half_sum = recon.integrate_moments("v+m") + recon.integrate_moments("v-m")
    # first component of the v-weighted moments is the plain first moment
    assert np.isclose(half_sum[0], total[1], rtol=1e-12)


def test_polynomial_integrals_are_exact():
    rng = np.random.default_rng(21)
    for points in (2, 3, 4):
        g = VelocityGrid.uniform(-2.0, 3.0, 12)
        coeffs = rng.uniform(-1, 1, size=points)
        poly = np.polynomial.Polynomial(coeffs)
        recon = Reconstruction(g, poly(g.nodes), points=points)
        got = recon.integrate_moments("m")
        expect = np.array(
            [
                (poly.integ())(3.0) - (poly.integ())(-2.0),
                ((poly * np.polynomial.Polynomial([0, 1])).integ())(3.0)
                - ((poly * np.polynomial.Polynomial([0, 1])).integ())(-2.0),
                0.5
                * (
                    ((poly * np.polynomial.Polynomial([0, 0, 1])).integ())(3.0)
                    - ((poly * np.polynomial.Polynomial([0, 0, 1])).integ())(-2.0)
                ),
            ]
        )
        np.testing.assert_allclose(got, expect, rtol=1e-12, atol=1e-14)


def test_contract_violations():
    g = VelocityGrid.uniform(0.0, 1.0, 5)
    with pytest.raises(ValueError):
        Reconstruction(g, np.ones(4), points=3)
    with pytest.raises(ValueError):
        Reconstruction(g, np.ones(5), points=5)
    with pytest.raises(ValueError):
        Reconstruction(g, np.ones(5), points=1)
    recon = Reconstruction(g, np.ones(5), points=2)
    with pytest.raises(ValueError):
        recon.integrate_moments("v*")
