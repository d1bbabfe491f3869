import numpy as np
import pytest

from bopp_podolsky.grid import BoxGrid, GridError, RadialGrid, make_radial_grid, radial_derivative, radial_laplacian


def test_nodes_and_weights():
    g = make_radial_grid(100, 10.0)
    assert g.N == 100
    assert g.r[0] == pytest.approx(g.h)
    assert g.R == pytest.approx(10.0)
    np.testing.assert_allclose(g.weights, 4 * np.pi * g.r**2 * g.h)


def test_gaussian_mass_and_kinetic(grid):
    u = np.exp(-0.5 * grid.r**2)
    assert grid.norm(u) ** 2 == pytest.approx(np.pi**1.5, rel=1e-13)
    assert grid.gradient_norm2(u) == pytest.approx(1.5 * np.pi**1.5, rel=1e-12)


def test_laplacian_of_gaussian(grid):
    r = grid.r
    u = np.exp(-0.5 * r**2)
    exact = (r**2 - 3.0) * u
    np.testing.assert_allclose(radial_laplacian(grid, u), exact, atol=1e-11)


def test_fd_laplacian_is_second_order():
    errs = []
    for N in (512, 1024):
        g = make_radial_grid(N, 20.0, laplacian="fd")
        u = np.exp(-0.5 * g.r**2)
        errs.append(np.max(np.abs(radial_laplacian(g, u) - (g.r**2 - 3.0) * u)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_sine_roundtrip(grid, rng):
    u = rng.standard_normal(grid.N)
    np.testing.assert_allclose(grid.from_sine(grid.to_sine(u)), u, atol=1e-12)


def test_derivative(grid):
    u = np.exp(-0.5 * grid.r**2)
    np.testing.assert_allclose(radial_derivative(grid, u)[10:-10], -grid.r[10:-10] * u[10:-10], atol=grid.h**2)


def test_scaled_and_extended():
    g = make_radial_grid(256, 8.0)
    assert g.scaled(0.5).h == pytest.approx(g.h * 0.5)
    assert g.extended(512).R == pytest.approx(16.0)


def test_bad_inputs():
    with pytest.raises(GridError):
        RadialGrid(16, 0.1, laplacian="cubic")
    with pytest.raises(GridError):
        BoxGrid(48, 4.0)
    with pytest.raises(GridError):
        BoxGrid(64, -1.0)


def test_box_integrates_gaussian():
    box = BoxGrid(64, 8.0)
    assert box.integrate(box.sample(lambda r: np.exp(-r**2))) == pytest.approx(np.pi**1.5, rel=1e-10)
