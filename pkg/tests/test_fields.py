import numpy as np
import pytest

from bopp_podolsky.fields import (
    Field,
    FieldError,
    ModelParams,
    dilate,
    gaussian,
    normalize_mass,
    regrid,
    resample_spectral,
    scale_profile,
)
from bopp_podolsky.grid import make_radial_grid


def test_params_validation():
    with pytest.raises(FieldError, match=r"p out of range \(2,6\)"):
        ModelParams(p=7.0)
    with pytest.raises(FieldError, match="guard band"):
        ModelParams(p=10.0 / 3.0 + 0.01)
    with pytest.raises(FieldError):
        ModelParams(p=4.0, a=0.0)
    with pytest.raises(FieldError):
        ModelParams(p=4.0, m=-1.0)
    assert ModelParams(p=4.0).regime == "supercritical"
    assert ModelParams(p=2.5).regime == "subcritical"
    assert ModelParams(p=3.0).uniqueness_caveat


def test_field_rejects_wrong_length(small_grid):
    with pytest.raises(FieldError):
        Field(small_grid, np.ones(small_grid.N + 1))


def test_normalize(small_grid):
    u = normalize_mass(gaussian(small_grid, 1.0, 1.3), 0.7)
    assert u.norm() == pytest.approx(0.7, rel=1e-14)
    with pytest.raises(FieldError):
        normalize_mass(Field(small_grid, np.zeros(small_grid.N)), 1.0)


def test_dilate_preserves_mass_and_scales_kinetic(grid):
    u = gaussian(grid, 1.0, 1.0)
    for theta in (-0.5, 0.3, 1.0):
        v = dilate(u, theta)
        assert v.norm() == pytest.approx(1.0, rel=1e-6)
        ratio = grid.gradient_norm2(v.values) / grid.gradient_norm2(u.values)
        assert ratio == pytest.approx(np.exp(2 * theta), rel=1e-5)
    with pytest.raises(FieldError):
        dilate(u, 4.0)
    np.testing.assert_array_equal(dilate(u, 0.0).values, u.values)


def test_dilate_lp_scaling(grid):
    # ||kappa(u,0.3)||_4^4 = e^{0.9} ||u||_4^4 (exact for the dilated Gaussian)
    u = gaussian(grid, 1.0, 1.0)
    lp = lambda v: np.dot(grid.weights, np.abs(v.values) ** 4)
    assert lp(dilate(u, 0.3)) == pytest.approx(np.exp(0.9) * lp(u), rel=1e-5)


def test_dilate_composes(grid):
    u = gaussian(grid, 1.0, 1.0)
    for t1, t2 in ((0.4, 0.5), (-0.4, 0.9), (0.3, -0.6)):
        lhs = dilate(dilate(u, t1), t2).values
        np.testing.assert_allclose(lhs, dilate(u, t1 + t2).values, atol=1e-5 * np.max(u.values))


def test_normalize_scale_invariant(grid):
    u = gaussian(grid, 1.0, 1.0)
    np.testing.assert_allclose(normalize_mass(2.0 * u, 0.3).values, normalize_mass(u, 0.3).values, rtol=1e-15)


def test_scale_profile_matches_dilate(grid):
    u = gaussian(grid, 1.0, 1.0)
    np.testing.assert_allclose(scale_profile(u, 2.0).values, dilate(u, np.log(2.0)).values)
    v = scale_profile(u, 1.7)
    assert v.norm() == pytest.approx(1.0, rel=1e-6)
    assert grid.gradient_norm2(v.values) == pytest.approx(1.7**2 * grid.gradient_norm2(u.values), rel=1e-5)


def test_exact_scaled_grid_representation(grid):
    # kappa(u, theta) as values e^{3 theta/2} u_j on the grid scaled by e^{-theta}
    u = gaussian(grid, 1.0, 1.0)
    theta = 0.4
    v = Field(grid.scaled(np.exp(-theta)), np.exp(1.5 * theta) * u.values)
    assert v.norm() == pytest.approx(u.norm(), rel=1e-14)
    assert v.grid.gradient_norm2(v.values) == pytest.approx(np.exp(2 * theta) * grid.gradient_norm2(u.values), rel=1e-13)


def test_regrid_and_resample(grid):
    u = gaussian(grid, 1.0, 1.0)
    big = grid.extended(2 * grid.N)
    back = regrid(regrid(u, big), grid)
    np.testing.assert_array_equal(back.values, u.values)
    other = make_radial_grid(3000, 25.0)
    v = resample_spectral(u, other)
    expected = np.exp(-0.5 * other.r**2) * u.values[0] / np.exp(-0.5 * grid.r[0] ** 2)
    np.testing.assert_allclose(v.values, expected, atol=1e-12)


def test_tail_ratio(grid):
    assert gaussian(grid, 1.0, 1.0).tail_ratio() < 1e-100
