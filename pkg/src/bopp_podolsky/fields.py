"""Radial fields, model parameters and the mass-preserving dilations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import RadialGrid, _check_finite

P_CRITICAL = 10.0 / 3.0
GUARD_BAND = 0.05
THETA_MAX = 3.0


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Exponent p in (2, 6), kernel length a > 0, target L^2 norm m > 0."""

    p: float
    a: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not 2.0 < self.p < 6.0:
            raise FieldError(f"p out of range (2,6): {self.p}")
        if abs(self.p - P_CRITICAL) < GUARD_BAND:
            raise FieldError(f"p={self.p} inside the guard band around 10/3")
        if not self.a > 0:
            raise FieldError(f"kernel length a must be positive, got {self.a}")
        if not self.m > 0:
            raise FieldError(f"mass m must be positive, got {self.m}")

    @property
    def regime(self) -> str:
        return "supercritical" if self.p > P_CRITICAL else "subcritical"

    @property
    def uniqueness_caveat(self) -> bool:
        """True at p = 3, where the uniqueness statements do not apply."""
        return abs(self.p - 3.0) < 1e-12

    def with_mass(self, m: float) -> "ModelParams":
        return ModelParams(self.p, self.a, m)


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a radial profile on a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.N,):
            raise FieldError(f"expected {self.grid.N} values, got shape {v.shape}")
        if not np.iscomplexobj(v):
            v = v.astype(float, copy=False)
        object.__setattr__(self, "values", v)

    @property
    def kind(self) -> str:
        return "complex" if np.iscomplexobj(self.values) else "real"

    @property
    def r(self):
        return self.grid.r

    def norm(self) -> float:
        """||u||_{L^2(R^3)}."""
        return self.grid.norm(self.values)

    def mass(self) -> float:
        """||u||^2_{L^2(R^3)}."""
        return self.norm() ** 2

    def density(self):
        return np.abs(self.values) ** 2

    def with_values(self, values) -> "Field":
        return Field(self.grid, values, dict(self.meta))

    def __add__(self, other):
        return self.with_values(self.values + _vals(other))

    def __sub__(self, other):
        return self.with_values(self.values - _vals(other))

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def to_complex(self) -> "Field":
        return self.with_values(self.values.astype(complex))

    def tail_ratio(self) -> float:
        """|u(r_N)| / max|u|; the decay check for converged profiles."""
        peak = np.max(np.abs(self.values))
        return float(abs(self.values[-1]) / peak) if peak > 0 else 0.0


def _vals(x):
    return x.values if isinstance(x, Field) else x


def sample(grid: RadialGrid, func, **meta) -> Field:
    return Field(grid, func(grid.r), meta)


def gaussian(grid: RadialGrid, m: float = 1.0, width: float = 1.0, center: float = 0.0) -> Field:
    """exp(-(r-center)^2 / (2 width^2)) scaled to L^2 norm m."""
    g = Field(grid, np.exp(-0.5 * ((grid.r - center) / width) ** 2))
    return normalize_mass(g, m)


def normalize_mass(u: Field, m: float) -> Field:
    """Project onto S(m) = {||u||_{L^2} = m} by rescaling."""
    if not m > 0:
        raise FieldError(f"target mass must be positive, got {m}")
    n = u.norm()
    if n == 0.0:
        raise FieldError("cannot normalize the zero field")
    return u.with_values(u.values * (m / n))


def _even_spline(grid: RadialGrid, values):
    """Cubic spline through the even extension u(-r) = u(r), so u'(0) = 0."""
    x = np.concatenate((-grid.r[::-1], grid.r))
    y = np.concatenate((values[::-1], values))
    return CubicSpline(x, y)


def _interp(grid: RadialGrid, values, x):
    """Spline values at x; zero beyond the last node."""
    out = _even_spline(grid, values)(np.minimum(x, grid.R))
    out[x > grid.R] = 0.0
    return out


def _resample(grid: RadialGrid, values, factor: float):
    """values(factor * r) on the same nodes."""
    return _interp(grid, values, factor * grid.r)


def dilate(u: Field, theta: float, theta_max: float = THETA_MAX) -> Field:
    """kappa(u, theta)(x) = e^{3 theta/2} u(e^theta x), spline-resampled on u's grid."""
    _check_finite([theta], "theta")
    if abs(theta) > theta_max:
        raise FieldError(f"|theta|={abs(theta):.3g} exceeds theta_max={theta_max}")
    if theta == 0.0:
        return u.with_values(u.values.copy())
    s = np.exp(theta)
    return u.with_values(s**1.5 * _resample(u.grid, u.values, s))


def scale_profile(u: Field, s: float, theta_max: float = THETA_MAX) -> Field:
    """u^s(x) = s^{3/2} u(s x); the same map as :func:`dilate` with s = e^theta."""
    if not s > 0:
        raise FieldError(f"scale must be positive, got {s}")
    return dilate(u, float(np.log(s)), theta_max)


def rescale_onto(u: Field, grid: RadialGrid, amplitude: float = 1.0) -> Field:
    """amplitude * u(x) sampled on another grid by cubic spline interpolation."""
    return Field(grid, amplitude * _interp(u.grid, u.values, grid.r), dict(u.meta))


def regrid(u: Field, grid: RadialGrid) -> Field:
    """Exact transfer of u onto a grid with the same spacing (pad or truncate)."""
    if not np.isclose(grid.h, u.grid.h, rtol=1e-14, atol=0):
        raise FieldError("regrid needs equal spacing; use rescale_onto otherwise")
    vals = np.zeros(grid.N, dtype=u.values.dtype)
    n = min(grid.N, u.grid.N)
    vals[:n] = u.values[:n]
    return Field(grid, vals, dict(u.meta))


def resample_spectral(u: Field, grid: RadialGrid, chunk: int = 512) -> Field:
    """Evaluate the sine-series interpolant of r*u at the nodes of another grid.

    Exact for profiles resolved by ``u.grid``; zero beyond (N+1)h.  Cost is
    O(N_u * N_target), so this is meant for one-off transfers.
    """
    src = u.grid
    c = src.to_sine(u.values) * np.sqrt(2.0 / (src.N + 1))
    k = src.wavenumbers
    x = grid.r
    w = np.zeros(grid.N, dtype=c.dtype)
    inside = np.flatnonzero(x < (src.N + 1) * src.h)
    for start in range(0, inside.size, chunk):
        idx = inside[start:start + chunk]
        w[idx] = np.sin(np.outer(x[idx], k)) @ c
    return Field(grid, w / x, dict(u.meta))
