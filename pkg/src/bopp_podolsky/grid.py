"""Radial and box discretizations of R^3.

A radial profile u(r) is stored on the interior nodes r_j = j*h, j = 1..N.
The Laplacian acts on w = r*u, which turns the 3D radial operator into a 1D
Dirichlet operator with w(0) = 0 and w((N+1)h) = 0.  That operator is
diagonalized by the type-I discrete sine transform, which is what the
spectral Laplacian, the Sobolev preconditioner and the linear propagator
in :mod:`bopp_podolsky.dynamics` all share.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as sfft

MIN_NODES = 64


class GridError(ValueError):
    pass


def _check_finite(values, what="samples"):
    values = np.asarray(values)
    bad = ~np.isfinite(values)
    if bad.any():
        idx = int(np.flatnonzero(bad.ravel())[0])
        raise GridError(f"non-finite {what} at index {idx}")
    return values


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid with nodes r_j = j*h, j = 1..N.

    ``laplacian`` selects the default discrete Laplacian: ``"spectral"``
    (sine-transform diagonal, -k^2) or ``"fd"`` (second centered difference).
    Both are diagonal in the same sine basis.
    """

    N: int
    h: float
    laplacian: str = "spectral"

    def __post_init__(self):
        if self.laplacian not in ("spectral", "fd"):
            raise GridError(f"unknown laplacian {self.laplacian!r}")

    @property
    def R(self) -> float:
        return self.N * self.h

    @cached_property
    def r(self) -> np.ndarray:
        r = self.h * np.arange(1, self.N + 1, dtype=float)
        r.flags.writeable = False
        return r

    @cached_property
    def weights(self) -> np.ndarray:
        # trapezoid on [0, (N+1)h]; both end values vanish (r^2 factor, Dirichlet)
        w = 4.0 * np.pi * self.r**2 * self.h
        w.flags.writeable = False
        return w

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        k = np.pi * np.arange(1, self.N + 1) / ((self.N + 1) * self.h)
        k.flags.writeable = False
        return k

    def symbol(self, method: str | None = None) -> np.ndarray:
        """Eigenvalues of -Laplacian in the sine basis (nonnegative)."""
        method = method or self.laplacian
        k = self.wavenumbers
        if method == "spectral":
            return k**2
        if method == "fd":
            theta = 0.5 * k * self.h
            return (2.0 * np.sin(theta) / self.h) ** 2
        raise GridError(f"unknown laplacian {method!r}")

    def scaled(self, factor: float) -> "RadialGrid":
        """Same node count, spacing multiplied by ``factor``."""
        return RadialGrid(self.N, self.h * factor, self.laplacian)

    def extended(self, N: int) -> "RadialGrid":
        return RadialGrid(N, self.h, self.laplacian)

    def integrate(self, f) -> float:
        f = _check_finite(f)
        if f.shape != (self.N,):
            raise GridError(f"expected {self.N} samples, got shape {f.shape}")
        total = np.dot(self.weights, f)
        return complex(total) if np.iscomplexobj(f) else float(total)

    def inner(self, u, v) -> float:
        """Real L^2(R^3) inner product Re <u, v>."""
        return float(np.real(np.dot(self.weights, np.conj(u) * v)))

    def norm(self, u) -> float:
        return float(np.sqrt(np.dot(self.weights, np.abs(u) ** 2)))

    # sine-basis transforms of w = r*u
    def to_sine(self, u):
        return sfft.dst(self.r * u, type=1, norm="ortho")

    def from_sine(self, c):
        return sfft.idst(c, type=1, norm="ortho") / self.r

    def apply_symbol(self, u, sym):
        """u -> F^{-1}[sym * F[u]] in the sine basis (sym broadcast per mode)."""
        return self.from_sine(sym * self.to_sine(u))

    def gradient_norm2(self, u, method: str | None = None) -> float:
        """||grad u||^2 = -int u Lap u, evaluated in the sine basis."""
        c = self.to_sine(u)
        return float(4.0 * np.pi * self.h * np.dot(self.symbol(method), np.abs(c) ** 2))


def make_radial_grid(N: int, R: float, laplacian: str = "spectral") -> RadialGrid:
    """Grid with N interior nodes and last node at r_N = R."""
    if int(N) != N or N < MIN_NODES:
        raise GridError(f"N={N} too small; need at least {MIN_NODES} nodes")
    if not np.isfinite(R) or R <= 0:
        raise GridError(f"truncation radius must be finite and positive, got {R}")
    return RadialGrid(int(N), float(R) / int(N), laplacian)


def integrate(grid: RadialGrid, f) -> float:
    return grid.integrate(f)


def radial_laplacian(grid: RadialGrid, u, method: str | None = None):
    """Laplacian of a radial profile, computed as (r*u)''/r.

    ``method="fd"`` is the second centered difference of w = r*u with
    w(0) = w((N+1)h) = 0; ``"spectral"`` differentiates w exactly in the sine
    basis.  Complex input is handled componentwise.
    """
    u = _check_finite(u, "field values")
    method = method or grid.laplacian
    if method == "fd":
        w = np.concatenate(([0.0], grid.r * u, [0.0]))
        return (w[2:] - 2.0 * w[1:-1] + w[:-2]) / grid.h**2 / grid.r
    return grid.apply_symbol(u, -grid.symbol(method))


def radial_derivative(grid: RadialGrid, u):
    """du/dr by centered differences; u(0) from the even extension, u((N+1)h) = 0."""
    u0 = (4.0 * u[0] - u[1]) / 3.0
    ext = np.concatenate(([u0], u, [0.0]))
    return (ext[2:] - ext[:-2]) / (2.0 * grid.h)


@dataclass(frozen=True)
class BoxGrid:
    """Periodic cube [-L, L)^3 with n points per axis (cross-validation only)."""

    n: int
    L: float

    def __post_init__(self):
        if self.n < 32 or self.n & (self.n - 1):
            raise GridError("box grid needs n >= 32 and a power of two")
        if not self.L > 0:
            raise GridError("box half length must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def radius(self) -> np.ndarray:
        x = self.axis
        return np.sqrt(x[:, None, None] ** 2 + x[None, :, None] ** 2 + x[None, None, :] ** 2)

    @cached_property
    def kmag(self) -> np.ndarray:
        k = 2.0 * np.pi * sfft.fftfreq(self.n, d=self.dx)
        return np.sqrt(k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2)

    @property
    def cell(self) -> float:
        return self.dx**3

    def integrate(self, f) -> float:
        return float(np.sum(np.real(f)) * self.cell)

    def sample(self, func):
        """Evaluate a radial function f(|x|) on the box."""
        return func(self.radius)
