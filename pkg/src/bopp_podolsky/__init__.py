"""Normalized ground states and dynamics for the Schrodinger equation with Bopp-Podolsky screening."""

__version__ = "0.1.0"

from .fields import Field, FieldError, ModelParams, gaussian, normalize_mass
from .functionals import EnergyBreakdown, energy, euler_lagrange_residual, fiber_theta, gn_ratio, lagrange_multiplier
from .grid import BoxGrid, RadialGrid, make_radial_grid
from .kernel import nonlocal_energy, pair_energy_exp, phi_bp_radial, phi_bp_spectral
from .solvers import GroundStateResult, decay_diagnostic, gamma_curve, ground_state, solve_Q

__all__ = [
    "BoxGrid",
    "EnergyBreakdown",
    "Field",
    "FieldError",
    "GroundStateResult",
    "ModelParams",
    "RadialGrid",
    "decay_diagnostic",
    "energy",
    "euler_lagrange_residual",
    "fiber_theta",
    "gamma_curve",
    "gaussian",
    "gn_ratio",
    "ground_state",
    "lagrange_multiplier",
    "make_radial_grid",
    "nonlocal_energy",
    "normalize_mass",
    "pair_energy_exp",
    "phi_bp_radial",
    "phi_bp_spectral",
    "solve_Q",
]
