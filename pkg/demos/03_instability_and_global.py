# 03_instability_and_global.py
#
# Time evolution.  Stretching the ground state along its fiber (theta > 0)
# drives P negative and the solution blows up; compressing it (theta < 0)
# keeps P positive and the solution stays bounded.  About two minutes.

import math

import numpy as np

from bopp_podolsky.dynamics import evolve, global_trial, instability_experiment, virial_check
from bopp_podolsky.fields import Field, ModelParams, gaussian
from bopp_podolsky.grid import make_radial_grid
from bopp_podolsky.solvers import ground_state, natural_grid

# -----------------------------------------------------------------------------
# 1. Sanity: a Gaussian under the full flow conserves mass and energy
# -----------------------------------------------------------------------------
params = ModelParams(4.0, 1.0, 1.0)
psi0 = gaussian(make_radial_grid(2047, 40.0), 1.0, 1.0)
for dt in (4e-3, 2e-3):
    rec = evolve(psi0, params, dt, 5.0, sample_every=20)
    print(f"dt={dt:g}: mass drift {rec.mass_drift():.1e}, energy drift {rec.energy_drift():.2e}, "
          f"virial {virial_check(rec):.1e}")

# -----------------------------------------------------------------------------
# 2. Strong instability of the standing wave at (p, a, m) = (4, 1, 0.5)
# -----------------------------------------------------------------------------
params = ModelParams(4.0, 1.0, 0.5)
gs = ground_state(params)
rec, checks = instability_experiment(gs, params, theta=0.1)
print(f"\nE(psi0) = {checks['E_psi0']:.3f} < gamma = {checks['gamma']:.3f}, P(psi0) = {checks['P_psi0']:.1f}")
print("status:", rec.status, "-", rec.message)
a = rec.arrays()
print(f"P stayed below 2(E0 - gamma) = {checks['bound']:.2f}: {checks['bound_holds']}")
print(f"variance V(t) fell from {a['variance'][0]:.3e} to {a['variance'][-1]:.3e}")
print(f"virial deviation up to the trigger {virial_check(rec):.1e}")

# -----------------------------------------------------------------------------
# 3. Global existence below the level with P > 0
# -----------------------------------------------------------------------------
params = ModelParams(4.0, 1.0, 1.6)
grid, s = natural_grid(params)
gs = ground_state(params, grid=grid, scale=s)
theta = -0.2
psi0 = Field(gs.u.grid.scaled(math.exp(-theta)), math.exp(1.5 * theta) * gs.u.values)
rec, checks = global_trial(psi0, params, gs.level, T=20.0)
g = np.asarray(rec.grad2)
print(f"\nkappa(u_m, {theta}): E0 {checks['E_psi0']:.2f} < gamma {gs.level:.2f}, P0 {checks['P_psi0']:.2f}")
print(f"to T=20: min P {checks['min_P']:.2f}, grad2 in [{g.min():.1f}, {g.max():.1f}] "
      f"under the bound {checks['grad_bound']:.1f}")
