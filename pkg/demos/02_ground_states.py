# 02_ground_states.py
#
# Normalized ground states in both regimes, the gamma(m) curve and the
# small-mass limit where u_m looks like a rescaled Q.  About a minute.

import numpy as np

from bopp_podolsky.asymptotics import closed_forms, limit_ratios, omega_limit
from bopp_podolsky.fields import ModelParams
from bopp_podolsky.functionals import energy
from bopp_podolsky.solvers import cached_Q, gamma_curve, ground_state, natural_grid

# -----------------------------------------------------------------------------
# 1. Mass-subcritical: a true minimizer of E on the mass sphere
# -----------------------------------------------------------------------------
params = ModelParams(p=2.5, a=1.0, m=1.0)
res = ground_state(params)
cf = closed_forms(params, cached_Q(2.5))
print(f"p=2.5: level {res.level:.6f}, free level {cf.E_tilde:.6f}, omega {res.omega:.3e}")
print("  residual", res.el_residual_rel, " converged", res.converged)

# -----------------------------------------------------------------------------
# 2. Mass-supercritical: a mountain-pass level on the Pohozaev set
# -----------------------------------------------------------------------------
params = ModelParams(p=4.0, a=1.0, m=0.5)
res = ground_state(params)
b = energy(res.u, params)
print(f"\np=4: gamma(0.5) = {res.level:.4f}, omega = {res.omega:.2f}")
print(f"  P(u_m) = {b.P:.2e} against kinetic {b.kinetic:.2e}")
print(f"  Ebar = E - 2P/(3(p-2)) = {b.Ebar:.4f} > 0")
print(f"  the profile lives on a grid of extent {res.u.grid.R:.4f} (s_m = {res.scale:.2f})")

# -----------------------------------------------------------------------------
# 3. gamma(m) is nonincreasing
# -----------------------------------------------------------------------------
rows = gamma_curve(ModelParams(4.0, 1.0, 1.0), np.linspace(0.2, 1.6, 8))
print("\nm      gamma(m)     omega(m)")
for r in rows:
    print(f"{r['m']:.2f}   {r['gamma']:10.4f}   {r['omega']:10.4f}")

# -----------------------------------------------------------------------------
# 4. m -> 0: u_m concentrates like Q
# -----------------------------------------------------------------------------
# With a small kernel length the nonlocal term is Coulomb-like and its
# relative weight fades as m^2 / s_m, so the ratios approach their limits.
params = ModelParams(4.0, 1e-3, 0.5)
results = []
for m in (0.5, 0.25, 0.125, 0.0625):
    pm = params.with_mass(m)
    grid, s = natural_grid(pm)
    results.append(ground_state(pm, grid=grid, scale=s))
print(f"\nlimits: grad ratio 1, omega/s^2 {omega_limit(4.0):.6f}, distance 0")
for row in limit_ratios(results, params, cached_Q(4.0)):
    print(f"m={row['m']:<7} grad {row['grad_ratio']:.10f}  omega/s^2 {row['omega_ratio']:.8f}  "
          f"H1 distance to Q {row['distance_to_Q']:.2e}")
