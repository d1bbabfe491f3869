# 01_free_profile_and_kernel.py
#
# The two building blocks: the free profile Q and the Bopp-Podolsky potential.
# Runs in a few seconds.

import math

import numpy as np

from bopp_podolsky import kernel
from bopp_podolsky.fields import Field, gaussian
from bopp_podolsky.functionals import gn_ratio
from bopp_podolsky.grid import make_radial_grid
from bopp_podolsky.solvers import q_at_origin, q_identities, solve_Q

# -----------------------------------------------------------------------------
# 1. Q solves -(3(p-2)/4) Lap Q + ((6-p)/4) Q = Q^{p-1}
# -----------------------------------------------------------------------------
# Shooting fixes Q(0); a Newton polish on the grid makes the integral
# identities ||grad Q||^2 = ||Q||^2 = (2/p)||Q||_p^p hold to round-off.
print("p     Q(0)        grad/mass   lp/mass")
for p in (2.5, 3.5, 4.0, 5.0):
    Q = solve_Q(p)
    ids = q_identities(Q, p)
    print(f"{p:<5} {q_at_origin(Q):.8f}  {ids['grad_vs_mass']:.1e}     {ids['lp_vs_mass']:.1e}")

# -----------------------------------------------------------------------------
# 2. Q is the Gagliardo-Nirenberg optimizer
# -----------------------------------------------------------------------------
Q = solve_Q(4.0)
qn = Q.norm()
print("\nGN ratio at Q:", gn_ratio(Q, qn, 4.0))
for theta in (-0.5, 0.5):
    # kappa(Q, theta) on a rescaled grid: no interpolation involved
    kq = Field(Q.grid.scaled(math.exp(-theta)), math.exp(1.5 * theta) * Q.values)
    print(f"GN ratio at kappa(Q, {theta:+}):", gn_ratio(kq, qn, 4.0))
grid = make_radial_grid(4096, 40.0)
rng = np.random.default_rng(7)
ratios = [gn_ratio(gaussian(grid, rng.uniform(0.2, 3), rng.uniform(0.3, 3)), qn, 4.0) for _ in range(10)]
print("Gaussians never reach the bound; best ratio", max(ratios))

# -----------------------------------------------------------------------------
# 3. The potential phi = (1 - e^{-|x|/a})/|x| * |u|^2
# -----------------------------------------------------------------------------
# The kernel is 1/a at the origin and Coulomb far away; a -> 0 gives
# back the pure Coulomb interaction.
u = Field(grid, np.exp(-0.5 * grid.r**2))
coul = kernel.coulomb_energy(u)
print("\na       int phi |u|^2   / Coulomb")
for a in (4.0, 1.0, 0.25, 0.0625):
    e = kernel.nonlocal_energy(u, a)
    print(f"{a:<7} {e:.6f}       {e / coul:.4f}")

phi = kernel.phi_bp_radial(u, 1.0).values
print("far field r*phi(r) =", phi[-1] * grid.r[-1], " total charge =", u.mass())

rep = kernel.cross_validate(1.0)
print("radial O(N) path vs 3D FFT path: max gap", rep["max_phi_gap"])
