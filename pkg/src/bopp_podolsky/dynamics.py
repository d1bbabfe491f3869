"""Time evolution of i psi_t + Lap psi - (K * |psi|^2) psi + |psi|^{p-2} psi = 0.

Strang splitting on the radial grid.  The nonlinear flow leaves |psi|
unchanged, so its half-step is an exact phase rotation; the linear flow is
exact in the sine basis of w = r psi.  Both substeps are unitary in the
discrete L^2 norm, so mass is conserved to round-off.  Consecutive
nonlinear half-steps are fused between samples.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .fields import Field, FieldError, ModelParams
from .functionals import EnergyBreakdown, Terms, assemble, energy_values
from .grid import RadialGrid


class HypothesisError(ValueError):
    """Initial data fail the hypotheses of the experiment."""


@dataclass
class TrajectoryRecord:
    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    pohozaev: list = field(default_factory=list)
    grad2: list = field(default_factory=list)
    variance: list = field(default_factory=list)
    edge: list = field(default_factory=list)
    status: str = "completed"  # completed | blowup_detected | error
    message: str = ""
    steps: int = 0
    final: Field | None = None

    def arrays(self) -> dict:
        return {k: np.asarray(getattr(self, k)) for k in ("times", "mass", "energy", "pohozaev", "grad2", "variance", "edge")}

    def rows(self) -> list[dict]:
        a = self.arrays()
        return [{k: float(a[k][i]) for k in a} for i in range(len(self.times))]

    def mass_drift(self) -> float:
        m = np.asarray(self.mass)
        return float(np.max(np.abs(m - m[0])) / m[0])

    def energy_drift(self) -> float:
        e = np.asarray(self.energy)
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def monitors(grid: RadialGrid, psi, params: ModelParams, linear_only: bool = False) -> EnergyBreakdown:
    """The single code path for every logged functional."""
    if linear_only:
        t = Terms(grid.gradient_norm2(psi), 0.0, 0.0, 0.0, grid.norm(psi) ** 2)
        return assemble(t, params.p, params.a, 0.0)
    return energy_values(grid, psi, params.p, params.a)


def variance(grid: RadialGrid, psi) -> float:
    """V = int |x|^2 |psi|^2."""
    return float(np.dot(grid.weights * grid.r**2, np.abs(psi) ** 2))


def edge_fraction(grid: RadialGrid, psi, outer: float = 0.1) -> float:
    """Share of the mass in the outer ``outer`` fraction of the box.

    Once this is non-negligible the wall reflects the wave and free-space
    identities such as the virial law no longer apply.
    """
    rho = grid.weights * np.abs(psi) ** 2
    total = float(np.sum(rho))
    return float(np.sum(rho[grid.r > (1.0 - outer) * grid.R]) / total) if total > 0 else 0.0


def free_window(traj: "TrajectoryRecord", tol: float = 1e-6) -> int:
    """Number of leading samples before the edge mass first exceeds ``tol``."""
    e = np.asarray(traj.edge)
    hit = np.nonzero(e > tol)[0]
    return int(hit[0]) if hit.size else len(e)


class Propagator:
    def __init__(self, grid: RadialGrid, params: ModelParams, linear_only: bool = False):
        self.grid, self.params, self.linear_only = grid, params, linear_only
        self.k2 = grid.symbol()
        self._phase = (None, None)

    def potential(self, psi):
        """phi_psi - |psi|^{p-2}: the real potential of the nonlinear substep."""
        rho = np.abs(psi) ** 2
        return kernel._phi_values(self.grid, rho, self.params.a) - rho ** (0.5 * self.params.p - 1.0)

    def nonlinear(self, psi, dt, V=None):
        if self.linear_only:
            return psi
        if V is None:
            V = self.potential(psi)
        return psi * np.exp(-1j * dt * V)

    def linear(self, psi, dt):
        if self._phase[0] != dt:
            self._phase = (dt, np.exp(-1j * dt * self.k2))
        return self.grid.apply_symbol(psi, self._phase[1])

    def step(self, psi, dt):
        psi = self.nonlinear(psi, 0.5 * dt)
        psi = self.linear(psi, dt)
        return self.nonlinear(psi, 0.5 * dt)


def _record(rec, grid, psi, params, t, linear_only):
    b = monitors(grid, psi, params, linear_only)
    rec.times.append(t)
    rec.mass.append(b.mass2)
    rec.energy.append(b.E)
    rec.pohozaev.append(b.P)
    rec.grad2.append(b.grad2)
    rec.variance.append(variance(grid, psi))
    rec.edge.append(edge_fraction(grid, psi))
    return b


def evolve(
    psi0: Field,
    params: ModelParams,
    dt: float,
    T: float,
    sample_every: int = 1,
    linear_only: bool = False,
    adaptive: bool = False,
    cfl: float = 0.02,
    blowup_factor: float = 20.0,
    dt_min: float | None = None,
    checkpoint=None,
    checkpoint_every: float = 60.0,
) -> TrajectoryRecord:
    """Integrate from psi0 over [0, T] (T < 0 integrates backwards).

    With ``adaptive`` the step is min(dt, cfl * tau) where tau is the
    shortest local time scale, 1/max(|V|_inf, ||grad psi||^2/||psi||^2).
    Blowup is reported when ||grad psi|| reaches ``blowup_factor`` times its
    initial value or the adaptive step falls below ``dt_min`` (default 1e-7
    in units of the initial time scale).
    """
    grid = psi0.grid
    psi = np.asarray(psi0.values, dtype=complex).copy()
    if not np.all(np.isfinite(psi)):
        raise FieldError("non-finite initial data")
    if dt <= 0:
        raise FieldError("dt must be positive")
    direction = 1.0 if T >= 0 else -1.0
    T = abs(T)
    prop = Propagator(grid, params, linear_only)
    rec = TrajectoryRecord()
    b0 = _record(rec, grid, psi, params, 0.0, linear_only)
    g0 = b0.grad2
    tau0 = b0.mass2 / g0 if g0 > 0 else 1.0
    if dt_min is None:
        dt_min = 1e-7 * tau0
    limit = blowup_factor**2 * g0
    fixed = not adaptive or linear_only
    nsteps = max(1, math.ceil(T / dt - 1e-9)) if fixed else None
    if fixed:
        dt = T / nsteps
    t = 0.0
    n = 0
    last_ckpt = time.monotonic()
    V = None if linear_only else prop.potential(psi)
    while (n < nsteps) if fixed else (t < T):
        h = dt
        last = False
        if not fixed:
            scale = max(np.max(np.abs(V)), rec.grad2[-1] / rec.mass[-1])
            h = min(dt, cfl / scale)
            if h < dt_min:
                rec.status = "blowup_detected"
                rec.message = f"adaptive step {h:.3e} below floor {dt_min:.3e} at t={t:.6e}"
                break
        if fixed:
            h = T / nsteps
        elif T - t < 1.001 * h:
            h, last = T - t, True
        s = direction * h
        psi = prop.nonlinear(psi, 0.5 * s, V)
        psi = prop.linear(psi, s)
        V = None if linear_only else prop.potential(psi)
        psi = prop.nonlinear(psi, 0.5 * s, V)
        n += 1
        t = n * h if fixed else (T if last else t + h)
        done = n == nsteps if fixed else last
        if not np.all(np.isfinite(psi)):
            rec.status, rec.message = "error", f"non-finite values at t={t:.6e}"
            break
        if n % sample_every == 0 or done:
            b = _record(rec, grid, psi, params, direction * t, linear_only)
            if b.grad2 >= limit:
                rec.status = "blowup_detected"
                rec.message = f"||grad psi|| grew by {math.sqrt(b.grad2 / g0):.1f}x at t={t:.6e}"
                break
        if checkpoint is not None and time.monotonic() - last_ckpt >= checkpoint_every:
            from .io import write_field

            write_field(Field(grid, psi, {"kind": "checkpoint"}), checkpoint, params.p, params.a, {"t": direction * t})
            last_ckpt = time.monotonic()
    rec.steps = n
    rec.final = Field(grid, psi, {"kind": "psi", "t": direction * t})
    return rec


# -- diagnostics ------------------------------------------------------------


def virial_check(traj: TrajectoryRecord, params: ModelParams | None = None, upto: int | None = None) -> float:
    """Max over interior samples of |V'' - 8P| / (8 max ||grad psi||^2).

    V'' is the three-point second difference, taken at samples whose two
    neighbouring intervals differ by at most a factor 2.  ``upto`` restricts to samples before a trigger.
    """
    t = np.asarray(traj.times, dtype=float)
    V = np.asarray(traj.variance)
    P = np.asarray(traj.pohozaev)
    g = np.asarray(traj.grad2)
    if upto is not None:
        t, V, P, g = t[:upto], V[:upto], P[:upto], g[:upto]
    if t.size < 5:
        raise ValueError("too few samples for a second difference")
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    d2 = 2.0 * (h1 * V[2:] - (h1 + h2) * V[1:-1] + h2 * V[:-2]) / (h1 * h2 * (h1 + h2))
    # a short final interval amplifies round-off in V by max(h)/min(h)
    even = np.minimum(h1, h2) >= 0.5 * np.maximum(h1, h2)
    if not even.any():
        raise ValueError("no evenly spaced sample triples")
    return float(np.max(np.abs(d2 - 8.0 * P[1:-1])[even]) / (8.0 * np.max(g)))


def free_gaussian_variance(t, V0: float, grad2: float):
    """V(t) = V0 + 4 ||grad psi0||^2 t^2 for real initial data under the free flow."""
    return V0 + 4.0 * grad2 * np.asarray(t) ** 2


def global_bound(params: ModelParams, E0: float) -> float:
    """||grad psi||^2 <= 6(p-2)/(3p-10) E(psi0) while P > 0."""
    p = params.p
    return 6.0 * (p - 2.0) / (3.0 * p - 10.0) * E0


def _time_unit(b: EnergyBreakdown) -> float:
    return b.mass2 / b.grad2


DT_FRACTION = 0.01


def default_dt(psi0: Field, params: ModelParams, linear_only: bool = False) -> float:
    """DT_FRACTION of the shortest intrinsic time: ||psi||^2/||grad psi||^2 or 1/max|V|."""
    b = monitors(psi0.grid, psi0.values, params, linear_only)
    tau = _time_unit(b)
    if not linear_only:
        vmax = float(np.max(np.abs(Propagator(psi0.grid, params).potential(psi0.values))))
        if vmax > 0:
            tau = min(tau, 1.0 / vmax)
    return DT_FRACTION * tau


def instability_experiment(
    ground,
    params: ModelParams,
    theta: float = 0.1,
    T: float = 20.0,
    refine: int = 8,
    cfl: float = 0.02,
    sample_every: int = 5,
    tol: float = 1e-6,
) -> tuple[TrajectoryRecord, dict]:
    """Evolve psi0 = kappa(u_m, theta), theta > 0, and check the blowup scenario.

    ``ground`` is a GroundStateResult (or a Field at the minimizing level).
    kappa is realized exactly by shrinking the grid spacing by e^theta;
    ``refine`` > 1 moves psi0 onto a finer grid by sine-series interpolation.
    """
    if params.regime != "supercritical":
        raise FieldError("instability needs p > 10/3")
    if theta <= 0:
        raise FieldError("theta must be positive")
    u = ground.u if hasattr(ground, "u") else ground
    gamma = energy_values(u.grid, u.values, params.p, params.a).E
    grid0 = u.grid.scaled(math.exp(-theta))
    psi0 = Field(grid0, u.values * math.exp(1.5 * theta), {"kind": "psi0"})
    if refine > 1:
        from .fields import resample_spectral

        fine = RadialGrid(u.grid.N * refine, u.grid.h / refine, u.grid.laplacian)
        psi0 = resample_spectral(psi0, fine)
    b0 = monitors(psi0.grid, psi0.values, params)
    checks = {"E_psi0": b0.E, "gamma": gamma, "P_psi0": b0.P, "E_below_level": b0.E < gamma, "P_negative": b0.P < 0}
    if not (checks["E_below_level"] and checks["P_negative"]):
        raise HypothesisError(f"psi0 not in the unstable set: {checks}")
    tau = _time_unit(b0)
    rec = evolve(psi0.to_complex(), params, dt=cfl * tau, T=T, adaptive=True, cfl=cfl, sample_every=sample_every)
    P = np.asarray(rec.pohozaev)
    bound = 2.0 * (b0.E - gamma)
    slack = tol * np.maximum(np.abs(np.asarray(rec.energy)), np.asarray(rec.grad2))
    checks.update(
        P_negative_throughout=bool(np.all(P < 0)),
        bound=bound,
        bound_holds=bool(np.all(P <= bound + slack)),
        max_bound_excess=float(np.max(P - bound)),
        status=rec.status,
        t_end=float(rec.times[-1]),
        energy_drift=rec.energy_drift(),
        mass_drift=rec.mass_drift(),
    )
    return rec, checks


def global_trial(
    psi0: Field,
    params: ModelParams,
    gamma_m: float,
    T: float = 20.0,
    dt: float | None = None,
    sample_every: int = 10,
    tol: float = 1e-6,
) -> tuple[TrajectoryRecord, dict]:
    """Evolve data with P(psi0) > 0 and E(psi0) < gamma(m); check P > 0 and the gradient bound."""
    if params.regime != "supercritical":
        raise FieldError("global trial needs p > 10/3")
    b0 = monitors(psi0.grid, psi0.values, params)
    if not (b0.P > 0 and b0.E < gamma_m):
        raise HypothesisError(f"hypotheses violated: P(psi0)={b0.P:.6e}, E(psi0)={b0.E:.6e}, gamma={gamma_m:.6e}")
    if dt is None:
        dt = 0.05 * _time_unit(b0)
    rec = evolve(psi0.to_complex(), params, dt=dt, T=T, sample_every=sample_every)
    bound = global_bound(params, b0.E)
    g = np.asarray(rec.grad2)
    P = np.asarray(rec.pohozaev)
    checks = {
        "E_psi0": b0.E,
        "P_psi0": b0.P,
        "gamma": gamma_m,
        "P_positive_throughout": bool(np.all(P > 0)),
        "min_P": float(P.min()),
        "grad_bound": bound,
        "max_grad2": float(g.max()),
        "bounded": bool(np.all(g <= bound * (1.0 + tol))),
        "status": rec.status,
        "energy_drift": rec.energy_drift(),
    }
    return rec, checks
