"""Ground states: the free profile Q, and normalized ground states in both regimes.

All ground-state solves run on a grid matched to the concentration scale
s_m of the free problem: the Q grid shrunk by 1/s_m.  Solutions at small
mass have width ~ 1/s_m, which would be unresolvable on a fixed grid.

Every solver has two phases.  A descent phase (normalized Sobolev gradient
flow, or project-then-descend on the Pohozaev manifold) does the global
work; a Newton-GMRES phase then solves the discrete Euler-Lagrange system
to round-off.  The descent phase is logged in ``history`` with
``phase="flow"``; Newton steps with ``phase="newton"``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import LinearOperator, gmres

from . import kernel
from .fields import Field, FieldError, ModelParams, gaussian, normalize_mass, regrid, resample_spectral
from .functionals import (
    energy_values,
    gradient,
    h1_norm,
    fiber_theta,
)
from .grid import RadialGrid, make_radial_grid, radial_derivative, radial_laplacian

log = logging.getLogger(__name__)

DEFAULT_N = 4096
M_MAX = 2.0


class SolverError(RuntimeError):
    pass


class StallError(SolverError):
    pass


# -- the free profile Q ------------------------------------------------------


def q_decay_rate(p: float) -> float:
    """Q ~ e^{-k r}/r at infinity with k = sqrt((6-p) / (3(p-2)))."""
    return math.sqrt((6.0 - p) / (3.0 * (p - 2.0)))


def q_grid(p: float, N: int = DEFAULT_N, R: float | None = None) -> RadialGrid:
    """Grid on which Q has decayed to ~1e-12 of its peak at r_N."""
    if R is None:
        R = max(20.0, 28.0 / q_decay_rate(p))
    return make_radial_grid(N, R)


def _q_rhs(p):
    c = 4.0 / (3.0 * (p - 2.0))
    b = 0.25 * (6.0 - p)

    def rhs(r, y):
        q, dq = y
        return [dq, -2.0 * dq / r + c * (b * q - abs(q) ** (p - 2.0) * q)]

    return rhs, c, b


def _shoot(p, q0, r_end, rtol):
    """Integrate from the origin; classify as 'over' (crosses 0) or 'under' (turns up)."""
    rhs, c, b = _q_rhs(p)
    r0 = 1e-6
    q2 = c * (b * q0 - q0 ** (p - 1.0)) / 3.0
    y0 = [q0 + q2 * r0**2, 2.0 * q2 * r0]

    def cross(r, y):
        return y[0]

    def turn(r, y):
        return y[1]

    cross.terminal = turn.terminal = True
    cross.direction, turn.direction = -1, 1
    sol = solve_ivp(rhs, (r0, r_end), y0, method="DOP853", rtol=rtol, atol=1e-14 * q0,
                    events=(cross, turn), dense_output=True)
    if sol.t_events[0].size:
        return "over", sol
    return "under", sol


@dataclass
class ShootingResult:
    q0: float
    bracket: tuple
    r_valid: float
    profile: object  # callable r -> Q(r)


def shoot_Q(p: float, rtol: float = 1e-12, r_end: float = 200.0, max_iter: int = 200) -> ShootingResult:
    """Bisection on Q(0) between undershoot (Q' turns positive) and overshoot (Q crosses zero)."""
    if not 2.0 < p < 6.0:
        raise FieldError(f"p out of range (2,6): {p}")
    b = 0.25 * (6.0 - p)
    lo = b ** (1.0 / (p - 2.0)) * (1.0 + 1e-9)  # the constant solution; anything below undershoots
    hi = 2.0 * lo
    while _shoot(p, hi, r_end, rtol)[0] == "under":
        lo, hi = hi, 2.0 * hi
        if hi > 1e8:
            raise SolverError(f"no overshoot found; last bracket ({lo}, {hi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        kind, _ = _shoot(p, mid, r_end, rtol)
        if kind == "over":
            hi = mid
        else:
            lo = mid
    else:
        raise SolverError(f"bisection exhausted; last bracket ({lo}, {hi})")
    _, s_lo = _shoot(p, lo, r_end, rtol)
    _, s_hi = _shoot(p, hi, r_end, rtol)
    # the two bracketing trajectories agree until they peel off the separatrix
    t_end = min(s_lo.t[-1], s_hi.t[-1])
    rr = np.linspace(1e-6, t_end, 20001)
    ql, qh = s_lo.sol(rr)[0], s_hi.sol(rr)[0]
    qm = 0.5 * (ql + qh)
    ok = (np.abs(qh - ql) <= 1e-6 * np.abs(qm)) & (qm > 0)
    bad = np.flatnonzero(~ok)
    i_valid = (bad[0] - 1) if bad.size else rr.size - 1
    r_valid = float(rr[max(i_valid, 1)])
    kdec = q_decay_rate(p)
    q_match = 0.5 * (s_lo.sol(r_valid)[0] + s_hi.sol(r_valid)[0])
    amp = q_match * r_valid * math.exp(kdec * r_valid)

    def profile(r):
        r = np.asarray(r, dtype=float)
        inner = np.minimum(np.maximum(r, 1e-6), r_valid)
        core = 0.5 * (s_lo.sol(inner)[0] + s_hi.sol(inner)[0])
        tail = amp * np.exp(-kdec * r) / np.maximum(r, 1e-300)
        return np.where(r <= r_valid, core, tail)

    return ShootingResult(q0=0.5 * (lo + hi), bracket=(lo, hi), r_valid=r_valid, profile=profile)


def q_residual(grid: RadialGrid, q, p: float):
    """-(3(p-2)/4) Lap Q + (6-p)/4 Q - |Q|^{p-2} Q."""
    return (-0.75 * (p - 2.0) * radial_laplacian(grid, q) + 0.25 * (6.0 - p) * q
            - np.abs(q) ** (p - 2.0) * q)


def sine_inverse(grid: RadialGrid, diag):
    """v -> F^{-1}[F[v] / diag] in the sine basis."""
    return lambda v: grid.apply_symbol(v, 1.0 / diag)


def q_identities(Q: Field, p: float) -> dict:
    """Relative residuals of ||grad Q||^2 = ||Q||^2 = (2/p)||Q||_p^p."""
    g = Q.grid
    n2 = Q.mass()
    k2 = g.gradient_norm2(Q.values)
    lp = float(np.dot(g.weights, np.abs(Q.values) ** p))
    return {
        "grad_vs_mass": abs(k2 - n2) / n2,
        "lp_vs_mass": abs(2.0 * lp / p - n2) / n2,
        "grad2": k2,
        "mass2": n2,
        "lp": lp,
    }


def solve_Q(p: float, tol: float = 1e-10, grid: RadialGrid | None = None, max_newton: int = 30) -> Field:
    """Positive radial solution of -(3(p-2)/4) Lap Q + (6-p)/4 Q = Q^{p-1}.

    Shooting with bisection on Q(0) gives the profile; a Newton-GMRES polish
    then solves the discrete equation on ``grid`` so that the integral
    identities hold at the discrete level.  Converged when both identity
    residuals are at most ``tol``.
    """
    if not 2.0 < p < 6.0:
        raise FieldError(f"p out of range (2,6): {p}")
    grid = grid or q_grid(p)
    shot = shoot_Q(p)
    q = shot.profile(grid.r)
    lin = 0.75 * (p - 2.0) * grid.symbol() + 0.25 * (6.0 - p)
    precond = sine_inverse(grid, lin)
    scale = grid.norm(q)
    for it in range(max_newton):
        F = q_residual(grid, q, p)
        res = grid.norm(F) / scale
        ids = q_identities(Field(grid, q), p)
        log.debug("Q newton %d: residual %.3e, identities %.2e %.2e", it, res, ids["grad_vs_mass"], ids["lp_vs_mass"])
        if res < 1e-14 or (max(ids["grad_vs_mass"], ids["lp_vs_mass"]) <= tol and res < 1e-12):
            break
        pot = (p - 1.0) * np.abs(q) ** (p - 2.0)
        A = LinearOperator((grid.N, grid.N), matvec=lambda v: q_residual_lin(grid, v, lin, pot), dtype=float)
        M = LinearOperator((grid.N, grid.N), matvec=precond, dtype=float)
        dq, _ = gmres(A, -F, M=M, rtol=1e-13, restart=60, maxiter=20)
        q = q + dq
    ids = q_identities(Field(grid, q), p)
    if max(ids["grad_vs_mass"], ids["lp_vs_mass"]) > tol:
        raise SolverError(f"Q identities not met: {ids['grad_vs_mass']:.3e}, {ids['lp_vs_mass']:.3e}")
    # tail values below round-off carry no sign information
    if q[0] <= 0 or np.any(q < -1e-13 * q[0]):
        raise SolverError("Q lost positivity on the grid")
    return Field(grid, q, {"kind": "Q", "p": p, "q0_shooting": shot.q0, "r_valid": shot.r_valid})


def q_residual_lin(grid, v, lin, pot):
    return grid.apply_symbol(v, lin) - pot * v


@lru_cache(maxsize=16)
def _cached_Q(p: float, N: int, R: float | None) -> Field:
    return solve_Q(p, grid=q_grid(p, N, R))


def cached_Q(p: float, N: int = DEFAULT_N, R: float | None = None) -> Field:
    return _cached_Q(float(p), int(N), R)


def q_at_origin(Q: Field) -> float:
    """Q(0) from the sine series of r*Q (exact for the discrete profile)."""
    g = Q.grid
    c = g.to_sine(Q.values)
    return float(math.sqrt(2.0 / (g.N + 1)) * np.dot(c, g.wavenumbers))


# -- concentration scale and matched grids --------------------------------


def concentration_scale(p: float, m: float, q_norm: float) -> float:
    """s_m = [3(p-2)/4 (m/||Q||)^{p-2}]^{2/(10-3p)}."""
    return (0.75 * (p - 2.0) * (m / q_norm) ** (p - 2.0)) ** (2.0 / (10.0 - 3.0 * p))


def natural_grid(params: ModelParams, N: int = DEFAULT_N, R_q: float | None = None):
    """The Q grid shrunk by 1/s_m, and s_m itself."""
    Q = cached_Q(params.p, N, R_q)
    s = concentration_scale(params.p, params.m, Q.norm())
    return Q.grid.scaled(1.0 / s), s


# -- ground states -----------------------------------------------------------


@dataclass
class GroundStateResult:
    u: Field
    omega: float
    level: float
    pohozaev_residual: float
    el_residual: float
    iterations: int
    history: list = field(default_factory=list)
    regime: str = "supercritical"
    params: ModelParams | None = None
    scale: float = 1.0
    converged: bool = True
    warnings: list = field(default_factory=list)

    @property
    def el_residual_rel(self) -> float:
        """||g||_{L^2} / ||u||_{H^1}."""
        return self.el_residual / h1_norm(self.u)

    @property
    def kinetic(self) -> float:
        return 0.5 * self.u.grid.gradient_norm2(self.u.values)

    def summary(self) -> dict:
        return {
            "omega": self.omega,
            "level": self.level,
            "pohozaev_residual": self.pohozaev_residual,
            "el_residual": self.el_residual,
            "el_residual_rel": self.el_residual_rel,
            "iterations": self.iterations,
            "regime": self.regime,
            "scale": self.scale,
            "converged": self.converged,
            "warnings": list(self.warnings),
        }


def _scaled_residual(grid, u, g, s):
    """||g|| / (s ||u||_{H^1_s}); equals ||g||/||u||_{H^1} when s = 1, invariant under x -> x/s."""
    h1s = math.sqrt(grid.gradient_norm2(u) + s**2 * grid.norm(u) ** 2)
    return grid.norm(g) / (s * h1s)


def _el(grid, u, p, a):
    b = energy_values(grid, u, p, a)
    g = gradient(grid, u, p, a) + b.omega * u
    return b, g


def _precond(grid, c, sobolev=True):
    if not sobolev:
        return lambda v: v
    return sine_inverse(grid, grid.symbol() + c)


def _literal_residual(grid, u, g):
    return grid.norm(g) / math.sqrt(grid.norm(u) ** 2 + grid.gradient_norm2(u))


def _newton(grid, u, params, s, m, tol, history, max_iter=25):
    """Newton-GMRES on (grad E(u) + omega u = 0, ||u||^2 = m^2).

    Iterates until the residual relative to ||u||_{H^1} is below ``tol`` in
    both the physical and the natural (x -> x/s) units, or until round-off
    stops the decrease.
    """
    p, a = params.p, params.a
    N = grid.N
    w = grid.weights
    best = None
    prev = math.inf
    for it in range(max_iter):
        b, g = _el(grid, u, p, a)
        res = _scaled_residual(grid, u, g, s)
        lit = _literal_residual(grid, u, g)
        history.append({"phase": "newton", "E": b.E, "P": abs(b.P), "residual": res, "residual_h1": lit})
        if best is None or max(res, lit) < best[0]:
            best = (max(res, lit), u)
        if max(res, lit) <= tol:
            break
        if max(res, lit) > 0.3 * prev and res < 1e-6:
            break  # round-off floor
        prev = max(res, lit)
        omega = b.omega
        rho = u * u
        phi = kernel._phi_values(grid, rho, a)
        pot = omega + phi - (p - 1.0) * np.abs(u) ** (p - 2.0)
        symbol = grid.symbol()

        def matvec(x):
            du, dw = x[:N], x[N]
            out = np.empty(N + 1)
            out[:N] = (grid.apply_symbol(du, symbol) + pot * du
                       + 2.0 * u * kernel._phi_values(grid, u * du, a) + dw * u)
            out[N] = np.dot(w, u * du) / m
            return out

        c = max(omega, 0.1 * s**2)
        inv = sine_inverse(grid, symbol + c)

        def prec(x):
            out = np.empty(N + 1)
            out[:N] = inv(x[:N])
            out[N] = x[N]
            return out

        rhs = np.concatenate((-g, [0.0]))
        A = LinearOperator((N + 1, N + 1), matvec=matvec, dtype=float)
        M = LinearOperator((N + 1, N + 1), matvec=prec, dtype=float)
        dx, _ = gmres(A, rhs, M=M, rtol=1e-12, restart=80, maxiter=10)
        u = normalize_mass(Field(grid, u + dx[:N]), m).values
    return best[1]


def _fit_tail(grid, u, omega, max_nodes=1 << 16):
    """Extend the grid (same spacing) until e^{-sqrt(omega) R} is negligible."""
    if omega <= 0:
        return grid, u
    need = 18.0 / math.sqrt(omega)
    if need <= grid.R:
        return grid, u
    N = min(sfft.next_fast_len(int(math.ceil(need / grid.h))), max_nodes)
    log.info("extending grid from %d to %d nodes for the tail", grid.N, N)
    big = grid.extended(N)
    return big, regrid(Field(grid, u), big).values


def fiber_tangent(grid: RadialGrid, u):
    """d/dtheta kappa(u, theta) at theta = 0: (3/2) u + r u'."""
    return 1.5 * u + grid.r * radial_derivative(grid, u)


def _fiber_project(grid: RadialGrid, u, params: ModelParams, tol_p: float):
    """kappa(u, theta(u)), represented exactly by shrinking the grid spacing by e^theta.

    kappa(u, theta) sampled at spacing h e^{-theta} has values e^{3 theta/2} u_j,
    so mass and every discrete functional carry over without interpolation.
    """
    theta = fiber_theta(Field(grid, u), params, tol_p)
    return grid.scaled(math.exp(-theta)), u * math.exp(1.5 * theta)


def _initial(grid: RadialGrid, params: ModelParams, s: float, init) -> np.ndarray:
    if init is None:
        return gaussian(grid, params.m, width=1.0 / s).values
    if isinstance(init, Field):
        if init.grid.N != grid.N:
            raise FieldError("initial field must use the solver grid node count")
        vals = init.values
    else:
        vals = np.asarray(init, dtype=float)
    return normalize_mass(Field(grid, np.abs(vals)), params.m).values


def _finish(grid, u, params, s, history, iters, regime, tol, tol_p):
    p, a = params.p, params.a
    b, g = _el(grid, u, p, a)
    res = _scaled_residual(grid, u, g, s)
    warnings = []
    if res > tol:
        warnings.append(f"el residual {res:.2e} above tol {tol:.0e}")
    if abs(b.P) > tol_p * b.grad2:
        warnings.append(f"|P| {abs(b.P):.2e} above tol_P*grad2")
    if regime == "supercritical" and b.omega <= 0:
        warnings.append("omega <= 0 at convergence")
    if np.any(u <= 0):
        warnings.append("profile not positive node-wise")
    f = Field(grid, u, {"kind": "ground_state", "p": p, "a": a, "m": params.m})
    if f.tail_ratio() > 1e-8:
        warnings.append(f"tail ratio {f.tail_ratio():.2e}: grid too short")
    return GroundStateResult(
        u=f,
        omega=b.omega,
        level=b.E,
        pohozaev_residual=abs(b.P),
        el_residual=grid.norm(g),
        iterations=iters,
        history=history,
        regime=regime,
        params=params,
        scale=s,
        converged=not warnings,
        warnings=warnings,
    )


def ground_state_subcritical(
    params: ModelParams,
    grid: RadialGrid | None = None,
    scale: float | None = None,
    init=None,
    tol: float = 1e-8,
    switch: float = 1e-4,
    max_iter: int = 2000,
    tau_min: float = 1e-10,
    sobolev: bool = True,
) -> GroundStateResult:
    """Minimize E on S(m) for p < 10/3 by normalized (Sobolev) gradient flow."""
    if params.regime != "subcritical":
        raise FieldError("ground_state_subcritical needs p < 10/3")
    p, a, m = params.p, params.a, params.m
    if grid is None:
        grid, s = natural_grid(params)
    else:
        s = scale or 1.0
    u = _initial(grid, params, s, init)
    prec = _precond(grid, s**2, sobolev)
    history = []
    b, g = _el(grid, u, p, a)
    tau = 1.0 if sobolev else 0.1 / s**2
    it = 0
    for it in range(max_iter):
        res = _scaled_residual(grid, u, g, s)
        history.append({"phase": "flow", "E": b.E, "P": abs(b.P), "grad2": b.grad2, "residual": res, "tau": tau})
        if res <= switch:
            break
        d = -prec(g)
        d -= grid.inner(u, d) / m**2 * u
        while True:
            trial = normalize_mass(Field(grid, u + tau * d), m).values
            bt, gt = _el(grid, trial, p, a)
            if bt.E < b.E:
                break
            tau *= 0.5
            if tau < tau_min:
                raise StallError(f"stalled: no descent at tau={tau:.1e}, E={b.E:.12e}, residual={res:.2e}")
        u, b, g = trial, bt, gt
        tau = min(2.0 * tau, 4.0 if sobolev else 1.0 / s**2)
    grid, u = _fit_tail(grid, u, b.omega)
    u = _newton(grid, u, params, s, m, tol, history)
    return _finish(grid, u, params, s, history, it, "subcritical", tol, 1e-8)


def ground_state_supercritical(
    params: ModelParams,
    grid: RadialGrid | None = None,
    scale: float | None = None,
    init=None,
    tol: float = 1e-8,
    tol_p: float = 1e-8,
    switch: float = 1e-3,
    max_iter: int = 2000,
    tau_min: float = 1e-10,
    m_max: float = M_MAX,
    sobolev: bool = True,
) -> GroundStateResult:
    """Minimize E on the Pohozaev manifold V(m) (p > 10/3), project-then-descend."""
    if params.regime != "supercritical":
        raise FieldError("ground_state_supercritical needs p > 10/3")
    if params.m > m_max:
        raise FieldError(f"m={params.m} above m_max={m_max}")
    p, a, m = params.p, params.a, params.m
    if grid is None:
        grid, s = natural_grid(params)
    else:
        s = scale or 1.0
    u0 = _initial(grid, params, s, init)
    cur, u = _fiber_project(grid, u0, params, tol_p)
    history = []
    b, g = _el(cur, u, p, a)
    tau = 1.0 if sobolev else 0.1 / s**2
    it = 0
    for it in range(max_iter):
        res = _scaled_residual(cur, u, g, s)
        history.append({"phase": "flow", "E": b.E, "P": abs(b.P), "grad2": b.grad2, "residual": res, "tau": tau})
        if res <= switch:
            break
        d = -_precond(cur, s**2, sobolev)(g)
        d -= cur.inner(u, d) / m**2 * u
        # drop the fiber direction; the projection would undo it anyway
        t = fiber_tangent(cur, u)
        t -= cur.inner(u, t) / m**2 * u
        d -= cur.inner(t, d) / cur.inner(t, t) * t
        while True:
            trial = normalize_mass(Field(cur, u + tau * d), m).values
            tgrid, trial = _fiber_project(cur, trial, params, tol_p)
            bt, gt = _el(tgrid, trial, p, a)
            if bt.E < b.E:
                break
            tau *= 0.5
            if tau < tau_min:
                raise StallError(f"stalled: no descent at tau={tau:.1e}, E={b.E:.12e}, residual={res:.2e}")
        cur, u, b, g = tgrid, trial, bt, gt
        tau = min(2.0 * tau, 4.0)
    if cur != grid:
        u = resample_spectral(Field(cur, u), grid).values
    grid, u = _fit_tail(grid, u, b.omega)
    u = _newton(grid, u, params, s, m, tol, history)
    return _finish(grid, u, params, s, history, it, "supercritical", tol, tol_p)


def random_guess(grid: RadialGrid, s: float, seed: int) -> np.ndarray:
    """Sum of three positive Gaussian bumps with random centre, width and height on the 1/s scale."""
    rng = np.random.default_rng(seed)
    r = grid.r * s
    v = np.zeros_like(r)
    for _ in range(3):
        c, w, amp = rng.uniform(0.0, 1.5), rng.uniform(0.5, 2.0), rng.uniform(0.5, 1.5)
        v += amp * np.exp(-0.5 * ((r - c) / w) ** 2)
    return v


def ground_state(params: ModelParams, **kw) -> GroundStateResult:
    if params.regime == "subcritical":
        return ground_state_subcritical(params, **kw)
    return ground_state_supercritical(params, **kw)


def gamma_curve(params: ModelParams, m_values, N: int = DEFAULT_N, **kw) -> list[dict]:
    """gamma(m) and omega(m) along increasing m, warm-started from the previous point.

    Grids are natural (shrunk by 1/s_m), so the previous profile carries over
    node for node; the mass projection fixes the amplitude.
    """
    if params.regime != "supercritical":
        raise FieldError("gamma_curve needs p > 10/3")
    m_values = list(m_values)
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise FieldError("m_values must be increasing")
    rows, prev = [], None
    for m in m_values:
        pm = params.with_mass(m)
        row = {"m": m}
        try:
            grid, s = natural_grid(pm, N)
            res = ground_state_supercritical(pm, grid=grid, scale=s, init=prev, **kw)
            row.update(gamma=res.level, omega=res.omega, scale=s, el_residual=res.el_residual_rel,
                       pohozaev=res.pohozaev_residual, converged=res.converged, error="")
            prev = res.u.values
        except (SolverError, FieldError, ArithmeticError) as exc:
            row.update(gamma=float("nan"), omega=float("nan"), scale=float("nan"), el_residual=float("nan"),
                       pohozaev=float("nan"), converged=False, error=str(exc))
        rows.append(row)
    return rows


# -- tail diagnostics ---------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    """Envelope C1 r^{-3/4} exp(-C2 sqrt r) fitted on [r_lo, r_hi]."""

    C1: float
    C2: float
    residual: float
    r_lo: float
    r_hi: float

    def envelope(self, r):
        r = np.asarray(r, dtype=float)
        return self.C1 * r**-0.75 * np.exp(-self.C2 * np.sqrt(r))


def decay_diagnostic(u: Field, floor: float = 1e-12, min_points: int = 16) -> DecayFit:
    """Least-squares fit of log u + (3/4) log r = log C1 - C2 sqrt r on the outer third of the support.

    The support ends at the last node where u exceeds ``floor`` times its
    peak.  log C1 is then raised by the largest fit residual so the envelope
    dominates every sample in the window; ``residual`` is the RMS misfit
    before that shift.
    """
    v = np.asarray(u.values)
    if np.iscomplexobj(v):
        v = np.abs(v)
    peak = float(np.max(np.abs(v))) if v.size else 0.0
    if peak == 0.0:
        raise SolverError("decay fit undefined for the zero field")
    above = np.flatnonzero(v > floor * peak)
    end = int(above[-1]) + 1
    start = end - end // 3
    r = u.grid.r[start:end]
    w = v[start:end]
    if r.size < min_points or np.any(w <= 0):
        raise SolverError(f"insufficient decay range: {r.size} positive nodes in the fit window")
    y = np.log(w) + 0.75 * np.log(r)
    A = np.column_stack([np.ones_like(r), -np.sqrt(r)])
    (logc1, c2), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ np.array([logc1, c2])
    return DecayFit(float(math.exp(logc1 + res.max())), float(c2), float(np.sqrt(np.mean(res**2))),
                    float(r[0]), float(r[-1]))
