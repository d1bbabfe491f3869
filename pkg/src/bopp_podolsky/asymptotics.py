"""Closed forms of the free problem and the small/large mass limits.

The free minimizer v_m is Q rescaled: v_m(x) = (m/||Q||) s_m^{3/2} Q(s_m x).
On a grid this is exact if v_m lives on ``Q.grid.scaled(1/s_m)``: the node
values are just (m/||Q||) s_m^{3/2} Q_j.  The same trick gives W (which is
v_1) and the rescaling that maps u_m back onto Q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .fields import P_CRITICAL, Field, FieldError, ModelParams, regrid, THETA_MAX
from .functionals import Fiber, energy_values, fiber_root
from .solvers import GroundStateResult, concentration_scale


def alphas(p: float):
    """(alpha_1, alpha_2, alpha_3) of the unit-mass rescaling."""
    d = 10.0 - 3.0 * p
    return 8.0 * (3.0 - p) / d, 2.0 * (p - 2.0) / d, 2.0 * (14.0 - 5.0 * p) / d


@dataclass(frozen=True, eq=False)
class ClosedForms:
    s_m: float
    v_m: Field
    E_tilde: float
    beta: float
    W: Field
    omega0: float
    alpha1: float
    alpha2: float
    alpha3: float


def _check_p(p):
    if abs(p - P_CRITICAL) < 0.05:
        raise FieldError(f"p={p} inside the guard band around 10/3")


def free_profile(Q: Field, m: float, p: float) -> Field:
    """v_m on Q.grid.scaled(1/s_m), exact node for node."""
    _check_p(p)
    qn = Q.norm()
    s = concentration_scale(p, m, qn)
    return Field(Q.grid.scaled(1.0 / s), (m / qn) * s**1.5 * Q.values, {"kind": "v_m", "m": m, "s_m": s})


def closed_forms(params: ModelParams, Q: Field) -> ClosedForms:
    p, m = params.p, params.m
    _check_p(p)
    qn = Q.norm()
    s = concentration_scale(p, m, qn)
    v = free_profile(Q, m, p)
    # W per its defining scaling of Q; it coincides with v_1
    d = 10.0 - 3.0 * p
    amp = (0.75 * (p - 2.0) * qn ** (-4.0 / 3.0)) ** (3.0 / d)
    inner = (0.75 * (p - 2.0) * qn ** (2.0 - p)) ** (2.0 / d)
    W = Field(Q.grid.scaled(1.0 / inner), amp * Q.values, {"kind": "W"})
    omega0 = 0.25 * (6.0 - p) * (0.75 * (p - 2.0) * qn ** (-4.0 / 3.0)) ** (3.0 * (p - 2.0) / d)
    base = m**2 * s**2 / (6.0 * (p - 2.0))
    a1, a2, a3 = alphas(p)
    return ClosedForms(
        s_m=s,
        v_m=v,
        E_tilde=-(10.0 - 3.0 * p) * base if p < P_CRITICAL else float("nan"),
        beta=(3.0 * p - 10.0) * base if p > P_CRITICAL else float("nan"),
        W=W,
        omega0=omega0,
        alpha1=a1,
        alpha2=a2,
        alpha3=a3,
    )


# -- rescaling by mass ---------------------------------------------------------


def rescale_unit_mass(u: Field, varsigma: float, params: ModelParams, theta_max: float = THETA_MAX) -> Field:
    """u^(s)(x) = s^{4/(10-3p)} u(s^{alpha_2} x), which maps S(m) to S(s m).

    Represented exactly on ``u.grid.scaled(s^{-alpha_2})``.
    """
    p = params.p
    _check_p(p)
    if not varsigma > 0:
        raise FieldError(f"rescaling factor must be positive, got {varsigma}")
    _, a2, _ = alphas(p)
    log_inner = a2 * math.log(varsigma)
    if abs(log_inner) > theta_max:
        raise FieldError(f"inner scale e^{log_inner:.3g} beyond theta_max={theta_max}")
    amp = varsigma ** (4.0 / (10.0 - 3.0 * p))
    return Field(u.grid.scaled(math.exp(-log_inner)), amp * u.values, dict(u.meta))


def rescaled_family(p: float, a: float, varsigma: float):
    """(coupling, kernel length) of E_s: s^{alpha_1} and a s^{alpha_2}."""
    a1, a2, _ = alphas(p)
    return varsigma**a1, a * varsigma**a2


def energy_rescaled(u: Field, varsigma: float, params: ModelParams):
    """E_s(u) = grad2/2 + (s^{alpha_1}/4) Psi(u; a s^{alpha_2}) - lp/p, with its P_s."""
    c, a_eff = rescaled_family(params.p, params.a, varsigma)
    return energy_values(u.grid, u.values, params.p, a_eff, c)


def energy_scaling_factor(p: float, varsigma: float) -> float:
    return varsigma ** (2.0 * (6.0 - p) / (10.0 - 3.0 * p))


def fiber_theta_rescaled(u: Field, m: float, params: ModelParams, tol_p: float = 1e-10) -> float:
    """Zero of theta -> P_m(kappa(u, theta)) for the rescaled functional E_m."""
    c, a_eff = rescaled_family(params.p, params.a, m)
    return fiber_root(Fiber.radial(u, params, coupling=c, a=a_eff), tol_p)


# -- limits along mass ladders ---------------------------------------------


def ladder_direction(p: float) -> str:
    """'down' (m -> 0+) for p in (2,3) or (10/3,6); 'up' for p in (3,10/3)."""
    return "up" if 3.0 < p < P_CRITICAL else "down"


def rescale_to_Q(u: Field, params: ModelParams, Q: Field) -> Field:
    """Inverse of the v_m map applied to u_m; lands on Q's grid when u is on the natural grid."""
    if u.norm() == 0:
        raise FieldError("cannot rescale the zero field")
    p, m = params.p, params.m
    qn = Q.norm()
    s = concentration_scale(p, m, qn)
    amp = (qn / m) * s**-1.5
    scaled = u.grid.scaled(s)
    if math.isclose(scaled.h, Q.grid.h, rel_tol=1e-12):
        return regrid(Field(Q.grid.extended(u.grid.N), amp * u.values), Q.grid)
    from .fields import resample_spectral

    return resample_spectral(Field(scaled, amp * u.values), Q.grid)


def h1_distance(u: Field, v: Field) -> float:
    if u.grid != v.grid:
        raise FieldError("fields on different grids")
    d = u.values - v.values
    return math.sqrt(u.grid.norm(d) ** 2 + u.grid.gradient_norm2(d))


def rescaled_distance_to_Q(u: Field, params: ModelParams, Q: Field) -> float:
    """H^1 distance between the concentration rescaling of u_m and Q (translation pinned at 0)."""
    return h1_distance(rescale_to_Q(u, params, Q), Q)


def limit_ratios(results: list[GroundStateResult], params: ModelParams, Q: Field) -> list[dict]:
    """Per-mass ratios whose limits are 1, 1, 0 and (6-p)/(3(p-2)).

    The free reference is the discrete Q: ||grad v_m||^2 is evaluated on the
    grid, which removes the common discretization error from the ratio.
    """
    p = params.p
    _check_p(p)
    if len(results) < 4:
        raise FieldError("need at least 4 mass points")
    ms = [r.params.m for r in results]
    direction = ladder_direction(p)
    ordered = all(b < a for a, b in zip(ms, ms[1:])) if direction == "down" else all(
        b > a for a, b in zip(ms, ms[1:]))
    span = max(ms) / min(ms)
    if not ordered or span < 8.0 - 1e-12:
        raise FieldError(f"regime mismatch: p={p} needs masses going {direction} over a factor >= 8")
    qn = Q.norm()
    q_ratio = Q.grid.gradient_norm2(Q.values) / Q.mass()  # 1 up to round-off
    rows = []
    for r in results:
        m = r.params.m
        s = concentration_scale(p, m, qn)
        ref = m**2 * s**2 * q_ratio
        b = energy_values(r.u.grid, r.u.values, p, r.params.a)
        cf_level = (3.0 * p - 10.0) * m**2 * s**2 / (6.0 * (p - 2.0))
        rows.append({
            "m": m,
            "s_m": s,
            "level_ratio": b.E / cf_level,
            "grad_ratio": b.grad2 / ref,
            "nonlocal_ratio": b.psi / (m**2 * s**2),
            "omega_ratio": b.omega / s**2,
            "omega_positive": b.omega > 0,
            "distance_to_Q": rescaled_distance_to_Q(r.u, r.params, Q),
        })
    return rows


def omega_limit(p: float) -> float:
    return (6.0 - p) / (3.0 * (p - 2.0))
