"""Energy, Pohozaev and related functionals, the fiber map and its maximizer.

Conventions: ``grad2`` is ||grad u||^2, ``psi`` is int phi_u |u|^2, ``pair``
is A(u) = iint e^{-|x-y|/a} |u|^2 |u|^2 and ``lp`` is ||u||_p^p.

    E    = grad2/2 + psi/4 - lp/p
    I    = grad2/2 - lp/p
    P    = grad2 + psi/4 - pair/(4a) - 3(p-2)/(2p) lp
    G    = grad2 - 3(p-2)/(2p) lp
    Ebar = E - 2/(3(p-2)) P
    omega = (lp - grad2 - psi) / ||u||^2
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernel
from .fields import Field, ModelParams, dilate
from .grid import BoxGrid, RadialGrid, radial_laplacian


class FiberError(RuntimeError):
    pass


@dataclass(frozen=True)
class Terms:
    """Raw integrals from which every functional is assembled."""

    grad2: float
    psi: float
    pair: float
    lp: float
    mass2: float


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    nonlocal_: float
    yukawa_pair: float
    potential: float
    E: float
    I: float
    P: float
    G: float
    Ebar: float
    omega: float
    grad2: float
    psi: float
    lp: float
    mass2: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["nonlocal"] = d.pop("nonlocal_")
        return d


def radial_terms(grid: RadialGrid, values, p: float, a: float) -> Terms:
    rho = np.abs(values) ** 2
    q = grid.weights * rho
    return Terms(
        grad2=grid.gradient_norm2(values),
        psi=float(np.dot(q, kernel._phi_values(grid, rho, a))),
        pair=kernel._pair_values(grid, rho, a),
        lp=float(np.dot(grid.weights, rho ** (0.5 * p))),
        mass2=float(np.sum(q)),
    )


def box_terms(values, box: BoxGrid, p: float, a: float) -> Terms:
    grad2, psi, pair = kernel.box_terms(values, box, a)
    rho = np.abs(values) ** 2
    return Terms(grad2, psi, pair, box.integrate(rho ** (0.5 * p)), box.integrate(rho))


def assemble(t: Terms, p: float, a: float, coupling: float = 1.0) -> EnergyBreakdown:
    """Functionals from raw terms; ``coupling`` multiplies both nonlocal terms.

    coupling = 0 gives the free functionals; coupling = s^{alpha_1} with
    kernel length a s^{alpha_2} gives the rescaled family E_s.
    """
    c = 3.0 * (p - 2.0) / (2.0 * p)
    kinetic = 0.5 * t.grad2
    nonloc = 0.25 * coupling * t.psi
    pot = t.lp / p
    E = kinetic + nonloc - pot
    P = t.grad2 + nonloc - coupling * t.pair / (4.0 * a) - c * t.lp
    omega = (t.lp - t.grad2 - coupling * t.psi) / t.mass2 if t.mass2 > 0 else 0.0
    return EnergyBreakdown(
        kinetic=kinetic,
        nonlocal_=nonloc,
        yukawa_pair=coupling * t.pair,
        potential=pot,
        E=E,
        I=kinetic - pot,
        P=P,
        G=t.grad2 - c * t.lp,
        Ebar=E - 2.0 / (3.0 * (p - 2.0)) * P,
        omega=omega,
        grad2=t.grad2,
        psi=coupling * t.psi,
        lp=t.lp,
        mass2=t.mass2,
    )


def energy(u: Field, params: ModelParams, coupling: float = 1.0) -> EnergyBreakdown:
    """All functionals of u at (p, a); u may be real or complex."""
    return energy_values(u.grid, u.values, params.p, params.a, coupling)


def energy_values(grid: RadialGrid, values, p: float, a: float, coupling: float = 1.0) -> EnergyBreakdown:
    if coupling == 0.0:
        rho = np.abs(values) ** 2
        t = Terms(grid.gradient_norm2(values), 0.0, 0.0, float(np.dot(grid.weights, rho ** (0.5 * p))),
                  float(np.dot(grid.weights, rho)))
    else:
        t = radial_terms(grid, values, p, a)
    return assemble(t, p, a, coupling)


def gradient(grid: RadialGrid, values, p: float, a: float, coupling: float = 1.0):
    """L^2 gradient of E: -Lap u + phi_u u - |u|^{p-2} u."""
    rho = np.abs(values) ** 2
    out = -radial_laplacian(grid, values) - rho ** (0.5 * p - 1.0) * values
    if coupling != 0.0:
        out = out + coupling * kernel._phi_values(grid, rho, a) * values
    return out


def euler_lagrange_residual(u: Field, omega: float, params: ModelParams, coupling: float = 1.0):
    """g = -Lap u + omega u + phi_u u - |u|^{p-2} u and ||g||_{L^2}.

    ``coupling=0`` drops the nonlocal term (the free equation).
    """
    g = gradient(u.grid, u.values, params.p, params.a, coupling) + omega * u.values
    return u.with_values(g), u.grid.norm(g)


def h1_norm(u: Field) -> float:
    return math.sqrt(u.mass() + u.grid.gradient_norm2(u.values))


def lagrange_multiplier(u: Field, params: ModelParams, coupling: float = 1.0) -> float:
    """omega = (||u||_p^p - ||grad u||^2 - int phi_u u^2) / ||u||^2."""
    if u.norm() == 0:
        raise ValueError("lagrange multiplier undefined for the zero field")
    return energy(u, params, coupling).omega


# -- fiber map kappa(u, theta) ---------------------------------------------


class Fiber:
    """theta -> functionals of kappa(u, theta), evaluated without resampling.

    Kinetic and L^p terms scale by e^{2 theta} and e^{3(p-2)theta/2}; the
    nonlocal terms equal those of u with kernel length a e^theta
    (Psi picks up an extra factor e^theta).
    """

    def __init__(self, terms_at, p: float, a: float, coupling: float = 1.0):
        self._terms_at = terms_at
        self.p, self.a, self.coupling = p, a, coupling
        self.base = terms_at(a)

    @classmethod
    def radial(cls, u: Field, params: ModelParams, coupling: float = 1.0, a: float | None = None) -> "Fiber":
        grid, vals = u.grid, u.values
        return cls(lambda a_eff: radial_terms(grid, vals, params.p, a_eff), params.p,
                   params.a if a is None else a, coupling)

    @classmethod
    def box(cls, values, box: BoxGrid, params: ModelParams) -> "Fiber":
        return cls(lambda a_eff: box_terms(values, box, params.p, a_eff), params.p, params.a)

    def terms(self, theta: float) -> Terms:
        if theta == 0.0:
            return self.base
        b = self.base
        s = math.exp(theta)
        t = self._terms_at(self.a * s)
        return Terms(
            grad2=s**2 * b.grad2,
            psi=s * t.psi,
            pair=t.pair,
            lp=s ** (1.5 * (self.p - 2.0)) * b.lp,
            mass2=b.mass2,
        )

    def breakdown(self, theta: float) -> EnergyBreakdown:
        return assemble(self.terms(theta), self.p, self.a, self.coupling)

    def E(self, theta: float) -> float:
        return self.breakdown(theta).E

    def P(self, theta: float) -> float:
        return self.breakdown(theta).P


def fiber_root(fiber: Fiber, tol_p: float = 1e-8, span: float = 10.0, theta0: float = 0.0) -> float:
    """Unique zero of theta -> P(kappa(u, theta)) by bracketing and bisection."""
    if fiber.p <= 10.0 / 3.0:
        raise FiberError("the fiber maximizer exists only for p > 10/3")

    def scaled(theta):
        b = fiber.breakdown(theta)
        return b.P, tol_p * b.grad2

    f0, tol0 = scaled(theta0)
    if abs(f0) <= tol0:
        return theta0
    step = 0.05
    lo = hi = theta0
    flo = fhi = f0
    while True:
        if f0 > 0:
            lo, flo = hi, fhi
            hi = theta0 + step
            fhi, _ = scaled(hi)
            if fhi <= 0:
                break
        else:
            hi, fhi = lo, flo
            lo = theta0 - step
            flo, _ = scaled(lo)
            if flo >= 0:
                break
        step *= 2.0
        if step > 2.0 * span:
            raise FiberError(f"no sign change of P along the fiber within |theta| <= {span}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm, tolm = scaled(mid)
        if abs(fm) <= tolm or hi - lo < 1e-15:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fiber_theta(u: Field, params: ModelParams, tol_p: float = 1e-8) -> float:
    """theta(u): the unique theta with kappa(u, theta) on the Pohozaev manifold."""
    if u.norm() == 0:
        raise FiberError("fiber undefined for the zero field")
    return fiber_root(Fiber.radial(u, params), tol_p)


def project_to_pohozaev(u: Field, params: ModelParams, tol_p: float = 1e-8, max_passes: int = 12):
    """kappa(u, theta(u)), repeated until the resampled field satisfies |P| <= tol_p * grad2.

    Returns the projected field (renormalized to the input norm) and the
    accumulated theta.
    """
    m = u.norm()
    total = 0.0
    for _ in range(max_passes):
        theta = fiber_theta(u, params, tol_p)
        if theta == 0.0:
            return u, total
        u = dilate(u, theta)
        u = u.with_values(u.values * (m / u.norm()))
        total += theta
        b = energy(u, params)
        if abs(b.P) <= tol_p * b.grad2:
            return u, total
    raise FiberError("Pohozaev projection did not settle")


def h1_profile(theta, p):
    """h_1(theta) = 4 e^{3(p-2)theta/2} - 3(p-2) e^{2 theta} + 3p - 10."""
    theta = np.asarray(theta, dtype=float)
    return 4.0 * np.exp(1.5 * (p - 2.0) * theta) - 3.0 * (p - 2.0) * np.exp(2.0 * theta) + 3.0 * p - 10.0


def energy_gap_check(u: Field, theta: float, params: ModelParams) -> float:
    """Slack of E(u) >= E(kappa(u,theta)) + 2(1-e^{3(p-2)theta/2})/(3(p-2)) P(u) + h_1/(6(p-2)) ||grad u||^2."""
    p = params.p
    fib = Fiber.radial(u, params)
    b0 = fib.breakdown(0.0)
    if theta == 0.0:
        return 0.0
    Et = fib.E(theta)
    c = 2.0 * (1.0 - math.exp(1.5 * (p - 2.0) * theta)) / (3.0 * (p - 2.0))
    return b0.E - Et - c * b0.P - float(h1_profile(theta, p)) / (6.0 * (p - 2.0)) * b0.grad2


def gn_ratio(u: Field, q_norm: float, p: float) -> float:
    """||u||_p^p over the sharp Gagliardo-Nirenberg bound with constant from ||Q||."""
    grid, v = u.grid, u.values
    lp = float(np.dot(grid.weights, np.abs(v) ** p))
    bound = (p / (2.0 * q_norm ** (p - 2.0))) * u.norm() ** (0.5 * (6.0 - p)) * grid.gradient_norm2(v) ** (
        0.75 * (p - 2.0)
    )
    return lp / bound


def gn_check(u: Field, params: ModelParams, Q: Field) -> float:
    return gn_ratio(u, Q.norm(), params.p)
