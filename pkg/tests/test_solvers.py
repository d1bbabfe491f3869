import numpy as np
import pytest

from bopp_podolsky.fields import Field, FieldError, ModelParams
from bopp_podolsky.functionals import energy, h1_norm
from bopp_podolsky.solvers import (
    SolverError,
    cached_Q,
    concentration_scale,
    decay_diagnostic,
    gamma_curve,
    ground_state,
    q_at_origin,
    q_identities,
    shoot_Q,
    solve_Q,
)

# Q(0) by spectral renormalization on a separate sine grid (tests/oracles.petviashvili_q0)
Q0_ORACLE = {2.5: 3.2742272367004865, 3.5: 3.07661177574278, 4.0: 3.066996241146779, 5.0: 3.2908372958406757}


def test_q_identities_and_origin(Q4):
    ids = q_identities(Q4, 4.0)
    assert ids["grad_vs_mass"] <= 1e-10
    assert ids["lp_vs_mass"] <= 1e-10
    assert q_at_origin(Q4) == pytest.approx(Q0_ORACLE[4.0], abs=1e-4)
    assert Q4.meta["q0_shooting"] == pytest.approx(Q0_ORACLE[4.0], abs=1e-4)
    assert np.all(Q4.values > 0)
    assert Q4.tail_ratio() < 1e-8


def test_q_rejects_bad_p():
    with pytest.raises(FieldError, match=r"p out of range \(2,6\)"):
        solve_Q(7.0)


def test_bisection_exhaustion_reports_bracket():
    with pytest.raises(SolverError, match="bracket"):
        shoot_Q(4.0, max_iter=3)


def test_concentration_scale_p4(Q4):
    qn = Q4.norm()
    for m in (0.1, 0.5, 1.3):
        assert concentration_scale(4.0, m, qn) == pytest.approx(2.0 / 3.0 * (qn / m) ** 2, rel=1e-13)


def test_supercritical_ground_state(ground_405, params_405):
    res = ground_405
    u = res.u
    assert res.converged, res.warnings
    assert u.norm() == pytest.approx(params_405.m, rel=1e-10)
    assert res.el_residual / h1_norm(u) <= 1e-8
    assert res.pohozaev_residual <= 1e-6 * res.kinetic
    assert np.all(u.values > 0)
    assert res.omega > 0
    assert u.tail_ratio() <= 1e-8
    assert res.level == pytest.approx(energy(u, params_405).E, rel=1e-14)


def test_supercritical_history_monotone(ground_405):
    flow = [h for h in ground_405.history if h["phase"] == "flow"]
    E = np.array([h["E"] for h in flow])
    assert np.all(np.diff(E) <= 0)
    assert all(h["P"] <= 1e-8 * h["grad2"] for h in flow)


def test_subcritical_ground_state():
    params = ModelParams(2.5, 1.0, 1.0)
    res = ground_state(params)
    assert res.converged, res.warnings
    assert res.regime == "subcritical"
    assert res.el_residual_rel <= 1e-8
    assert np.all(res.u.values > 0)
    assert res.u.norm() == pytest.approx(1.0, rel=1e-10)
    flow = [h["E"] for h in res.history if h["phase"] == "flow"]
    assert np.all(np.diff(flow) < 0)
    # the nonlocal term is positive, so the level lies above the free one
    Q = cached_Q(2.5)
    s = concentration_scale(2.5, 1.0, Q.norm())
    E_free = -(10 - 3 * 2.5) / (6 * (2.5 - 2)) * s**2
    assert res.level > E_free


def test_supercritical_mass_cap():
    with pytest.raises(FieldError):
        ground_state(ModelParams(4.0, 1.0, 5.0))


def test_gamma_curve_small():
    rows = gamma_curve(ModelParams(4.0, 1.0, 1.0), [0.4, 0.8])
    assert all(r["converged"] for r in rows)
    assert rows[1]["gamma"] < rows[0]["gamma"]
    with pytest.raises(FieldError):
        gamma_curve(ModelParams(4.0), [0.8, 0.4])


def test_decay_envelope(ground_405, Q4):
    fit = decay_diagnostic(ground_405.u)
    r = ground_405.u.grid.r
    win = (r >= fit.r_lo) & (r <= fit.r_hi)
    assert np.all(ground_405.u.values[win] <= 1.05 * fit.envelope(r[win]))
    qfit = decay_diagnostic(Q4)
    rq = Q4.grid.r
    beyond = rq >= qfit.r_lo
    assert np.all(Q4.values[beyond] <= qfit.envelope(rq[beyond]) * (1 + 1e-12))
    with pytest.raises(SolverError):
        decay_diagnostic(Field(Q4.grid, np.zeros(Q4.grid.N)))
