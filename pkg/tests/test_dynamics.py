import numpy as np
import pytest
from oracles import free_variance

from bopp_podolsky import io
from bopp_podolsky.dynamics import (
    HypothesisError,
    Propagator,
    TrajectoryRecord,
    edge_fraction,
    evolve,
    free_window,
    global_trial,
    monitors,
    variance,
    virial_check,
)
from bopp_podolsky.fields import Field, FieldError, ModelParams, gaussian
from bopp_podolsky.functionals import energy
from bopp_podolsky.solvers import ground_state


@pytest.fixture(scope="module")
def params():
    return ModelParams(p=4.0, a=1.0, m=1.0)


@pytest.fixture(scope="module")
def psi0(small_grid, params):
    return gaussian(small_grid, params.m, 1.0).to_complex()


@pytest.fixture(scope="module")
def ground_25():
    return ground_state(ModelParams(p=2.5, a=1.0, m=1.0))


def test_mass_and_energy_conserved(psi0, params):
    r = evolve(psi0, params, 5e-4, 1.0, sample_every=100)
    assert r.status == "completed"
    assert r.mass_drift() <= 1e-10
    assert r.energy_drift() <= 1e-8


def test_energy_drift_second_order(psi0, params):
    d1 = evolve(psi0, params, 4e-3, 1.0, sample_every=25).energy_drift()
    d2 = evolve(psi0, params, 2e-3, 1.0, sample_every=50).energy_drift()
    assert 3.0 <= d1 / d2 <= 5.0


def test_free_variance_matches_closed_form(psi0, params):
    b = monitors(psi0.grid, psi0.values, params, linear_only=True)
    r = evolve(psi0, params, 1e-2, 1.0, sample_every=10, linear_only=True)
    a = r.arrays()
    expect = free_variance(a["times"], a["variance"][0], b.grad2)
    assert np.max(np.abs(a["variance"] - expect)) <= 1e-8 * expect.max()
    assert r.energy_drift() <= 1e-12


def test_time_reversal(psi0, params):
    fwd = evolve(psi0, params, 1e-3, 0.5)
    back = evolve(fwd.final, params, 1e-3, -0.5)
    err = psi0.grid.norm(back.final.values - psi0.values) / psi0.norm()
    assert err <= 1e-6


def test_logged_monitors_match_functionals(psi0, params):
    r = evolve(psi0, params, 1e-3, 0.2, sample_every=20)
    b = energy(r.final, params)
    assert b.P == r.pohozaev[-1]
    assert b.E == r.energy[-1]
    assert r.times[-1] == pytest.approx(0.2, abs=1e-15)


def test_stationary_modulus(ground_25):
    u, params = ground_25.u, ground_25.params
    r = evolve(u.to_complex(), params, 1e-2, 5.0, sample_every=50)
    assert r.status == "completed"
    assert np.max(np.abs(np.abs(r.final.values) - u.values)) <= 1e-4
    assert virial_check(r) <= 1e-3


def test_stationary_phase_rotates_at_omega(ground_25):
    u, params = ground_25.u, ground_25.params
    T = 2.0
    r = evolve(u.to_complex(), params, 1e-2, T)
    expect = np.exp(1j * ground_25.omega * T) * u.values
    assert u.grid.norm(r.final.values - expect) <= 1e-6 * u.norm()


def test_virial_needs_samples():
    rec = TrajectoryRecord(times=[0.0, 1.0], variance=[1.0, 2.0], pohozaev=[0.0, 0.0], grad2=[1.0, 1.0])
    with pytest.raises(ValueError, match="too few samples"):
        virial_check(rec)


def test_nonfinite_initial_data_rejected(small_grid, params):
    bad = np.ones(small_grid.N, dtype=complex)
    bad[3] = np.nan
    with pytest.raises(FieldError, match="non-finite"):
        evolve(Field(small_grid, bad), params, 1e-3, 0.1)


def test_nonpositive_dt_rejected(psi0, params):
    with pytest.raises(FieldError):
        evolve(psi0, params, 0.0, 1.0)


def test_blowup_detected_for_negative_energy(small_grid):
    params = ModelParams(p=5.0, a=1.0, m=1.0)
    u = Field(small_grid, 5.0 * np.exp(-0.5 * small_grid.r**2))
    b = energy(u, params)
    assert b.P < 0
    r = evolve(u.to_complex(), params, 1e-3, 2.0, adaptive=True, sample_every=5)
    assert r.status == "blowup_detected"
    assert r.times[-1] < 2.0


def test_global_trial_rejects_negative_pohozaev(small_grid):
    params = ModelParams(p=5.0, a=1.0, m=1.0)
    u = Field(small_grid, 5.0 * np.exp(-0.5 * small_grid.r**2))
    with pytest.raises(HypothesisError, match="hypotheses violated"):
        global_trial(u.to_complex(), params, gamma_m=1e9)


def test_checkpoint_written(tmp_path, psi0, params):
    path = tmp_path / "ck.bpfld"
    r = evolve(psi0, params, 1e-3, 0.05, checkpoint=path, checkpoint_every=0.0)
    back = io.read_field(path)
    assert np.iscomplexobj(back.values)
    assert np.array_equal(back.values, r.final.values)


def test_propagator_unitary(psi0, params):
    prop = Propagator(psi0.grid, params, linear_only=True)
    out = prop.linear(psi0.values, 0.37)
    assert abs(psi0.grid.norm(out) - psi0.norm()) <= 1e-13


def test_variance_of_gaussian(small_grid):
    u = gaussian(small_grid, 1.0, 1.3)
    # int r^2 e^{-r^2/w^2} / int e^{-r^2/w^2} = 3 w^2 / 2
    assert variance(small_grid, u.values) / u.mass() == pytest.approx(1.5 * 1.3**2, rel=1e-10)


def test_edge_mass_bounds_free_window(small_grid, params):
    # on a 20-unit box a unit Gaussian reaches the wall within a few time units
    psi0 = gaussian(small_grid, 1.0, 1.0).to_complex()
    r = evolve(psi0, params, 1e-2, 6.0, sample_every=10, linear_only=True)
    assert r.edge[0] < 1e-12
    assert r.edge[-1] == edge_fraction(r.final.grid, r.final.values)
    assert r.edge[-1] > 1e-3
    n = free_window(r)
    assert 5 <= n < len(r.times)
    assert virial_check(r, upto=n) <= 1e-3
