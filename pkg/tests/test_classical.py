import math

import numpy as np
import pytest

from qvdp.liouvillian import DissipatorSpec
from qvdp.classical import (
    LangevinParams,
    _drift,
    classical_order_parameter,
    ensemble_wigner_histogram,
    integrate_vdp_ode,
    phase_histogram,
    radial_histogram,
    simulate_langevin,
    stationary_density_grid,
    stationary_weight,
)
from qvdp.wigner import total_variation


def test_vdp_ode_settles_on_radius_two_cycle():
    # weak nonlinearity: the classic limit cycle has amplitude 2
    times, states = integrate_vdp_ode(
        x0=0.1, v0=0.0, omega0=1.0, epsilon=0.01, t_final=1500.0, dt=0.02
    )
    tail = states[times > 1200.0, 0]
    assert tail.max() == pytest.approx(2.0, abs=0.02)
    assert tail.min() == pytest.approx(-2.0, abs=0.02)


def test_vdp_ode_conserves_energy_when_linear():
    times, states = integrate_vdp_ode(
        x0=1.0, v0=0.0, omega0=2.0, epsilon=0.0, t_final=50.0, dt=0.005
    )
    energy = 0.5 * states[:, 1] ** 2 + 0.5 * 4.0 * states[:, 0] ** 2
    assert np.abs(energy - energy[0]).max() < 1e-6


def test_noise_variance_and_drift_radius():
    p = LangevinParams(DissipatorSpec(1.0, 0.05))
    assert p.noise_variance == pytest.approx(1.55)
    assert p.drift_radius == pytest.approx(math.sqrt(11.0))


def test_noiseless_flow_reaches_drift_radius():
    p = LangevinParams(DissipatorSpec(1.0, 0.05))
    ens = simulate_langevin(
        p,
        t_final=40.0,
        seed=1,
        realizations=1,
        burn_in=39.0,
        initial=np.array([[0.3 + 0.2j]]),
        include_noise=False,
    )
    assert abs(ens.samples[0, -1, 0]) == pytest.approx(math.sqrt(11.0), rel=1e-8)


def test_short_time_variance_growth_matches_rate():
    diss = DissipatorSpec(1.0, 0.5)
    p = LangevinParams(diss)
    t = 0.01
    ens = simulate_langevin(
        p,
        t_final=t,
        seed=3,
        realizations=20000,
        burn_in=t,
        sample_interval=t,
        dt=t / 40.0,
    )
    final = ens.samples[:, -1, 0]
    got = final.real.var()
    assert got == pytest.approx(p.noise_variance * t, rel=0.1)


def test_realizations_use_independent_stable_streams():
    p = LangevinParams(DissipatorSpec(1.0, 1.0))
    kw = dict(t_final=2.0, burn_in=0.0, sample_interval=0.5, dt=0.002)
    three = simulate_langevin(p, seed=11, realizations=3, **kw)
    one = simulate_langevin(p, seed=11, realizations=1, **kw)
    # realization 0 is untouched by how many siblings ran alongside it
    assert np.array_equal(three.samples[0], one.samples[0])
    assert not np.array_equal(three.samples[1], three.samples[0])


def test_pair_coupling_acts_through_partner():
    p = LangevinParams(DissipatorSpec(1.0, 1.0), v=0.7, n_osc=2)
    a = np.array([[0.4 + 0.1j, -0.2 + 0.9j]])
    base = LangevinParams(DissipatorSpec(1.0, 1.0), n_osc=2)
    got = _drift(a, p) - _drift(a, base)
    want = -1j * 0.7 * a[:, ::-1]
    assert np.allclose(got, want, atol=1e-15)


def test_mean_coupling_matches_pairwise_sum():
    n = 5
    p = LangevinParams(DissipatorSpec(1.0, 1.0), v=1.3, n_osc=n)
    base = LangevinParams(DissipatorSpec(1.0, 1.0), n_osc=n)
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    got = _drift(a, p) - _drift(a, base)
    want = np.empty_like(a)
    for j in range(n):
        others = a.sum(axis=1) - a[:, j]
        want[:, j] = -1j * (1.3 / n) * others
    assert np.allclose(got, want, atol=1e-14)


@pytest.fixture(scope="module")
def broad_ensemble():
    p = LangevinParams(DissipatorSpec(1.0, 1.0))
    return simulate_langevin(p, t_final=220.0, seed=42, realizations=100)


def test_langevin_agrees_with_stationary_density(broad_ensemble):
    values = broad_ensemble.flat()
    assert values.size >= 20000
    extent = 3.0
    hist = ensemble_wigner_histogram(values, extent=extent, resolution=51)
    want = stationary_density_grid(DissipatorSpec(1.0, 1.0), extent=extent, resolution=51)
    assert hist.mass() == pytest.approx(1.0, rel=0.02)
    assert total_variation(hist.values, want.values) < 0.12


def test_phase_histogram_is_uniform_without_drive(broad_ensemble):
    dist = phase_histogram(broad_ensemble.flat())
    assert dist.amplitude(1) < 0.02
    width = dist.angles[1] - dist.angles[0]
    assert np.sum(dist.density) * width == pytest.approx(1.0, abs=1e-12)


def test_radial_histogram_peaks_at_analytic_radius(broad_ensemble):
    diss = DissipatorSpec(1.0, 1.0)
    dist = radial_histogram(broad_ensemble.flat(), r_max=3.0, resolution=60)
    r = np.linspace(1e-4, 3.0, 4001)
    density = r * stationary_weight(r, diss)
    want = r[np.argmax(density)]
    assert dist.peak_radius() == pytest.approx(want, rel=0.05)


def test_stationary_weight_peak_and_strong_loss_form():
    diss = DissipatorSpec(1.0, 0.05)
    r = np.linspace(0.0, 6.0, 6001)
    w = stationary_weight(r, diss)
    assert r[np.argmax(w)] == pytest.approx(math.sqrt(11.0), abs=2e-3)
    # strong two-phonon loss reduces the exponent to 2 r^2 - r^4
    strong = DissipatorSpec(1.0, 1e6)
    ratio = stationary_weight(np.array([1.3]), strong)[0] / stationary_weight(
        np.array([1.0]), strong
    )[0]
    want = math.exp((2 * 1.3**2 - 1.3**4) - 1.0)
    assert ratio == pytest.approx(want, rel=1e-3)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_aborts_with_hint():
    p = LangevinParams(DissipatorSpec(1.0, 1.0))
    with pytest.raises(RuntimeError, match="dt"):
        simulate_langevin(
            p,
            t_final=50.0,
            seed=0,
            realizations=1,
            dt=5.0,
            initial=np.array([[3.0 + 0.0j]]),
            include_noise=False,
        )


def test_invalid_configurations_rejected():
    diss = DissipatorSpec(1.0, 1.0)
    with pytest.raises(ValueError):
        LangevinParams(diss, n_osc=0)
    with pytest.raises(ValueError):
        LangevinParams(diss, v=1.0, n_osc=1)
    p = LangevinParams(diss)
    with pytest.raises(ValueError):
        simulate_langevin(p, t_final=-1.0, seed=0)
    with pytest.raises(ValueError):
        simulate_langevin(p, t_final=1.0, seed=0, initial=np.zeros((2, 3), dtype=complex))


def test_small_sample_warning():
    with pytest.warns(UserWarning, match="samples"):
        phase_histogram(np.exp(1j * np.linspace(0.0, 6.0, 100)))


def test_weak_noise_coupling_keeps_ensemble_locked():
    # low kappa2 = weak phase noise: a modest coupling holds the aligned
    # ensemble together while the uncoupled one melts away; the horizon
    # must span several phase-diffusion times (~67 here) for the melt
    diss = DissipatorSpec(1.0, 0.005)
    r_free = classical_order_parameter(diss, v=0.0, n_osc=200, seed=5, t_final=250.0)
    r_locked = classical_order_parameter(diss, v=1.0, n_osc=200, seed=5, t_final=250.0)
    assert r_locked > 0.5
    assert r_locked > 3.0 * r_free
