import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qvdp.fock import (
    DensityMatrix,
    FockSpace,
    coherent_state,
    destroy,
    expectation,
    number,
    number_state,
    partial_trace,
)
from qvdp.liouvillian import (
    Coupling,
    DissipatorSpec,
    Drive,
    MeanFieldCoupling,
    SingleModeRhs,
    SteadyStateError,
    build_liouvillian,
    default_n_max,
    evolve,
    large_kappa2_populations,
    steady_state,
    steady_state_adaptive,
)

from conftest import random_density_matrix, random_hermitian


# --- independent oracles -------------------------------------------------

# Moment equation for pure one-phonon gain: d<n>/dt = 2*kappa1*(<n>+1).
# Integrated from vacuum over t=0.3 at kappa1=1 with solve_ivp, rtol=1e-12:
GAIN_MEAN_PHONONS_T03 = 0.8221188003905089  # = exp(0.6) - 1

# Pure two-phonon loss empties |2> at total rate 2*kappa2*n*(n-1) = 4*kappa2;
# survival after t=0.1 at kappa2=1:
TWO_PHONON_SURVIVAL_T01 = 0.6703200460356393  # = exp(-0.4)


def moment_ode_gain(kappa1: float, t: float) -> float:
    sol = solve_ivp(
        lambda _, y: 2.0 * kappa1 * (y + 1.0),
        (0.0, t),
        [0.0],
        rtol=1e-12,
        atol=1e-14,
    )
    return float(sol.y[0, -1])


def rate_ladder_populations(kappa1: float, kappa2: float, n_max: int) -> np.ndarray:
    """Stationary populations from the classical jump-rate ladder.

    The number populations close on themselves: up-jumps n -> n+1 at
    2*kappa1*(n+1), down-jumps n -> n-2 at 2*kappa2*n*(n-1).  This is an
    independent route to the steady state that never touches the
    superoperator code.
    """
    d = n_max + 1
    m = np.zeros((d, d))
    for n in range(d):
        up = 2.0 * kappa1 * (n + 1) if n + 1 < d else 0.0
        down = 2.0 * kappa2 * n * (n - 1)
        m[n, n] -= up + down
        if n + 1 < d:
            m[n + 1, n] += up
        if n - 2 >= 0:
            m[n - 2, n] += down
    # null space via SVD
    _, s, vt = np.linalg.svd(m)
    p = np.abs(vt[-1])
    assert s[-1] < 1e-10 * s[0]
    return p / p.sum()


# --- generator structure -------------------------------------------------


def test_generator_preserves_trace_and_hermiticity():
    rng = np.random.default_rng(3)
    space = FockSpace(8)
    lv = build_liouvillian(space, DissipatorSpec(1.0, 0.7), Drive(delta=0.3, e=0.8))
    h = random_hermitian(space.dim, rng)
    out = lv.apply(h)
    assert abs(np.trace(out)) < 1e-10
    assert np.max(np.abs(out - out.conj().T)) < 1e-10


def test_vacuum_gain_rate():
    space = FockSpace(6)
    lv = build_liouvillian(space, DissipatorSpec(kappa1=0.9, kappa2=0.0))
    rho0 = number_state(space, 0)
    drho = lv.apply(np.asarray(rho0.matrix))
    n_op = number(space).matrix
    dn_dt = np.einsum("ij,ji->", drho, n_op).real
    assert dn_dt == pytest.approx(2.0 * 0.9, rel=1e-12)


def test_two_phonon_outflow_rate():
    space = FockSpace(6)
    kappa2 = 1.3
    lv = build_liouvillian(space, DissipatorSpec(kappa1=0.0, kappa2=kappa2))
    rho0 = number_state(space, 2)
    drho = lv.apply(np.asarray(rho0.matrix))
    # all outflow from |2> lands in |0>
    assert drho[0, 0].real == pytest.approx(4.0 * kappa2, rel=1e-12)
    assert drho[2, 2].real == pytest.approx(-4.0 * kappa2, rel=1e-12)


def test_zero_rates_freeze_the_state():
    space = FockSpace(12)
    lv = build_liouvillian(space, DissipatorSpec(0.0, 0.0))
    rho0 = coherent_state(space, 0.8)
    rho1 = evolve(lv, rho0, t_final=1.0)
    assert np.allclose(rho1.matrix, rho0.matrix, atol=1e-14)


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        DissipatorSpec(-1.0, 0.0)


def test_hamiltonian_variant_mode_mismatch():
    with pytest.raises(ValueError):
        build_liouvillian(FockSpace(4, modes=2), DissipatorSpec(1, 1), Drive(0.0, 1.0))
    with pytest.raises(ValueError):
        build_liouvillian(FockSpace(4), DissipatorSpec(1, 1), Coupling(1.0))


# --- evolution against moment oracles ------------------------------------


def test_gain_growth_matches_moment_equation():
    kappa1 = 1.0
    space = FockSpace(30)
    lv = build_liouvillian(space, DissipatorSpec(kappa1, 0.0))
    rho = evolve(lv, number_state(space, 0), t_final=0.3, dt=0.002)
    n_mean = expectation(rho, number(space)).real
    oracle = moment_ode_gain(kappa1, 0.3)
    assert oracle == pytest.approx(GAIN_MEAN_PHONONS_T03, abs=1e-10)
    assert n_mean == pytest.approx(GAIN_MEAN_PHONONS_T03, abs=1e-6)


def test_two_phonon_decay_matches_exponential():
    space = FockSpace(6)
    lv = build_liouvillian(space, DissipatorSpec(0.0, 1.0))
    rho = evolve(lv, number_state(space, 2), t_final=0.1, dt=1e-4)
    assert rho.populations[2] == pytest.approx(TWO_PHONON_SURVIVAL_T01, abs=1e-8)
    # the lost population lands in the ground state
    assert rho.populations[0] == pytest.approx(1.0 - TWO_PHONON_SURVIVAL_T01, abs=1e-8)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_evolve_instability_reports_step_hint():
    space = FockSpace(12)
    lv = build_liouvillian(space, DissipatorSpec(1.0, 5.0))
    with pytest.raises(RuntimeError, match="dt"):
        evolve(lv, number_state(space, 0), t_final=50.0, dt=0.5)


# --- steady states --------------------------------------------------------


def test_steady_state_matches_rate_ladder():
    for kappa2 in (0.05, 1.0, 10.0):
        diss = DissipatorSpec(1.0, kappa2)
        rho, diag = steady_state_adaptive(diss)
        oracle = rate_ladder_populations(1.0, kappa2, diag["n_max"])
        assert np.max(np.abs(rho.populations - oracle)) < 1e-8, f"kappa2={kappa2}"


def test_large_kappa2_limit_populations():
    rho, _ = steady_state_adaptive(DissipatorSpec(1.0, 1e4))
    p0, p1 = large_kappa2_populations()
    assert rho.populations[0] == pytest.approx(p0, abs=7e-4)
    assert rho.populations[1] == pytest.approx(p1, abs=7e-4)


def test_undriven_steady_state_is_diagonal_with_zero_field():
    space = FockSpace(default_n_max(DissipatorSpec(1.0, 1.0)))
    lv = build_liouvillian(space, DissipatorSpec(1.0, 1.0))
    rho = steady_state(lv)
    off = rho.matrix - np.diag(rho.matrix.diagonal())
    assert np.max(np.abs(off)) < 1e-10
    assert abs(expectation(rho, destroy(space))) < 1e-12


def test_steady_state_is_fixed_point_of_evolve():
    diss = DissipatorSpec(1.0, 1.0)
    space = FockSpace(12)
    lv = build_liouvillian(space, diss)
    rho_ss = steady_state(lv)
    rho_t = evolve(lv, rho_ss, t_final=5.0)
    assert np.max(np.abs(rho_t.matrix - rho_ss.matrix)) < 1e-7


def test_driven_steady_state_has_nonzero_field():
    diss = DissipatorSpec(1.0, 20.0)
    rho, _ = steady_state_adaptive(diss, ham=Drive(delta=0.0, e=1.0))
    a = destroy(FockSpace(rho.space.n_max))
    assert abs(expectation(rho, a)) > 0.01


def test_degenerate_kernel_is_reported():
    space = FockSpace(4)
    lv = build_liouvillian(space, DissipatorSpec(0.0, 0.0))
    with pytest.raises(SteadyStateError):
        steady_state(lv)


def test_adaptive_truncation_grows_until_clean():
    rho, diag = steady_state_adaptive(DissipatorSpec(1.0, 0.05), n_max=6)
    assert diag["n_max"] > 6
    assert diag["top_level_population"] < 1e-6
    n_mean = expectation(rho, number(FockSpace(rho.space.n_max))).real
    assert n_mean == pytest.approx(11.0, rel=0.10)


def test_two_mode_steady_state_factorizes_at_large_kappa2():
    diss = DissipatorSpec(1.0, 1e4)
    rho, _ = steady_state_adaptive(diss, ham=Coupling(v=3.0), modes=2)
    single, _ = steady_state_adaptive(diss, n_max=rho.space.n_max)
    product = np.kron(single.matrix, single.matrix)
    assert np.max(np.abs(rho.matrix - product)) < 1e-3


def test_evolve_route_agrees_with_direct():
    diss = DissipatorSpec(1.0, 0.5)
    space = FockSpace(14)
    lv = build_liouvillian(space, diss)
    direct = steady_state(lv, method="direct")
    evolved = steady_state(lv, method="evolve", rhodot_tol=1e-11)
    assert np.max(np.abs(direct.matrix - evolved.matrix)) < 1e-6


# --- fast matrix-form RHS --------------------------------------------------


def test_matrix_rhs_matches_superoperator():
    rng = np.random.default_rng(5)
    space = FockSpace(9)
    diss = DissipatorSpec(1.0, 0.8)
    rho = random_density_matrix(space, rng)
    field = 0.37 - 0.21j
    delta = 0.45

    rhs = SingleModeRhs(space, diss, delta=delta)
    fast = rhs(np.asarray(rho.matrix), field=field)

    lv = build_liouvillian(
        space, diss, MeanFieldCoupling(v=1.0, alpha=field)
    )
    slow = lv.apply(np.asarray(rho.matrix))
    # add the detuning term separately (mean-field variant has none)
    n_diag = np.arange(space.dim)
    slow += -1j * delta * (n_diag[:, None] - n_diag[None, :]) * np.asarray(rho.matrix)
    assert np.max(np.abs(fast - slow)) < 1e-12

    assert rhs.field_expectation(np.asarray(rho.matrix)) == pytest.approx(
        expectation(rho, destroy(space)), abs=1e-12
    )


def test_mean_phonon_number_in_classical_regime():
    rho, _ = steady_state_adaptive(DissipatorSpec(1.0, 0.05))
    n_mean = expectation(rho, number(FockSpace(rho.space.n_max))).real
    assert n_mean == pytest.approx(1.0 / (2 * 0.05) + 1.0, rel=0.10)
