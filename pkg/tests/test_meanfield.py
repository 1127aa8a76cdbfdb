"""Nonlinear mean-field evolution, branch structure, and the boundary search.

The rotating-frame fixed point (a driven steady state with self-consistent
amplitude and frame frequency, solved through the sparse linear solver)
serves as the independent oracle for the RK4 time evolution.
"""
import math

import numpy as np
import pytest

from qvdp.fock import DensityMatrix, FockSpace, coherent_state, destroy, expectation
from qvdp.liouvillian import (
    DissipatorSpec,
    MeanFieldCoupling,
    SingleModeRhs,
    build_liouvillian,
)
from qvdp.meanfield import (
    BoundaryPoint,
    MeanFieldState,
    _is_locked,
    hysteresis_scan,
    meanfield_evolve,
    meanfield_space,
    phase_boundary,
    rotating_frame_fixed_point,
    synchronized_amplitude,
    synchronized_seed,
    unsynchronized_seed,
)

QUANTUM = DissipatorSpec(1.0, 1.0)
SEMI = DissipatorSpec(1.0, 0.05)


def test_synchronized_amplitude_closed_form():
    assert synchronized_amplitude(DissipatorSpec(1.0, 2.0)) == pytest.approx(
        math.sqrt(1.25), abs=1e-15
    )
    assert synchronized_amplitude(DissipatorSpec(1.0, 0.005)) == pytest.approx(
        math.sqrt(101.0), abs=1e-12
    )


def test_field_term_matches_superoperator():
    # the fast matrix-form rhs must agree with the sparse Liouvillian built
    # from the same self-consistent field, frozen as an operator
    space = FockSpace(11)
    diss = DissipatorSpec(0.7, 0.4)
    alpha = 0.31 - 0.22j
    v = 1.3
    rng = np.random.default_rng(7)
    c = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(
        size=(space.dim, space.dim)
    )
    rho = c @ c.conj().T
    rho /= np.trace(rho).real

    rhs = SingleModeRhs(space, diss)
    fast = rhs(rho, field=v * alpha)
    lv = build_liouvillian(space, diss, MeanFieldCoupling(v=v, alpha=alpha))
    slow = lv.apply(rho)
    assert np.abs(fast - slow).max() < 1e-12


def test_no_coupling_decays_to_zero():
    space = meanfield_space(QUANTUM)
    st = meanfield_evolve(QUANTUM, 0.0, synchronized_seed(space, QUANTUM), t_final=20.0)
    assert st.r < 1e-8
    assert st.converged


def test_unsynchronized_seed_is_exact_fixed_point():
    space = meanfield_space(QUANTUM)
    st = meanfield_evolve(QUANTUM, 5.0, unsynchronized_seed(space, QUANTUM), t_final=15.0)
    assert float(np.max(st.r_series)) < 1e-6
    assert st.converged


def test_short_run_reports_unsettled():
    space = meanfield_space(QUANTUM)
    st = meanfield_evolve(QUANTUM, 0.0, synchronized_seed(space, QUANTUM), t_final=0.5)
    assert not st.converged


def test_gauge_covariance():
    # rotating the seed by a global phase must rotate arg<a> and leave r(t)
    # untouched; checked mid-transient where the amplitude is still large
    space = meanfield_space(SEMI)
    chi = 0.83
    amp = synchronized_amplitude(SEMI)
    st1 = meanfield_evolve(SEMI, 16.0, coherent_state(space, amp), t_final=3.0)
    st2 = meanfield_evolve(
        SEMI, 16.0, coherent_state(space, amp * np.exp(1j * chi)), t_final=3.0
    )
    assert np.abs(st1.r_series - st2.r_series).max() < 1e-10
    dphi = (np.angle(st2.alpha_mf) - np.angle(st1.alpha_mf) - chi) % (2.0 * math.pi)
    assert min(dphi, 2.0 * math.pi - dphi) < 1e-8


def test_locked_branch_against_rotating_frame_oracle():
    space = meanfield_space(SEMI)
    st = meanfield_evolve(SEMI, 16.0, synchronized_seed(space, SEMI), t_final=25.0)
    a = destroy(space)
    assert abs(complex(expectation(st.rho, a)) - st.alpha_mf) < 1e-12

    amp = synchronized_amplitude(SEMI)
    assert 0.6 * amp < st.r < amp  # quantum noise depresses the branch

    fp = rotating_frame_fixed_point(SEMI, 16.0, space, beta0=st.r, delta0=-16.0)
    assert fp.success
    assert fp.residual < 1e-8
    assert abs(fp.beta - st.r) < 2e-3 * fp.beta
    # reactive coupling pulls the locked frame by about -v
    assert abs(fp.delta + 16.0) < 1.0


def test_dt_halving_leaves_r_unchanged():
    space = meanfield_space(SEMI)
    seed = synchronized_seed(space, SEMI)
    st1 = meanfield_evolve(SEMI, 16.0, seed, t_final=15.0)
    from qvdp.meanfield import meanfield_dt

    dt = meanfield_dt(SEMI, space.n_max, 16.0)
    st2 = meanfield_evolve(SEMI, 16.0, seed, t_final=15.0, dt=0.5 * dt)
    assert abs(st1.r - st2.r) < 1e-4


def test_hysteresis_scan_branch_structure():
    pts = hysteresis_scan(QUANTUM, [0.0, 4.0], t_final=10.0)
    assert len(pts) == 4
    for p in pts:
        assert p.kappa2 == 1.0
        if p.branch == "unsynchronized":
            assert p.r < 1e-6
    at_zero = [p for p in pts if p.v == 0.0]
    assert all(p.r < 1e-6 for p in at_zero)


def test_phase_boundary_censored_when_branch_never_locks():
    pts = phase_boundary(
        [1.0], v_range=(0.5, 1.0), v_cap_factor=2.0, t_final=8.0
    )
    assert len(pts) == 1
    b = pts[0]
    assert isinstance(b, BoundaryPoint)
    assert b.censored
    assert math.isinf(b.tolerance)
    assert b.v_critical == pytest.approx(2.0)


def test_meanfield_rejects_multimode_states():
    space2 = FockSpace(3, modes=2)
    rho = DensityMatrix(space2, np.eye(space2.dim) / space2.dim)
    with pytest.raises(ValueError):
        meanfield_evolve(QUANTUM, 1.0, rho)


def _fake_state(times: np.ndarray, r_series: np.ndarray) -> MeanFieldState:
    space = FockSpace(2)
    rho = DensityMatrix(space, np.eye(space.dim) / space.dim)
    return MeanFieldState(
        rho=rho,
        alpha_mf=complex(r_series[-1]),
        r=float(r_series[-1]),
        converged=False,
        times=times,
        r_series=r_series,
    )


def test_locked_verdict_rejects_slow_melt():
    # at small kappa2 the horizon can end while a decaying amplitude is
    # still far above threshold; the flat-tail test must catch that
    diss = DissipatorSpec(1.0, 0.005)
    amp = synchronized_amplitude(diss)
    t = np.linspace(0.0, 60.0, 400)

    melting = _fake_state(t, amp * np.exp(-0.01 * t))
    assert melting.r > 0.5 * amp
    assert not _is_locked(melting, diss)

    ringing = _fake_state(t, 0.8 * amp + 0.02 * np.sin(3.0 * t))
    assert _is_locked(ringing, diss)

    low = _fake_state(t, np.full_like(t, 0.05 * amp))
    assert not _is_locked(low, diss)
