"""Self-consistent mean-field dynamics of globally coupled oscillators.

For an infinite all-to-all coupled ensemble of identical oscillators the
coupling Hamiltonian collapses onto a single mode driven by its own average
amplitude, H = v (conj(<a>) a + <a> a^dag), making the master equation
nonlinear.  The order parameter is r = |<a>|: r = 0 is the unsynchronized
branch (always an exact fixed point, since the undriven steady state has
<a> = 0), and a symmetry-broken branch with r > 0 appears above a critical
coupling through a first-order transition.

The synchronized solution generically rotates (the reactive coupling shifts
the oscillation frequency), so convergence is judged on the amplitude
series r(t), not on <a> itself.  A rotating-frame root finder is provided
as an independent cross-check: it solves for the fixed point directly as a
driven steady state with self-consistent drive amplitude and frame
frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import DensityMatrix, FockSpace, coherent_state, required_n_max
from .liouvillian import (
    DissipatorSpec,
    Drive,
    SingleModeRhs,
    build_liouvillian,
    default_n_max,
    steady_state,
    top_level_population,
)

# synchronized means r exceeds this fraction of the classical amplitude
SYNC_FRACTION = 0.1
# r(t) must be constant to this absolute level over the final 10% of a run
SETTLE_TOL = 1e-6
# 1/(1.4 lambda_max) sits a factor 3.9 below the RK4 stability edge; the
# dt-halving check in the tests guards the accuracy side
DT_SAFETY = 1.4
# fractional drop of r across the final quarter of a run that still counts
# as a flat tail; slower drifts are unresolvable at that horizon
MELT_TOL = 0.02


@dataclass(frozen=True)
class MeanFieldState:
    """Outcome of one nonlinear evolution.

    alpha_mf is Tr[rho a] of the final state; converged means the amplitude
    series settled (constant within SETTLE_TOL over the final tenth of the
    run), which covers rotating solutions as well as true fixed points.
    """

    rho: DensityMatrix
    alpha_mf: complex
    r: float
    converged: bool
    times: np.ndarray
    r_series: np.ndarray


@dataclass(frozen=True)
class PhasePoint:
    """One (v, kappa2) entry of a branch diagram; branch names the seed."""

    v: float
    kappa2: float
    branch: str
    r: float
    converged: bool


@dataclass(frozen=True)
class BoundaryPoint:
    """Critical coupling for one kappa2.

    censored means no synchronized point was found up to the search cap;
    v_critical then holds the largest coupling tested (a lower bound) and
    tolerance is infinite.  r_above records the order parameter just above
    the boundary, which stays finite because the transition is first-order.
    """

    kappa2: float
    v_critical: float
    tolerance: float
    censored: bool = False
    r_above: float = 0.0


def synchronized_amplitude(diss: DissipatorSpec) -> float:
    """Classical limit-cycle amplitude sqrt(kappa1/(2 kappa2) + 1)."""
    return math.sqrt(diss.classical_phonons)


def meanfield_space(diss: DissipatorSpec) -> FockSpace:
    """Truncation that holds both the undriven state and the locked branch."""
    n_sync = required_n_max(synchronized_amplitude(diss)) + 4
    return FockSpace(max(default_n_max(diss), n_sync))


def synchronized_seed(space: FockSpace, diss: DissipatorSpec) -> DensityMatrix:
    """Coherent state at the classical amplitude, on the locked branch."""
    return coherent_state(space, synchronized_amplitude(diss))


def unsynchronized_seed(space: FockSpace, diss: DissipatorSpec) -> DensityMatrix:
    """The undriven steady state; <a> = 0 makes it an exact fixed point."""
    return steady_state(build_liouvillian(space, diss))


def meanfield_dt(diss: DissipatorSpec, n_max: int, v: float) -> float:
    # spectral bound: dissipators plus the coupling commutator; runs seed at
    # or below the classical amplitude and the locked field never exceeds
    # it, so |<a>| <= A + 2 is a tighter bound than sqrt(n_max)
    amp = min(synchronized_amplitude(diss) + 2.0, math.sqrt(float(n_max)))
    lam = (
        2.0 * diss.kappa1 * (n_max + 1.0)
        + 2.0 * diss.kappa2 * n_max * (n_max - 1.0)
        + 4.0 * abs(v) * amp * math.sqrt(float(n_max))
    )
    return 1.0 / (DT_SAFETY * max(lam, 1e-12))


def meanfield_evolve(
    diss: DissipatorSpec,
    v: float,
    rho0: DensityMatrix,
    t_final: float | None = None,
    dt: float | None = None,
    settle_tol: float = SETTLE_TOL,
) -> MeanFieldState:
    """Integrate the nonlinear master equation, tracking r(t) = |Tr[rho a]|.

    The self-consistent field v * Tr[rho a] is recomputed at every RK4
    stage.  The run converged if r(t) is constant within settle_tol over
    the final 10% of the horizon; an amplitude that is still drifting or
    oscillating reports converged=False rather than raising.
    """
    space = rho0.space
    if space.modes != 1:
        raise ValueError("mean-field evolution is single-mode only")
    k1 = max(diss.kappa1, 1e-9)
    if t_final is None:
        t_final = 60.0 / k1
    if dt is None:
        dt = meanfield_dt(diss, space.n_max, v)
    steps = max(1, math.ceil(t_final / dt))
    dt = t_final / steps
    stride = max(1, steps // 4000)

    rhs = SingleModeRhs(space, diss)
    rho = np.array(rho0.matrix, dtype=complex)

    def deriv(m: np.ndarray) -> np.ndarray:
        return rhs(m, field=v * rhs.field_expectation(m))

    times = [0.0]
    r_series = [abs(rhs.field_expectation(rho))]
    check_every = max(1, steps // 50)
    for s in range(1, steps + 1):
        ka = deriv(rho)
        kb = deriv(rho + (0.5 * dt) * ka)
        kc = deriv(rho + (0.5 * dt) * kb)
        kd = deriv(rho + dt * kc)
        rho += (dt / 6.0) * (ka + 2.0 * (kb + kc) + kd)
        if s % stride == 0 or s == steps:
            times.append(s * dt)
            r_series.append(abs(rhs.field_expectation(rho)))
        if s % check_every == 0 or s == steps:
            tr = float(np.trace(rho).real)
            if not (abs(tr - 1.0) <= 1e-6 and np.abs(rho).max() <= 2.0):
                raise RuntimeError(
                    f"mean-field evolution unstable at t={s * dt:.3g} "
                    f"(trace {tr:.3g}); reduce dt below {dt:.3g}"
                )

    t_arr = np.asarray(times)
    r_arr = np.asarray(r_series)
    tail = r_arr[t_arr >= 0.9 * t_final]
    converged = len(tail) >= 2 and float(tail.max() - tail.min()) < settle_tol

    final = DensityMatrix(space, 0.5 * (rho + rho.conj().T))
    if top_level_population(final) > 1e-4:
        raise RuntimeError(
            "state climbed to the truncation edge; enlarge the Fock space"
        )
    alpha = rhs.field_expectation(final.matrix)
    return MeanFieldState(
        rho=final,
        alpha_mf=alpha,
        r=float(abs(alpha)),
        converged=converged,
        times=t_arr,
        r_series=r_arr,
    )


def _branch_r(
    diss: DissipatorSpec,
    v: float,
    seed: DensityMatrix,
    t_final: float | None,
    max_extensions: int = 2,
) -> MeanFieldState:
    # extend unconverged runs from where they stopped; near a first-order
    # boundary the amplitude can dwell before committing to a branch
    state = meanfield_evolve(diss, v, seed, t_final=t_final)
    for _ in range(max_extensions):
        if state.converged:
            break
        state = meanfield_evolve(diss, v, state.rho, t_final=t_final)
    return state


def hysteresis_scan(
    diss: DissipatorSpec,
    v_values,
    space: FockSpace | None = None,
    t_final: float | None = None,
) -> list[PhasePoint]:
    """Follow both branches across a coupling scan.

    Each coupling value is run twice, once from the synchronized seed and
    once from the unsynchronized one, exposing the bistable window where
    the two disagree.
    """
    if space is None:
        space = meanfield_space(diss)
    sync0 = synchronized_seed(space, diss)
    unsync0 = unsynchronized_seed(space, diss)
    points: list[PhasePoint] = []
    for v in v_values:
        for branch, seed in (("synchronized", sync0), ("unsynchronized", unsync0)):
            state = _branch_r(diss, float(v), seed, t_final)
            points.append(
                PhasePoint(
                    v=float(v),
                    kappa2=diss.kappa2,
                    branch=branch,
                    r=state.r,
                    converged=state.converged,
                )
            )
    return points


def _tail_trend(state: MeanFieldState) -> float:
    """Mean r over the final quarter divided by the quarter before it.

    Values near 1 mean the amplitude has flattened out (possibly while
    still ringing); values clearly below 1 mean it is melting away and
    only the horizon kept it from reaching the unsynchronized branch.
    """
    t, r = state.times, state.r_series
    horizon = t[-1]
    if horizon <= 0.0:
        return 1.0
    q3 = r[(t >= 0.5 * horizon) & (t < 0.75 * horizon)]
    q4 = r[t >= 0.75 * horizon]
    if q3.size == 0 or q4.size == 0 or float(q3.mean()) <= 0.0:
        return 1.0
    return float(q4.mean() / q3.mean())


def _is_locked(state: MeanFieldState, diss: DissipatorSpec) -> bool:
    # a slow melt can run out the horizon while r is still large, so a
    # level test alone is not enough: an unsettled run must also show a
    # flat tail before it counts as on-branch
    threshold = SYNC_FRACTION * synchronized_amplitude(diss)
    if state.r <= threshold:
        return False
    if state.converged:
        return True
    return _tail_trend(state) >= 1.0 - MELT_TOL and state.r > 0.5 * synchronized_amplitude(diss)


def phase_boundary(
    kappa2_list,
    v_range: tuple[float, float],
    kappa1: float = 1.0,
    rel_tol: float = 0.02,
    t_final: float | None = None,
    v_cap_factor: float = 64.0,
) -> list[BoundaryPoint]:
    """Saddle-node edge of the synchronized branch per kappa2.

    Found by continuation: the branch is anchored at a coupling where a
    cold synchronized seed locks, then followed downward with each trial
    re-seeded from the nearest locked state.  Cold seeding alone would
    overestimate the edge, because near it the coherent seed dephases
    before the self-consistent field can pin it, even though the locked
    branch still exists there.

    If no coupling up to v_range[1] * v_cap_factor locks, the point is
    censored with v_critical holding the largest coupling tested.  If the
    branch survives all the way down to v_range[0], v_critical = tolerance
    = v_range[0], bounding the edge by the bottom of the range.
    """
    results: list[BoundaryPoint] = []
    for k2 in kappa2_list:
        diss = DissipatorSpec(kappa1, float(k2))
        space = meanfield_space(diss)
        lo, hi = float(v_range[0]), float(v_range[1])
        v_cap = hi * v_cap_factor

        v_anchor = hi
        anchored: MeanFieldState | None = None
        while v_anchor <= v_cap:
            st = _branch_r(diss, v_anchor, synchronized_seed(space, diss), t_final)
            if _is_locked(st, diss):
                anchored = st
                break
            v_anchor *= 2.0
        if anchored is None:
            results.append(
                BoundaryPoint(float(k2), v_anchor / 2.0, math.inf, censored=True)
            )
            continue

        v_lock, rho_lock, r_lock = v_anchor, anchored.rho, anchored.r
        st = _branch_r(diss, lo, rho_lock, t_final)
        if _is_locked(st, diss):
            results.append(BoundaryPoint(float(k2), lo, lo, r_above=st.r))
            continue
        v_melt = lo
        while (v_lock - v_melt) > rel_tol * v_lock:
            mid = 0.5 * (v_lock + v_melt)
            st = _branch_r(diss, mid, rho_lock, t_final)
            if _is_locked(st, diss):
                v_lock, rho_lock, r_lock = mid, st.rho, st.r
            else:
                v_melt = mid
        results.append(
            BoundaryPoint(
                kappa2=float(k2),
                v_critical=0.5 * (v_lock + v_melt),
                tolerance=0.5 * (v_lock - v_melt),
                r_above=r_lock,
            )
        )
    return results


@dataclass(frozen=True)
class RotatingFixedPoint:
    """Self-consistent locked solution found in its co-rotating frame."""

    beta: float
    delta: float
    rho: DensityMatrix
    residual: float
    success: bool


def rotating_frame_fixed_point(
    diss: DissipatorSpec,
    v: float,
    space: FockSpace | None = None,
    beta0: float | None = None,
    delta0: float | None = None,
) -> RotatingFixedPoint:
    """Solve for the synchronized branch as a driven steady state.

    In a frame rotating with the locked solution the mean field looks like
    a static drive of amplitude 2 v beta at detuning delta, so the fixed
    point satisfies <a> = beta (real, by gauge choice) for the linear
    steady state of that driven oscillator.  Solved with a two-variable
    root find over (beta, delta); classically delta tends to -v, the
    frequency pull of the reactive coupling.

    Independent of the time stepper, so it cross-checks meanfield_evolve.
    """
    from scipy.optimize import root

    if space is None:
        space = meanfield_space(diss)
    if beta0 is None:
        beta0 = synchronized_amplitude(diss)
    if delta0 is None:
        delta0 = -v
    a_diag = np.sqrt(np.arange(1.0, space.dim))

    def mean_a(rho: DensityMatrix) -> complex:
        return complex(np.sum(a_diag * np.diagonal(rho.matrix, offset=-1)))

    def residual(x: np.ndarray) -> np.ndarray:
        beta, delta = float(x[0]), float(x[1])
        lv = build_liouvillian(space, diss, Drive(delta=delta, e=2.0 * v * beta))
        alpha = mean_a(steady_state(lv))
        return np.array([alpha.real - beta, alpha.imag])

    sol = root(residual, np.array([beta0, delta0]), method="hybr", tol=1e-12)
    beta, delta = float(sol.x[0]), float(sol.x[1])
    lv = build_liouvillian(space, diss, Drive(delta=delta, e=2.0 * v * beta))
    rho = steady_state(lv)
    res = float(np.linalg.norm(residual(sol.x)))
    return RotatingFixedPoint(
        beta=beta, delta=delta, rho=rho, residual=res, success=bool(sol.success)
    )
