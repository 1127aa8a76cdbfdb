"""Classical limits: the textbook oscillator ODE and stochastic amplitude
equations.

The stochastic model evolves complex amplitudes alpha_j under


    d alpha = [(kappa1 + 2 kappa2 - 2 kappa2 |alpha|^2) alpha
               - i delta alpha - i e / 2 + coupling] dt + dW,

with independent Gaussian increments of variance (3 kappa1 / 2 + kappa2) dt
per quadrature.  Its stationary density is known in closed form for the
uncoupled, undriven case and is exposed here as an oracle for tests and
figures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .liouvillian import DissipatorSpec
from .wigner import (
    PhaseDistribution,
    RadialDistribution,
    WignerGrid,
    grid_axis,
    phase_angles,
)

MIN_RECOMMENDED_SAMPLES = 10_000
# amplitude at which a trajectory is declared numerically lost
BLOWUP_FACTOR = 50.0


def vdp_rhs(state: np.ndarray, omega0: float, epsilon: float) -> np.ndarray:
    """Right-hand side of x'' = -omega0^2 x + epsilon (1 - x^2) x'."""
    x, v = state
    return np.array([v, -(omega0**2) * x + epsilon * (1.0 - x**2) * v])


def integrate_vdp_ode(
    x0: float,
    v0: float,
    omega0: float,
    epsilon: float,
    t_final: float,
    dt: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 for the self-sustained oscillator ODE.

    Returns (times, states) with states[:, 0] = position.  For weak
    nonlinearity the long-time orbit settles on the radius-2 limit cycle.
    """
    if dt is None:
        dt = 0.01 / max(omega0, epsilon, 1e-12)
    steps = max(1, math.ceil(t_final / dt))
    dt = t_final / steps
    times = dt * np.arange(steps + 1)
    states = np.empty((steps + 1, 2))
    y = np.array([x0, v0], dtype=float)
    states[0] = y
    for i in range(steps):
        k1 = vdp_rhs(y, omega0, epsilon)
        k2 = vdp_rhs(y + 0.5 * dt * k1, omega0, epsilon)
        k3 = vdp_rhs(y + 0.5 * dt * k2, omega0, epsilon)
        k4 = vdp_rhs(y + dt * k3, omega0, epsilon)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[i + 1] = y
    return times, states


@dataclass(frozen=True)
class LangevinParams:
    """Stochastic amplitude-equation configuration.

    n_osc = 1 is a single oscillator; n_osc = 2 couples the pair at bare
    strength v; larger ensembles couple each member to the population mean
    with strength v / n_osc.
    """

    diss: DissipatorSpec
    delta: float = 0.0
    e: float = 0.0
    v: float = 0.0
    n_osc: int = 1

    def __post_init__(self):
        if self.n_osc < 1:
            raise ValueError("n_osc must be at least 1")
        if self.n_osc == 1 and self.v != 0.0:
            raise ValueError("coupling needs at least two oscillators")

    @property
    def noise_variance(self) -> float:
        """Per-quadrature variance growth rate."""
        return 1.5 * self.diss.kappa1 + self.diss.kappa2

    @property
    def drift_radius(self) -> float:
        """Noise-free limit-cycle radius."""
        return math.sqrt(self.diss.classical_phonons)

    def stable_dt(self) -> float:
        k = self.diss.kappa1 + 2.0 * self.diss.kappa2
        return 0.01 / max(k, abs(self.v), abs(self.delta), 1e-9)


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Sampled stochastic trajectories.

    samples has shape (realizations, sample_times, n_osc) and holds complex
    amplitudes after the burn-in window.
    """

    params: LangevinParams
    times: np.ndarray
    samples: np.ndarray
    seed: int

    def flat(self, oscillator: int | None = None) -> np.ndarray:
        """All retained amplitudes as one 1-d complex array."""
        if oscillator is None:
            return self.samples.reshape(-1)
        return self.samples[:, :, oscillator].reshape(-1)

    def phase_difference_samples(self) -> np.ndarray:
        if self.params.n_osc < 2:
            raise ValueError("needs at least two oscillators")
        d = np.angle(self.samples[:, :, 0]) - np.angle(self.samples[:, :, 1])
        return np.mod(d + math.pi, 2.0 * math.pi) - math.pi

    def order_parameter(self) -> np.ndarray:
        """|mean amplitude| across the ensemble at each retained time."""
        return np.abs(self.samples.mean(axis=(0, 2)))


def _drift(
    a: np.ndarray, params: LangevinParams, include_drive: bool = True
) -> np.ndarray:
    k1, k2 = params.diss.kappa1, params.diss.kappa2
    out = a * (k1 + 2.0 * k2 - 2.0 * k2 * np.abs(a) ** 2 - 1j * params.delta)
    if include_drive and params.e != 0.0:
        out = out - 0.5j * params.e
    if params.v != 0.0:
        if params.n_osc == 2:
            out = out - 1j * params.v * a[..., ::-1]
        else:
            # each member couples at v / n to every other, i.e. to the mean
            mean = a.mean(axis=-1, keepdims=True)
            out = out - 1j * params.v * (mean - a / params.n_osc)
    return out


def simulate_langevin(
    params: LangevinParams,
    t_final: float,
    seed: int,
    realizations: int = 1,
    burn_in: float | None = None,
    sample_interval: float | None = None,
    dt: float | None = None,
    initial: np.ndarray | None = None,
    include_noise: bool = True,
) -> TrajectoryEnsemble:
    """Euler-Maruyama integration of the amplitude equations.

    Each realization draws from an independent child of the seed, so results
    are reproducible and insensitive to chunking.  Samples are retained every
    sample_interval after burn_in (default 20 relaxation times).
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if realizations < 1:
        raise ValueError("realizations must be positive")
    if dt is None:
        dt = params.stable_dt()
    k1 = params.diss.kappa1
    if burn_in is None:
        burn_in = min(20.0 / max(k1, 1e-9), 0.5 * t_final)
    if sample_interval is None:
        sample_interval = 1.0 / max(k1, 1e-9)
    steps = max(1, math.ceil(t_final / dt))
    dt = t_final / steps
    stride = max(1, round(sample_interval / dt))
    first_kept = min(steps, math.ceil(burn_in / dt))

    if initial is None:
        a = np.full((realizations, params.n_osc), params.drift_radius + 0.0j)
    else:
        a = np.array(initial, dtype=complex)
        if a.shape != (realizations, params.n_osc):
            raise ValueError("initial must have shape (realizations, n_osc)")

    sigma = math.sqrt(params.noise_variance * dt) if include_noise else 0.0
    limit = BLOWUP_FACTOR * max(params.drift_radius, 1.0)
    kept_idx = [s for s in range(first_kept, steps + 1) if (s - first_kept) % stride == 0]
    samples = np.empty((realizations, len(kept_idx), params.n_osc), dtype=complex)
    times = dt * np.asarray(kept_idx, dtype=float)

    # one child stream per realization keeps any single trajectory
    # reproducible regardless of how many others run alongside it
    streams = [
        np.random.default_rng(child)
        for child in np.random.SeedSequence(seed).spawn(realizations)
    ]
    out_col = 0
    if kept_idx and kept_idx[0] == 0:
        samples[:, 0] = a
        out_col = 1
    chunk = 1024
    for start in range(0, steps, chunk):
        n_steps = min(chunk, steps - start)
        if sigma > 0.0:
            noise = np.stack(
                [g.normal(0.0, sigma, size=(n_steps, params.n_osc, 2)) for g in streams],
                axis=1,
            )
        for j in range(n_steps):
            a = a + _drift(a, params) * dt
            if sigma > 0.0:
                a = a + noise[j, :, :, 0] + 1j * noise[j, :, :, 1]
            s = start + j + 1
            if s >= first_kept and (s - first_kept) % stride == 0:
                samples[:, out_col] = a
                out_col += 1
        peak = np.abs(a).max()
        if not np.isfinite(peak) or peak > limit:
            raise RuntimeError(
                f"trajectory escaped (|alpha| ~ {peak:.2e}) at t={min((start + n_steps) * dt, t_final):.3g}; "
                f"retry with dt <= {dt / 2:.3e}"
            )
    return TrajectoryEnsemble(params, times, samples, seed)


# --- histogram views --------------------------------------------------------


def _check_sample_count(n: int):
    if n < MIN_RECOMMENDED_SAMPLES:
        warnings.warn(
            f"only {n} samples; phase-space histograms are noisy below "
            f"{MIN_RECOMMENDED_SAMPLES}",
            stacklevel=3,
        )


def ensemble_wigner_histogram(
    values: np.ndarray, extent: float, resolution: int = 51
) -> WignerGrid:
    """Normalized 2-d histogram of complex amplitudes on cell centers."""
    flat = np.asarray(values).reshape(-1)
    _check_sample_count(flat.size)
    edges = np.linspace(-extent, extent, resolution + 1)
    hist, _, _ = np.histogram2d(flat.real, flat.imag, bins=(edges, edges))
    axis = grid_axis(extent, resolution)
    cell = (2.0 * extent / resolution) ** 2
    density = hist / max(flat.size, 1) / cell
    return WignerGrid(axis, axis.copy(), density)


def phase_histogram(values: np.ndarray, resolution: int = 180) -> PhaseDistribution:
    flat = np.asarray(values).reshape(-1)
    _check_sample_count(flat.size)
    angles = np.angle(flat)
    edges = np.linspace(-math.pi, math.pi, resolution + 1)
    hist, _ = np.histogram(angles, bins=edges)
    width = 2.0 * math.pi / resolution
    return PhaseDistribution(phase_angles(resolution), hist / flat.size / width)


def phase_difference_histogram(
    ensemble: TrajectoryEnsemble, resolution: int = 180
) -> PhaseDistribution:
    diffs = ensemble.phase_difference_samples().reshape(-1)
    _check_sample_count(diffs.size)
    edges = np.linspace(-math.pi, math.pi, resolution + 1)
    hist, _ = np.histogram(diffs, bins=edges)
    width = 2.0 * math.pi / resolution
    return PhaseDistribution(phase_angles(resolution), hist / diffs.size / width)


def radial_histogram(
    values: np.ndarray, r_max: float, resolution: int = 120
) -> RadialDistribution:
    flat = np.abs(np.asarray(values).reshape(-1))
    _check_sample_count(flat.size)
    edges = np.linspace(0.0, r_max, resolution + 1)
    hist, _ = np.histogram(flat, bins=edges)
    width = r_max / resolution
    centers = 0.5 * (edges[:-1] + edges[1:])
    return RadialDistribution(centers, hist / flat.size / width)


# --- stationary density -----------------------------------------------------


def stationary_weight(alphas: np.ndarray, diss: DissipatorSpec) -> np.ndarray:
    """Unnormalized stationary density of the undriven amplitude equation.

    Detailed balance of the radial Fokker-Planck flow gives
    exp{2 [(kappa1 + 2 kappa2) r^2 - kappa2 r^4] / (3 kappa1 + 2 kappa2)}.
    """
    k1, k2 = diss.kappa1, diss.kappa2
    if k2 <= 0:
        raise ValueError("no stationary density without two-phonon loss")
    r2 = np.abs(np.asarray(alphas, dtype=complex)) ** 2
    d = 1.5 * k1 + k2  # per-quadrature diffusion
    expo = ((k1 + 2.0 * k2) * r2 - k2 * r2**2) / d
    # shift by the peak exponent (at r^2 = classical_phonons) so the weight
    # never overflows and ratios between separate calls stay meaningful
    peak = diss.classical_phonons
    expo = expo - ((k1 + 2.0 * k2) * peak - k2 * peak**2) / d
    return np.exp(expo)


def stationary_density_grid(
    diss: DissipatorSpec, extent: float, resolution: int = 51
) -> WignerGrid:
    """Normalized stationary density on the same cell-center grid layout."""
    axis = grid_axis(extent, resolution)
    pts = axis[:, None] + 1j * axis[None, :]
    w = stationary_weight(pts, diss)
    cell = (2.0 * extent / resolution) ** 2
    return WignerGrid(axis, axis.copy(), w / (w.sum() * cell))


# --- synchronization of large ensembles -------------------------------------


@dataclass(frozen=True)
class BoundarySearch:
    """Result of a bisection search for a critical coupling."""

    v_critical: float
    tolerance: float
    censored: bool = False
    detail: dict = field(default_factory=dict)


def classical_order_parameter(
    diss: DissipatorSpec,
    v: float,
    n_osc: int,
    seed: int,
    t_final: float | None = None,
    dt: float | None = None,
) -> float:
    """Persistence of synchronization in an initially phase-aligned ensemble.

    The coupling is reactive, so coherence never grows out of a random
    state; the physical question is whether an aligned ensemble stays
    locked against noise.  Returns |mean alpha| averaged over the second
    half of the run, normalized by the limit-cycle radius, so values near 1
    mean the locked branch survives and values at the 1/sqrt(n) floor mean
    it melted.

    The default horizon covers ten phase-diffusion times of the free
    oscillator, so an unlocked ensemble has time to actually melt; at weak
    noise (small kappa2) that is much longer than 1/kappa1.
    """
    k1 = diss.kappa1
    if t_final is None:
        params0 = LangevinParams(diss, v=v, n_osc=n_osc)
        t_melt = params0.drift_radius**2 / params0.noise_variance
        t_final = max(60.0 / max(k1, 1e-9), min(10.0 * t_melt, 2000.0 / max(k1, 1e-9)))
    params = LangevinParams(diss, v=v, n_osc=n_osc)
    ens = simulate_langevin(
        params,
        t_final,
        seed=seed,
        realizations=1,
        burn_in=0.5 * t_final,
        sample_interval=1.0 / max(k1, 1e-9),
        dt=dt,
    )
    r = ens.order_parameter()
    return float(r.mean() / params.drift_radius)


def classical_phase_boundary(
    diss: DissipatorSpec,
    n_osc: int = 3000,
    seed: int = 7,
    v_hint: float | None = None,
    rel_tol: float = 0.05,
    v_max_factor: float = 64.0,
) -> BoundarySearch:
    """Critical coupling above which the locked ensemble persists.

    Doubles the coupling until an initially aligned ensemble stays locked,
    then bisects.  Locked means the time-averaged order parameter exceeds
    the finite-size noise floor 5 / sqrt(n_osc).  If no coupling up to
    v_max_factor times the starting guess locks, the result is censored and
    v_critical reports the largest coupling tested, a certified lower bound.
    """
    threshold = 5.0 / math.sqrt(n_osc)
    lo = 0.0
    hi = v_hint if v_hint is not None else max(diss.kappa1, diss.kappa2)
    v_cap = hi * v_max_factor

    def synced(v: float) -> bool:
        return classical_order_parameter(diss, v, n_osc, seed) > threshold

    while not synced(hi):
        lo = hi
        hi *= 2.0
        if hi > v_cap:
            return BoundarySearch(lo, math.inf, censored=True, detail={"threshold": threshold})
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if synced(mid):
            hi = mid
        else:
            lo = mid
    return BoundarySearch(
        0.5 * (lo + hi), 0.5 * (hi - lo), detail={"threshold": threshold}
    )
