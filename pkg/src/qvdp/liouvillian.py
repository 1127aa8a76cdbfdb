"""Master-equation assembly, time evolution, and steady-state solvers.

The model is a self-sustained oscillator with one-phonon gain (rate kappa1,
collapse operator a^dag) and two-phonon loss (rate kappa2, collapse operator
a^2), using the convention

    drho/dt = -i[H, rho]
              + kappa1 (2 a^dag rho a - a a^dag rho - rho a a^dag)
              + kappa2 (2 a^2 rho a^dag^2 - a^dag^2 a^2 rho - rho a^dag^2 a^2)

so the phonon ladder runs |0> -(2 kappa1)-> |1> -(4 kappa1)-> |2>
-(4 kappa2)-> |0>.  Superoperators act on row-major vectorized density
matrices: vec(A rho B) = kron(A, B.T) vec(rho).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import DensityMatrix, FockSpace, destroy, identity, tensor

STEADY_RESIDUAL_TOL = 1e-10
EVOLVE_TRACE_TOL = 1e-6
MAX_EVOLVE_STEPS = 5_000_000


@dataclass(frozen=True)
class DissipatorSpec:
    """Gain/loss rates in units of the one-phonon gain rate kappa1."""

    kappa1: float
    kappa2: float

    def __post_init__(self):
        if self.kappa1 < 0 or self.kappa2 < 0:
            raise ValueError(
                f"rates must be nonnegative, got kappa1={self.kappa1}, kappa2={self.kappa2}"
            )

    @property
    def classical_phonons(self) -> float:
        """Noise-free limit-cycle phonon number kappa1/(2 kappa2) + 1."""
        if self.kappa2 == 0:
            return math.inf
        return self.kappa1 / (2.0 * self.kappa2) + 1.0


@dataclass(frozen=True)
class Drive:
    """External drive H = delta a^dag a + (e/2)(a + a^dag), single mode."""

    delta: float
    e: float


@dataclass(frozen=True)
class Coupling:
    """Excitation exchange H = v (a1^dag a2 + a1 a2^dag), two modes."""

    v: float


@dataclass(frozen=True)
class MeanFieldCoupling:
    """Self-consistent field H = v (conj(alpha) a + alpha a^dag), single mode."""

    v: float
    alpha: complex


Hamiltonian = Drive | Coupling | MeanFieldCoupling | None


def hamiltonian_matrix(space: FockSpace, ham: Hamiltonian) -> np.ndarray | None:
    """Dense Hamiltonian matrix for a variant, or None for free evolution."""
    if ham is None:
        return None
    if isinstance(ham, Drive):
        if space.modes != 1:
            raise ValueError("drive Hamiltonian requires a single-mode space")
        a = destroy(space).matrix
        n = np.diag(np.arange(float(space.dim)))
        return ham.delta * n + 0.5 * ham.e * (a + a.conj().T)
    if isinstance(ham, MeanFieldCoupling):
        if space.modes != 1:
            raise ValueError("mean-field Hamiltonian requires a single-mode space")
        a = destroy(space).matrix
        return ham.v * (np.conj(ham.alpha) * a + ham.alpha * a.conj().T)
    if isinstance(ham, Coupling):
        if space.modes != 2:
            raise ValueError("coupling Hamiltonian requires a two-mode space")
        mode = FockSpace(space.n_max, modes=1)
        a = destroy(mode)
        one = identity(mode)
        a1 = tensor(a, one).matrix
        a2 = tensor(one, a).matrix
        return ham.v * (a1.conj().T @ a2 + a1 @ a2.conj().T)
    raise TypeError(f"unsupported Hamiltonian spec: {ham!r}")


def _spre(m: sp.spmatrix, dim: int) -> sp.csr_matrix:
    return sp.kron(m, sp.identity(dim, format="csr"), format="csr")


def _spost(m: sp.spmatrix, dim: int) -> sp.csr_matrix:
    return sp.kron(sp.identity(dim, format="csr"), m.T, format="csr")


def _dissipator(collapse: np.ndarray) -> sp.csr_matrix:
    """Superoperator of 2 L rho L^dag - L^dag L rho - rho L^dag L."""
    dim = collapse.shape[0]
    ls = sp.csr_matrix(collapse)
    ldl = (ls.conj().T @ ls).tocsr()
    sandwich = sp.kron(ls, ls.conj(), format="csr")  # L rho L^dag
    return 2.0 * sandwich - _spre(ldl, dim) - _spost(ldl, dim)


@dataclass(frozen=True)
class Liouvillian:
    """Sparse generator of the master equation on vectorized states."""

    space: FockSpace
    diss: DissipatorSpec
    ham: Hamiltonian
    matrix: sp.csr_matrix
    h_scale: float = 0.0  # infinity-norm of the Hamiltonian, for step control

    @property
    def rate_scale(self) -> float:
        """Magnitude of the fastest rate; used to normalize residuals."""
        d = np.abs(self.matrix.diagonal())
        return float(d.max()) if d.size else 1.0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """drho/dt for a dense matrix rho (returns a dense matrix)."""
        d = self.space.dim
        return (self.matrix @ rho.reshape(d * d)).reshape(d, d)


def build_liouvillian(space: FockSpace, diss: DissipatorSpec, ham: Hamiltonian = None) -> Liouvillian:
    """Assemble the sparse master-equation generator for one or two modes.

    Dissipators act on every mode with the same rates; the Hamiltonian
    variant must match the number of modes.
    """
    dim = space.dim
    if space.modes == 1:
        mode_ops = [destroy(space).matrix]
    else:
        mode = FockSpace(space.n_max, modes=1)
        a = destroy(mode)
        one = identity(mode)
        mode_ops = [tensor(a, one).matrix, tensor(one, a).matrix]

    gen = sp.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for a in mode_ops:
        if diss.kappa1 != 0.0:
            gen = gen + diss.kappa1 * _dissipator(a.conj().T)
        if diss.kappa2 != 0.0:
            gen = gen + diss.kappa2 * _dissipator(a @ a)

    h = hamiltonian_matrix(space, ham)
    h_scale = 0.0
    if h is not None:
        hs = sp.csr_matrix(h)
        gen = gen - 1j * (_spre(hs, dim) - _spost(hs, dim))
        h_scale = float(np.abs(h).sum(axis=1).max())
    return Liouvillian(space, diss, ham, gen.tocsr(), h_scale)


def default_dt(diss: DissipatorSpec, n_max: int, h_scale: float = 0.0) -> float:
    """Conservative explicit-RK4 step for the stiff two-phonon ladder."""
    return 0.05 / (diss.kappa1 + diss.kappa2 * n_max**2 + h_scale + 1e-30)


def _evolve_raw(
    gen: sp.csr_matrix,
    rho: np.ndarray,
    t_final: float,
    dt: float,
    resymmetrize_every: int = 100,
) -> np.ndarray:
    """RK4 on vec(rho); returns the final dense matrix, symmetrized."""
    d = rho.shape[0]
    steps = max(1, math.ceil(t_final / dt))
    if steps > MAX_EVOLVE_STEPS:
        raise RuntimeError(
            f"evolve would need {steps} steps at dt={dt:.3e}; "
            "use steady_state() or a shorter horizon for this stiff configuration"
        )
    dt = t_final / steps
    y = rho.reshape(d * d).astype(complex)
    norm0 = float(np.abs(y).max())
    for step in range(steps):
        k1 = gen @ y
        k2 = gen @ (y + 0.5 * dt * k1)
        k3 = gen @ (y + 0.5 * dt * k2)
        k4 = gen @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) % resymmetrize_every == 0:
            m = y.reshape(d, d)
            m = 0.5 * (m + m.conj().T)
            tr = np.trace(m).real
            # NaN fails both <= comparisons, so blow-ups that already went
            # non-finite land here instead of leaking into later algebra.
            if not (abs(tr - 1.0) <= EVOLVE_TRACE_TOL and np.abs(m).max() <= 1e3 * max(norm0, 1.0)):
                raise RuntimeError(
                    f"evolve unstable at t={(step + 1) * dt:.4g} "
                    f"(trace drift {abs(tr - 1.0):.2e}); retry with dt <= {dt / 2:.3e}"
                )
            y = m.reshape(d * d)
    m = y.reshape(d, d)
    return 0.5 * (m + m.conj().T)


def evolve(
    lv: Liouvillian,
    rho0: DensityMatrix,
    t_final: float,
    dt: float | None = None,
    resymmetrize_every: int = 100,
) -> DensityMatrix:
    """Integrate the master equation with fixed-step RK4 on vec(rho).

    Trace is preserved to roundoff by construction; drift beyond
    EVOLVE_TRACE_TOL or norm blow-up aborts with a step-size suggestion.
    """
    if rho0.space != lv.space:
        raise ValueError("initial state lives on a different space")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    if dt is None:
        dt = default_dt(lv.diss, lv.space.n_max, lv.h_scale)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final == 0:
        return rho0
    m = _evolve_raw(lv.matrix, np.asarray(rho0.matrix), t_final, dt, resymmetrize_every)
    tr = np.trace(m).real
    if not (abs(tr - 1.0) <= EVOLVE_TRACE_TOL and np.abs(m).max() <= 2.0):
        raise RuntimeError(
            f"evolve unstable (trace drift {abs(tr - 1.0):.2e}, max |rho| "
            f"{np.abs(m).max():.2e}); retry with dt <= {dt / 2:.3e}"
        )
    return DensityMatrix(lv.space, m / tr)


class SteadyStateError(RuntimeError):
    """Raised when no unique physical steady state could be computed."""


def steady_state(
    lv: Liouvillian,
    method: str = "auto",
    direct_limit: int = 40_000,
    seed_state: DensityMatrix | None = None,
    rhodot_tol: float = 1e-9,
    t_max: float = 400.0,
) -> DensityMatrix:
    """Unique steady state of the generator.

    method="direct" replaces one row of L with the trace functional and
    solves the sparse system directly; "evolve" integrates from a seed until
    the rate-normalized |drho/dt|_inf falls below rhodot_tol. "auto" picks
    direct for dim^2 <= direct_limit.
    """
    d2 = lv.space.dim**2
    if method == "auto":
        method = "direct" if d2 <= direct_limit else "evolve"
    if method == "direct":
        return _steady_state_direct(lv)
    if method == "evolve":
        return _steady_state_evolve(lv, seed_state, rhodot_tol, t_max)
    raise ValueError(f"unknown method {method!r}")


def _trace_row(dim: int, weight: float) -> sp.csr_matrix:
    cols = np.arange(dim) * dim + np.arange(dim)
    data = np.full(dim, weight, dtype=complex)
    return sp.csr_matrix((data, (np.zeros(dim, dtype=int), cols)), shape=(1, dim * dim))


def _steady_state_direct(lv: Liouvillian) -> DensityMatrix:
    d = lv.space.dim
    gen = lv.matrix
    scale = max(lv.rate_scale, 1.0)
    # Replace the first row with the trace constraint, weighted to match the
    # generator's magnitude so the solve stays well conditioned.
    a = sp.vstack([_trace_row(d, scale), gen[1:, :]], format="csc")
    b = np.zeros(d * d, dtype=complex)
    b[0] = scale
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sp.SparseEfficiencyWarning)
            warnings.simplefilter("ignore", spla.MatrixRankWarning)
            x = spla.spsolve(a, b)
    except RuntimeError as err:  # SuperLU reports exact singularity this way
        raise SteadyStateError(
            f"direct solve failed ({err}); the generator kernel may be degenerate"
        ) from err
    residual = float(np.abs(gen @ x).max()) / scale
    if not np.isfinite(residual) or residual > STEADY_RESIDUAL_TOL:
        raise SteadyStateError(
            f"direct solve residual {residual:.2e} exceeds {STEADY_RESIDUAL_TOL:.0e}; "
            "the generator kernel may be degenerate"
        )
    m = x.reshape(d, d)
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(lv.space, m / np.trace(m).real)


def _steady_state_evolve(
    lv: Liouvillian,
    seed_state: DensityMatrix | None,
    rhodot_tol: float,
    t_max: float,
) -> DensityMatrix:
    from .fock import coherent_state, required_n_max  # deferred to keep module load light

    if seed_state is None:
        amp = lv.diss.classical_phonons
        alpha = math.sqrt(amp) if math.isfinite(amp) else 0.0
        if alpha**2 > lv.space.n_max / 2:
            alpha = math.sqrt(lv.space.n_max / 2)
        # shrink until the truncated tail is negligible; vacuum always fits
        while alpha > 0.05 and required_n_max(alpha) > lv.space.n_max:
            alpha *= 0.85
        if alpha <= 0.05:
            alpha = 0.0
        seed_state = coherent_state(lv.space, alpha) if lv.space.modes == 1 else None
        if seed_state is None:
            mode = FockSpace(lv.space.n_max, modes=1)
            c = coherent_state(mode, alpha).matrix
            m = np.kron(c, c)
            seed_state = DensityMatrix(lv.space, m / np.trace(m).real)
    scale = max(lv.rate_scale, 1.0)
    chunk = max(1.0, 2.0 / max(lv.diss.kappa1, 1e-12))
    dt = default_dt(lv.diss, lv.space.n_max, lv.h_scale)
    m = np.asarray(seed_state.matrix)
    t = 0.0
    rhodot = math.inf
    while t < t_max:
        m = _evolve_raw(lv.matrix, m, chunk, dt)
        tr = np.trace(m).real
        if abs(tr - 1.0) > EVOLVE_TRACE_TOL:
            raise SteadyStateError(f"evolution lost the trace ({tr!r}); reduce dt")
        m /= tr
        t += chunk
        rhodot = float(np.abs(lv.apply(m)).max()) / scale
        if rhodot < rhodot_tol:
            return DensityMatrix(lv.space, m)
    raise SteadyStateError(
        f"steady state not reached within t={t_max} (normalized |drho/dt| = {rhodot:.2e})"
    )


def large_kappa2_populations() -> tuple[float, float]:
    """Ground/first-excited occupations (2/3, 1/3) in the strong two-phonon
    loss limit, where the ladder reduces to a two-state cycle: dwell time
    1/(2 kappa1) in |0> and 1/(4 kappa1) in |1>."""
    return (2.0 / 3.0, 1.0 / 3.0)


def default_n_max(diss: DissipatorSpec) -> int:
    """Starting truncation: generous in the quantum limit, variance-aware in
    the classical limit where occupation ~ kappa1/(2 kappa2) + 1 is large."""
    nbar = diss.classical_phonons
    if not math.isfinite(nbar):
        raise ValueError("kappa2 = 0 has no bounded steady occupation; set n_max explicitly")
    start = min(4.0 * nbar, nbar + 8.0 * math.sqrt(nbar + 1.0))
    return int(math.ceil(start)) + 5


def top_level_population(rho: DensityMatrix) -> float:
    """Total population of the top two levels, per mode (max over modes)."""
    worst = 0.0
    for mode in range(rho.space.modes):
        p = rho.mode_populations(mode)
        worst = max(worst, float(p[-1] + p[-2]))
    return worst


def steady_state_adaptive(
    diss: DissipatorSpec,
    ham: Hamiltonian = None,
    modes: int = 1,
    n_max: int | None = None,
    top_tol: float = 1e-6,
    max_n_max: int = 600,
    **steady_kwargs,
) -> tuple[DensityMatrix, dict]:
    """Steady state with truncation grown until the top two levels hold
    less than top_tol population.  Returns (state, diagnostics)."""
    n = n_max if n_max is not None else default_n_max(diss)
    while True:
        space = FockSpace(n, modes=modes)
        lv = build_liouvillian(space, diss, ham)
        rho = steady_state(lv, **steady_kwargs)
        top = top_level_population(rho)
        if top < top_tol:
            return rho, {"n_max": n, "top_level_population": top}
        if n >= max_n_max:
            raise SteadyStateError(
                f"truncation check failed at n_max={n} (top-level population {top:.2e})"
            )
        n = min(max_n_max, int(math.ceil(1.3 * n)) + 1)


class SingleModeRhs:
    """Matrix-form master-equation right-hand side for one mode.

    All terms are diagonal scalings or index shifts of rho, so one
    evaluation costs O(dim^2) instead of a sparse matvec build.  Used by the
    mean-field integrator where the Hamiltonian changes every step.
    """

    def __init__(self, space: FockSpace, diss: DissipatorSpec, delta: float = 0.0):
        if space.modes != 1:
            raise ValueError("SingleModeRhs is single-mode only")
        self.space = space
        self.diss = diss
        self.delta = delta
        n = np.arange(float(space.dim))
        self.sq = np.sqrt(n[1:])  # sqrt(1..n_max)
        self.w2 = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
        # a a^dag in the truncated algebra: the top entry is 0, not n_max+1,
        # because a^dag annihilates the highest level.  Keeping that zero is
        # what makes the generator trace preserving on the finite space.
        self.gain_diag = n + 1.0
        self.gain_diag[-1] = 0.0
        self.loss_diag = n * (n - 1.0)  # a^dag^2 a^2
        self.n_diag = n

    def __call__(self, rho: np.ndarray, field: complex = 0.0) -> np.ndarray:
        """d rho/dt with H = delta n + conj(field) a + field a^dag."""
        k1, k2 = self.diss.kappa1, self.diss.kappa2
        out = -(
            k1 * (self.gain_diag[:, None] + self.gain_diag[None, :])
            + k2 * (self.loss_diag[:, None] + self.loss_diag[None, :])
        ) * rho
        out[1:, 1:] += (2.0 * k1) * (self.sq[:, None] * self.sq[None, :]) * rho[:-1, :-1]
        out[:-2, :-2] += (2.0 * k2) * (self.w2[:, None] * self.w2[None, :]) * rho[2:, 2:]

        ca = np.conj(field)  # coefficient of a in H
        if ca != 0.0 or field != 0.0 or self.delta != 0.0:
            comm = np.zeros_like(rho)
            if self.delta != 0.0:
                comm += self.delta * (self.n_diag[:, None] - self.n_diag[None, :]) * rho
            if ca != 0.0:
                comm[:-1, :] += ca * self.sq[:, None] * rho[1:, :]  # a rho
                comm[:, 1:] -= ca * self.sq[None, :] * rho[:, :-1]  # rho a
            if field != 0.0:
                comm[1:, :] += field * self.sq[:, None] * rho[:-1, :]  # a^dag rho
                comm[:, :-1] -= field * self.sq[None, :] * rho[:, 1:]  # rho a^dag
            out -= 1j * comm
        return out

    def field_expectation(self, rho: np.ndarray) -> complex:
        """Tr[rho a] in O(dim)."""
        return complex(np.sum(self.sq * np.diagonal(rho, offset=-1)))
