"""Phase-space representations of oscillator states.

Wigner functions are evaluated through displaced-parity matrix elements,
so a single pass over the density matrix serves an arbitrary set of
phase-space points.  Phase and radial marginals are computed exactly from
the Fock-basis coefficients rather than by integrating a sampled grid,
which keeps weak features (small phase harmonics, shallow troughs) free
of grid bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .fock import DensityMatrix

DEFAULT_RESOLUTION = 201
POINT_CHUNK = 4096


def _frozen_real(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, order="C")
    out.flags.writeable = False
    return out


def default_extent(rho: DensityMatrix) -> float:
    """Half-width that comfortably contains the state's phase-space support."""
    if rho.space.modes != 1:
        raise ValueError("extent heuristic is defined for single-mode states")
    nbar = float(np.dot(np.arange(rho.space.dim), rho.populations))
    return 2.0 + 2.0 * math.sqrt(nbar + 1.0)


def _displacement_columns(z: np.ndarray, dim: int) -> np.ndarray:
    """First column of <m|D(z)|0> for a batch of displacements, shape (dim, K).

    Every matrix element of D is bounded by 1, so the recursion never
    overflows; only the overall Gaussian can underflow, harmlessly, to 0.
    """
    cur = np.empty((dim, z.size), dtype=complex)
    cur[0] = np.exp(-0.5 * np.abs(z) ** 2)
    for m in range(1, dim):
        cur[m] = z * cur[m - 1] / math.sqrt(m)
    return cur


def wigner_at(rho: DensityMatrix, alphas: np.ndarray) -> np.ndarray:
    """Wigner function W(alpha) = (2/pi) <D(alpha) P D(alpha)^dag> pointwise.

    Accepts any array of complex points and returns matching real values.
    """
    if rho.space.modes != 1:
        raise ValueError("wigner_at expects a single-mode state")
    pts = np.asarray(alphas, dtype=complex)
    flat = pts.reshape(-1)
    out = np.empty(flat.size, dtype=float)
    mat = np.asarray(rho.matrix)
    dim = rho.space.dim
    sq = np.sqrt(np.arange(1.0, dim))
    for start in range(0, flat.size, POINT_CHUNK):
        z = 2.0 * flat[start : start + POINT_CHUNK]
        zbar = z.conj()
        # column n of <m|D(z)|n>, advanced in n via the ladder recursion
        col = _displacement_columns(z, dim)
        acc = np.zeros(z.size, dtype=complex)
        sign = 1.0
        for n in range(dim):
            acc += sign * (mat[n, :] @ col)
            if n + 1 < dim:
                nxt = np.empty_like(col)
                nxt[0] = -zbar * col[0]
                nxt[1:] = sq[:, None] * col[:-1] - zbar[None, :] * col[1:]
                col = nxt / math.sqrt(n + 1.0)
            sign = -sign
        out[start : start + z.size] = (2.0 / math.pi) * acc.real
    return out.reshape(pts.shape)


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function sampled on a square grid of cell centers.

    values[i, j] is W at re_axis[i] + 1j * im_axis[j].
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.re_axis.size, self.im_axis.size):
            raise ValueError("values shape does not match the axes")
        object.__setattr__(self, "re_axis", _frozen_real(self.re_axis))
        object.__setattr__(self, "im_axis", _frozen_real(self.im_axis))
        object.__setattr__(self, "values", _frozen_real(self.values))

    @property
    def cell_area(self) -> float:
        return float((self.re_axis[1] - self.re_axis[0]) * (self.im_axis[1] - self.im_axis[0]))

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def mean_phonons(self) -> float:
        """Symmetric-ordering moment: integral of (|alpha|^2 - 1/2) W."""
        r2 = self.re_axis[:, None] ** 2 + self.im_axis[None, :] ** 2
        return float(np.sum(r2 * self.values) * self.cell_area - 0.5)

    def points(self) -> np.ndarray:
        return self.re_axis[:, None] + 1j * self.im_axis[None, :]


def grid_axis(extent: float, resolution: int) -> np.ndarray:
    """Cell-center coordinates covering [-extent, extent]."""
    delta = 2.0 * extent / resolution
    return -extent + delta * (np.arange(resolution) + 0.5)


def wigner_grid(
    rho: DensityMatrix,
    extent: float | None = None,
    resolution: int = DEFAULT_RESOLUTION,
) -> WignerGrid:
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if extent is None:
        extent = default_extent(rho)
    if extent <= 0:
        raise ValueError("extent must be positive")
    axis = grid_axis(extent, resolution)
    pts = axis[:, None] + 1j * axis[None, :]
    return WignerGrid(axis, axis.copy(), wigner_at(rho, pts))


# --- angular and radial marginals -----------------------------------------


@dataclass(frozen=True)
class PhaseDistribution:
    """Probability density on the circle, sampled at uniform bin centers."""

    angles: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        if self.angles.shape != self.density.shape or self.angles.ndim != 1:
            raise ValueError("angles and density must be matching 1-d arrays")
        object.__setattr__(self, "angles", _frozen_real(self.angles))
        object.__setattr__(self, "density", _frozen_real(self.density))

    @property
    def bin_width(self) -> float:
        return 2.0 * math.pi / self.angles.size

    def harmonic(self, k: int) -> complex:
        """Circular Fourier coefficient, integral of P(t) e^{-ikt} dt."""
        return complex(np.sum(self.density * np.exp(-1j * k * self.angles)) * self.bin_width)

    def amplitude(self, k: int) -> float:
        """Coefficient a_k in P = 1/2pi + sum_k a_k cos(k t - t_k)."""
        if k == 0:
            return float(self.harmonic(0).real / (2.0 * math.pi))
        return float(abs(self.harmonic(k)) / math.pi)

    def peak_angle(self) -> float:
        """Location of the maximum, refined parabolically, in [0, 2pi)."""
        i = int(np.argmax(self.density))
        n = self.angles.size
        ym, y0, yp = (
            self.density[(i - 1) % n],
            self.density[i],
            self.density[(i + 1) % n],
        )
        denom = ym - 2.0 * y0 + yp
        shift = 0.0 if denom == 0 else 0.5 * (ym - yp) / denom
        return float((self.angles[i] + shift * self.bin_width) % (2.0 * math.pi))

    def value(self, theta: float) -> float:
        """Periodic linear interpolation of the density."""
        t = (theta - self.angles[0]) % (2.0 * math.pi)
        x = t / self.bin_width
        i = int(math.floor(x)) % self.angles.size
        frac = x - math.floor(x)
        j = (i + 1) % self.angles.size
        return float((1.0 - frac) * self.density[i] + frac * self.density[j])


@dataclass(frozen=True)
class RadialDistribution:
    """Probability density of the phase-space radius on [0, r_max]."""

    radii: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        if self.radii.shape != self.density.shape or self.radii.ndim != 1:
            raise ValueError("radii and density must be matching 1-d arrays")
        object.__setattr__(self, "radii", _frozen_real(self.radii))
        object.__setattr__(self, "density", _frozen_real(self.density))

    def peak_radius(self) -> float:
        i = int(np.argmax(self.density))
        if i == 0 or i == self.radii.size - 1:
            return float(self.radii[i])
        ym, y0, yp = self.density[i - 1], self.density[i], self.density[i + 1]
        denom = ym - 2.0 * y0 + yp
        shift = 0.0 if denom == 0 else 0.5 * (ym - yp) / denom
        return float(self.radii[i] + shift * (self.radii[1] - self.radii[0]))


@lru_cache(maxsize=100_000)
def _kernel_integral(n: int, k: int) -> float:
    """integral_0^inf u^{k/2} e^{-u/2} L_n^{(k)}(u) du."""
    val, _ = integrate.quad(
        lambda u: u ** (k / 2.0) * np.exp(-0.5 * u) * special.eval_genlaguerre(n, k, u),
        0.0,
        np.inf,
        epsabs=1e-13,
        epsrel=1e-11,
        limit=200,
    )
    return float(val)


def phase_kernel(n: int, m: int) -> float:
    """Radial integral that weights rho_nm in the phase marginal.

    Symmetric in (n, m); the diagonal is 1/2pi so the marginal of any state
    integrates to one.
    """
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    lo, hi = (n, m) if n <= m else (m, n)
    k = hi - lo
    pref = (
        (2.0 / math.pi)
        * (-1.0) ** lo
        * math.exp(0.5 * (special.gammaln(lo + 1) - special.gammaln(hi + 1)))
        / 8.0
    )
    return pref * _kernel_integral(lo, k)


def _coherence_band(mat: np.ndarray, tol: float = 1e-14) -> int:
    """Largest |m - n| with any significant rho_nm."""
    dim = mat.shape[0]
    band = 0
    for k in range(dim - 1, 0, -1):
        if np.abs(np.diagonal(mat, offset=k)).max() > tol:
            band = k
            break
    return band


def phase_angles(resolution: int) -> np.ndarray:
    return -math.pi + (np.arange(resolution) + 0.5) * (2.0 * math.pi / resolution)


def phase_marginal(rho: DensityMatrix, resolution: int | None = None) -> PhaseDistribution:
    """Exact angular marginal of the Wigner function.

    The radial integral of each Fock coherence is done by quadrature once
    and cached, so the result carries no grid discretization error.
    """
    if rho.space.modes != 1:
        raise ValueError("phase_marginal expects a single-mode state")
    mat = np.asarray(rho.matrix)
    dim = rho.space.dim
    band = _coherence_band(mat)
    if resolution is None:
        resolution = max(360, 4 * (band + 1))
    angles = phase_angles(resolution)
    # P(t) = c_0 + 2 Re sum_{k>=1} c_k e^{ikt}, c_k = sum_n rho[n, n+k] R(n, n+k)
    density = np.full(resolution, 1.0 / (2.0 * math.pi))
    for k in range(1, band + 1):
        coh = np.diagonal(mat, offset=k)
        ck = sum(
            coh[n] * phase_kernel(n, n + k) for n in range(dim - k) if abs(coh[n]) > 1e-16
        )
        if ck != 0:
            density += 2.0 * (ck * np.exp(1j * k * angles)).real
    return PhaseDistribution(angles, density)


def _scaled_laguerre(n_top: int, u: np.ndarray) -> np.ndarray:
    """e^{-u/2} L_n(u) for n = 0..n_top, shape (n_top + 1, len(u)).

    The scaled recurrence keeps every row bounded by 1, so it stays finite
    where the bare polynomial would overflow.
    """
    out = np.empty((n_top + 1, u.size))
    out[0] = np.exp(-0.5 * u)
    if n_top >= 1:
        out[1] = (1.0 - u) * out[0]
    for n in range(1, n_top):
        out[n + 1] = ((2.0 * n + 1.0 - u) * out[n] - n * out[n - 1]) / (n + 1.0)
    return out


def radial_marginal(
    rho: DensityMatrix,
    r_max: float | None = None,
    resolution: int = 512,
) -> RadialDistribution:
    """Exact distribution of |alpha| under the Wigner function."""
    if rho.space.modes != 1:
        raise ValueError("radial_marginal expects a single-mode state")
    if r_max is None:
        r_max = default_extent(rho)
    radii = np.linspace(0.0, r_max, resolution)
    pops = rho.populations
    signs = (-1.0) ** np.arange(rho.space.dim)
    lag = _scaled_laguerre(rho.space.dim - 1, 4.0 * radii**2)
    profile = (2.0 / math.pi) * ((pops * signs) @ lag)
    return RadialDistribution(radii, 2.0 * math.pi * radii * profile)


def phase_difference_distribution(
    rho: DensityMatrix, resolution: int | None = None
) -> PhaseDistribution:
    """Distribution of the relative phase of two modes.

    Marginalizes the two-mode Wigner function over both radii and the mean
    phase, leaving P(theta) for theta = phase_1 - phase_2.
    """
    if rho.space.modes != 2:
        raise ValueError("phase_difference_distribution expects a two-mode state")
    d = rho.space.mode_dim
    quad = np.asarray(rho.matrix).reshape(d, d, d, d)
    kern = np.array([[phase_kernel(n, m) for m in range(d)] for n in range(d)])
    band = d - 1
    if resolution is None:
        resolution = max(360, 4 * (band + 1))
    angles = phase_angles(resolution)
    density = np.full(resolution, 1.0 / (2.0 * math.pi))
    n1 = np.arange(d)
    for k in range(1, d):
        # terms with mode-1 coherence +k and mode-2 coherence -k
        i1 = n1[: d - k]
        i2 = n1[k:]
        coh = quad[i1[:, None], i2[None, :], (i1 + k)[:, None], (i2 - k)[None, :]]
        weight = kern[i1, i1 + k][:, None] * kern[i2, i2 - k][None, :]
        ck = 2.0 * math.pi * np.sum(coh * weight)
        if ck != 0:
            density += 2.0 * (ck * np.exp(1j * k * angles)).real
    return PhaseDistribution(angles, density)


# --- closed-form references ------------------------------------------------


def limit_wigner_undriven(alphas: np.ndarray) -> np.ndarray:
    """Steady-state Wigner function in the strong two-phonon-loss limit."""
    r2 = np.abs(np.asarray(alphas, dtype=complex)) ** 2
    return (2.0 / (3.0 * math.pi)) * (4.0 * r2 + 1.0) * np.exp(-2.0 * r2)


def limit_wigner_driven(
    alphas: np.ndarray, e: float, delta: float, kappa1: float
) -> np.ndarray:
    """Driven steady-state Wigner function in the strong-loss limit, normalized."""
    a = np.asarray(alphas, dtype=complex)
    r = np.abs(a)
    ca = 2.0 * (delta**2 + 9.0 * kappa1**2)
    cb = 2.0 * (4.0 * delta**2 + 3.0 * e**2 + 36.0 * kappa1**2)
    poly = ca + cb * r**2 - 4.0 * e * (delta * a.real + 3.0 * kappa1 * a.imag)
    norm = ca * math.pi / 2.0 + cb * math.pi / 4.0
    return poly * np.exp(-2.0 * r**2) / norm


def limit_phase_difference(theta: np.ndarray, v: float, kappa2: float) -> np.ndarray:
    """Relative-phase density of two weakly coupled oscillators at strong loss."""
    th = np.asarray(theta, dtype=float)
    return 1.0 / (2.0 * math.pi) + (v**2 / (9.0 * math.pi * kappa2**2)) * np.cos(2.0 * th)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two nonnegative mass arrays.

    Each array is normalized to unit mass first; tiny negative entries
    (e.g. Wigner ripples) are clipped to zero.
    """
    a = np.clip(np.asarray(p, dtype=float).reshape(-1), 0.0, None)
    b = np.clip(np.asarray(q, dtype=float).reshape(-1), 0.0, None)
    if a.shape != b.shape:
        raise ValueError("distributions must have the same shape")
    sa, sb = a.sum(), b.sum()
    if sa <= 0 or sb <= 0:
        raise ValueError("distributions must carry positive mass")
    return float(0.5 * np.abs(a / sa - b / sb).sum())
