"""Trapped-ion parameter planning for the engineered dissipators.

Maps laboratory inputs (laser wavelength, trap frequency, beam geometry,
sideband Rabi rates) onto the effective oscillator rates: one-phonon gain
kappa1 from a blue-sideband drive, two-phonon loss kappa2 from a second-order
red sideband, and the mode-coupling strength v from an off-resonant exchange.
All formulas hold in the Lamb-Dicke regime, so the planner also reports the
largest phonon number the regime supports.

Rabi-rate inputs are angular rates (ordinary Hz times 2*pi); the conversion
from Rabi rate to Lindblad rate through the engineered linewidth is absorbed
into the stated proportionalities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# pinned so outputs are bit-stable across platforms
HBAR = 1.054571817e-34  # J s
ATOMIC_MASS = 1.66053907e-27  # kg

# budget cap when eta is so small the regime never breaks
LAMB_DICKE_CAP = 10**6


def ion_mass(mass_number: float) -> float:
    """Ion mass in kg from the atomic mass number."""
    if mass_number <= 0:
        raise ValueError("mass number must be positive")
    return mass_number * ATOMIC_MASS


@dataclass(frozen=True)
class IonParams:
    """Laboratory-side inputs, all SI.

    wavelength in meters; trap_freq, omega1, omega2, omega_c, delta_c are
    angular rates; theta is the angle between the beam and the mode axis,
    in radians.  theta = pi/2 is allowed (beam orthogonal to the mode) but
    gives zero effective rates.
    """

    wavelength: float
    trap_freq: float
    theta: float
    mass: float
    omega1: float
    omega2: float
    omega_c: float
    delta_c: float

    def __post_init__(self):
        for name in ("wavelength", "trap_freq", "mass", "omega1", "omega2", "omega_c", "delta_c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.theta <= 0.5 * math.pi:
            raise ValueError("theta must lie in [0, pi/2]")


@dataclass(frozen=True)
class EffectiveRates:
    """Oscillator-side rates derived from one IonParams."""

    eta: float
    kappa1: float
    kappa2: float
    v: float
    n_max_lamb_dicke: int


def lamb_dicke(params: IonParams) -> float:
    """eta = (2 pi / lambda) sqrt(hbar / (2 m omega0)) cos(theta)."""
    k = 2.0 * math.pi / params.wavelength
    x0 = math.sqrt(HBAR / (2.0 * params.mass * params.trap_freq))
    return k * x0 * math.cos(params.theta)


def lamb_dicke_budget(eta: float, tolerance: float = 0.05) -> int:
    """Largest n with eta^2 (2n+1) <= tolerance, capped at LAMB_DICKE_CAP.

    The tolerance operationalizes "much less than one"; the default 0.05
    keeps second-order sideband corrections at the few-percent level.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0.0:
        return LAMB_DICKE_CAP
    n = math.floor((tolerance / eta**2 - 1.0) / 2.0)
    return max(0, min(n, LAMB_DICKE_CAP))


def effective_rates(params: IonParams, tolerance: float = 0.05) -> EffectiveRates:
    """Oscillator rates from the sideband drives.

    kappa1 = eta Omega1 / 2 (blue sideband), kappa2 = eta^2 Omega2 / 2
    (second red sideband), v = eta^2 Omega_c^2 / (2 Delta_c) (off-resonant
    exchange between two modes).
    """
    eta = lamb_dicke(params)
    return EffectiveRates(
        eta=eta,
        kappa1=0.5 * eta * params.omega1,
        kappa2=0.5 * eta**2 * params.omega2,
        v=eta**2 * params.omega_c**2 / (2.0 * params.delta_c),
        n_max_lamb_dicke=lamb_dicke_budget(eta, tolerance),
    )
