"""Simulation toolkit for quantum and classical van der Pol oscillators.

Core surface:

- fock: truncated Fock spaces, ladder operators, coherent states
- liouvillian: master-equation assembly, RK4 evolution, steady states
- wigner: Wigner transforms, phase and radial marginals, closed-form limits
- classical: deterministic oscillator ODE and stochastic amplitude ensembles
- meanfield: self-consistent coupling, synchronization branches and boundaries
- ions: trapped-ion parameter planning for the engineered dissipators
- cli: `qvdp` command line (simulate / sweep / ion-plan)
"""

__version__ = "0.1.0"

from .fock import (
    DensityMatrix,
    FockOperator,
    FockSpace,
    coherent_state,
    create,
    destroy,
    expectation,
    identity,
    ladder_operators,
    number,
    number_state,
    partial_trace,
    tensor,
)
from .liouvillian import (
    Coupling,
    DissipatorSpec,
    Drive,
    Liouvillian,
    MeanFieldCoupling,
    SteadyStateError,
    build_liouvillian,
    evolve,
    large_kappa2_populations,
    steady_state,
    steady_state_adaptive,
)
from .wigner import (
    PhaseDistribution,
    RadialDistribution,
    WignerGrid,
    limit_phase_difference,
    limit_wigner_driven,
    limit_wigner_undriven,
    phase_difference_distribution,
    phase_marginal,
    radial_marginal,
    total_variation,
    wigner_at,
    wigner_grid,
)
from .classical import (
    BoundarySearch,
    LangevinParams,
    TrajectoryEnsemble,
    classical_order_parameter,
    classical_phase_boundary,
    integrate_vdp_ode,
    simulate_langevin,
    stationary_density_grid,
)
from .ions import (
    EffectiveRates,
    IonParams,
    effective_rates,
    ion_mass,
    lamb_dicke,
    lamb_dicke_budget,
)
from .meanfield import (
    BoundaryPoint,
    MeanFieldState,
    PhasePoint,
    RotatingFixedPoint,
    hysteresis_scan,
    meanfield_evolve,
    meanfield_space,
    phase_boundary,
    rotating_frame_fixed_point,
    synchronized_amplitude,
    synchronized_seed,
    unsynchronized_seed,
)

__all__ = [
    "__version__",
    "DensityMatrix",
    "FockOperator",
    "FockSpace",
    "coherent_state",
    "create",
    "destroy",
    "expectation",
    "identity",
    "ladder_operators",
    "number",
    "number_state",
    "partial_trace",
    "tensor",
    "Coupling",
    "DissipatorSpec",
    "Drive",
    "Liouvillian",
    "MeanFieldCoupling",
    "SteadyStateError",
    "build_liouvillian",
    "evolve",
    "large_kappa2_populations",
    "steady_state",
    "steady_state_adaptive",
    "PhaseDistribution",
    "RadialDistribution",
    "WignerGrid",
    "limit_phase_difference",
    "limit_wigner_driven",
    "limit_wigner_undriven",
    "phase_difference_distribution",
    "phase_marginal",
    "radial_marginal",
    "total_variation",
    "wigner_at",
    "wigner_grid",
    "BoundarySearch",
    "LangevinParams",
    "TrajectoryEnsemble",
    "classical_order_parameter",
    "classical_phase_boundary",
    "integrate_vdp_ode",
    "simulate_langevin",
    "stationary_density_grid",
    "EffectiveRates",
    "IonParams",
    "effective_rates",
    "ion_mass",
    "lamb_dicke",
    "lamb_dicke_budget",
    "BoundaryPoint",
    "MeanFieldState",
    "PhasePoint",
    "RotatingFixedPoint",
    "hysteresis_scan",
    "meanfield_evolve",
    "meanfield_space",
    "phase_boundary",
    "rotating_frame_fixed_point",
    "synchronized_amplitude",
    "synchronized_seed",
    "unsynchronized_seed",
]
