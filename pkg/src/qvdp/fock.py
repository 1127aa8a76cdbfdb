"""Truncated Fock-space arithmetic: spaces, ladder operators, states.

Everything downstream (master equations, Wigner transforms, mean-field
evolution) works with plain numpy arrays wrapped in the small value types
defined here.  Operators and states are immutable after construction; the
underlying arrays are marked read-only so accidental in-place edits fail
loudly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8

# Truncated probability mass allowed when preparing a coherent state.
COHERENT_TAIL_TOL = 1e-9


def _frozen(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=complex, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space with levels 0..n_max on each of one or two modes."""

    n_max: int
    modes: int = 1

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max!r}")
        if self.modes not in (1, 2):
            raise ValueError(f"modes must be 1 or 2, got {self.modes!r}")

    @property
    def mode_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.mode_dim**self.modes


@dataclass(frozen=True)
class FockOperator:
    """Linear operator on a truncated Fock space."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    def dag(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check_space(other)
        return FockOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check_space(other)
        return FockOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check_space(other)
        return FockOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def _check_space(self, other: "FockOperator") -> None:
        if other.space != self.space:
            raise ValueError(f"operator spaces differ: {self.space} vs {other.space}")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state on a Fock space.

    Construction validates all three properties (tolerances
    HERMITICITY_TOL / TRACE_TOL / POSITIVITY_TOL) and raises ValueError on
    violation, so any DensityMatrix in circulation is a physical state.
    """

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1 within {TRACE_TOL:.0e}, got {tr!r}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -POSITIVITY_TOL:
            raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def populations(self) -> np.ndarray:
        """Diagonal occupation probabilities (length space.dim, real)."""
        return self.matrix.diagonal().real.copy()

    def mode_populations(self, mode: int) -> np.ndarray:
        """Number-state populations of one mode, tracing out the other."""
        if self.space.modes == 1:
            if mode != 0:
                raise ValueError("single-mode state has only mode 0")
            return self.populations
        d = self.space.mode_dim
        p = self.matrix.diagonal().real.reshape(d, d)
        return p.sum(axis=1 - mode).copy()


def destroy(space: FockSpace) -> FockOperator:
    """Single-mode annihilation operator: a|n> = sqrt(n)|n-1>."""
    _require_single_mode(space, "destroy")
    return FockOperator(space, np.diag(np.sqrt(np.arange(1.0, space.dim)), k=1))


def create(space: FockSpace) -> FockOperator:
    """Single-mode creation operator, the adjoint of destroy()."""
    return destroy(space).dag()


def number(space: FockSpace) -> FockOperator:
    _require_single_mode(space, "number")
    return FockOperator(space, np.diag(np.arange(float(space.dim))))


def identity(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.eye(space.dim))


def ladder_operators(space: FockSpace) -> tuple[FockOperator, FockOperator, FockOperator]:
    """Return (a, a_dag, n) for a single-mode space."""
    a = destroy(space)
    return a, a.dag(), number(space)


def tensor(op1: FockOperator, op2: FockOperator) -> FockOperator:
    """Two-mode operator op1 (x) op2 from two single-mode operators.

    Index convention: basis state |n1, n2> sits at flat index n1*d + n2,
    i.e. the first factor is the slow (most significant) index.
    """
    if op1.space.modes != 1 or op2.space.modes != 1:
        raise ValueError("tensor expects two single-mode operators")
    if op1.space.n_max != op2.space.n_max:
        raise ValueError(
            f"mode truncations differ: {op1.space.n_max} vs {op2.space.n_max}"
        )
    joint = FockSpace(op1.space.n_max, modes=2)
    return FockOperator(joint, np.kron(op1.matrix, op2.matrix))


def number_state(space: FockSpace, n) -> DensityMatrix:
    """Projector state |n><n| (single mode) or |n1,n2><n1,n2| (two modes)."""
    if space.modes == 1:
        idx = int(n)
    else:
        n1, n2 = n
        idx = int(n1) * space.mode_dim + int(n2)
    if not 0 <= idx < space.dim:
        raise ValueError(f"level {n!r} outside truncation n_max={space.n_max}")
    m = np.zeros((space.dim, space.dim), dtype=complex)
    m[idx, idx] = 1.0
    return DensityMatrix(space, m)


def coherent_amplitudes(space: FockSpace, alpha: complex) -> np.ndarray:
    """Truncated, renormalized coherent-state amplitudes c_n."""
    _require_single_mode(space, "coherent_amplitudes")
    nbar = abs(alpha) ** 2
    # Probability mass lost to truncation is the Poisson tail beyond n_max.
    tail = float(gammainc(space.n_max + 1, nbar)) if nbar > 0 else 0.0
    if tail > COHERENT_TAIL_TOL:
        needed = required_n_max(alpha)
        raise ValueError(
            f"coherent amplitude |alpha|^2 = {nbar:.4g} is truncation-unsafe at "
            f"n_max = {space.n_max} (tail mass {tail:.2e}); need n_max >= {needed}"
        )
    n = np.arange(space.dim)
    # log-space Poisson weights avoid overflow in alpha**n / sqrt(n!)
    from scipy.special import gammaln

    log_w = np.where(n > 0, n * np.log(max(abs(alpha), 1e-300)), 0.0) - 0.5 * gammaln(n + 1.0)
    mag = np.exp(log_w - 0.5 * nbar)
    phase = np.exp(1j * np.angle(alpha) * n) if alpha != 0 else np.ones(space.dim)
    c = mag * phase
    return c / np.linalg.norm(c)


def required_n_max(alpha: complex, tail_tol: float = COHERENT_TAIL_TOL) -> int:
    """Smallest n_max whose Poisson tail mass is below tail_tol."""
    nbar = abs(alpha) ** 2
    if nbar == 0:
        return 2
    k = max(2, int(nbar))
    while gammainc(k + 1, nbar) > tail_tol:
        k += 1
    return k


def coherent_state(space: FockSpace, alpha: complex) -> DensityMatrix:
    """Coherent state |alpha><alpha| truncated to the space and renormalized.

    Raises ValueError when the truncation would discard more than
    COHERENT_TAIL_TOL of the amplitude mass; the message names the n_max
    that would be safe.
    """
    c = coherent_amplitudes(space, alpha)
    return DensityMatrix(space, np.outer(c, c.conj()))


def expectation(rho: DensityMatrix, op: FockOperator) -> complex:
    """Tr[rho * op]; real part only deviates by <1e-10 for Hermitian op."""
    if rho.space != op.space:
        raise ValueError(f"state and operator spaces differ: {rho.space} vs {op.space}")
    return complex(np.einsum("ij,ji->", rho.matrix, op.matrix))


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced single-mode state of a two-mode density matrix."""
    if rho.space.modes != 2:
        raise ValueError("partial_trace expects a two-mode state")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    d = rho.space.mode_dim
    r4 = rho.matrix.reshape(d, d, d, d)  # indices (n1, n2, m1, m2)
    reduced = np.einsum("abcb->ac", r4) if keep == 0 else np.einsum("abad->bd", r4)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(FockSpace(rho.space.n_max, modes=1), reduced / np.trace(reduced).real)


def _require_single_mode(space: FockSpace, what: str) -> None:
    if space.modes != 1:
        raise ValueError(f"{what} is defined for single-mode spaces; got modes={space.modes}")
