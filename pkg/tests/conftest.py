import numpy as np

import criteria_report
from qvdp.fock import DensityMatrix, FockSpace


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m + m.conj().T)


def random_density_matrix(space: FockSpace, rng: np.random.Generator) -> DensityMatrix:
    c = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
    m = c @ c.conj().T
    return DensityMatrix(space, m / np.trace(m).real)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if criteria_report.lines:
        terminalreporter.section("acceptance criteria")
        for line in criteria_report.lines:
            terminalreporter.write_line(line)
