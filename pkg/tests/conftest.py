import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from phasekit.spectrum import ReducedState  # noqa: E402


def random_state(rng, spectrum, sparse=False):
    """Nonnegative unit weights; ``sparse`` zeroes a random subset."""
    w = np.abs(rng.normal(size=spectrum.size))
    if sparse:
        w[rng.random(spectrum.size) < 0.3] = 0.0
        if not w.any():
            w[0] = 1.0
    return ReducedState.from_weights(spectrum, w)


def random_correlation(rng, size, complex_=False):
    """Random positive semidefinite matrix with unit diagonal."""
    rank = int(rng.integers(1, size + 1))
    g = rng.normal(size=(size, rank))
    if complex_:
        g = g + 1j * rng.normal(size=(size, rank))
    gram = g @ g.conj().T
    d = np.sqrt(np.real(np.diag(gram)))
    out = gram / np.outer(d, d)
    return out if complex_ else out.real


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
