import numpy as np
import pytest

from eulersphere.harmonics import SpectralField, degree_of, n_coeffs


def random_field(rng, nmax, decay=0.3, mean_free=False):
    """Band-limited field with a geometric spectrum."""
    c = rng.standard_normal(n_coeffs(nmax)) * np.exp(-decay * degree_of(nmax))
    if mean_free:
        c[0] = 0.0
    return SpectralField(c, nmax)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance lines collected during the run, echoed after the test report
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
