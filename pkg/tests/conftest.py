import numpy as np
import pytest

from sparsepca import gen_nonorthogonal_spectra, gen_orthogonal_spectra


@pytest.fixture(scope="session")
def ortho():
    return gen_orthogonal_spectra()


@pytest.fixture(scope="session")
def nonortho():
    return gen_nonorthogonal_spectra()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
