import numpy as np
import pytest

from torext import fixtures as fx
from torext.resolution import resolve
from torext.tor_emodule import tor_emodule


@pytest.fixture(scope="session")
def cubes():
    return fx.cubes_ring()


@pytest.fixture(scope="session")
def N2():
    return fx.syzygy_of_k(2)


@pytest.fixture(scope="session")
def N2_res(N2):
    return resolve(N2, 11)


@pytest.fixture(scope="session")
def T2(N2):
    return tor_emodule(N2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


@pytest.fixture
def record_acceptance():
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
