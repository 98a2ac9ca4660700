import warnings

import pytest

from fluxsize import constants as C
from fluxsize.bcs_core import make_material
from fluxsize.errors import GeometryWarning


@pytest.fixture(scope="session")
def al():
    return make_material("Al", 2.02e6, tc=1.2)


@pytest.fixture(scope="session")
def nb():
    return make_material("Nb", 1.37e6, tc=9.25)


@pytest.fixture
def quiet_geometry():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        yield


# independent hand-computed reference values for aluminium (v_F = 2.02e6 m/s, T_c = 1.2 K)
AL_GAP = 1.764 * 1.380649e-23 * 1.2
AL_VF = 2.02e6
ME = 9.1093837015e-31
HBAR = 1.054571817e-34


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
