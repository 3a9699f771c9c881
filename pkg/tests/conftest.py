import numpy as np
import pytest

from ktraj import ExtentModel, FovModel, HardwareConfig, design_radial

# desk hardware: slow gradients so that spokes stay short
DESK_HW = HardwareConfig(g_max=10.0, s_max=100.0, dt=0.02, t_read=5.0)

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def desk_radial():
    """Isotropic radial design with L = 10 cm, K = 1.25 / cm (1963 spokes)."""
    return design_radial(FovModel(10.0, 10.0), ExtentModel(1.25, 1.25), DESK_HW)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
