import numpy as np
import pytest

from swlab.grid import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def torus16():
    return GridSpec.torus(16)


@pytest.fixture
def torus8():
    return GridSpec.torus(8)


@pytest.fixture
def patch32():
    return GridSpec.patch(32)



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", {})
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
