import warnings

import pytest
from hypothesis import HealthCheck, settings

from nestedmzi import kernels
from nestedmzi.experiment import ExperimentConfig, FrequencyCollisionWarning, Topology, Variant

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BACKENDS = sorted(kernels.backends())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.backends()[request.param]


@pytest.fixture
def phase_clean():
    return ExperimentConfig(Variant.PHASE, 0.01)


@pytest.fixture
def fig3_phase():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FrequencyCollisionWarning)
        return ExperimentConfig.fig3_preset()


def displacement(amplitude=0.01, topology=Topology.STANDARD, **kw):
    return ExperimentConfig(Variant.DISPLACEMENT, amplitude, topology=topology, **kw)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
