import numpy as np
import pytest

from ethf import kernels
from ethf.model import ModelParams, build_model, sample_occupation

ACCEPTANCE_LINES = []


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return kernels.get_backend(request.param)


@pytest.fixture
def model8():
    params = ModelParams.with_default_alpha(8)
    return build_model(params, 1234)


@pytest.fixture
def pair6():
    params = ModelParams.with_default_alpha(6)
    return build_model(params, 99), sample_occupation(6, 2, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l[1:].split()[0])):
            terminalreporter.write_line(line)
