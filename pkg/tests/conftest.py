import warnings

import pytest

from levybarrier.laplace import GWRDegradedWarning
from levybarrier.levy import LevyModel
from levybarrier.tables import LAMBDA_MINUS, LAMBDA_PLUS, M2


def pytest_configure(config):
    warnings.simplefilter("ignore", GWRDegradedWarning)


@pytest.fixture(scope="session")
def kobol12():
    return LevyModel.kobol(1.2, LAMBDA_PLUS, LAMBDA_MINUS, m2=M2)


@pytest.fixture(scope="session")
def kobol02():
    return LevyModel.kobol(0.2, LAMBDA_PLUS, LAMBDA_MINUS, m2=M2)


_LINES = []


@pytest.fixture(scope="session")
def criterion_log():
    return _LINES


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
