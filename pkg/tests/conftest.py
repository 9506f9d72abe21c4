import numpy as np
import pytest

from evmirror.optics import EvanescentFieldConfig, Interface

_CRITERIA = {}


def record_criterion(number, passed, detail):
    """Store one acceptance line; printed in the terminal summary."""
    _CRITERIA[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def glass():
    return Interface(1.5)


@pytest.fixture
def vacuum():
    return Interface(1.0)


@pytest.fixture
def te():
    return EvanescentFieldConfig.from_kappa(1.0, "TE")


@pytest.fixture
def tm():
    return EvanescentFieldConfig.from_kappa(1.0, "TM")


@pytest.fixture
def circ():
    return EvanescentFieldConfig.from_kappa(1.0, "CIRC")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
