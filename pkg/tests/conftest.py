import numpy as np
import pytest

from spectral_ous import MatrixModel, NormOracle, SpinModel
from spectral_ous.rng import ShiftRegisterRNG


@pytest.fixture
def m2():
    return MatrixModel(2)


@pytest.fixture
def m3():
    return MatrixModel(3)


@pytest.fixture
def l2():
    return SpinModel(NormOracle.lp(2, 2))


@pytest.fixture
def l3():
    return SpinModel(NormOracle.lp(3, 2))


@pytest.fixture
def rng():
    return ShiftRegisterRNG(0)


def eig2x2(m):
    """Closed-form eigenvalues of a symmetric 2x2 matrix, ascending."""
    a, b, d = m[0][0], m[0][1], m[1][1]
    mid, rad = 0.5 * (a + d), np.hypot(0.5 * (a - d), b)
    return mid - rad, mid + rad


# -- acceptance log -------------------------------------------------------------

_CRITERIA = []


class CriterionLog:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, name, ok, detail):
        _CRITERIA.append((name, bool(ok), detail))
        return ok


@pytest.fixture(scope="session")
def criteria():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
