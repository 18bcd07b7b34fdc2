import numpy as np
import pytest

from g2lab.type_a import R_MAX, build_type_a

_ACCEPTANCE: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def model_3():
    return build_type_a(3, 0.3)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def radii(count=10):
    """Interior radius grid avoiding the cot/tan poles at both ends."""
    return [R_MAX * (k + 0.5) / count for k in range(count)]


def random_symmetric(rng, n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
