import numpy as np
import pytest

from reinhardt.domain import DomainSpec
from reinhardt.geometry import KernelForm
from reinhardt.space import kernel_coefficients

# (n, a) pairs inside 2/(n-1) < a <= 3/(n-1) used throughout.
WINDOW_CASES = [(2, "5/2"), (2, "11/4"), (3, "5/4"), (4, "9/10")]


@pytest.fixture(scope="session")
def window_kernels():
    return {
        (n, a): KernelForm.from_coefficients(kernel_coefficients(DomainSpec(n, a)))
        for n, a in WINDOW_CASES
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


_acceptance_lines: list[str] = []


def record_acceptance(line: str):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
