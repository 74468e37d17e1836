import numpy as np
import pytest
from hypothesis import settings

from bekktail.fixtures import diagonal, scalar_arch, symmetric_pair, triangular_pair

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def scalar_spec():
    return scalar_arch(1.0)


@pytest.fixture
def diag_spec():
    return diagonal((0.6, 1.2))


@pytest.fixture
def pair_spec():
    return symmetric_pair()


@pytest.fixture
def tri_spec():
    return triangular_pair()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
