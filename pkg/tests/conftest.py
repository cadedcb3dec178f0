import numpy as np
import pytest
from hypothesis import settings

from rkhs_sampling import DiscreteDiagonalModel, FourierSobolevModel, SampleSet, SamplingDensity

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fix_a():
    """Two atoms, counting measure, a = (1, 1/2)."""
    return DiscreteDiagonalModel((1.0, 0.5))


@pytest.fixture
def fix_a_samples(fix_a):
    return SampleSet.from_points(SamplingDensity(fix_a, 1), [0, 1])


@pytest.fixture
def fix_b():
    return FourierSobolevModel(1.0)


@pytest.fixture
def fix_c():
    # geometric a_j = 2^-j; 80 atoms leave a tail below 4^-80
    return DiscreteDiagonalModel(tuple(2.0 ** -j for j in range(80)))


def random_discrete_model(rng: np.random.Generator, m: int) -> DiscreteDiagonalModel:
    a = np.sort(rng.uniform(0.05, 1.0, size=m))[::-1]
    return DiscreteDiagonalModel(tuple(a))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
