import numpy as np
import pytest

from blaschkeops import CircleGrid, make_blaschke


def random_product(seed, degree=3, max_radius=0.6):
    """Seeded product: zeros uniform in the disk of the given radius, random phase."""
    rng = np.random.default_rng(seed)
    zeros = [0j]
    for _ in range(degree - 1):
        radius = max_radius * np.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * np.pi)
        zeros.append(radius * np.exp(1j * angle))
    lam = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return make_blaschke(lam, zeros)


@pytest.fixture(scope="session")
def grid_big():
    return CircleGrid(4096)


@pytest.fixture(scope="session")
def grid_small():
    return CircleGrid(256)


@pytest.fixture(scope="session")
def square():
    return make_blaschke(1.0, [0, 0])


@pytest.fixture(scope="session")
def cube():
    return make_blaschke(1.0, [0, 0, 0])


@pytest.fixture(scope="session")
def half():
    # zeros [0, 0.5]: the worked example threaded through most tests
    return make_blaschke(1.0, [0, 0.5])


@pytest.fixture(scope="session")
def spiral():
    return make_blaschke(1.0, [0, 0.3 + 0.4j])
