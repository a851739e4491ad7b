import numpy as np
import pytest

from pachner33 import complexes as cx
from pachner33 import flatmetric as fm


@pytest.fixture(scope="session")
def delta5():
    return cx.boundary_delta5()


@pytest.fixture(scope="session")
def delta5_coords(delta5):
    return fm.random_realization(delta5, seed=1)


@pytest.fixture(scope="session")
def delta5_metric(delta5, delta5_coords):
    return fm.realize(delta5, delta5_coords)


@pytest.fixture(scope="session")
def join_complex():
    return cx.tetra_circle_join()


@pytest.fixture(scope="session")
def join_coords(join_complex):
    return fm.random_realization(join_complex, seed=5)


@pytest.fixture(scope="session")
def join_metric(join_complex, join_coords):
    return fm.realize(join_complex, join_coords)


@pytest.fixture(scope="session")
def bipyramid():
    return cx.bipyramid_sphere()


def ball_points(rng, n):
    raw = rng.standard_normal((n, 4))
    radii = rng.uniform(size=(n, 1)) ** 0.25
    return raw / np.linalg.norm(raw, axis=1, keepdims=True) * radii
