import numpy as np
import pytest

from carnotlab import build_measure, get_group, make_potential, shooting_distance_field

GAUSS_BOX = [[-8.0, 8.0]]
GAUSS_SHAPE = (257,)
H1_BOX = [[-5.0, 5.0], [-5.0, 5.0], [-3.0, 3.0]]
H1_SHAPE = (33, 33, 33)


@pytest.fixture(scope="session")
def heis():
    return get_group("heisenberg1")


@pytest.fixture(scope="session")
def line():
    return get_group("abelian:1")


@pytest.fixture(scope="session")
def gauss_measure(line):
    field = shooting_distance_field(line, GAUSS_BOX, GAUSS_SHAPE)
    return build_measure(line, field, make_potential("gaussian-euclid"))


@pytest.fixture(scope="session")
def h1_field(heis):
    return shooting_distance_field(heis, H1_BOX, H1_SHAPE)


@pytest.fixture(scope="session")
def h1_measure(heis, h1_field):
    return build_measure(heis, h1_field, make_potential("power", p=2.0))
