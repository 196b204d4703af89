import math
import os

import hypothesis
import numpy as np
import pytest

from hh_center.geometry import Polygon2, Polytope3, ProfileBody, ball_profile

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

SQRT2 = math.sqrt(2.0)
TRIANGLE_CONSTANT = (2.0 + SQRT2) / 3.0
CONJECTURE_3D = 2.0 ** (1.0 / 3.0) / (4.0 * (2.0 ** (1.0 / 3.0) - 1.0))


def sweep_size() -> int:
    return int(os.getenv("HHC_SWEEP_SEEDS", "40"))


@pytest.fixture
def unit_square():
    return Polygon2([[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture
def equality_triangle():
    return Polygon2([[0, -0.5], [1, 0], [0, 0.5]])


@pytest.fixture
def standard_triangle():
    return Polygon2([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def unit_cube():
    return Polytope3([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)])


@pytest.fixture
def standard_tetrahedron():
    return Polytope3([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.fixture
def prism_cone():
    return Polytope3([[0, -0.5, 0], [0, 0.5, 0], [1, 0, 0], [1, 0, 1]])


@pytest.fixture
def unit_disc():
    return ProfileBody(ball_profile(2))
