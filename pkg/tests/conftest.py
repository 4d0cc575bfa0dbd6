import numpy as np
import pytest

from ratdyn.parse import parse_poly
from ratdyn.ratmap import RationalMap

VARS = {1: "xy", 2: "xyz", 3: "xyzw"}


def make_map(*components: str, name: str | None = None) -> RationalMap:
    names = VARS[len(components) - 1]
    return RationalMap([parse_poly(c, names) for c in components], name=name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cremona():
    return make_map("y*z", "z*x", "x*y", name="cremona")


@pytest.fixture
def squares():
    return make_map("x^2", "y^2", "z^2", name="squares")


@pytest.fixture
def henon():
    return make_map("x^2 + z^2 - y*z", "x*z", "z^2", name="henon")


@pytest.fixture
def z_squared():
    return make_map("x^2", "y^2", name="z_squared")
