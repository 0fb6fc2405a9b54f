"""
Pytest configuration and shared fixtures.

Towers and their verdicts are expensive to build, so the ones used across
modules are session scoped.
"""

import os

import pytest

# Set testing environment BEFORE importing hypersurf modules
os.environ["HYPERSURF_ENVIRONMENT"] = "development"
os.environ.pop("HYPERSURF_THREADS", None)

from hypersurf.services.certify import verdict  # noqa: E402
from hypersurf.services.tower import (  # noqa: E402
    build_tower,
    cuboid_spec,
    generalized_cuboid_spec,
    tangent_lines_spec,
)


@pytest.fixture(scope="session")
def cuboid_tower():
    """The three-level double cover tower of the cuboid surface."""
    return build_tower(cuboid_spec())


@pytest.fixture(scope="session")
def gencuboid_33():
    """Generalized cuboid tower with m = 3, n = 3."""
    return build_tower(generalized_cuboid_spec(3, 3))


@pytest.fixture(scope="session")
def gencuboid_23():
    """Generalized cuboid tower with m = 2, n = 3."""
    return build_tower(generalized_cuboid_spec(2, 3))


@pytest.fixture(scope="session")
def lines15():
    """Triple cover of P2 branched over 15 tangent lines to the conic."""
    return build_tower(tangent_lines_spec())


@pytest.fixture(scope="session")
def cuboid_verdict(cuboid_tower):
    return verdict(cuboid_tower)


@pytest.fixture(scope="session")
def lines15_verdict(lines15):
    return verdict(lines15)


@pytest.fixture(scope="session")
def gencuboid_33_verdict(gencuboid_33):
    return verdict(gencuboid_33)
