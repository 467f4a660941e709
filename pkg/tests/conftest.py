"""Shared fixtures: the plane fixture bodies and small built pipelines."""

from fractions import Fraction

import pytest

import renorm


@pytest.fixture(scope="session")
def square():
    return renorm.ellinf_ball(2)


@pytest.fixture(scope="session")
def plane_step(square):
    """One surgery step on the unit square: k=1, lam=1, R=1/2."""
    leveled, cert = renorm.renorm_step(square, 1, Fraction(1), Fraction(1, 2))
    return leveled, cert


@pytest.fixture(scope="session")
def plane_tower(square):
    """Depth-1 tower on the square with unit inflation, rescaled."""
    tower = renorm.build_tower(square, [Fraction(1)], n_max=1)
    return renorm.rescale_tower(tower)


@pytest.fixture(scope="session")
def default_pipeline():
    return renorm.build_pipeline(renorm.RunConfig())


@pytest.fixture(scope="session")
def cube3_pipeline():
    cfg = renorm.RunConfig(
        dimension=3,
        eps=(Fraction(1, 4), Fraction(1, 8), Fraction(1, 16),
             Fraction(1, 32)),
        seed=4242)
    return renorm.build_pipeline(cfg)
