"""Shared fixtures: reference metrics and their solved potentials."""

import numpy as np
import pytest

from warpedsphere import (RadialGrid, bubble_sphere, bump_sphere,
                          round_sphere, scaled_sphere, solve_quadrature,
                          tendril_sphere)

REFERENCE_BUILDERS = {
    "round": lambda grid=None: round_sphere(grid=grid),
    "scaled": lambda grid=None: scaled_sphere(1.1, grid=grid),
    "bump": lambda grid=None: bump_sphere(0.1, grid=grid),
    "tendril": lambda grid=None: tendril_sphere(2.0, 0.1, 0.3, grid=grid),
    "bubble": lambda grid=None: bubble_sphere(2.0, 0.1, grid=grid),
}

REFERENCE_NAMES = tuple(REFERENCE_BUILDERS)


@pytest.fixture(scope="session")
def reference_metrics():
    grid = RadialGrid.uniform(2001)
    return {name: build(grid) for name, build in REFERENCE_BUILDERS.items()}


@pytest.fixture(scope="session")
def reference_potentials(reference_metrics):
    return {name: solve_quadrature(metric)
            for name, metric in reference_metrics.items()}


@pytest.fixture(scope="session")
def round_metric(reference_metrics):
    return reference_metrics["round"]


@pytest.fixture(scope="session")
def round_potential(reference_potentials):
    return reference_potentials["round"]


def rng(seed=0):
    return np.random.default_rng(seed)
