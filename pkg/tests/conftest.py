"""Shared test helpers: deterministic sampling and slow closed-loop fixtures."""

import time

import numpy as np
import pytest

from se3quad.geometry import exp_so3
from se3quad.sim import case1_scenario, case2_scenario, run

SEED = 20260811  # recorded so every property sweep is reproducible


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_rotation(rng):
    """Rotation with axis uniform on the sphere and angle uniform on [0, pi]."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return exp_so3(axis * rng.uniform(0.0, np.pi))


def random_rotations(rng, n):
    return [random_rotation(rng) for _ in range(n)]


def _timed_run(scenario):
    t0 = time.perf_counter()
    log = run(scenario)
    return log, time.perf_counter() - t0


@pytest.fixture(scope="session")
def case1_run():
    """(log, wall seconds) for the bundled helix case with robust terms on."""
    return _timed_run(case1_scenario())


@pytest.fixture(scope="session")
def case1_ablation_run():
    return _timed_run(case1_scenario(robust=False))


@pytest.fixture(scope="session")
def case1_halfdt_run():
    return _timed_run(case1_scenario(dt=5e-4))


@pytest.fixture(scope="session")
def case2_run():
    return _timed_run(case2_scenario())
