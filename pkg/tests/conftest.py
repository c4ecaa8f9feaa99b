import json

import numpy as np
import pytest

from dde_certify import criteria
from dde_certify.model import scalar_system, validate_system

# scalar parameter sets: one and two delays, each with a stable and an unstable choice
ONE_DELAY_STABLE = (-1 + 1j, 0.5)
ONE_DELAY_UNSTABLE = (-1.0, -1.5)
TWO_DELAY_STABLE = (-1 + 1j, 0.5, 0.3)
TWO_DELAY_UNSTABLE = (-1.0, -0.7, 0.5 + 0.1j)

# lighter sweep for loops over many random systems
FAST_SWEEP = criteria.TorusSweepConfig(
    coarse_points_per_dim=24, refine_iterations=100, refine_restarts=3,
    resonance_phase_points=12, omega_samples=256,
)


@pytest.fixture
def one_delay_stable():
    return scalar_system(*ONE_DELAY_STABLE)


@pytest.fixture
def one_delay_unstable():
    return scalar_system(*ONE_DELAY_UNSTABLE)


@pytest.fixture
def two_delay_stable():
    return scalar_system(*TWO_DELAY_STABLE)


@pytest.fixture
def two_delay_unstable():
    return scalar_system(*TWO_DELAY_UNSTABLE)


@pytest.fixture
def strongly_unstable():
    return validate_system([np.diag([2.0, -1.0]), 0.1 * np.eye(2)])


def system_json(sys) -> str:
    return json.dumps(sys.to_json_dict())


@pytest.fixture
def write_system(tmp_path):
    def _write(sys, name="sys.json"):
        p = tmp_path / name
        p.write_text(system_json(sys))
        return str(p)
    return _write


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
