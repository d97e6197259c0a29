import math

import pytest

from flapkit import dynamics
from flapkit.config import load_reference_config


@pytest.fixture(scope="session")
def reference_project():
    return load_reference_config()


@pytest.fixture(scope="session")
def calibrated_k_t(reference_project):
    """Torque constant calibrated once for the whole session; every test
    that exercises the as-built configuration shares it."""
    return reference_project.resolve_torque_constant()


@pytest.fixture(scope="session")
def calibrated_cfg(reference_project, calibrated_k_t):
    return reference_project.sim_config(calibrated_k_t)


@pytest.fixture(scope="session")
def settled_run(calibrated_cfg):
    """Steady state of the calibrated configuration plus a recorded
    three-cycle measurement window starting from it."""
    amplitude, settled, state = dynamics.steady_state_amplitude(calibrated_cfg)
    assert settled, "reference configuration failed to settle"
    result = dynamics.simulate(calibrated_cfg, 3, initial=state)
    return {"amplitude": amplitude, "state": state, "result": result}
