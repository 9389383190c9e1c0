"""Shared fixtures: system constants, the corrected reference orbit, and a
prepared full-scale scenario (session-scoped; the expensive artifacts are
built once and reused across the suite)."""

from pathlib import Path

import numpy as np
import pytest

from cislunar_rvd import (ScenarioConfig, SystemParams, correct_periodic_orbit,
                          parse_config, prepare)

CONFIG_PATH = Path(__file__).resolve().parents[1] / "configs" / \
    "rvd_scenario.cfg"

# catalog seed for the halo orbit used throughout the suite
ORBIT_GUESS = np.array([1.0213448959167291, 0.0, -0.1822175315550492,
                        0.0, -0.1017871593525680, 0.0])
PERIOD_GUESS = 1.5092


@pytest.fixture(scope="session")
def em_params():
    """Earth-Moon three-body constants (Sun off)."""
    return SystemParams(mu=0.01215)


@pytest.fixture(scope="session")
def full_params():
    """Sun-perturbed four-body constants."""
    return SystemParams(mu=0.01215, mu_sun=328900.56)


@pytest.fixture(scope="session")
def orbit(em_params):
    """Corrected periodic halo orbit (three-body)."""
    return correct_periodic_orbit(ORBIT_GUESS, PERIOD_GUESS, em_params,
                                  tol=1e-10)


@pytest.fixture(scope="session")
def scenario_config():
    return parse_config(CONFIG_PATH)


@pytest.fixture(scope="session")
def prepared(scenario_config):
    """Fully prepared full-scale rendezvous scenario (orbit, Chief cache, gains)."""
    return prepare(scenario_config)


@pytest.fixture(scope="session")
def small_config(scenario_config):
    """Cheap variant: short duration and prediction horizon for unit tests."""
    from dataclasses import replace
    return replace(scenario_config, duration_periods=0.05,
                   tau_pred_periods=0.05)


@pytest.fixture(scope="session")
def small_prepared(small_config):
    return prepare(small_config)
