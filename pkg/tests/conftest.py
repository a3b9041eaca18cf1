import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fdma.model import ArrayDesign, Placement, Scenario, SPEED_OF_LIGHT, wavelength
from fdma.scenario import LinkBudgetConfig, default_baseline_params, make_placement, \
    place_canonical_eves

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

F0 = 30e9


@pytest.fixture(scope="session")
def link_cfg() -> LinkBudgetConfig:
    return LinkBudgetConfig()


@pytest.fixture(scope="session")
def bob(link_cfg) -> Placement:
    r = math.hypot(30.0, 90.0)
    return make_placement(r, math.atan2(90.0, 30.0), link_cfg)


@pytest.fixture(scope="session")
def default_scenario(link_cfg, bob) -> Scenario:
    "The stock 21-element scenario with the three canonical adversaries."
    params = default_baseline_params(21, F0, SPEED_OF_LIGHT)
    eves = place_canonical_eves(21, bob, params, link_cfg, F0, SPEED_OF_LIGHT)
    return Scenario(bob, tuple(eves), tx_power_linear=10.0 ** 0.5)


@pytest.fixture(scope="session")
def default_params():
    return default_baseline_params(21, F0, SPEED_OF_LIGHT)


def random_design(rng: np.random.Generator, m: int, f0: float = F0) -> ArrayDesign:
    "Feasible random design: spacings above half a wavelength, shifts in a 10 MHz box."
    lam = wavelength(f0)
    spacings = rng.uniform(0.5 * lam, 2.0 * lam, size=max(m - 1, 0))
    start = rng.uniform(-1.0, 1.0) * lam
    positions = start + np.concatenate(([0.0], np.cumsum(spacings)))
    positions -= positions.mean()
    shifts = rng.uniform(-10e6, 10e6, size=m)
    return ArrayDesign(positions, f0, shifts)


def random_placement(rng: np.random.Generator, cfg: LinkBudgetConfig) -> Placement:
    return make_placement(rng.uniform(5.0, 300.0),
                          rng.uniform(0.05, math.pi - 0.05), cfg)
