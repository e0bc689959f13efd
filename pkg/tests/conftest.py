import os
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rpgauge import MarketStatistics, PolyhedralGauge, cross_matrix, solve_multipliers

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")
SEED = int(os.environ.get("RPGAUGE_SEED", "0"))

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def pytest_report_header(config):
    return f"RPGAUGE_SEED={SEED}"


def data_path(name: str) -> str:
    return os.path.abspath(os.path.join(DATA, name))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def e1() -> MarketStatistics:
    return MarketStatistics([[1, 2], [2, 1]], [[2, 1], [1, 2]])


@pytest.fixture(scope="session")
def e1_gauge(e1) -> PolyhedralGauge:
    m = solve_multipliers(cross_matrix(e1), "strict")
    return PolyhedralGauge.from_multipliers(e1, m)


@pytest.fixture(scope="session")
def e1_smoothing(e1, e1_gauge):
    """Default-config pipeline on E1, built once per session; records its wall time."""
    from rpgauge.smoothing import SmoothingConfig, smooth
    t0 = time.perf_counter()
    result = smooth(e1_gauge, e1, SmoothingConfig(seed=SEED))
    result.elapsed = time.perf_counter() - t0
    return result
