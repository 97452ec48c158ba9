import numpy as np
import pytest

from thrustwalk.config import SimConfig
from thrustwalk.dynamics import ModelParams
from thrustwalk.simulate import run_scenario


@pytest.fixture(scope="session")
def model() -> ModelParams:
    return ModelParams()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def nominal_result():
    """One full nominal walk (0.2 m/s, mu_s = 0.25, 10 s) shared by the
    closed-loop tests and the acceptance criteria."""
    import time

    cfg = SimConfig()
    t0 = time.perf_counter()
    result = run_scenario(cfg)
    result.metrics["total_wall_s"] = time.perf_counter() - t0
    return result
