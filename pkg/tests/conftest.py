import numpy as np
import pytest

from diffuse_poisson.grid import ScalarField


def interior_random(grid, rng):
    v = np.zeros(grid.shape)
    v[1:-1, 1:-1, 1:-1] = rng.normal(size=(grid.n - 2,) * 3)
    return ScalarField(grid, v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def benchmark():
    """Regularized + trilinear solves of the centred-charge benchmark at N = 50, 100.

    Shared by the experiment tests and the acceptance suite; returns
    ``{"profile": RadialProfile, "results": {N: GridResult}, "seconds": {N: float}}``.
    """
    import time

    from diffuse_poisson.experiment import ExperimentConfig, oracle_profile, study_grid

    cfg = ExperimentConfig(grid_sizes=(50, 100))
    t0 = time.perf_counter()
    profile = oracle_profile(cfg)
    results, seconds = {}, {}
    for n in cfg.grid_sizes:
        t = time.perf_counter()
        results[n] = study_grid(cfg, n, profile)
        seconds[n] = time.perf_counter() - t
    return {"cfg": cfg, "profile": profile, "results": results, "seconds": seconds,
            "total_seconds": time.perf_counter() - t0}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
