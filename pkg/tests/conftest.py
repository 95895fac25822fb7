"""Session-scoped simulation fixtures.

The two canonical scalar runs (classical logistic invasion on the long
domain, degenerate-diffusivity logistic on the fine grid) are used by
both the simulator unit tests and the acceptance gate, so they run once
per session.  Wall-clock cost of each run is recorded so the gate can
check the advertised time budget.
"""

import time

import pytest

from wavebound import SimConfig, make_preset, simulate_scalar

_TIMINGS = {}


def _timed(name, model, config):
    t0 = time.monotonic()
    result = simulate_scalar(model, config)
    _TIMINGS[name] = time.monotonic() - t0
    return result


@pytest.fixture(scope="session")
def fkpp_sim():
    model = make_preset("fisher_kpp", {})
    return _timed("fkpp", model, SimConfig(L=400.0, dx=0.1, T=150.0))


@pytest.fixture(scope="session")
def porous_sim():
    model = make_preset("porous_fisher", {"m": 1.0, "n": 1.0})
    return _timed("porous", model, SimConfig(L=200.0, dx=0.05, T=150.0))


@pytest.fixture(scope="session")
def sim_timings():
    return _TIMINGS
