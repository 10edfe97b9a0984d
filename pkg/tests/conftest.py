import functools
import math

import numpy as np
import pytest

from qwalk3.core import (
    CoinParameters,
    SpinVector,
    build_coin,
    iter_evolve,
    localized_initial_state,
    position_distribution,
)

_ACCEPTANCE_LINES = []


class AcceptanceRecorder:
    """Collects one PASS/FAIL line per acceptance criterion check."""

    def check(self, label, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {label}" + (f" -- {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def _trajectory(c, s, spin, t_max, keep):
    params = CoinParameters.from_cs(c, s)
    state0 = localized_initial_state(SpinVector(*spin))
    out = {}
    for tau, st in enumerate(iter_evolve(state0, build_coin(params), t_max)):
        if tau in keep:
            out[tau] = position_distribution(st)
    return out


@pytest.fixture(scope="session")
def origin_trajectory():
    """``f(params, spin, times) -> {t: ProbabilityDistribution}``, cached per session."""

    def run(params, spin, times):
        times = tuple(sorted(set(int(t) for t in times)))
        key = (spin.alpha, spin.beta, spin.gamma)
        return _trajectory(params.c, params.s, key, times[-1], times)

    return run


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spin(rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    return SpinVector.normalized(*z)


PI4 = CoinParameters.from_theta(math.pi / 4)
UNIFORM_SPIN = SpinVector.uniform()
