from __future__ import annotations

import numpy as np
import pytest

from shortbch.bch import build_code
from shortbch.pcmopt import build_optimized_pcm, build_pool

CODES = [(6, 36), (6, 45), (7, 64), (7, 78), (7, 99)]


@pytest.fixture(scope="session")
def code():
    return build_code


@pytest.fixture(scope="session")
def pool_cache():
    cache = {}

    def get(m, k):
        if (m, k) not in cache:
            cache[(m, k)] = build_pool(build_code(m, k))
        return cache[(m, k)]
    return get


@pytest.fixture(scope="session")
def pcm_cache(pool_cache):
    cache = {}

    def get(m, k, beta):
        if (m, k, beta) not in cache:
            cache[(m, k, beta)] = build_optimized_pcm(build_code(m, k), beta=beta,
                                                      pool=pool_cache(m, k))
        return cache[(m, k, beta)]
    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance_log(request):
    """Collects the one-line verdicts printed after the run."""
    return request.config.acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
