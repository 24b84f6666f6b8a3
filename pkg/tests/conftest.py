from __future__ import annotations

import math
import zlib

import numpy as np
import pytest

from twistgeom.clifford import euclidean_gammas, real_structure_dim4
from twistgeom.geometry import TorusGrid

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def rep():
    return euclidean_gammas(2)


@pytest.fixture(scope="session")
def J(rep):
    return real_structure_dim4(rep)


@pytest.fixture(scope="session")
def grid8():
    return TorusGrid(4, 8, 2 * math.pi)


@pytest.fixture
def rng(request):
    # stable per-test stream
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
