import math
from pathlib import Path

import numpy as np
import pytest

from barriercover.bench import Bench
from barriercover.coverage_tables import CoverageTables
from barriercover.dp_solver import Instance
from barriercover.geometry import Depot

DATA = Path(__file__).parent / 'data'

# Middle depot of the worked example sits 60 from both 68 and 88
MIDDLE_Y = math.sqrt(3500.0)


def make_instance(L, q, points, n=None):
    depots = tuple(
        Depot(index=index, x=float(x), y=float(y))
        for index, (x, y) in enumerate(points, start=1))
    return Instance(L=L, q=float(q), depots=depots, n=n)


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv('BRS_THREADS', '1')


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def worked():
    return make_instance(156, 140, [(18, 10), (78, MIDDLE_Y), (138, 10)], n=3)


@pytest.fixture
def worked_tables(worked):
    return CoverageTables.build(worked, cap=worked.L)


@pytest.fixture
def random_instances():
    """Factory of seeded small instances for the enumeration checks."""
    def factory(count, seed=0, lengths=(5, 9), max_depots=3):
        rng = np.random.default_rng(seed)
        instances = []
        for _ in range(count):
            L = int(rng.integers(lengths[0], lengths[1] + 1))
            m = int(rng.integers(1, max_depots + 1))
            instances.append(Bench.random_instance(L, m, None, rng))
        return instances
    return factory


@pytest.fixture
def wide_instances():
    """
    Factory of seeded instances with depots past either barrier end and
    high above it. Instances the screen rejects are kept.
    """
    def factory(count, seed=0, lengths=(12, 18), max_depots=3):
        rng = np.random.default_rng(seed)
        instances = []
        for _ in range(count):
            L = int(rng.integers(lengths[0], lengths[1] + 1))
            m = int(rng.integers(1, max_depots + 1))
            q = float(rng.uniform(1.0, 2.4) * L / m)
            xs = np.sort(rng.uniform(-0.2 * L, 1.2 * L, size=m))
            ys = rng.uniform(0.0, 0.35 * q, size=m)
            instances.append(make_instance(L, q, list(zip(xs, ys))))
        return instances
    return factory
