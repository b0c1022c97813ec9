import os

import numpy as np
import pytest

from barriercover.bench import Bench
from barriercover.cover_params import cover_params_dict
from barriercover.dp_solver import MinSumSolver


def test_random_instance_is_seeded():
    first = Bench.random_instance(20, 3, None, np.random.default_rng(42))
    second = Bench.random_instance(20, 3, None, np.random.default_rng(42))
    assert first == second


def test_random_instance_is_coverable():
    rng = np.random.default_rng(1)
    for _ in range(10):
        instance = Bench.random_instance(30, 4, 12, rng)
        assert instance.m == 4
        assert instance.n == 12
        report = MinSumSolver.feasibility_check(instance)
        assert report.coverable
        assert report.n_min <= 12


def test_random_instance_gives_up():
    with pytest.raises(RuntimeError):
        Bench.random_instance(20, 2, 1, np.random.default_rng(0), retries=3)


def test_small_bench():
    frame = Bench.run_bench(sizes=[16, 32], m=2, n=6, seed=0)
    assert list(frame.columns) == cover_params_dict['solver_params']['bench_headers']
    assert len(frame) == 4
    assert set(frame['strategy']) == {'compact', 'dense-naive'}
    for _, rows in frame.groupby('L'):
        objectives = rows['objective'].to_numpy()
        assert objectives[0] == pytest.approx(objectives[1], abs=1e-9)
    assert (frame['build_time_s'] >= 0).all()

    ratios = Bench.doubling_ratios(frame)
    assert set(ratios) == {'compact', 'dense-naive'}
    assert all(len(values) == 1 for values in ratios.values())


@pytest.mark.bench
@pytest.mark.skipif(not os.environ.get('BRS_RUN_BENCH'), reason="set BRS_RUN_BENCH to time the builds")
def test_compact_tables_scale_linearly():
    frame = Bench.run_bench(sizes=[512, 1024, 2048], m=8, n=64, seed=0)
    for _, rows in frame.groupby('L'):
        objectives = rows['objective'].to_numpy()
        assert objectives[0] == pytest.approx(objectives[1], abs=1e-9)

    ratios = Bench.doubling_ratios(frame)
    assert all(1.5 <= ratio <= 2.8 for ratio in ratios['compact'])
    assert all(ratio >= 3.4 for ratio in ratios['dense-naive'])
