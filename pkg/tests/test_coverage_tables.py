import math

import numpy as np
import pytest

from barriercover.coverage_tables import Coverage, CoverageTables
from barriercover.geometry import Depot, TourGeometry
from barriercover.oracle import BruteForce
from tests.conftest import MIDDLE_Y, make_instance

DEPOT_1 = Depot(1, 18.0, 10.0)
DEPOT_2 = Depot(2, 78.0, MIDDLE_Y)
DEPOT_3 = Depot(3, 138.0, 10.0)


@pytest.fixture
def chains_1():
    return Coverage.build_chains(DEPOT_1, 140.0, 156, cap=156)


@pytest.fixture
def chains_2():
    return Coverage.build_chains(DEPOT_2, 140.0, 156, cap=156)


class TestChains:

    def test_first_depot_chain_from_zero(self, chains_1):
        chain = chains_1.right_chain[0]
        assert len(chain) == 2
        assert chain[0] == pytest.approx(68.21, abs=0.01)
        assert chain[1] == pytest.approx(87.15, abs=0.01)

    def test_depot_on_the_barrier_saturates(self):
        chains = Coverage.build_chains(Depot(1, 0.0, 0.0), 10.0, 10, cap=10)
        assert chains.right_chain[0] == pytest.approx((5.0,))

    def test_middle_depot_link(self, chains_2):
        assert chains_2.right_chain[68][0] == pytest.approx(88.0, abs=1e-9)

    def test_unreachable_start_has_empty_chain(self):
        chains = Coverage.build_chains(DEPOT_3, 140.0, 156, cap=156)
        assert chains.right_chain[0] == ()

    def test_chain_invariants(self, chains_1, chains_2):
        for chains in (chains_1, chains_2):
            for a, chain in enumerate(chains.right_chain):
                assert all(later > earlier for earlier, later in zip(chain, chain[1:]))
                assert all(entry <= chains.L for entry in chain)
                start = float(a)
                for entry in chain:
                    length = TourGeometry.tour_length_between(chains.depot, start, entry)
                    assert length <= chains.q + 1e-9
                    if entry < chains.L:
                        assert length == pytest.approx(chains.q, abs=1e-9)
                    start = entry
            for chain in chains.left_chain:
                assert all(later < earlier for earlier, later in zip(chain, chain[1:]))
                assert all(entry >= 0.0 for entry in chain)

    def test_cap_limits_depth(self):
        chains = Coverage.build_chains(Depot(1, 5.0, 0.5), 4.0, 20, cap=2)
        assert max(len(chain) for chain in chains.right_chain) <= 2

    def test_evaluation_counts_are_linear(self):
        for cap in (1, 3, 8):
            chains = Coverage.build_chains(Depot(1, 9.0, 1.0), 6.0, 30, cap=cap)
            assert chains.right_evaluations <= cap * 31
            assert chains.left_evaluations <= cap * 31

    def test_cap_must_be_positive(self):
        with pytest.raises(ValueError):
            Coverage.build_chains(DEPOT_1, 140.0, 156, cap=0)

    def test_stalled_chain_closes_on_the_extreme_unit_piece(self, chains_1):
        assert chains_1.right_tail[0] == pytest.approx(87.277, abs=1e-3)
        assert chains_1.reach(0)[:2] == chains_1.right_chain[0]
        assert len(chains_1.reach(0)) == 3
        assert Coverage.min_drones(chains_1, 0, 87) == 2
        assert Coverage.min_drones(chains_1, 0, 88) is None

    def test_chain_reaching_the_end_has_no_tail(self):
        chains = Coverage.build_chains(Depot(1, 0.0, 0.0), 10.0, 5, cap=5)
        assert chains.right_chain[0] == pytest.approx((5.0,))
        assert chains.right_tail[0] is None
        assert chains.reach(0) == chains.right_chain[0]

    def test_tails_are_unit_pieces_within_budget(self):
        rng = np.random.default_rng(14)
        for _ in range(30):
            depot = Depot(1, float(rng.uniform(-3, 15)), float(rng.uniform(0, 3)))
            q = float(rng.uniform(3, 12))
            chains = Coverage.build_chains(depot, q, 12, cap=12)
            for a, tail in enumerate(chains.right_tail):
                if tail is None:
                    continue
                chain = chains.right_chain[a]
                assert tail > (chain[-1] if chain else a)
                assert tail <= chains.L
                if tail < chains.L:
                    assert TourGeometry.tour_length_between(depot, tail - 1.0, tail) == pytest.approx(q, abs=1e-6)
                else:
                    assert TourGeometry.tour_length_between(depot, tail - 1.0, tail) <= q + 1e-8
            for b, tail in enumerate(chains.left_tail):
                if tail is None:
                    continue
                chain = chains.left_chain[b]
                assert tail < (chain[-1] if chain else b)
                assert tail >= 0.0
                assert TourGeometry.tour_length_between(depot, tail, tail + 1.0) <= q + 1e-8

    def test_closing_drone_makes_a_segment_feasible(self):
        depot = Depot(2, 3.4353, 1.1186)
        chains = Coverage.build_chains(depot, 8.0589, 8, cap=8)
        assert chains.right_chain[0] == pytest.approx((3.32, 6.75), abs=0.01)
        assert chains.reach(0)[-1] >= 7.0
        assert Coverage.min_drones(chains, 0, 7) == 3
        assert BruteForce.oracle_min_drones(depot, 0, 7, 8.0589, 8) == 3

        expected = BruteForce.oracle_segment_cost(depot, 0, 7, 3, 8.0589)
        assert expected == pytest.approx(19.0064, abs=1e-4)
        assert Coverage.segment_cost(chains, 0, 7) == pytest.approx(expected, abs=1e-6)
        points = Coverage.split_points(chains, 0, 7)
        assert len(points) == 4
        for p, r in zip(points, points[1:]):
            assert TourGeometry.tour_length_between(depot, p, r) <= 8.0589 + 1e-8

class TestQueries:

    def test_min_drones_examples(self, chains_1):
        assert Coverage.min_drones(chains_1, 0, 68) == 1
        assert Coverage.min_drones(chains_1, 0, 78) == 2
        assert Coverage.min_drones(chains_1, 0, 88) is None
        assert Coverage.min_drones(chains_1, 30, 30) == 0

    def test_min_drones_rejects_reversed_pair(self, chains_1):
        with pytest.raises(ValueError):
            Coverage.min_drones(chains_1, 10, 5)

    def test_segment_cost_exact_anchor(self, chains_2):
        assert Coverage.segment_cost(chains_2, 68, 88) == pytest.approx(140.0, abs=1e-9)

    def test_segment_cost_splits_at_the_foot(self, chains_1):
        expected = math.sqrt(424) + 20 + math.sqrt(3700) + 78
        assert Coverage.segment_cost(chains_1, 0, 78) == pytest.approx(expected, abs=1e-9)
        assert Coverage.segment_cost(chains_1, 0, 78) == pytest.approx(179.4189, abs=1e-4)
        assert Coverage.split_points(chains_1, 0, 78) == pytest.approx([0.0, 18.0, 78.0])

    def test_segment_cost_empty_and_infeasible(self, chains_1):
        assert Coverage.segment_cost(chains_1, 40, 40) == 0.0
        assert Coverage.split_points(chains_1, 40, 40) == [40.0]
        assert Coverage.segment_cost(chains_1, 0, 88) is None
        assert Coverage.split_points(chains_1, 0, 88) is None

    def test_aggregate_picks_the_only_feasible_depot(self, worked_tables):
        assert Coverage.segment_cost(worked_tables.depot_chains(1), 68, 88) is None
        assert Coverage.segment_cost(worked_tables.depot_chains(3), 68, 88) is None
        cost, index = Coverage.aggregate(worked_tables.chains, 68, 88)
        assert index == 2
        assert cost == pytest.approx(140.0, abs=1e-9)

    @pytest.mark.parametrize('a', [0, 50, 156])
    def test_aggregate_empty_segment_goes_to_first_depot(self, worked_tables, a):
        assert Coverage.aggregate(worked_tables.chains, a, a) == (0.0, 1)

    def test_single_depot_aggregate_is_its_cost(self, chains_1):
        for a, b in [(0, 40), (10, 80), (5, 5)]:
            cost, index = Coverage.aggregate([chains_1], a, b)
            assert cost == Coverage.segment_cost(chains_1, a, b)
            assert index == 1

    def test_cost_bracketing(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            depot = Depot(1, float(rng.uniform(0, 20)), float(rng.uniform(0.1, 3)))
            q = float(rng.uniform(6, 14))
            chains = Coverage.build_chains(depot, q, 20, cap=20)
            for a in range(21):
                for b in range(a + 1, 21):
                    k = Coverage.min_drones(chains, a, b)
                    if k is None:
                        continue
                    cost = Coverage.segment_cost(chains, a, b)
                    assert cost <= k * q + 1e-8
                    assert cost >= (b - a) + 2 * depot.y * k - 1e-9

    def test_constructed_tours_fit_the_budget(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            depot = Depot(1, float(rng.uniform(0, 20)), float(rng.uniform(0.1, 3)))
            q = float(rng.uniform(6, 14))
            chains = Coverage.build_chains(depot, q, 20, cap=20)
            for a in range(21):
                for b in range(a + 1, 21):
                    points = Coverage.split_points(chains, a, b)
                    if points is None:
                        continue
                    assert points[0] == a and points[-1] == b
                    assert len(points) == Coverage.min_drones(chains, a, b) + 1
                    assert all(r >= p for p, r in zip(points, points[1:]))
                    for p, r in zip(points, points[1:]):
                        assert TourGeometry.tour_length_between(depot, p, r) <= q + 1e-8

    def test_segment_cost_matches_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(12):
            L = int(rng.integers(6, 11))
            depot = Depot(1, float(rng.uniform(-2, L + 2)), float(rng.uniform(0.1, 1.5)))
            q = float(rng.uniform(4, 9))
            chains = Coverage.build_chains(depot, q, L, cap=L)
            for a in range(L + 1):
                for b in range(a + 1, L + 1):
                    k = Coverage.min_drones(chains, a, b)
                    if k is None or k > 4:
                        continue
                    expected = BruteForce.oracle_segment_cost(depot, a, b, k, q)
                    assert expected is not None
                    assert Coverage.segment_cost(chains, a, b) == pytest.approx(expected, abs=1e-6)

    def test_counts_and_costs_grow_with_the_segment(self):
        rng = np.random.default_rng(15)
        checked = 0
        for _ in range(15):
            L = 14
            depot = Depot(1, float(rng.uniform(-2, L + 2)), float(rng.uniform(0, 2.5)))
            q = float(rng.uniform(4, 12))
            chains = Coverage.build_chains(depot, q, L, cap=L)
            for a in range(L + 1):
                for b in range(a, L + 1):
                    count = Coverage.min_drones(chains, a, b)
                    cost = Coverage.segment_cost(chains, a, b)
                    if count is None or cost is None:
                        continue
                    wider = [(a - 1, b)] if a > 0 else []
                    if b < L:
                        wider.append((a, b + 1))
                    for u, v in wider:
                        wider_count = Coverage.min_drones(chains, u, v)
                        wider_cost = Coverage.segment_cost(chains, u, v)
                        if wider_count is None or wider_cost is None:
                            continue
                        assert wider_count >= count
                        assert wider_cost >= cost - 1e-7
                        checked += 1
        assert checked > 100

    def test_segment_costs_match_enumeration_beyond_the_foot(self):
        rng = np.random.default_rng(16)
        for _ in range(10):
            L = int(rng.integers(6, 11))
            depot = Depot(1, float(rng.uniform(-3, L + 3)), float(rng.uniform(0.5, 3.0)))
            q = float(rng.uniform(5, 10))
            chains = Coverage.build_chains(depot, q, L, cap=L)
            for a in range(L + 1):
                for b in range(a + 1, L + 1):
                    k = Coverage.min_drones(chains, a, b)
                    assert k == BruteForce.oracle_min_drones(depot, a, b, q, L)
                    if k is None or k > 4:
                        continue
                    expected = BruteForce.oracle_segment_cost(depot, a, b, k, q)
                    assert Coverage.segment_cost(chains, a, b) == pytest.approx(expected, abs=1e-6)


class TestCoverageTables:

    def test_build_defaults_cap_to_drone_limit(self, worked):
        tables = CoverageTables.build(worked)
        assert all(chains.cap == 3 for chains in tables.chains)

    def test_parallel_build_matches_serial(self, worked):
        serial = CoverageTables.build(worked, cap=4)
        parallel = CoverageTables.build(worked, cap=4, workers=2)
        assert serial.chains == parallel.chains

    def test_dense_and_lazy_agree(self):
        instance = make_instance(12, 7.0, [(2, 0.5), (9, 1.0)])
        lazy = CoverageTables.build(instance)
        dense = CoverageTables.build(instance, dense=True)
        for a in range(13):
            for b in range(a, 13):
                assert lazy.best(a, b) == dense.best(a, b)

    def test_query_counter(self, worked_tables):
        worked_tables.best(0, 10)
        worked_tables.entry(2, 68, 88)
        worked_tables.best(0, 10, count=False)
        assert worked_tables.query_count == 2

    def test_entry(self, worked_tables):
        count, cost = worked_tables.entry(2, 68, 88)
        assert count == 1
        assert cost == pytest.approx(140.0, abs=1e-9)
        assert worked_tables.entry(1, 68, 88) == (None, None)

    def test_unknown_depot(self, worked_tables):
        with pytest.raises(ValueError):
            worked_tables.depot_chains(4)

    def test_starts_prune_unreachable_points(self, worked_tables):
        starts = worked_tables.starts(88, index=2)
        assert 68 in starts
        assert 41 not in starts
        assert 0 not in starts
        assert 0 not in worked_tables.starts(100)

    def test_frame_rows(self, worked_tables):
        frame = worked_tables.frame(2)
        assert list(frame.columns) == ['depot', 'a', 'b', 'n_i', 'f_i']
        row = frame[(frame['a'] == 68) & (frame['b'] == 88)].iloc[0]
        assert (row['n_i'], row['f_i']) == ('1', '140.000000000')
        empty = frame[(frame['a'] == 7) & (frame['b'] == 7)].iloc[0]
        assert (empty['n_i'], empty['f_i']) == ('0', '0.000000000')
        far = frame[(frame['a'] == 0) & (frame['b'] == 156)].iloc[0]
        assert (far['n_i'], far['f_i']) == ('inf', 'inf')
        assert len(frame) == 157 * 158 // 2
