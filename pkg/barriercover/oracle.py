"""
Brute-force reference solvers

Exhaustive enumeration over split points and barrier partitions, using
bisection instead of the closed-form reach. Exponential; meant for barriers
of at most a couple of dozen units.

"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from barriercover.cover_params import TOLERANCE, cover_params_dict
from barriercover.dp_solver import Instance
from barriercover.geometry import Depot, TourGeometry

logger = logging.getLogger(__name__)

# Split-point combinations scored per numpy batch
_BATCH = 65536


@dataclass(frozen=True)
class OracleResult:
    """
    Optimum found by enumeration.

    Parameters
    ----------
    objective : float
        Minimum total tour length.
    partition : tuple of int
        Partition points 0 = z_0 < z_1 < ... < z_p = L.
    assignments : tuple of (int, int)
        (depot index, drone count) for each part.
    visited : int
        Number of (partition, assignment) states scored.

    """
    objective: float
    partition: tuple[int, ...]
    assignments: tuple[tuple[int, int], ...]
    visited: int


class BruteForce():
    """
    Enumeration oracles for reach, drone counts, segment costs and the full
    MinSum problem.

    """
    @staticmethod
    def oracle_max_reach(depot: Depot, s: float, q: float) -> float | None:
        """
        Largest t with tour [s, t] <= q, by bisection.

        Returns
        -------
        Float or None
            t to within 1e-12, None when s itself is out of reach.

        """
        start = TourGeometry.distance(depot, s)
        if 2.0 * start > q + TOLERANCE:
            return None

        lo, hi = s, s + q
        for _ in range(200):
            if hi - lo <= 1e-12 * max(1.0, abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if TourGeometry.tour_length_between(depot, s, mid) <= q:
                lo = mid
            else:
                hi = mid

        return lo


    @classmethod
    def oracle_max_reach_left(cls, depot: Depot, t: float, q: float) -> float | None:
        """Smallest s with tour [s, t] <= q, by bisection on the mirror image."""
        mirrored = cls.oracle_max_reach(TourGeometry.reflect(depot), -t, q)
        if mirrored is None:
            return None

        return -mirrored


    @staticmethod
    def oracle_unit_extent(depot: Depot, q: float) -> tuple[float, float] | None:
        """
        Range of left ends s with tour [s, s+1] <= q, by bisection from the
        cheapest unit piece, which sits half a unit left of the foot.
        """
        centre = depot.x - 0.5
        if TourGeometry.tour_length_between(depot, centre, centre + 1.0) > q:
            return None

        lo, hi = centre, centre + q
        for _ in range(200):
            if hi - lo <= 1e-12 * max(1.0, abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if TourGeometry.tour_length_between(depot, mid, mid + 1.0) <= q:
                lo = mid
            else:
                hi = mid

        return 2.0 * centre - lo, lo


    @classmethod
    def oracle_min_drones(
        cls,
        depot: Depot,
        a: int,
        b: int,
        q: float,
        L: int,
        cap: int | None = None,
        step: float = 1.0) -> int | None:
        """
        Smallest k for which k tours of the depot cover [a, b], found by
        enumerating split points.

        Every drone covers length at least 1, so a and b - 1 must start
        unit pieces within budget and k is at most b - a. Counts below the
        number of bisection reaches needed to get from a to b cannot work
        and are skipped.

        Returns
        -------
        Int or None
            0 for a == b, None when no count up to min(b - a, cap) works.

        """
        if a == b:
            return 0

        cap = L if cap is None else cap
        if (TourGeometry.tour_length_between(depot, a, a + 1) > q + TOLERANCE
                or TourGeometry.tour_length_between(depot, b - 1, b) > q + TOLERANCE):
            return None

        fewest = 1
        s = float(a)
        while True:
            t = cls.oracle_max_reach(depot, s, q)
            if t is None:
                return None
            if t >= b - TOLERANCE:
                break
            if fewest >= b - a:
                return None
            s = t
            fewest += 1

        for k in range(fewest, min(b - a, cap) + 1):
            cost, _ = cls._segment_search(depot, a, b, k, q, step, first=True)
            if cost is not None:
                return k

        return None


    @classmethod
    def _candidates(
        cls,
        depot: Depot,
        a: int,
        b: int,
        k: int,
        q: float,
        step: float) -> np.ndarray:
        """
        Split-point candidates: the step grid on [a, b] together with the
        foot and the first k-1 full-budget iterates from either end.
        """
        count = int(math.floor((b - a) / step + TOLERANCE))
        values = [a + step * i for i in range(count + 1)]
        values.append(depot.x)

        s = float(a)
        for _ in range(k - 1):
            s = cls.oracle_max_reach(depot, s, q)
            if s is None:
                break
            values.append(s)

        t = float(b)
        for _ in range(k - 1):
            t = cls.oracle_max_reach_left(depot, t, q)
            if t is None:
                break
            values.append(t)

        points = np.clip(np.array(values, dtype=float), a, b)

        return np.unique(points)


    @classmethod
    def _segment_search(
        cls,
        depot: Depot,
        a: int,
        b: int,
        k: int,
        q: float,
        step: float,
        first: bool = False) -> tuple[float | None, int]:

        if k < 1:
            raise ValueError(f"Drone count must be at least 1, got {k}")

        if k == 1:
            cost = TourGeometry.tour_length_between(depot, a, b)
            return (cost if cost <= q + TOLERANCE else None), 1

        candidates = cls._candidates(depot, a, b, k, q, step)
        combos = itertools.combinations_with_replacement(candidates, k - 1)
        best = math.inf
        visited = 0
        while True:
            batch = list(itertools.islice(combos, _BATCH))
            if not batch:
                break
            visited += len(batch)
            inner = np.array(batch, dtype=float)
            points = np.hstack([
                np.full((len(batch), 1), float(a)),
                inner,
                np.full((len(batch), 1), float(b))
                ])
            legs = np.hypot(depot.x - points, depot.y)
            tours = legs[:, :-1] + np.diff(points, axis=1) + legs[:, 1:]
            feasible = np.all(tours <= q + TOLERANCE, axis=1)
            if feasible.any():
                best = min(best, float(tours.sum(axis=1)[feasible].min()))
                if first:
                    break

        return (None if math.isinf(best) else best), visited


    @classmethod
    def oracle_segment_cost(
        cls,
        depot: Depot,
        a: int,
        b: int,
        k: int,
        q: float,
        step: float = 1.0) -> float | None:
        """
        Minimum total length of k tours of one depot covering [a, b],
        by enumerating every choice of k-1 split points.

        Parameters
        ----------
        depot : Depot
            The depot.
        a : Int
            Left end.
        b : Int
            Right end.
        k : Int
            Number of drones, k >= 1.
        q : Float
            Tour budget.
        step : Float
            Split-point grid step. The default is 1.0.

        Returns
        -------
        Float or None
            The minimum, or None when no choice keeps every tour in budget.

        """
        if a == b:
            return 0.0

        cost, _ = cls._segment_search(depot, a, b, k, q, step)

        return cost


    @classmethod
    def part_options(
        cls,
        instance: Instance,
        step: float | None = None) -> dict[tuple[int, int], list[tuple[int, float, int]]]:
        """
        Every way one depot can serve each integer part [u, v].

        Parameters
        ----------
        instance : Instance
            The problem instance.
        step : Float, optional
            Split-point grid step. The default is oracle_step.

        Returns
        -------
        dict
            (u, v) -> (drone count, cost, depot index) options, each cheaper
            than every option with fewer drones.

        """
        step = cover_params_dict['solver_params']['oracle_step'] if step is None else step
        L, q = instance.L, instance.q
        options: dict[tuple[int, int], list[tuple[int, float, int]]] = {}
        for u in range(L):
            for v in range(u + 1, L + 1):
                found = []
                for depot in instance.depots:
                    k = cls.oracle_min_drones(depot, u, v, q, L, step=step)
                    if k is None:
                        continue
                    cost, _ = cls._segment_search(depot, u, v, k, q, step)
                    if cost is not None:
                        found.append((k, cost, depot.index))
                options[(u, v)] = cls._pareto(found)

        return options


    @classmethod
    def oracle_minsum(
        cls,
        instance: Instance,
        cap: int | None = None,
        step: float | None = None,
        options: dict[tuple[int, int], list[tuple[int, float, int]]] | None = None,
        ) -> OracleResult | None:
        """
        MinSum by exhaustive search over every integer partition of [0, L]
        and every depot for each of its parts, in any order and with
        repeats. Each part uses the minimal feasible drone count of its
        depot. Partitions sharing a suffix share its search, memoised on
        (boundary, drones left).

        Parameters
        ----------
        instance : Instance
            The problem instance, L at most oracle_max_length.
        cap : Int, optional
            Drone cap. The default is None (unbounded).
        step : Float, optional
            Split-point grid step. The default is oracle_step.
        options : dict, optional
            Output of part_options for the same instance and step, to reuse
            across caps. The default is None (computed here).

        Raises
        ------
        ValueError
            When the barrier is too long to enumerate.

        Returns
        -------
        OracleResult or None
            The optimum, None when no cover fits the cap.

        """
        params = cover_params_dict['solver_params']
        if instance.L > params['oracle_max_length']:
            raise ValueError(
                f"Oracle refuses L={instance.L} > {params['oracle_max_length']}")
        if options is None:
            options = cls.part_options(instance, step)

        L = instance.L
        budgets = [None] if cap is None else list(range(cap + 1))
        best: dict[tuple[int, int | None], tuple[float, int, tuple[int, float, int]] | None] = {}
        visited = 0
        for u in range(L, -1, -1):
            for budget in budgets:
                if u == L:
                    best[(u, budget)] = (0.0, L, (0, 0.0, 0))
                    continue

                chosen = None
                for v in range(u + 1, L + 1):
                    for option in options[(u, v)]:
                        left = None if budget is None else budget - option[0]
                        if left is not None and left < 0:
                            continue
                        rest = best[(v, left)]
                        if rest is None:
                            continue
                        visited += 1
                        total = option[1] + rest[0]
                        if chosen is None or total < chosen[0] - TOLERANCE:
                            chosen = (total, v, option)
                best[(u, budget)] = chosen

        start = best[(0, cap)]
        if start is None:
            logger.info("Oracle found no cover (cap=%s).", cap)
            return None

        partition = [0]
        assignments = []
        u, budget = 0, cap
        while u < L:
            _, v, (k, _, index) = best[(u, budget)]
            partition.append(v)
            assignments.append((index, k))
            budget = None if budget is None else budget - k
            u = v

        logger.info("Oracle objective %.9f over %d states.", start[0], visited)

        return OracleResult(
            objective=start[0],
            partition=tuple(partition),
            assignments=tuple(assignments),
            visited=visited)


    @staticmethod
    def _pareto(
        found: list[tuple[int, float, int]]) -> list[tuple[int, float, int]]:
        # Keep an option only if it is cheaper than every option using fewer drones
        kept = []
        for option in sorted(found, key=lambda item: (item[0], item[1], item[2])):
            if not kept or option[1] < kept[-1][1] - TOLERANCE:
                kept.append(option)

        return kept
