"""
Per-depot coverage tables

Minimum drone counts n_i(a, b) and minimum path lengths f_i(a, b) are kept
as reachability chains: for every integer a the boundaries reached by 1, 2,
... chained full-budget drones. Both functions are answered from the chains
on demand.

"""
import bisect
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from barriercover.cover_params import TOLERANCE, cover_params_dict
from barriercover.geometry import Depot, TourGeometry

if TYPE_CHECKING:
    from barriercover.dp_solver import Instance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DepotChains:
    """
    Reachability chains of one depot.

    Parameters
    ----------
    depot : Depot
        The depot the chains belong to.
    q : float
        Tour budget.
    L : int
        Barrier length.
    cap : int
        Maximum chain depth.
    right_chain : tuple
        right_chain[a] is the increasing sequence b(1) < b(2) < ... of
        boundaries reached from a by 1, 2, ... full-budget drones.
    left_chain : tuple
        left_chain[b] is the decreasing mirror sequence reached from b.
    right_tail : tuple
        right_tail[a] is the end of one closing drone laid after
        right_chain[a] stalls, or None. The closing drone starts at the
        rightmost unit piece instead of at the last boundary, so it does
        not spend the full budget.
    left_tail : tuple
        Mirror of right_tail for the left chains.
    right_evaluations : int
        Closed-form evaluations spent on the right chains.
    left_evaluations : int
        Closed-form evaluations spent on the left chains.

    """
    depot: Depot
    q: float
    L: int
    cap: int
    right_chain: tuple[tuple[float, ...], ...]
    left_chain: tuple[tuple[float, ...], ...]
    right_tail: tuple[float | None, ...]
    left_tail: tuple[float | None, ...]
    right_evaluations: int
    left_evaluations: int

    def reach(self, a: int) -> tuple[float, ...]:
        """Boundaries reached from a by 1, 2, ... drones, closing drone included."""
        tail = self.right_tail[a]
        if tail is None:
            return self.right_chain[a]
        return self.right_chain[a] + (tail,)


class Coverage():
    """
    Chain construction and the queries n_i(a, b), f_i(a, b) and f(a, b).

    """
    @classmethod
    def build_chains(
        cls,
        depot: Depot,
        q: float,
        L: int,
        cap: int) -> DepotChains:
        """
        Build the right and left chains of a depot for every integer
        barrier point.

        Each link consumes a full budget q. A chain stops when the next
        drone would cover less than length 1, when it reaches the barrier
        end or when cap links have been laid. A chain stalled by the first
        rule may still close with one more drone over the extreme unit
        piece of the depot; that end is kept apart as the tail.

        Parameters
        ----------
        depot : Depot
            The depot.
        q : Float
            Tour budget.
        L : Int
            Barrier length.
        cap : Int
            Maximum chain depth, cap >= 1.

        Returns
        -------
        DepotChains
            Chains for a = 0..L (right) and b = 0..L (left).

        """
        if cap < 1:
            raise ValueError(f"Chain cap must be at least 1, got {cap}")

        extent = TourGeometry.unit_extent(depot, q)
        right_chain = []
        left_chain = []
        right_tail = []
        left_tail = []
        right_evaluations = 0
        left_evaluations = 0
        for point in range(L + 1):
            chain, evaluations = cls._walk(
                depot=depot, start=float(point), q=q, L=L, cap=cap,
                forward=True)
            right_chain.append(chain)
            right_tail.append(cls._tail(
                extent=extent, start=float(point), chain=chain, L=L, cap=cap,
                forward=True))
            right_evaluations += evaluations

            chain, evaluations = cls._walk(
                depot=depot, start=float(point), q=q, L=L, cap=cap,
                forward=False)
            left_chain.append(chain)
            left_tail.append(cls._tail(
                extent=extent, start=float(point), chain=chain, L=L, cap=cap,
                forward=False))
            left_evaluations += evaluations

        logger.debug(
            "Depot %d chains: %d right and %d left evaluations, deepest %d.",
            depot.index, right_evaluations, left_evaluations,
            max(len(chain) for chain in right_chain))

        return DepotChains(
            depot=depot,
            q=q,
            L=L,
            cap=cap,
            right_chain=tuple(right_chain),
            left_chain=tuple(left_chain),
            right_tail=tuple(right_tail),
            left_tail=tuple(left_tail),
            right_evaluations=right_evaluations,
            left_evaluations=left_evaluations)


    @staticmethod
    def _walk(
        depot: Depot,
        start: float,
        q: float,
        L: int,
        cap: int,
        forward: bool) -> tuple[tuple[float, ...], int]:

        chain: list[float] = []
        evaluations = 0
        s = start
        while len(chain) < cap:
            if forward and s >= L - TOLERANCE:
                break
            if not forward and s <= TOLERANCE:
                break

            evaluations += 1
            if forward:
                t = TourGeometry.max_reach_right(depot, s, q)
                if t is None or t - s < 1.0 - TOLERANCE:
                    break
                t = min(t, float(L))
            else:
                t = TourGeometry.max_reach_left(depot, s, q)
                if t is None or s - t < 1.0 - TOLERANCE:
                    break
                t = max(t, 0.0)

            chain.append(t)
            s = t

        return tuple(chain), evaluations


    @staticmethod
    def _tail(
        extent: tuple[float, float] | None,
        start: float,
        chain: tuple[float, ...],
        L: int,
        cap: int,
        forward: bool) -> float | None:
        """
        End of the closing drone of a stalled chain, None if it gains
        nothing or cannot be laid.

        After j drones of length at least 1 the boundary can sit anywhere
        between start + j and the last chain entry. The closing drone
        covers the extreme unit piece, so its launch point must lie in that
        range for the previous drone to keep length 1.
        """
        if extent is None or len(chain) >= cap:
            return None

        s_lo, s_hi = extent
        last = chain[-1] if chain else start
        if forward:
            if last >= L - TOLERANCE:
                return None
            launch = min(last, s_hi, L - 1.0)
            if launch < max(start + len(chain), s_lo) - TOLERANCE:
                return None
            end = min(launch + 1.0, float(L))
            return end if end > last + TOLERANCE else None

        if last <= TOLERANCE:
            return None
        launch = max(last, s_lo + 1.0, 1.0)
        if launch > min(start - len(chain), s_hi + 1.0) + TOLERANCE:
            return None
        end = max(launch - 1.0, 0.0)
        return end if end < last - TOLERANCE else None


    @staticmethod
    def min_drones(chains: DepotChains, a: int, b: int) -> int | None:
        """
        Minimum number of drones of the depot covering [a, b].

        Parameters
        ----------
        chains : DepotChains
            Chains of the depot.
        a : Int
            Left end.
        b : Int
            Right end, b >= a.

        Returns
        -------
        Int or None
            0 for the empty segment, otherwise the smallest k whose chain
            entry reaches b; None when the chain saturates below b.

        """
        if b < a:
            raise ValueError(f"Segment [{a}, {b}] has a > b")
        if a == b:
            return 0

        chain = chains.right_chain[a]
        position = bisect.bisect_left(chain, b - TOLERANCE)
        if position < len(chain):
            return position + 1

        tail = chains.right_tail[a]
        if tail is not None and tail >= b - TOLERANCE:
            return len(chain) + 1

        return None


    @classmethod
    def split_points(
        cls,
        chains: DepotChains,
        a: int,
        b: int) -> list[float] | None:
        """
        Points a = s_0 <= s_1 <= ... <= s_k = b splitting [a, b] into the
        pieces of the k = n_i(a, b) cheapest tours.

        Three cases depending on the foot x of the depot:
            x <= a : k-1 full drones chained leftward from b, the last
                     drone covers what remains next to a.
            x >= b : mirror image.
            a < x < b : j full drones chained rightward from a and
                     k-2-j leftward from b; the middle part is shared by
                     two drones split as close to the foot as the budget
                     allows. The best j is kept.

        Returns
        -------
        List or None
            The split points, [a] alone for the empty segment, None if the
            depot cannot cover [a, b].

        """
        k = cls.min_drones(chains, a, b)
        if k is None:
            return None
        if k == 0:
            return [float(a)]
        if k == 1:
            return [float(a), float(b)]

        best = cls._best_split(chains, a, b, k)
        if best is None:
            return None

        return best[1]


    @classmethod
    def segment_cost(cls, chains: DepotChains, a: int, b: int) -> float | None:
        """
        Minimum total tour length f_i(a, b) of n_i(a, b) drones covering
        [a, b]; 0 for the empty segment, None when infeasible.
        """
        k = cls.min_drones(chains, a, b)
        if k is None:
            return None
        if k == 0:
            return 0.0
        if k == 1:
            return TourGeometry.tour_length_between(chains.depot, a, b)

        best = cls._best_split(chains, a, b, k)
        if best is None:
            return None

        return best[0]


    @classmethod
    def _best_split(
        cls,
        chains: DepotChains,
        a: int,
        b: int,
        k: int) -> tuple[float, list[float]] | None:

        x = chains.depot.x
        if x <= a:
            choices = [0]
        elif x >= b:
            choices = [k - 2]
        else:
            choices = list(range(k - 1))

        right = chains.reach(a)
        left = cls._left_iterates(chains=chains, b=b, count=k - 1)
        best = cls._scan(chains, a, b, k, choices, right, left)
        if best is None and len(choices) == 1:
            # Boundary case lost to rounding; fall back to every allocation
            best = cls._scan(chains, a, b, k, range(k - 1), right, left)
        if best is None:
            return None

        cost, j, h = best
        outer = k - 2 - j
        points = [float(a), *right[:j], h, *reversed(left[:outer]), float(b)]

        return cost, points


    @classmethod
    def _scan(
        cls,
        chains: DepotChains,
        a: int,
        b: int,
        k: int,
        choices: list[int] | range,
        right: tuple[float, ...],
        left: list[float]) -> tuple[float, int, float] | None:

        best = None
        for j in choices:
            candidate = cls._pair_split(chains, a, b, k, j, right, left)
            if candidate is None:
                continue
            if best is None or candidate[0] < best[0] - TOLERANCE:
                best = (candidate[0], j, candidate[1])

        return best


    @staticmethod
    def _pair_split(
        chains: DepotChains,
        a: int,
        b: int,
        k: int,
        j: int,
        right: tuple[float, ...],
        left: list[float]) -> tuple[float, float] | None:
        """
        Cost and middle split h when j full drones run rightward from a and
        k-2-j leftward from b, None if the remaining two drones cannot
        close the middle part [c, d].
        """
        depot, q = chains.depot, chains.q
        outer = k - 2 - j
        if outer > len(left):
            return None

        c = right[j - 1] if j > 0 else float(a)
        d = left[outer - 1] if outer > 0 else float(b)
        if c > d + TOLERANCE:
            return None

        h_hi = right[j]
        if outer < len(left):
            h_lo = left[outer]
        else:
            h_lo = TourGeometry.max_reach_left(depot, d, q)
            if h_lo is None:
                return None

        lo = max(h_lo, c)
        hi = min(h_hi, d)
        if lo > hi + TOLERANCE:
            return None

        # Closest admissible split to the perpendicular foot
        h = min(max(depot.x, lo), hi)
        h = min(max(h, c), d)

        # Every chained link spends exactly the budget
        cost = ((k - 2) * q
                + TourGeometry.tour_length_between(depot, c, h)
                + TourGeometry.tour_length_between(depot, h, d))

        return cost, h


    @staticmethod
    def _left_iterates(
        chains: DepotChains,
        b: int,
        count: int) -> list[float]:
        """
        Up to count leftward full-budget iterates from b: the stored chain,
        extended from the closed form when it stopped early.
        """
        iterates = list(chains.left_chain[b][:count])
        s = iterates[-1] if iterates else float(b)
        while len(iterates) < count and s > TOLERANCE:
            t = TourGeometry.max_reach_left(chains.depot, s, chains.q)
            if t is None or t >= s - TOLERANCE:
                break
            iterates.append(max(t, 0.0))
            s = iterates[-1]

        return iterates


    @classmethod
    def aggregate(
        cls,
        tables: list[DepotChains] | tuple[DepotChains, ...],
        a: int,
        b: int) -> tuple[float | None, int | None]:
        """
        f(a, b) = min_i f_i(a, b) and the depot k(a, b) attaining it.

        Ties go to the smallest depot index.

        Returns
        -------
        Tuple
            (cost, depot index), or (None, None) if no depot covers [a, b].

        """
        best_cost, best_index = None, None
        for chains in tables:
            cost = cls.segment_cost(chains, a, b)
            if cost is None:
                continue
            if best_cost is None or cost < best_cost - TOLERANCE:
                best_cost, best_index = cost, chains.depot.index

        return best_cost, best_index


def _build_depot_chains(depot: Depot, q: float, L: int, cap: int) -> DepotChains:
    """Worker entry point; module level so worker processes can pickle it."""
    return Coverage.build_chains(depot=depot, q=q, L=L, cap=cap)


class CoverageTables():
    """
    Chains of every depot of an instance, with query counting and an
    optional dense aggregate table.

    Parameters
    ----------
    chains : list of DepotChains
        One entry per depot, ordered by depot index.
    dense : Bool
        Materialise f(a, b) and k(a, b) for every integer pair. The
        default is False.

    """
    def __init__(
        self,
        chains: list[DepotChains] | tuple[DepotChains, ...],
        dense: bool = False) -> None:

        if not chains:
            raise ValueError("Coverage tables need at least one depot")

        self.chains = tuple(chains)
        self.L = self.chains[0].L
        self.q = self.chains[0].q
        self.query_count = 0

        # Last reachable boundary per start point; a start with an empty
        # chain reaches only itself
        self.reach_end = {
            item.depot.index: np.array(
                [item.reach(a)[-1] if item.reach(a) else float(a)
                 for a in range(item.L + 1)])
            for item in self.chains
            }
        self._by_index = {item.depot.index: item for item in self.chains}

        self.dense = dense
        self.dense_cost = None
        self.dense_depot = None
        if dense:
            self._materialise()


    @classmethod
    def build(
        cls,
        instance: 'Instance',
        dense: bool = False,
        cap: int | None = None,
        workers: int = 1) -> 'CoverageTables':
        """
        Build the chains of every depot of an instance.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        dense : Bool
            Materialise the aggregate table. The default is False.
        cap : Int, optional
            Chain depth. The default is min(n, L), or L without a drone cap.
        workers : Int
            Worker processes for the per-depot builds. The default is 1.

        Returns
        -------
        CoverageTables

        """
        if cap is None:
            cap = int(math.ceil(instance.L))
            if instance.n is not None:
                cap = min(instance.n, cap)

        if workers > 1 and len(instance.depots) > 1:
            built: dict[int, DepotChains] = {}
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = {
                    executor.submit(
                        _build_depot_chains,
                        depot=depot,
                        q=instance.q,
                        L=instance.L,
                        cap=cap,
                    ): depot.index
                    for depot in instance.depots
                }

                for future in as_completed(futures):
                    index = futures[future]
                    try:
                        built[index] = future.result()
                    except Exception:
                        logger.exception("Chain build for depot %d failed.", index)
                        raise
            chains = [built[index] for index in sorted(built)]
        else:
            chains = [
                _build_depot_chains(depot=depot, q=instance.q, L=instance.L, cap=cap)
                for depot in instance.depots
                ]

        logger.info(
            "Built chains for %d depots (L=%d, cap=%d, dense=%s).",
            len(chains), instance.L, cap, dense)

        return cls(chains, dense=dense)


    def _materialise(self) -> None:
        size = self.L + 1
        self.dense_cost = np.full((size, size), np.nan)
        self.dense_depot = np.full((size, size), -1, dtype=int)
        for a in range(size):
            for b in range(a, size):
                cost, index = Coverage.aggregate(self.chains, a, b)
                if cost is not None:
                    self.dense_cost[a, b] = cost
                    self.dense_depot[a, b] = index


    def depot_chains(self, index: int) -> DepotChains:
        """Chains of the depot with the given 1-based index."""
        try:
            return self._by_index[index]
        except KeyError as exc:
            raise ValueError(f"No depot with index {index}") from exc


    @property
    def evaluations(self) -> dict[int, tuple[int, int]]:
        """(right, left) closed-form evaluations per depot index."""
        return {
            item.depot.index: (item.right_evaluations, item.left_evaluations)
            for item in self.chains
            }


    def entry(self, index: int, a: int, b: int) -> tuple[int | None, float | None]:
        """
        n_i(a, b) and f_i(a, b) of one depot, counted as one table query.
        """
        self.query_count += 1
        chains = self.depot_chains(index)
        count = Coverage.min_drones(chains, a, b)
        if count is None:
            return None, None

        cost = Coverage.segment_cost(chains, a, b)
        if cost is None:
            return None, None

        return count, cost


    def best(
        self,
        a: int,
        b: int,
        count: bool = True) -> tuple[float | None, int | None]:
        """
        Aggregate f(a, b) and k(a, b), counted as one query unless count
        is False.
        """
        if count:
            self.query_count += 1
        if self.dense_cost is not None:
            cost = self.dense_cost[a, b]
            if np.isnan(cost):
                return None, None
            return float(cost), int(self.dense_depot[a, b])

        return Coverage.aggregate(self.chains, a, b)


    def starts(self, l: int, index: int | None = None) -> np.ndarray:
        """
        Start points z < l from which the depot (or any depot when index is
        None) can reach l; all other pairs are infeasible.
        """
        if index is not None:
            ends = self.reach_end[index][:l]
            return np.flatnonzero(ends >= l - TOLERANCE)

        mask = np.zeros(l, dtype=bool)
        for ends in self.reach_end.values():
            mask |= ends[:l] >= l - TOLERANCE

        return np.flatnonzero(mask)


    def frame(self, index: int | None = None) -> pd.DataFrame:
        """
        Dense dump of n_i(a, b) and f_i(a, b) over every integer pair
        a <= b, for one depot or all of them.

        Returns
        -------
        DataFrame
            Columns depot, a, b, n_i, f_i; 'inf' marks infeasible pairs.

        """
        decimals = cover_params_dict['solver_params']['float_decimals']
        selected = (self.chains if index is None
                    else (self.depot_chains(index),))
        rows = []
        for chains in selected:
            for a in range(self.L + 1):
                for b in range(a, self.L + 1):
                    count = Coverage.min_drones(chains, a, b)
                    cost = Coverage.segment_cost(chains, a, b)
                    rows.append((
                        chains.depot.index,
                        a,
                        b,
                        'inf' if count is None else str(count),
                        'inf' if cost is None else f"{cost:.{decimals}f}"))

        return pd.DataFrame(
            rows, columns=cover_params_dict['solver_params']['table_headers'])
