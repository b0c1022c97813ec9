"""
MinSum dynamic programs

Feasibility screening, the unbounded program A1 over the last partition
point and the capped program A2 over (depot prefix, boundary, drone budget),
with backward reconstruction into explicit drone tours.

"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from barriercover.cover_params import OBJECTIVE_TOLERANCE, TOLERANCE
from barriercover.coverage_tables import Coverage, CoverageTables
from barriercover.geometry import BarrierSegment, Depot, TourGeometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Instance:
    """
    A MinSum problem.

    Parameters
    ----------
    L : int
        Barrier length; the barrier is [0, L].
    q : float
        Tour budget of every drone.
    depots : tuple of Depot
        Depots in strictly increasing abscissa order, indexed 1..m.
    n : int, optional
        Cap on the total number of drones. The default is None (unbounded).
    original_indices : tuple of int
        Position of each depot in the source document, when it was sorted.

    """
    L: int
    q: float
    depots: tuple[Depot, ...]
    n: int | None = None
    original_indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if isinstance(self.L, bool) or not isinstance(self.L, (int, np.integer)):
            raise ValueError(f"Barrier length must be an integer, got {self.L!r}")
        if self.L < 1:
            raise ValueError(f"Barrier length must be at least 1, got {self.L}")
        if not self.q > 0:
            raise ValueError(f"Tour budget must be positive, got {self.q}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"Drone cap must be at least 1, got {self.n}")
        if not self.depots:
            raise ValueError("An instance needs at least one depot")
        for position, depot in enumerate(self.depots, start=1):
            if depot.index != position:
                raise ValueError(
                    f"Depot at position {position} carries index {depot.index}")
        for left, right in zip(self.depots[:-1], self.depots[1:]):
            if not left.x < right.x:
                raise ValueError(
                    f"Depot abscissas must strictly increase: depot "
                    f"{left.index} at x={left.x}, depot {right.index} at "
                    f"x={right.x}")

    @property
    def m(self) -> int:
        return len(self.depots)


@dataclass(frozen=True)
class DroneTour:
    """One drone: turns onto the barrier at start, leaves it at end."""
    start: float
    end: float
    length: float


@dataclass(frozen=True)
class SegmentAssignment:
    """A barrier segment served by one depot and its drone tours."""
    depot_index: int
    segment: BarrierSegment
    tours: tuple[DroneTour, ...]

    @property
    def drones(self) -> int:
        return len(self.tours)

    @property
    def cost(self) -> float:
        return sum(tour.length for tour in self.tours)


@dataclass(frozen=True)
class Solution:
    """
    An order-preserving cover of the barrier.

    Parameters
    ----------
    algorithm : str
        'A1' or 'A2'.
    objective : float
        Total tour length S*.
    segments : tuple of SegmentAssignment
        Segments left to right; A2 also lists empty segments of depots it
        leaves idle.
    drones_used : int
        n* for A1, N* for A2.
    parts : int
        Number of non-empty segments p*.
    diagnostics : dict
        n_min, n_star and original depot order.

    """
    algorithm: str
    objective: float
    segments: tuple[SegmentAssignment, ...]
    drones_used: int
    parts: int
    diagnostics: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the coverage screen; gap is None exactly when coverable."""
    coverable: bool
    n_min: int | None
    gap: tuple[float, float] | None


class InfeasibleInstanceError(Exception):
    """
    Raised when no cover exists, or none within the drone cap.

    Parameters
    ----------
    message : str
        Human readable reason.
    n_min : int, optional
        Minimum number of drones of any cover.
    gap : tuple, optional
        Barrier interval no depot can cover.

    """
    def __init__(
        self,
        message: str,
        n_min: int | None = None,
        gap: tuple[float, float] | None = None) -> None:
        super().__init__(message)
        self.n_min = n_min
        self.gap = gap


class MinSumSolver():
    """
    Feasibility screening and the A1 / A2 dynamic programs.

    """
    @classmethod
    def feasibility_check(cls, instance: Instance) -> FeasibilityReport:
        """
        Check that the depots can cover the barrier and count the fewest
        drones any cover needs.

        The union of reach spans must contain [0, L]. A sweep then tracks
        the set of boundaries reachable with exactly j drones, each covering
        length at least 1, as a union of intervals. A drone of depot i may
        launch from any reachable boundary inside the range of left ends of
        its unit pieces; launching from u..v it can end anywhere in
        [u + 1, reach_i(v)]. Launches are clipped to the unit-piece range,
        so a boundary past that range still lets the depot close with its
        extreme unit piece. n_min is the first j whose set contains L. The
        sweep fails when the sets die out before L.

        Parameters
        ----------
        instance : Instance
            The problem instance.

        Returns
        -------
        FeasibilityReport
            Coverable flag, n_min and the first blocking gap.

        """
        L, q = instance.L, instance.q
        covered = np.zeros(L, dtype=bool)
        for depot in instance.depots:
            span = TourGeometry.reach_span(depot, q, L)
            if span.reachable:
                covered[span.A:span.B] = True

        holes = np.flatnonzero(~covered)
        if holes.size > 0:
            start = int(holes[0])
            end = start
            while end < L and not covered[end]:
                end += 1
            logger.info("Barrier not coverable: no depot reaches [%d, %d].",
                        start, end)
            return FeasibilityReport(
                coverable=False, n_min=None, gap=(float(start), float(end)))

        extents = [
            (depot, TourGeometry.unit_extent(depot, q))
            for depot in instance.depots
            ]
        extents = [(depot, extent) for depot, extent in extents if extent is not None]

        boundaries = [(0.0, 0.0)]
        farthest = 0.0
        for n_min in range(1, L + 1):
            images = []
            for depot, (s_lo, s_hi) in extents:
                for u, v in boundaries:
                    lo = max(u, s_lo)
                    hi = min(v, s_hi, L - 1.0)
                    if lo > hi + TOLERANCE:
                        continue
                    t = TourGeometry.max_reach_right(depot, hi, q)
                    if t is None:
                        continue
                    images.append((lo + 1.0, min(max(t, hi + 1.0), float(L))))

            boundaries = cls._merge_intervals(images, float(L))
            if not boundaries:
                break
            farthest = max(farthest, boundaries[-1][1])
            if boundaries[-1][1] >= L - TOLERANCE:
                logger.info("Barrier coverable with at least %d drones.", n_min)
                return FeasibilityReport(coverable=True, n_min=n_min, gap=None)

        gap = (farthest, min(farthest + 1.0, float(L)))
        logger.info("Coverage sweep blocked at %.6f.", farthest)

        return FeasibilityReport(coverable=False, n_min=None, gap=gap)


    @staticmethod
    def _merge_intervals(
        intervals: list[tuple[float, float]],
        limit: float) -> list[tuple[float, float]]:
        """Sorted union of closed intervals, dropping those that start past limit."""
        merged: list[tuple[float, float]] = []
        for u, v in sorted(intervals):
            if u > limit + TOLERANCE:
                break
            if merged and u <= merged[-1][1] + TOLERANCE:
                merged[-1] = (merged[-1][0], max(merged[-1][1], v))
            else:
                merged.append((u, v))

        return merged


    @classmethod
    def solve_a1(cls, instance: Instance, tables: CoverageTables) -> Solution:
        """
        Unbounded MinSum: S(l) = min over z < l of f(z, l) + S(z).

        Ties go to the smallest z and then to the smallest depot.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        tables : CoverageTables
            Chains of every depot.

        Raises
        ------
        InfeasibleInstanceError
            When no chain of segments reaches L.

        Returns
        -------
        Solution
            The A1 cover with n* drones.

        """
        L = instance.L
        totals = np.full(L + 1, np.nan)
        totals[0] = 0.0
        last_point = np.full(L + 1, -1, dtype=int)
        last_depot = np.full(L + 1, -1, dtype=int)

        # Forward recursion
        for l in range(1, L + 1):
            best = math.nan
            for z in tables.starts(l):
                if np.isnan(totals[z]):
                    continue
                cost, index = tables.best(int(z), l)
                if cost is None:
                    continue
                value = cost + totals[z]
                if math.isnan(best) or value < best - TOLERANCE:
                    best = value
                    last_point[l] = z
                    last_depot[l] = index
            totals[l] = best

        if np.isnan(totals[L]):
            raise InfeasibleInstanceError(
                "No sequence of integer segments covers the barrier")

        cls._bellman_check(tables, totals, last_point)

        # Backward recursion
        segments = []
        l = L
        while l > 0:
            z = int(last_point[l])
            segments.append(
                cls.extract_tours(tables, int(last_depot[l]), z, l))
            l = z
        segments.reverse()

        drones = sum(segment.drones for segment in segments)
        logger.info(
            "A1 solved: objective %.9f, %d parts, %d drones, %d queries.",
            totals[L], len(segments), drones, tables.query_count)

        return Solution(
            algorithm='A1',
            objective=float(totals[L]),
            segments=tuple(segments),
            drones_used=drones,
            parts=len(segments),
            diagnostics={'n_star': drones})


    @staticmethod
    def _bellman_check(
        tables: CoverageTables,
        totals: np.ndarray,
        last_point: np.ndarray) -> None:
        for l in range(1, len(totals)):
            if np.isnan(totals[l]):
                continue
            z = int(last_point[l])
            cost, _ = tables.best(z, l, count=False)
            if cost is None or cost + totals[z] != totals[l]:
                raise RuntimeError(
                    f"Forward table inconsistent at l={l}, z={z}")


    @classmethod
    def solve_a2(
        cls,
        instance: Instance,
        tables: CoverageTables,
        n: int) -> Solution:
        """
        Capped MinSum over depot prefixes:

            S_i(l, N) = min over z <= l of f_i(z, l) + S_{i-1}(z, N - n_i(z, l))

        with S_0(0, N) = 0. Choosing z = l leaves depot i idle.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        tables : CoverageTables
            Chains of every depot, with cap at least n.
        n : Int
            Drone cap.

        Raises
        ------
        InfeasibleInstanceError
            When S_m(L, n) is infeasible.

        Returns
        -------
        Solution
            The A2 cover with at most n drones, one (possibly empty)
            segment per depot.

        """
        if n < 1:
            raise ValueError(f"Drone cap must be at least 1, got {n}")

        L = instance.L
        previous = np.full((L + 1, n + 1), np.nan)
        previous[0, :] = 0.0
        choices = []

        for depot in instance.depots:
            current = np.full((L + 1, n + 1), np.nan)
            choice = np.full((L + 1, n + 1), -1, dtype=int)
            for l in range(L + 1):
                best = np.full(n + 1, np.nan)
                best_z = np.full(n + 1, -1, dtype=int)
                candidates = [int(z) for z in tables.starts(l, depot.index)]
                for z in candidates + [l]:
                    if z == l:
                        count, cost = 0, 0.0
                    else:
                        count, cost = tables.entry(depot.index, z, l)
                        if count is None or count > n:
                            continue

                    value = np.full(n + 1, np.nan)
                    value[count:] = cost + previous[z, :n + 1 - count]
                    better = ~np.isnan(value) & (
                        np.isnan(best) | (value < best - TOLERANCE))
                    best[better] = value[better]
                    best_z[better] = z

                current[l] = best
                choice[l] = best_z

            choices.append(choice)
            previous = current

        if np.isnan(previous[L, n]):
            raise InfeasibleInstanceError(
                f"No cover of the barrier uses at most {n} drones")

        # Backward recursion
        segments = []
        l, budget = L, n
        for depot, choice in zip(reversed(instance.depots), reversed(choices)):
            z = int(choice[l, budget])
            assignment = cls.extract_tours(tables, depot.index, z, l)
            segments.append(assignment)
            budget -= assignment.drones
            l = z
        if l != 0:
            raise RuntimeError(f"A2 backtrack ended at {l} instead of 0")
        segments.reverse()

        drones = sum(segment.drones for segment in segments)
        parts = sum(1 for segment in segments if not segment.segment.empty)
        logger.info(
            "A2 solved with cap %d: objective %.9f, %d parts, %d drones, "
            "%d queries.",
            n, previous[L, n], parts, drones, tables.query_count)

        return Solution(
            algorithm='A2',
            objective=float(previous[L, n]),
            segments=tuple(segments),
            drones_used=drones,
            parts=parts)


    @classmethod
    def solve(
        cls,
        instance: Instance,
        algorithm: str = 'auto',
        max_drones: int | None = None,
        tables: CoverageTables | None = None,
        dense: bool = False,
        workers: int = 1,
        report: FeasibilityReport | None = None) -> Solution:
        """
        Screen the instance, run A1 and fall back to A2 when A1 uses more
        drones than the cap.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        algorithm : Str
            'auto', 'a1' or 'a2'. The default is 'auto'.
        max_drones : Int, optional
            Drone cap overriding instance.n. The default is None.
        tables : CoverageTables, optional
            Prebuilt tables. The default is None (built here).
        dense : Bool
            Materialise the aggregate table. The default is False.
        workers : Int
            Worker processes for the table build. The default is 1.
        report : FeasibilityReport, optional
            Result of an earlier feasibility_check on the same instance.
            The default is None (screened here).

        Raises
        ------
        InfeasibleInstanceError
            When the barrier cannot be covered, or not within the cap.

        Returns
        -------
        Solution

        """
        algorithm = algorithm.lower()
        if algorithm not in ('auto', 'a1', 'a2'):
            raise ValueError(f"Unknown algorithm {algorithm!r}")

        cap = max_drones if max_drones is not None else instance.n
        if algorithm == 'a2' and cap is None:
            raise ValueError("Algorithm a2 needs a drone cap")

        if report is None:
            report = cls.feasibility_check(instance)
        if not report.coverable:
            raise InfeasibleInstanceError(
                f"Barrier not coverable; gap {report.gap}", gap=report.gap)
        if cap is not None and algorithm != 'a1' and report.n_min > cap:
            raise InfeasibleInstanceError(
                f"At least {report.n_min} drones needed, cap is {cap}",
                n_min=report.n_min)

        if tables is None:
            tables = CoverageTables.build(
                instance,
                dense=dense,
                cap=cls.chain_depth(instance, algorithm, cap),
                workers=workers)

        diagnostics = {
            'n_min': report.n_min,
            'original_indices': list(instance.original_indices),
            }

        try:
            if algorithm == 'a2':
                solution = cls.solve_a2(instance, tables, cap)
            else:
                solution = cls.solve_a1(instance, tables)
                diagnostics['n_star'] = solution.drones_used
                if (algorithm == 'auto' and cap is not None
                        and solution.drones_used > cap):
                    logger.info(
                        "A1 uses %d drones, more than the cap %d; running A2.",
                        solution.drones_used, cap)
                    solution = cls.solve_a2(instance, tables, cap)
        except InfeasibleInstanceError as exc:
            exc.n_min = report.n_min
            raise

        return replace(solution, diagnostics=diagnostics)


    @staticmethod
    def chain_depth(instance: Instance, algorithm: str, cap: int | None) -> int:
        """
        Chain depth the tables need: L whenever A1 runs, so n_star is the
        unbounded drone count, and min(cap, L) for A2 alone.
        """
        if algorithm.lower() == 'a2' and cap is not None:
            return min(cap, instance.L)
        return instance.L


    @staticmethod
    def extract_tours(
        tables: CoverageTables,
        depot_index: int,
        a: int,
        b: int) -> SegmentAssignment:
        """
        Materialise the cheapest n_i(a, b) tours of a depot over [a, b].

        Parameters
        ----------
        tables : CoverageTables
            Chains of every depot.
        depot_index : Int
            1-based depot index.
        a : Int
            Left end.
        b : Int
            Right end.

        Returns
        -------
        SegmentAssignment
            The segment with one DroneTour per drone; no tours when a == b.

        """
        chains = tables.depot_chains(depot_index)
        points = Coverage.split_points(chains, a, b)
        if points is None:
            raise InfeasibleInstanceError(
                f"Depot {depot_index} cannot cover [{a}, {b}]")

        tours = tuple(
            DroneTour(
                start=start,
                end=end,
                length=TourGeometry.tour_length_between(chains.depot, start, end))
            for start, end in zip(points[:-1], points[1:]))

        return SegmentAssignment(
            depot_index=depot_index,
            segment=BarrierSegment(float(a), float(b)),
            tours=tours)


    @staticmethod
    def validate_solution(
        instance: Instance,
        solution: Solution,
        cap: int | None = None) -> list[str]:
        """
        Independent check of a solution against the instance.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        solution : Solution
            The cover to check.
        cap : Int, optional
            Drone cap. The default is None (unbounded).

        Returns
        -------
        list of str
            One message per violation; empty for a valid cover.

        """
        violations = []
        depots = {depot.index: depot for depot in instance.depots}
        boundary = 0.0
        previous_index = 0
        drones = 0
        total = 0.0

        for assignment in solution.segments:
            segment = assignment.segment
            label = f"segment [{segment.a}, {segment.b}]"
            depot = depots.get(assignment.depot_index)
            if depot is None:
                violations.append(f"{label}: unknown depot {assignment.depot_index}")
                continue
            if assignment.depot_index < previous_index:
                violations.append(f"{label}: depot order not preserved")
            previous_index = assignment.depot_index

            if segment.empty:
                if assignment.tours:
                    violations.append(f"{label}: empty segment carries tours")
                continue

            if abs(segment.a - boundary) > TOLERANCE:
                violations.append(f"{label}: expected to start at {boundary}")
            boundary = segment.b

            if not assignment.tours:
                violations.append(f"{label}: no tours")
                continue
            position = segment.a
            for tour in assignment.tours:
                if abs(tour.start - position) > TOLERANCE or tour.end < tour.start:
                    violations.append(
                        f"{label}: tour [{tour.start}, {tour.end}] breaks the tiling")
                position = tour.end
                length = TourGeometry.tour_length_between(depot, tour.start, tour.end)
                if abs(length - tour.length) > TOLERANCE:
                    violations.append(
                        f"{label}: tour length {tour.length} should be {length}")
                if length > instance.q + TOLERANCE:
                    violations.append(
                        f"{label}: tour length {length} exceeds budget {instance.q}")
                total += tour.length
                drones += 1
            if abs(position - segment.b) > TOLERANCE:
                violations.append(f"{label}: tours end at {position}")

        if abs(boundary - instance.L) > TOLERANCE:
            violations.append(f"cover ends at {boundary}, barrier ends at {instance.L}")
        if drones != solution.drones_used:
            violations.append(
                f"drones_used {solution.drones_used} but {drones} tours")
        if cap is not None and drones > cap:
            violations.append(f"{drones} drones exceed the cap {cap}")
        if abs(total - solution.objective) > OBJECTIVE_TOLERANCE:
            violations.append(
                f"objective {solution.objective} differs from tour total {total}")

        return violations


    @staticmethod
    def scale_instance(instance: Instance, factor: int) -> Instance:
        """
        Refine the partition grid: multiply every length by an integer
        factor so integer partition points fall on a 1/factor grid of the
        original units.
        """
        if factor < 1:
            raise ValueError(f"Grid scale must be a positive integer, got {factor}")

        return replace(
            instance,
            L=instance.L * factor,
            q=instance.q * factor,
            depots=tuple(
                Depot(index=depot.index, x=depot.x * factor, y=depot.y * factor)
                for depot in instance.depots))


    @staticmethod
    def rescale_solution(solution: Solution, factor: int) -> Solution:
        """Map a solution of a scaled instance back to original units."""
        if factor == 1:
            return solution

        segments = tuple(
            SegmentAssignment(
                depot_index=assignment.depot_index,
                segment=BarrierSegment(
                    assignment.segment.a / factor, assignment.segment.b / factor),
                tours=tuple(
                    DroneTour(
                        start=tour.start / factor,
                        end=tour.end / factor,
                        length=tour.length / factor)
                    for tour in assignment.tours))
            for assignment in solution.segments)

        return replace(
            solution,
            objective=solution.objective / factor,
            segments=segments,
            diagnostics={**solution.diagnostics, 'grid_scale': factor})
