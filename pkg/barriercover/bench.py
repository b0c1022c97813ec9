"""
Preprocessing benchmark

Seeded random instances, timed under the compact chain tables and under a
dense table that evaluates f(a, b) afresh for every integer pair.

"""
import logging
import time

import numpy as np
import pandas as pd

from barriercover.cover_params import cover_params_dict
from barriercover.coverage_tables import CoverageTables
from barriercover.dp_solver import Instance, InfeasibleInstanceError, MinSumSolver
from barriercover.geometry import Depot, TourGeometry

logger = logging.getLogger(__name__)


class Bench():
    """
    Random instance generation and the compact / dense-naive timing runs.

    """
    @staticmethod
    def random_instance(
        L: int,
        m: int,
        n: int | None,
        rng: np.random.Generator,
        retries: int | None = None) -> Instance:
        """
        Draw a coverable instance.

        Depot i sits near (i + 0.5) L / m with jitter of a quarter spacing,
        q is drawn in [1.3, 1.8] L / m and each ordinate in [0, q / 4),
        redrawn until the depot can serve at least one unit segment. The
        whole instance is redrawn until it is coverable with at most n
        drones.

        Parameters
        ----------
        L : Int
            Barrier length.
        m : Int
            Number of depots.
        n : Int, optional
            Drone cap, or None.
        rng : numpy.random.Generator
            Source of randomness.
        retries : Int, optional
            Redraw limit. The default is bench_retries.

        Raises
        ------
        RuntimeError
            When no draw succeeds within the retries.

        Returns
        -------
        Instance

        """
        if retries is None:
            retries = cover_params_dict['solver_params']['bench_retries']

        spacing = L / m
        for _ in range(retries):
            q = float(rng.uniform(1.3, 1.8) * spacing)
            xs = np.sort(
                (np.arange(m) + 0.5) * spacing
                + rng.uniform(-0.25, 0.25, size=m) * spacing)
            if np.any(np.diff(xs) <= 0):
                continue

            depots = []
            for index, x in enumerate(xs, start=1):
                for _ in range(retries):
                    depot = Depot(index=index, x=float(x), y=float(rng.uniform(0.0, q / 4)))
                    if TourGeometry.reach_span(depot, q, L).reachable:
                        depots.append(depot)
                        break
                else:
                    break
            if len(depots) < m:
                continue

            instance = Instance(L=L, q=q, depots=tuple(depots), n=n)
            report = MinSumSolver.feasibility_check(instance)
            if report.coverable and (n is None or report.n_min <= n):
                return instance

        raise RuntimeError(
            f"No coverable instance with L={L}, m={m}, n={n} after {retries} draws")


    @classmethod
    def run_bench(
        cls,
        sizes: list[int],
        m: int,
        n: int,
        seed: int,
        workers: int = 1,
        retries: int | None = None) -> pd.DataFrame:
        """
        Time both table strategies and an A1 solve for every barrier length.

        Parameters
        ----------
        sizes : list of Int
            Barrier lengths.
        m : Int
            Number of depots.
        n : Int
            Drone cap, also the chain depth.
        seed : Int
            Generator seed.
        workers : Int
            Worker processes for the chain builds. The default is 1.
        retries : Int, optional
            Redraw limit. The default is bench_retries.

        Returns
        -------
        DataFrame
            One record per (L, strategy) with the bench_headers columns.

        """
        if retries is None:
            retries = cover_params_dict['solver_params']['bench_retries']
        rng = np.random.default_rng(seed)
        records = []

        for L in sizes:
            for _ in range(retries):
                instance = cls.random_instance(L, m, n, rng, retries)
                try:
                    records.extend(cls._time_strategies(instance, n, workers))
                    break
                except InfeasibleInstanceError:
                    logger.warning("Instance with L=%d has no integer cover; redrawing.", L)
            else:
                raise RuntimeError(f"No solvable instance with L={L} after {retries} draws")

        return pd.DataFrame(
            records, columns=cover_params_dict['solver_params']['bench_headers'])


    @staticmethod
    def _time_strategies(instance: Instance, n: int, workers: int) -> list[tuple]:
        records = []
        for strategy, dense in (('compact', False), ('dense-naive', True)):
            start = time.perf_counter()
            tables = CoverageTables.build(
                instance, dense=dense, cap=min(n, instance.L), workers=workers)
            build_time = time.perf_counter() - start

            start = time.perf_counter()
            solution = MinSumSolver.solve_a1(instance, tables)
            solve_time = time.perf_counter() - start

            logger.info(
                "L=%d %s: build %.3fs, solve %.3fs, objective %.9f.",
                instance.L, strategy, build_time, solve_time, solution.objective)
            records.append((
                instance.L,
                instance.m,
                n,
                strategy,
                build_time,
                tables.query_count,
                solve_time,
                solution.objective))

        return records


    @staticmethod
    def doubling_ratios(frame: pd.DataFrame) -> dict[str, list[float]]:
        """
        Build-time ratio between consecutive barrier lengths, per strategy.
        """
        ratios = {}
        for strategy, rows in frame.groupby('strategy', sort=True):
            times = rows.sort_values('L')['build_time_s'].to_numpy()
            ratios[strategy] = (times[1:] / times[:-1]).tolist()

        return ratios
