"""
Solve a MinSum barrier coverage instance end to end.
"""
import logging
from pathlib import Path

from barriercover.cover_params import init_params, thread_count
from barriercover.coverage_tables import CoverageTables
from barriercover.dp_solver import Instance, MinSumSolver
from barriercover.instance_io import InstanceIO

logger = logging.getLogger(__name__)


class BarrierCover():
    """
    Load an instance, screen it, build the coverage tables and solve.

    Parameters
    ----------
    instance : Instance / Str / Path
        The instance, or the path of an instance document.
    algorithm : Str
        'auto', 'a1' or 'a2'. The default is 'auto'.
    max_drones : Int
        Drone cap overriding the document's. The default is None.
    grid_scale : Int
        Integer refinement of the partition grid; partition points fall on
        multiples of 1 / grid_scale. The default is 1.
    dense : Bool
        Materialise the aggregate table. The default is False.

    Returns
    -------
    None.

    """
    def __init__(self, **kwargs) -> None:

        # Store initial inputs
        inputs = {}
        for key, value in kwargs.items():
            inputs[key] = value

        # Initialise system parameters
        params = init_params(inputs)

        instance = self.load_instance(params['instance'])
        scale = int(params['grid_scale'])
        working = MinSumSolver.scale_instance(instance, scale) if scale > 1 else instance

        report = MinSumSolver.feasibility_check(working)

        cap = params['max_drones'] if params['max_drones'] is not None else working.n
        tables = CoverageTables.build(
            working,
            dense=params['dense'],
            cap=MinSumSolver.chain_depth(working, params['algorithm'], cap),
            workers=thread_count(params))

        solution = MinSumSolver.solve(
            working,
            algorithm=params['algorithm'],
            max_drones=params['max_drones'],
            tables=tables,
            report=report)
        solution = MinSumSolver.rescale_solution(solution, scale)

        self.params = params
        self.instance = instance
        self.report = report
        self.tables = tables
        self.solution = solution


    @staticmethod
    def load_instance(source: Instance | str | Path) -> Instance:
        """Return source itself, or parse the document stored at source."""
        if isinstance(source, Instance):
            return source
        if source is None:
            raise ValueError("No instance given")

        text = Path(source).read_text(encoding='utf-8')
        logger.info("Loaded instance document %s.", source)

        return InstanceIO.parse_instance(text)
