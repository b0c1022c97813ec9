"""
Instance and solution documents

JSON in, JSON out. Solution lengths are written with a fixed number of
decimals so documents are byte-stable across runs.

"""
import json
import logging
import math
import re
from json import JSONEncoder
from typing import Any

import pandas as pd

from barriercover.cover_params import cover_params_dict
from barriercover.dp_solver import (
    DroneTour,
    InfeasibleInstanceError,
    Instance,
    SegmentAssignment,
    Solution,
)
from barriercover.geometry import BarrierSegment, Depot

logger = logging.getLogger(__name__)

_FIXED_TAG = '@@fixed@@'
_FIXED_PATTERN = re.compile(r'"' + _FIXED_TAG + r'(-?[0-9]+\.[0-9]+)"')


class InstanceParseError(ValueError):
    """
    Rejected instance document.

    Parameters
    ----------
    field : str
        Path of the offending field, e.g. 'depots[1].y'.
    message : str
        What is wrong with it.

    """
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


def _fixed_floats(obj: Any, decimals: int) -> Any:
    """Recursively tag float values for fixed-decimal output."""
    if isinstance(obj, dict):
        return {k: _fixed_floats(v, decimals) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fixed_floats(v, decimals) for v in obj]
    if isinstance(obj, float):
        return f"{_FIXED_TAG}{obj:.{decimals}f}"
    return obj


class _FixedConverter(JSONEncoder):
    """JSON encoder writing every float with a fixed number of decimals."""

    def __init__(self, *args: Any, decimals: int = 9, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.decimals = decimals

    def encode(self, obj: Any) -> str:
        text = super().encode(_fixed_floats(obj, self.decimals))
        return _FIXED_PATTERN.sub(r'\1', text)


class InstanceIO():
    """
    Parsing and serialisation of instances, solutions and table dumps.

    """
    @classmethod
    def parse_instance(cls, text: str) -> Instance:
        """
        Parse and validate an instance document.

        Parameters
        ----------
        text : Str
            JSON with barrier_length, path_budget, optional max_drones and
            depots as a list of {x, y}.

        Raises
        ------
        InstanceParseError
            Naming the offending field.

        Returns
        -------
        Instance
            Depots sorted by abscissa and re-indexed 1..m; their positions
            in the document are kept in original_indices.

        """
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceParseError('$', f"invalid JSON ({exc.msg})") from exc
        if not isinstance(document, dict):
            raise InstanceParseError('$', "expected a JSON object")

        L = cls._integer(document, 'barrier_length', minimum=1)
        q = cls._number(document, 'path_budget')
        if not q > 0:
            raise InstanceParseError('path_budget', f"must be positive, got {q}")

        n = None
        if document.get('max_drones') is not None:
            n = cls._integer(document, 'max_drones', minimum=1)

        raw_depots = document.get('depots')
        if raw_depots is None:
            raise InstanceParseError('depots', "missing field")
        if not isinstance(raw_depots, list):
            raise InstanceParseError('depots', "expected a list")
        if not raw_depots:
            raise InstanceParseError('depots', "at least one depot is required")

        points = []
        for position, raw in enumerate(raw_depots):
            path = f"depots[{position}]"
            if not isinstance(raw, dict):
                raise InstanceParseError(path, "expected an object with x and y")
            x = cls._number(raw, 'x', prefix=path)
            y = cls._number(raw, 'y', prefix=path)
            if y < 0:
                raise InstanceParseError(f"{path}.y", f"must be non-negative, got {y}")
            points.append((x, y, position))

        order = sorted(points, key=lambda point: point[0])
        for left, right in zip(order[:-1], order[1:]):
            if left[0] == right[0]:
                raise InstanceParseError(
                    f"depots[{right[2]}].x",
                    f"duplicates depots[{left[2]}].x = {left[0]}; depot "
                    f"abscissas must be pairwise distinct")

        depots = tuple(
            Depot(index=index, x=x, y=y)
            for index, (x, y, _) in enumerate(order, start=1))
        instance = Instance(
            L=L,
            q=q,
            depots=depots,
            n=n,
            original_indices=tuple(position + 1 for _, _, position in order))

        logger.debug("Parsed instance L=%d q=%s m=%d n=%s.", L, q, len(depots), n)

        return instance


    @staticmethod
    def _integer(document: dict, key: str, minimum: int) -> int:
        if key not in document:
            raise InstanceParseError(key, "missing field")
        value = document[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise InstanceParseError(key, f"expected an integer, got {value!r}")
        if value < minimum:
            raise InstanceParseError(key, f"must be at least {minimum}, got {value}")
        return value


    @staticmethod
    def _number(document: dict, key: str, prefix: str | None = None) -> float:
        path = f"{prefix}.{key}" if prefix else key
        if key not in document:
            raise InstanceParseError(path, "missing field")
        value = document[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InstanceParseError(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise InstanceParseError(path, f"must be finite, got {value}")
        return float(value)


    @staticmethod
    def write_instance(instance: Instance) -> str:
        """Serialise an instance; floats keep their full precision."""
        document: dict[str, Any] = {
            'barrier_length': int(instance.L),
            'path_budget': float(instance.q),
            }
        if instance.n is not None:
            document['max_drones'] = int(instance.n)
        document['depots'] = [
            {'x': float(depot.x), 'y': float(depot.y)}
            for depot in instance.depots
            ]

        return json.dumps(document, indent=2) + '\n'


    @staticmethod
    def solution_document(solution: Solution) -> dict[str, Any]:
        """Solution as a plain dictionary in canonical key order."""
        return {
            'algorithm': solution.algorithm,
            'feasible': True,
            'objective': float(solution.objective),
            'drones_used': int(solution.drones_used),
            'parts': int(solution.parts),
            'segments': [
                {
                    'depot_index': int(assignment.depot_index),
                    'a': float(assignment.segment.a),
                    'b': float(assignment.segment.b),
                    'drones': [
                        {
                            'start': float(tour.start),
                            'end': float(tour.end),
                            'tour_length': float(tour.length),
                        }
                        for tour in assignment.tours
                        ],
                }
                for assignment in solution.segments
                ],
            'diagnostics': dict(solution.diagnostics),
            }


    @classmethod
    def write_solution(cls, solution: Solution) -> str:
        """
        Serialise a solution with fixed-decimal lengths.

        Parameters
        ----------
        solution : Solution
            A solved cover.

        Returns
        -------
        Str
            JSON text ending in a newline.

        """
        decimals = cover_params_dict['solver_params']['float_decimals']
        text = json.dumps(
            cls.solution_document(solution),
            cls=_FixedConverter,
            decimals=decimals,
            indent=2)

        return text + '\n'


    @staticmethod
    def write_infeasible(algorithm: str, error: InfeasibleInstanceError) -> str:
        """Document reporting an infeasible run with n_min or the gap."""
        diagnostics: dict[str, Any] = {}
        if error.n_min is not None:
            diagnostics['n_min'] = int(error.n_min)
        if error.gap is not None:
            diagnostics['gap'] = [float(error.gap[0]), float(error.gap[1])]
        diagnostics['reason'] = str(error)
        document = {
            'algorithm': algorithm,
            'feasible': False,
            'diagnostics': diagnostics,
            }
        decimals = cover_params_dict['solver_params']['float_decimals']
        text = json.dumps(
            document, cls=_FixedConverter, decimals=decimals, indent=2)

        return text + '\n'


    @staticmethod
    def read_solution(text: str) -> Solution:
        """
        Parse a solution document written by write_solution.

        Raises
        ------
        ValueError
            For malformed or infeasible documents.

        """
        try:
            document = json.loads(text)
            if not document.get('feasible', False):
                raise ValueError("Document reports an infeasible run")
            segments = tuple(
                SegmentAssignment(
                    depot_index=int(raw['depot_index']),
                    segment=BarrierSegment(float(raw['a']), float(raw['b'])),
                    tours=tuple(
                        DroneTour(
                            start=float(tour['start']),
                            end=float(tour['end']),
                            length=float(tour['tour_length']))
                        for tour in raw['drones']))
                for raw in document['segments'])
            return Solution(
                algorithm=str(document['algorithm']),
                objective=float(document['objective']),
                segments=segments,
                drones_used=int(document['drones_used']),
                parts=int(document['parts']),
                diagnostics=dict(document.get('diagnostics', {})))
        except (KeyError, TypeError, AttributeError, json.JSONDecodeError) as exc:
            raise ValueError(f"Malformed solution document: {exc}") from exc


    @staticmethod
    def write_frame_csv(frame: pd.DataFrame) -> str:
        """CSV text of a tables or bench frame, header row first."""
        return frame.to_csv(index=False, lineterminator='\n')
