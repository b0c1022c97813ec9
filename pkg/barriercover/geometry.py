"""
Tour arithmetic for a single drone

A drone leaves its depot, descends to the barrier at a, travels along the
barrier to b and returns, so every tour is a triangle with one side on the
barrier.

"""
import math
from dataclasses import dataclass

import numpy as np

from barriercover.cover_params import TOLERANCE

# Below this margin the closed form divides by a vanishing K - x
_CLOSED_FORM_GUARD = 1e-7


@dataclass(frozen=True)
class Depot:
    """
    A depot above the barrier.

    Parameters
    ----------
    index : int
        1-based ordinal, assigned left to right by abscissa.
    x : float
        Abscissa in barrier units.
    y : float
        Ordinate in barrier units, y >= 0.

    """
    index: int
    x: float
    y: float

    def __post_init__(self) -> None:
        if self.y < 0:
            raise ValueError(
                f"Depot {self.index} has negative ordinate y={self.y}")


@dataclass(frozen=True)
class BarrierSegment:
    """Closed barrier interval [a, b]; a == b is the empty segment."""
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a > self.b:
            raise ValueError(f"Segment [{self.a}, {self.b}] has a > b")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def empty(self) -> bool:
        return self.a == self.b


@dataclass(frozen=True)
class ReachSpan:
    """
    Extreme unit segments a depot can serve: [A, A+1] is the leftmost and
    [B-1, B] the rightmost unit segment whose tour fits the budget.
    A and B are None when no unit segment fits.
    """
    A: int | None
    B: int | None

    @classmethod
    def unreachable(cls) -> 'ReachSpan':
        return cls(None, None)

    @property
    def reachable(self) -> bool:
        return self.A is not None


class TourGeometry():
    """
    Closed-form tour arithmetic: tour lengths, maximal reach under the
    budget and reach spans.

    """
    @staticmethod
    def distance(depot: Depot, u: float) -> float:
        """Euclidean distance from the depot to the barrier point (u, 0)."""
        return math.hypot(depot.x - u, depot.y)


    @staticmethod
    def tour_length_between(depot: Depot, a: float, b: float) -> float:
        """
        Length of the triangular tour depot -> (a, 0) -> (b, 0) -> depot.

        Parameters
        ----------
        depot : Depot
            The launching depot.
        a : Float
            Left end of the covered piece.
        b : Float
            Right end of the covered piece.

        Returns
        -------
        Float
            The tour length; for a == b the out-and-back distance.

        """
        return (math.hypot(depot.x - a, depot.y)
                + (b - a)
                + math.hypot(depot.x - b, depot.y))


    @classmethod
    def tour_length(cls, depot: Depot, seg: BarrierSegment) -> float:
        """Length of the tour covering seg from depot."""
        return cls.tour_length_between(depot, seg.a, seg.b)


    @staticmethod
    def reflect(depot: Depot, axis: float = 0.0) -> Depot:
        """Mirror image of the depot across the vertical line x = axis."""
        return Depot(index=depot.index, x=2.0 * axis - depot.x, y=depot.y)


    @classmethod
    def max_reach_right(
        cls,
        depot: Depot,
        s: float,
        q: float,
        limit: float | None = None) -> float | None:
        """
        Largest t >= s such that one drone covers [s, t] within budget q.

        Solves sqrt((x - t)^2 + y^2) = K - t with
        K = q - dist(depot, s) + s, which gives
        t = (K^2 - x^2 - y^2) / (2 (K - x)).

        Parameters
        ----------
        depot : Depot
            The launching depot.
        s : Float
            Left end of the piece.
        q : Float
            Tour budget.
        limit : Float, optional
            Upper clamp for t, normally the barrier length L. The default
            is None (unclamped).

        Returns
        -------
        Float or None
            The maximal right end, or None when the depot cannot even touch
            s within budget.

        """
        t = cls._reach_right(depot.x, depot.y, s, q)
        if t is None:
            return None
        if limit is not None:
            t = min(t, limit)
        return t


    @classmethod
    def max_reach_left(
        cls,
        depot: Depot,
        t: float,
        q: float,
        limit: float | None = None) -> float | None:
        """
        Smallest s <= t such that one drone covers [s, t] within budget q.
        Mirror image of max_reach_right.

        Parameters
        ----------
        depot : Depot
            The launching depot.
        t : Float
            Right end of the piece.
        q : Float
            Tour budget.
        limit : Float, optional
            Lower clamp for s, normally 0. The default is None (unclamped).

        Returns
        -------
        Float or None
            The minimal left end, or None when t is out of reach.

        """
        mirrored = cls._reach_right(-depot.x, depot.y, -t, q)
        if mirrored is None:
            return None
        s = -mirrored
        if limit is not None:
            s = max(s, limit)
        return s


    @staticmethod
    def reach_span(depot: Depot, q: float, L: int) -> ReachSpan:
        """
        Leftmost and rightmost unit segments the depot can cover.

        Parameters
        ----------
        depot : Depot
            The launching depot.
        q : Float
            Tour budget, q > 0.
        L : Int
            Barrier length.

        Returns
        -------
        ReachSpan
            A = min integer a with tour [a, a+1] <= q, B = max integer b
            with tour [b-1, b] <= q; unreachable if none fits.

        """
        lefts = np.arange(int(L), dtype=float)
        costs = (np.hypot(depot.x - lefts, depot.y)
                 + 1.0
                 + np.hypot(depot.x - lefts - 1.0, depot.y))
        fits = np.flatnonzero(costs <= q + TOLERANCE)
        if fits.size == 0:
            return ReachSpan.unreachable()

        return ReachSpan(A=int(fits[0]), B=int(fits[-1]) + 1)


    @staticmethod
    def unit_extent(depot: Depot, q: float) -> tuple[float, float] | None:
        """
        Continuous range of left ends s whose unit piece [s, s+1] fits the
        budget.

        The tour over [s, s+1] is the sum of the distances from the depot
        to two foci one unit apart, so the extreme s lie on an ellipse with
        semi-axes D/2 and sqrt(D^2/4 - 1/4), D = q - 1, centred half a
        unit left of the foot.

        Parameters
        ----------
        depot : Depot
            The launching depot.
        q : Float
            Tour budget.

        Returns
        -------
        Tuple or None
            (s_lo, s_hi), or None when no unit piece fits anywhere.

        """
        major = 0.5 * (q - 1.0)
        if major < 0.5 - TOLERANCE:
            return None

        minor_sq = major * major - 0.25
        if depot.y == 0.0:
            half = major
        elif minor_sq <= 0.0 or depot.y * depot.y > minor_sq * (1.0 + TOLERANCE):
            return None
        else:
            half = major * math.sqrt(max(0.0, 1.0 - depot.y * depot.y / minor_sq))

        centre = depot.x - 0.5

        return centre - half, centre + half


    @staticmethod
    def _reach_right(x: float, y: float, s: float, q: float) -> float | None:
        start = math.hypot(x - s, y)
        if 2.0 * start > q + TOLERANCE:
            return None

        K = q - start + s
        if K - x > _CLOSED_FORM_GUARD * max(1.0, abs(x)):
            t = (K * K - x * x - y * y) / (2.0 * (K - x))
        else:
            # Drone cannot pass the foot going right; fall back to bisection
            lo, hi = s, s + q + 1.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if math.hypot(x - s, y) + (mid - s) + math.hypot(x - mid, y) <= q + TOLERANCE:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-13 * max(1.0, abs(hi)):
                    break
            t = lo

        return max(t, s)
