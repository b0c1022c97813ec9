"""
Static SVG figures of a cover: the barrier as a horizontal axis, depots as
points, each drone tour as a triangle and covered segments colour-coded by
depot.

"""
import logging
from pathlib import Path

from barriercover.cover_params import cover_params_dict
from barriercover.dp_solver import Instance, Solution
from barriercover.geometry import TourGeometry

logger = logging.getLogger(__name__)

# Tour lengths in a solution document carry 9 decimals
_MATCH_TOLERANCE = 1e-6


def _num(value: float) -> str:
    """Fixed 3-decimal coordinate, with -0 folded to 0."""
    text = f"{value:.3f}"
    return '0.000' if text == '-0.000' else text


def _svg_line(x1, y1, x2, y2, color, width):
    return (f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" '
            f'y2="{_num(y2)}" style="stroke-linecap:round;stroke:{color};'
            f'stroke-width:{width};" />\n')


def _svg_polygon(points, color, width):
    coords = ' '.join(f"{_num(x)},{_num(y)}" for x, y in points)
    return (f'<polygon points="{coords}" style="fill:none;stroke:{color};'
            f'stroke-width:{width};stroke-linejoin:round;" />\n')


def _svg_circle(x, y, r, color):
    return (f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{r}" '
            f'style="fill:{color};stroke:black;stroke-width:1;" />\n')


def _svg_text(x, y, text, font_size, anchor='middle'):
    return (f'<text x="{_num(x)}" y="{_num(y)}" font-family="sans-serif" '
            f'font-size="{font_size}" text-anchor="{anchor}">{text}</text>\n')


class SvgCanvas():
    """
    Accumulates SVG elements drawn in barrier coordinates; the barrier lies
    on y = 0 and depots above it.

    Parameters
    ----------
    x_range : tuple
        Smallest and largest abscissa to show.
    y_max : Float
        Largest ordinate to show.
    svg_params : dict
        Canvas size, margin and styling.

    """
    def __init__(
        self,
        x_range: tuple[float, float],
        y_max: float,
        svg_params: dict) -> None:

        self.params = svg_params
        self.x_min, x_max = x_range
        width = svg_params['width'] - 2 * svg_params['margin']
        height = svg_params['height'] - 2 * svg_params['margin']
        span_x = max(x_max - self.x_min, 1e-9)
        span_y = max(y_max, 1e-9)
        self.scale = min(width / span_x, height / span_y)
        self.origin_y = svg_params['height'] - svg_params['margin']
        self._output: list[str] = []

    def point(self, x: float, y: float) -> tuple[float, float]:
        """Canvas position of a barrier-plane point."""
        return (self.params['margin'] + (x - self.x_min) * self.scale,
                self.origin_y - y * self.scale)

    def print_line(self, x1, y1, x2, y2, color, width):
        self._output.append(
            _svg_line(*self.point(x1, y1), *self.point(x2, y2), color, width))

    def print_triangle(self, apex, left, right, color, width):
        self._output.append(_svg_polygon(
            [self.point(*apex), self.point(*left), self.point(*right)],
            color, width))

    def print_circle(self, x, y, r, color):
        self._output.append(_svg_circle(*self.point(x, y), r, color))

    def print_text(self, x, y, text, offset=0.0):
        cx, cy = self.point(x, y)
        self._output.append(
            _svg_text(cx, cy + offset, text, self.params['font_size']))

    def __str__(self) -> str:
        width, height = self.params['width'], self.params['height']
        return (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{width}" height="{height}" '
                f'viewBox="0 0 {width} {height}">\n'
                + ''.join(self._output)
                + '</svg>\n')


class SvgRender():
    """
    Drawing of instances and their covers.

    """
    @staticmethod
    def check_matches(instance: Instance, solution: Solution) -> None:
        """
        Check that a solution belongs to the instance.

        Raises
        ------
        ValueError
            When a segment names an unknown depot, leaves the barrier or
            carries tours whose lengths the depot cannot reproduce.

        """
        depots = {depot.index: depot for depot in instance.depots}
        for assignment in solution.segments:
            depot = depots.get(assignment.depot_index)
            if depot is None:
                raise ValueError(
                    f"Solution uses depot {assignment.depot_index}; instance "
                    f"has {len(depots)} depots")
            segment = assignment.segment
            if segment.a < -_MATCH_TOLERANCE or segment.b > instance.L + _MATCH_TOLERANCE:
                raise ValueError(
                    f"Segment [{segment.a}, {segment.b}] leaves the barrier "
                    f"[0, {instance.L}]")
            for tour in assignment.tours:
                length = TourGeometry.tour_length_between(depot, tour.start, tour.end)
                if abs(length - tour.length) > _MATCH_TOLERANCE:
                    raise ValueError(
                        f"Tour [{tour.start}, {tour.end}] of depot "
                        f"{depot.index} has length {length}, document says "
                        f"{tour.length}")


    @classmethod
    def render_svg(
        cls,
        instance: Instance,
        solution: Solution | None = None,
        svg_params: dict | None = None) -> str:
        """
        Draw an instance and, optionally, its cover.

        Parameters
        ----------
        instance : Instance
            The problem instance.
        solution : Solution, optional
            The cover to draw. The default is None (depots only).
        svg_params : dict, optional
            Styling overrides. The default is svg_params from cover_params.

        Returns
        -------
        Str
            SVG document; identical inputs give identical bytes.

        """
        params = dict(cover_params_dict['solver_params']['svg_params'])
        if svg_params:
            params.update(svg_params)
        palette = params['palette']

        if solution is not None:
            cls.check_matches(instance, solution)

        xs = [depot.x for depot in instance.depots]
        x_range = (min(0.0, *xs), max(float(instance.L), *xs))
        y_max = max(depot.y for depot in instance.depots)
        canvas = SvgCanvas(x_range, y_max if y_max > 0 else 1.0, params)

        canvas.print_line(
            0.0, 0.0, float(instance.L), 0.0,
            params['barrier_color'], params['barrier_width'])

        if solution is not None:
            depots = {depot.index: depot for depot in instance.depots}
            for assignment in solution.segments:
                color = palette[(assignment.depot_index - 1) % len(palette)]
                depot = depots[assignment.depot_index]
                if not assignment.segment.empty:
                    canvas.print_line(
                        assignment.segment.a, 0.0, assignment.segment.b, 0.0,
                        color, params['cover_width'])
                for tour in assignment.tours:
                    canvas.print_triangle(
                        (depot.x, depot.y), (tour.start, 0.0), (tour.end, 0.0),
                        color, params['tour_width'])

        for depot in instance.depots:
            color = palette[(depot.index - 1) % len(palette)]
            canvas.print_circle(depot.x, depot.y, params['depot_radius'], color)
            canvas.print_text(
                depot.x, depot.y, f"d{depot.index}",
                offset=-(params['depot_radius'] + 4))

        canvas.print_text(0.0, 0.0, '0', offset=params['font_size'] + 4)
        canvas.print_text(
            float(instance.L), 0.0, str(instance.L), offset=params['font_size'] + 4)

        return str(canvas)


    @classmethod
    def to_file(
        cls,
        path: str | Path,
        instance: Instance,
        solution: Solution | None = None) -> None:
        """Write the figure to path."""
        Path(path).write_text(cls.render_svg(instance, solution), encoding='utf-8')
        logger.info("Wrote figure to %s.", path)
