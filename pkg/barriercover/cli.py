"""
Command line entry point.

Exit status: 0 solved, 2 infeasible instance, 1 operational error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from barriercover.barrier import BarrierCover
from barriercover.bench import Bench
from barriercover.cover_params import (
    OBJECTIVE_TOLERANCE,
    cover_params_dict,
    init_params,
    thread_count,
)
from barriercover.coverage_tables import CoverageTables
from barriercover.dp_solver import InfeasibleInstanceError, MinSumSolver
from barriercover.instance_io import InstanceIO, InstanceParseError
from barriercover.oracle import BruteForce
from barriercover.svg_render import SvgRender

logger = logging.getLogger(__name__)

EXIT_SOLVED = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding='utf-8')
        logger.info("Wrote %s.", out)


def _load(path: str):
    return InstanceIO.parse_instance(Path(path).read_text(encoding='utf-8'))


def cmd_solve(args: argparse.Namespace) -> int:
    if args.algorithm == 'a2' and args.max_drones is None:
        instance = _load(args.instance)
        if instance.n is None:
            sys.stderr.write(
                "usage error: --algorithm a2 needs --max-drones or a "
                "max_drones field in the instance\n")
            return EXIT_ERROR

    try:
        cover = BarrierCover(
            instance=Path(args.instance),
            algorithm=args.algorithm,
            max_drones=args.max_drones,
            grid_scale=args.scale,
            dense=args.dense)
    except InfeasibleInstanceError as exc:
        _emit(InstanceIO.write_infeasible(args.algorithm.upper(), exc), args.out)
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE

    _emit(InstanceIO.write_solution(cover.solution), args.out)
    if args.svg:
        SvgRender.to_file(args.svg, cover.instance, cover.solution)

    return EXIT_SOLVED


def cmd_tables(args: argparse.Namespace) -> int:
    instance = _load(args.instance)
    params = init_params({})
    tables = CoverageTables.build(
        instance, cap=instance.L, workers=thread_count(params))
    frame = tables.frame(args.depot)
    _emit(InstanceIO.write_frame_csv(frame), args.out)

    return EXIT_SOLVED


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = _load(args.instance)
    cap = args.max_drones if args.max_drones is not None else instance.n
    result = BruteForce.oracle_minsum(instance, cap=cap, step=args.step)

    if result is None:
        report = {'feasible': False, 'cap': cap}
    else:
        report = {
            'feasible': True,
            'objective': round(result.objective, 9),
            'partition': list(result.partition),
            'assignments': [list(item) for item in result.assignments],
            'visited': result.visited,
            }

    status = EXIT_SOLVED if result is not None else EXIT_INFEASIBLE
    if args.compare:
        try:
            solution = MinSumSolver.solve(instance, max_drones=cap)
            solver_objective = solution.objective
        except InfeasibleInstanceError:
            solver_objective = None
        report['solver_objective'] = (
            None if solver_objective is None else round(solver_objective, 9))
        if result is None or solver_objective is None:
            agree = result is None and solver_objective is None
        else:
            agree = abs(result.objective - solver_objective) <= OBJECTIVE_TOLERANCE
        report['agree'] = agree
        if not agree:
            status = EXIT_ERROR

    sys.stdout.write(json.dumps(report, indent=2) + '\n')

    return status


def cmd_bench(args: argparse.Namespace) -> int:
    params = init_params({})
    frame = Bench.run_bench(
        sizes=args.sizes,
        m=args.depots,
        n=args.cap,
        seed=args.seed,
        workers=thread_count(params))
    _emit(InstanceIO.write_frame_csv(frame), args.out)
    for strategy, ratios in Bench.doubling_ratios(frame).items():
        logger.info("%s build-time doubling ratios: %s", strategy, ratios)

    return EXIT_SOLVED


def cmd_render(args: argparse.Namespace) -> int:
    instance = _load(args.instance)
    solution = InstanceIO.read_solution(
        Path(args.solution).read_text(encoding='utf-8'))
    _emit(SvgRender.render_svg(instance, solution), args.out)

    return EXIT_SOLVED


def build_parser() -> argparse.ArgumentParser:
    defaults = cover_params_dict['solver_params']
    parser = argparse.ArgumentParser(
        prog='barriercover',
        description="MinSum barrier coverage with depot-launched drones")
    parser.add_argument('--verbose', '-v', action='store_true',
                        help="log progress to stderr")
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', help="solve an instance")
    solve.add_argument('--instance', required=True)
    solve.add_argument('--algorithm', choices=['auto', 'a1', 'a2'],
                       default=defaults['algorithm'])
    solve.add_argument('--max-drones', type=int, default=None,
                       help="drone cap, overrides the document")
    solve.add_argument('--scale', type=int, default=defaults['grid_scale'],
                       help="partition grid refinement factor")
    solve.add_argument('--dense', action='store_true',
                       help="materialise the aggregate table")
    solve.add_argument('--out', default=None)
    solve.add_argument('--svg', default=None)
    solve.set_defaults(handler=cmd_solve)

    tables = commands.add_parser('tables', help="dump n_i and f_i as CSV")
    tables.add_argument('--instance', required=True)
    tables.add_argument('--depot', type=int, default=None)
    tables.add_argument('--out', default=None)
    tables.set_defaults(handler=cmd_tables)

    oracle = commands.add_parser('oracle', help="brute-force optimum")
    oracle.add_argument('--instance', required=True)
    oracle.add_argument('--max-drones', type=int, default=None)
    oracle.add_argument('--step', type=float, default=defaults['oracle_step'])
    oracle.add_argument('--compare', action='store_true',
                        help="fail unless the solver agrees")
    oracle.set_defaults(handler=cmd_oracle)

    bench = commands.add_parser('bench', help="time the table strategies")
    bench.add_argument('--sizes', type=int, nargs='+', default=defaults['bench_sizes'])
    bench.add_argument('--depots', type=int, default=defaults['bench_depots'])
    bench.add_argument('--cap', type=int, default=defaults['bench_cap'])
    bench.add_argument('--seed', type=int, default=defaults['bench_seed'])
    bench.add_argument('--out', default=None)
    bench.set_defaults(handler=cmd_bench)

    render = commands.add_parser('render', help="draw a solution as SVG")
    render.add_argument('--instance', required=True)
    render.add_argument('--solution', required=True)
    render.add_argument('--out', default=None)
    render.set_defaults(handler=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
        stream=sys.stderr)

    try:
        return args.handler(args)
    except (InstanceParseError, OSError, ValueError, RuntimeError) as exc:
        logger.debug("Command %s failed.", args.command, exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
