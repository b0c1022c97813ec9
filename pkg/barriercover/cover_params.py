"""
Default barrier coverage solver parameters

"""
import copy
import os

# Absolute tolerance on tour lengths compared against the budget q
TOLERANCE = 1e-9

# Tolerance on objective values compared across solvers
OBJECTIVE_TOLERANCE = 1e-6

# Dictionary containing all the default parameters
cover_params_dict = {
    'solver_params':{
        'instance':None,
        'algorithm':'auto',
        'max_drones':None,
        'grid_scale':1,
        'dense':False,
        'oracle_step':1.0,
        'oracle_max_length':24,
        'float_decimals':9,
        'threads_env':'BRS_THREADS',
        'bench_sizes':[512, 1024, 2048],
        'bench_depots':8,
        'bench_cap':64,
        'bench_seed':0,
        'bench_retries':200,
        'table_headers':['depot', 'a', 'b', 'n_i', 'f_i'],
        'bench_headers':[
            'L',
            'm',
            'n',
            'strategy',
            'build_time_s',
            'query_count',
            'solve_time_s',
            'objective'
            ],
        'svg_params':{
            'width':800,
            'height':360,
            'margin':40,
            'barrier_width':3,
            'tour_width':1.5,
            'cover_width':6,
            'depot_radius':5,
            'font_size':11,
            'barrier_color':'black',
            'palette':[
                '#1f77b4',
                '#d62728',
                '#2ca02c',
                '#ff7f0e',
                '#9467bd',
                '#8c564b',
                '#e377c2',
                '#17becf'
                ]
            },
        }
    }


def init_params(inputs: dict) -> dict:
    """
    Solver settings for one run: the solver_params defaults, each
    replaced by the caller's value when one is given.

    Parameters
    ----------
    inputs : dict
        Keyword arguments of the caller, for example instance,
        algorithm, max_drones, grid_scale or dense.

    Returns
    -------
    dict
        A fresh copy; the module defaults are never modified.

    """
    defaults = cover_params_dict['solver_params']
    params = copy.deepcopy(defaults)
    params.update(inputs)

    return params


def thread_count(params: dict) -> int:
    """
    Number of worker processes allowed by the environment.

    Parameters
    ----------
    params : dict
        Parameter dictionary holding 'threads_env', the name of the
        environment variable to read.

    Returns
    -------
    int
        The configured worker count; 0 or unset means one per CPU.

    """
    raw = os.environ.get(params['threads_env'], '0').strip() or '0'
    try:
        threads = int(raw)
    except ValueError as exc:
        raise ValueError(
            f"{params['threads_env']} must be an integer, got {raw!r}") from exc
    if threads < 0:
        raise ValueError(
            f"{params['threads_env']} must be non-negative, got {threads}")
    if threads == 0:
        return os.cpu_count() or 1
    return threads
