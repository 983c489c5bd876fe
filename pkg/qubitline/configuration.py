import os
from threading import Lock
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from dataclasses import dataclass, replace

THREADS_ENVIRONMENT_VARIABLE = 'QUBITLINE_THREADS'


@dataclass(frozen=True)
class SolverSettings:
    """
    Defaults used when an operation is called without explicit solver arguments
    """
    samples: int = 256
    refine_tol: float = 1e-8
    cp_tol: float = 1e-9
    threads: int = 0


def register_solver_parameter(
        *,
        samples: int = None,
        refine_tol: float = None,
        cp_tol: float = None,
        threads: int = None):
    parameters = {
        'samples': samples,
        'refine_tol': refine_tol,
        'cp_tol': cp_tol,
        'threads': threads,
    }
    parameters = {name: value for name, value in parameters.items() if value is not None}
    if not parameters:
        raise ValueError('user have to specify at least one solver parameter')
    for name in ('samples', 'threads'):
        if name in parameters and (isinstance(parameters[name], bool) or not isinstance(parameters[name], int)):
            raise TypeError(f'{name} argument have to be an int type. got {type(parameters[name])}')
    for name in ('refine_tol', 'cp_tol'):
        if name in parameters and not isinstance(parameters[name], (int, float)):
            raise TypeError(f'{name} argument have to be a float type. got {type(parameters[name])}')
    if parameters.get('samples', 2) < 2:
        raise ValueError(f'samples have to be at least 2. got {parameters["samples"]}')
    if parameters.get('threads', 0) < 0:
        raise ValueError(f'threads can not be negative. got {parameters["threads"]}')
    for name in ('refine_tol', 'cp_tol'):
        if parameters.get(name, 1.0) <= 0:
            raise ValueError(f'{name} have to be positive. got {parameters[name]}')
    configuration_map.set_configuration(**parameters)


def worker_count() -> int:
    """
    Number of worker threads to fan out on, 0 in the settings means one per CPU
    """
    threads = configuration_map.get_configuration().threads
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def ordered_map(function, items, *, parallel=True) -> list:
    """
    map() over a thread pool, results always come back in input order
    """
    items = list(items)
    workers = min(worker_count(), len(items)) if parallel else 1
    if workers <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


class _SolverConfigurationMap:
    def __init__(self):
        self.settings = None
        self.setup_lock = Lock()
        self.is_setup = False

    def __repr__(self):
        return f'{type(self).__name__}(settings={self.settings}, is_setup={self.is_setup})'

    @property
    def default_settings(self) -> SolverSettings:
        return SolverSettings(threads=_threads_from_environment())

    def set_configuration(self, **parameters):
        self._delayed_setup()
        self.settings = replace(self.settings, **parameters)
        self.get_configuration.cache_clear()

    @lru_cache()
    def get_configuration(self) -> SolverSettings:
        self._delayed_setup()
        return self.settings

    def _delayed_setup(self):
        """ Reads the environment on first use, not at import time """
        with self.setup_lock:
            if not self.is_setup:
                self.settings = self.default_settings
                self.is_setup = True


def _threads_from_environment() -> int:
    raw = os.environ.get(THREADS_ENVIRONMENT_VARIABLE, '').strip()
    if not raw:
        return 0
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f'{THREADS_ENVIRONMENT_VARIABLE} have to be an integer. got {raw!r}') from None
    if threads < 0:
        raise ValueError(f'{THREADS_ENVIRONMENT_VARIABLE} can not be negative. got {threads}')
    return threads


configuration_map = _SolverConfigurationMap()
