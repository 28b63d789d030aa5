"""
run configuration: INI file with one section per module, CLI flags on top
"""

import configparser
import logging
import os

import numpy as np

from .graph import DEFAULT_EPSILON
from .dynamics import param_keys
from .experiments import all_methods, ENSEMBLE_SIZE
from .integrate import DT, TOL, T_MAX
from .netgen import HALF_WIDTH, RHO_INOUT
from .reduction import all_modes

logger = logging.getLogger(__name__)

defaults = {
    'network':   {'edges': '', 'matrix': '', 'generator': '', 'sizes': '', 'densities': '',
                  'weight': '1.0', 'half_width': str(HALF_WIDTH), 'rho_inout': str(RHO_INOUT),
                  'expected': 'false', 'epsilon': str(DEFAULT_EPSILON)},
    'partition': {'file': ''},
    'dynamics':  {'name': 'neuronal', 'tau': '0.3', 'mu_loc': '10.0', 'gamma': '1.0',
                  'B': '0.1', 'C': '1.0', 'Kcap': '5.0', 'D': '6.0', 'E': '0.9', 'H': '0.1'},
    'reduction': {'method': 'spectral', 'mode': 'restricted'},
    'sweep':     {'d_min': '0.0', 'd_max': '1.0', 'count': '30'},
    'integrate': {'dt': str(DT), 'tol': str(TOL), 't_max': str(T_MAX), 'device': 'cpu', 'trajectory_stride': '0'},
    'refine':    {'schedule': ''},
    'perturb':   {'f_grid': '0,0.25,0.5,1.0', 'ensemble_size': str(ENSEMBLE_SIZE), 'n_jobs': '1'},
    'run':       {'seed': '', 'out': 'out'},
}

generators = ('sbm', 'het')


class ConfigError(ValueError):
    def __init__(self, problems):
        self.keys = [key for key, _ in problems]
        super().__init__('invalid configuration: ' + '; '.join(f'{k}: {m}' for k, m in problems))


def _floats(text):
    return [float(v) for v in text.replace(' ', '').split(',') if v != '']


def _matrix(text):
    return np.array([_floats(row) for row in text.replace('\n', '').split(';') if row.strip()])


def _boolean(text):
    states = configparser.ConfigParser.BOOLEAN_STATES
    if text.strip().lower() not in states:
        raise ValueError(f'not a boolean: {text!r}')
    return states[text.strip().lower()]


class RunConfig():
    network_source = None      # 'edges' | 'matrix' | 'sbm' | 'het'
    network_path   = None
    sizes          = ()
    densities      = None
    weight         = 1.0
    half_width     = HALF_WIDTH
    rho_inout      = RHO_INOUT
    expected       = False
    epsilon        = DEFAULT_EPSILON
    partition_path = None
    dynamics_name  = 'neuronal'
    dynamics_params = {}
    method         = 'spectral'
    mode           = 'restricted'
    d_min          = 0.0
    d_max          = 1.0
    count          = 30
    dt             = DT
    tol            = TOL
    t_max          = T_MAX
    device         = 'cpu'
    trajectory_stride = 0
    schedule       = []
    f_grid         = []
    ensemble_size  = ENSEMBLE_SIZE
    n_jobs         = 1
    seed           = None
    out            = 'out'
    parser         = None

    def __init__(self, path=None, overrides=None, require_network=True):
        self.require_network = require_network
        parser = configparser.ConfigParser()
        parser.optionxform = str  # parameter keys are case sensitive (B, C, Kcap, ...)
        parser.read_dict(defaults)
        if path is not None:
            if not os.path.isfile(path):
                raise ConfigError([('--config', f'file not found: {path}')])
            parser.read(path)
        for key, value in (overrides or {}).items():
            section, option = key.split('.', 1)
            if value is not None:
                parser.set(section, option, str(value))
        self.parser = parser
        self._parse()

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  Network: {self.network_source} {self.network_path or ''}\n"
        s += f"  Dynamics: {self.dynamics_name} {self.dynamics_params}\n"
        s += f"  Reduction: {self.method} ({self.mode})\n"
        s += f"  Sweep: d in [{self.d_min}, {self.d_max}], {self.count} points\n"
        s += f"  Seed: {self.seed}\n"
        return s

    ##########################################################
    def _parse(self):
        p = self.parser
        problems = []

        def get(section, key, cast):
            try:
                return cast(p.get(section, key))
            except (ValueError, TypeError) as e:
                problems.append((f'{section}.{key}', str(e) or 'invalid value'))
                return None

        unknown = [f'{s}.{k}' for s in p.sections() for k in p[s] if s not in defaults or k not in defaults[s]]
        unknown += [s for s in p.sections() if s not in defaults]
        problems += [(k, 'unknown key') for k in dict.fromkeys(unknown)]

        # network
        net = p['network']
        sources = [k for k in ('edges', 'matrix', 'generator') if net.get(k, '').strip()]
        if not sources and not self.require_network:
            self.network_source = None
        elif len(sources) != 1:
            problems.append(('network', f'exactly one of edges, matrix, generator is required, got {sources or "none"}'))
        elif sources[0] == 'generator':
            self.network_source = net['generator'].strip().lower()
            if self.network_source not in generators:
                problems.append(('network.generator', f'must be one of {", ".join(generators)}'))
            self.sizes = tuple(int(m) for m in get('network', 'sizes', _floats) or ())
            self.densities = get('network', 'densities', _matrix)
            if not self.sizes:
                problems.append(('network.sizes', 'required by the generator'))
            elif self.densities is None or self.densities.shape != (len(self.sizes), len(self.sizes)):
                problems.append(('network.densities', f'must be a {len(self.sizes)}x{len(self.sizes)} matrix'))
        else:
            self.network_source = sources[0]
            self.network_path = net[sources[0]].strip()
            if not os.path.isfile(self.network_path):
                problems.append((f'network.{sources[0]}', f'file not found: {self.network_path}'))
        self.weight     = get('network', 'weight', float)
        self.half_width = get('network', 'half_width', float)
        self.rho_inout  = get('network', 'rho_inout', float)
        self.expected   = get('network', 'expected', _boolean)
        self.epsilon    = get('network', 'epsilon', float)
        if self.epsilon is not None and self.epsilon <= 0:
            problems.append(('network.epsilon', 'must be positive'))

        # partition
        self.partition_path = p.get('partition', 'file').strip() or None
        if self.partition_path is not None and not os.path.isfile(self.partition_path):
            problems.append(('partition.file', f'file not found: {self.partition_path}'))

        # dynamics
        self.dynamics_name = p.get('dynamics', 'name').strip().lower()
        if self.dynamics_name not in param_keys:
            problems.append(('dynamics.name', f'must be one of {"|".join(param_keys)}'))
            self.dynamics_params = {}
        else:
            self.dynamics_params = {k: get('dynamics', k, float) for k in param_keys[self.dynamics_name]}

        # reduction
        self.method = p.get('reduction', 'method').strip().lower()
        if self.method not in all_methods + ('all',):
            problems.append(('reduction.method', f'must be one of {"|".join(all_methods + ("all",))}'))
        self.mode = p.get('reduction', 'mode').strip().lower()
        if self.mode not in all_modes:
            problems.append(('reduction.mode', f'must be one of {"|".join(all_modes)}'))

        # sweep & integrator
        self.d_min = get('sweep', 'd_min', float)
        self.d_max = get('sweep', 'd_max', float)
        self.count = get('sweep', 'count', int)
        if self.d_min is not None and self.d_min < 0:
            problems.append(('sweep.d_min', 'must be non-negative'))
        if self.count is not None and self.count < 2:
            problems.append(('sweep.count', 'must be at least 2'))
        self.dt    = get('integrate', 'dt', float)
        self.tol   = get('integrate', 'tol', float)
        self.t_max = get('integrate', 't_max', float)
        self.device = p.get('integrate', 'device').strip()
        self.trajectory_stride = get('integrate', 'trajectory_stride', int)

        # refinement & perturbation
        schedule = get('refine', 'schedule', _matrix)
        if schedule is not None and schedule.size and schedule.shape[1] != 2:
            problems.append(('refine.schedule', 'expected pairs "v_in,v_out; v_in,v_out; ..."'))
        self.schedule = [] if schedule is None or not schedule.size else [tuple(row) for row in schedule.tolist()]
        self.f_grid = get('perturb', 'f_grid', _floats) or []
        if any(not 0 <= f <= 1 for f in self.f_grid):
            problems.append(('perturb.f_grid', 'values must lie in [0, 1]'))
        self.ensemble_size = get('perturb', 'ensemble_size', int)
        self.n_jobs = get('perturb', 'n_jobs', int)

        # run
        seed = p.get('run', 'seed').strip()
        self.seed = None
        if seed:
            self.seed = get('run', 'seed', int)
            if self.seed is not None and not 0 <= self.seed < 2**64:
                problems.append(('run.seed', 'must be an unsigned 64-bit integer'))
        self.out = p.get('run', 'out').strip()

        if problems:
            raise ConfigError(problems)

    ##########################################################
    @property
    def is_randomized_network(self):
        return self.network_source in generators and not self.expected

    def require_seed(self, what):
        if self.seed is None:
            raise ConfigError([('run.seed', f'--seed is mandatory for {what}')])

    def methods(self):
        return list(all_methods) if self.method == 'all' else [self.method]

    def write(self, path):
        with open(path, 'w') as fh:
            self.parser.write(fh)
