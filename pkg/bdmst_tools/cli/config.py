"""Experiment configuration files.

A config is a YAML mapping with the sections below; every key is
optional and falls back to the default shown::

    instances:
      labels: all          # or a list of "graph/weights" labels
      delta: 2
      root: null           # null picks the max-degree vertex
    qubo:
      epsilon: 0           # 1 adds a margin above the largest weight
      preprocess: true
    embedding:
      hardware: chimera:16
      attempts: 30
      all_couplers: false
    sweep:
      t_a: 1.0
      s_p: {start: 0.2, stop: 0.5, step: 0.02}
      t_p: [1.0]
      j_ferro: {start: 1.0, stop: 2.0, step: 0.1}
      no_pause: true
    sampler:
      name: sa
      sweeps: 1000
      beta_start: 0.1
      beta_end: 10.0
    run:
      gauges: 100
      reads: 50000         # total per grid point, split evenly over gauges
      seed: 0
      workers: 1
    report:
      bootstraps: 100000
      seed: 0
    output: results
"""
import copy
import logging
import os

import numpy as np
import yaml

from bdmst_tools.instances.catalog import load_catalog

logger = logging.getLogger(__name__)

WORKERS_VARIABLE = 'BDMST_TOOLS_WORKERS'
SAMPLERS = ('sa', 'exhaustive')

DEFAULTS = {
    'instances': {'labels': 'all', 'delta': 2, 'root': None},
    'qubo': {'epsilon': 0, 'preprocess': True},
    'embedding': {'hardware': 'chimera:16', 'attempts': 30,
                  'all_couplers': False},
    'sweep': {'t_a': 1.0,
              's_p': {'start': 0.2, 'stop': 0.5, 'step': 0.02},
              't_p': [1.0],
              'j_ferro': {'start': 1.0, 'stop': 2.0, 'step': 0.1},
              'no_pause': True},
    'sampler': {'name': 'sa', 'sweeps': 1000, 'beta_start': 0.1,
                'beta_end': 10.0},
    'run': {'gauges': 100, 'reads': 50000, 'seed': 0, 'workers': 1},
    'report': {'bootstraps': 100000, 'seed': 0},
    'output': 'results',
}


class ConfigException(Exception):

    def __init__(self, message, key=None):
        if key:
            message = '{key}: {message}'.format(key=key, message=message)
        super().__init__(message)
        self.key = key


def _merge(defaults, values, path=''):
    if not isinstance(values, dict):
        raise ConfigException("expected a mapping", path or None)
    merged = copy.deepcopy(defaults)
    for key, value in values.items():
        dotted = '{path}.{key}'.format(path=path, key=key) if path else str(key)
        if key not in defaults:
            raise ConfigException("unknown key", dotted)
        if isinstance(defaults[key], dict) and key not in ('s_p', 'j_ferro'):
            merged[key] = _merge(defaults[key], value, dotted)
        else:
            merged[key] = value
    return merged


def expand_grid(value, key):
    """A list of numbers, a single number, or {start, stop, step} with stop included."""
    if isinstance(value, dict):
        try:
            start, stop, step = (float(value[k]) for k in ('start', 'stop', 'step'))
        except (KeyError, TypeError, ValueError):
            raise ConfigException("grid needs numeric start, stop and step", key)
        if step <= 0 or stop < start:
            raise ConfigException("grid needs step > 0 and stop >= start", key)
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if isinstance(value, list) and value:
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigException("grid values must be numbers", key)
    raise ConfigException("grid must be nonempty", key)


class ExperimentConfig:

    def __init__(self, values=None, path=None):
        self.path = path
        self.values = _merge(DEFAULTS, values or {})
        self._validate()

    def _validate(self):
        instances = self.values['instances']
        catalog = load_catalog()
        labels = instances['labels']
        if labels == 'all':
            self.labels = None
        elif isinstance(labels, list) and labels:
            for index, label in enumerate(labels):
                graph, _, weights = str(label).partition('/')
                if graph not in catalog.graphs or weights not in catalog.weights:
                    raise ConfigException(
                        "unknown instance {label!r}".format(label=label),
                        'instances.labels[{i}]'.format(i=index))
            self.labels = [str(label) for label in labels]
        else:
            raise ConfigException("expected 'all' or a list of labels",
                                  'instances.labels')
        if instances['delta'] not in (2, 3, 4):
            raise ConfigException("degree bound must be 2, 3 or 4", 'instances.delta')

        sweep = self.values['sweep']
        self.s_p_grid = expand_grid(sweep['s_p'], 'sweep.s_p')
        self.t_p_grid = expand_grid(sweep['t_p'], 'sweep.t_p')
        self.j_ferro_grid = expand_grid(sweep['j_ferro'], 'sweep.j_ferro')
        if any(not 0 <= s <= 1 for s in self.s_p_grid):
            raise ConfigException("pause locations must lie in [0, 1]", 'sweep.s_p')
        if any(t < 0 for t in self.t_p_grid):
            raise ConfigException("pause durations cannot be negative", 'sweep.t_p')
        if any(jf <= 0 for jf in self.j_ferro_grid):
            raise ConfigException("chain strengths must be positive", 'sweep.j_ferro')
        if sweep['t_a'] <= 0:
            raise ConfigException("anneal time must be positive", 'sweep.t_a')

        run = self.values['run']
        for key in ('gauges', 'reads', 'workers'):
            if not isinstance(run[key], int) or run[key] < 1:
                raise ConfigException("must be a positive integer",
                                      'run.{key}'.format(key=key))
        if run['reads'] < run['gauges']:
            raise ConfigException("need at least one read per gauge", 'run.reads')
        if self.values['sampler']['name'] not in SAMPLERS:
            raise ConfigException("sampler must be one of {names}".format(
                names=', '.join(SAMPLERS)), 'sampler.name')

    def __getitem__(self, section):
        return self.values[section]

    @property
    def workers(self) -> int:
        override = os.environ.get(WORKERS_VARIABLE)
        if override:
            try:
                return max(1, int(override))
            except ValueError:
                raise ConfigException("not an integer: {v!r}".format(v=override),
                                      WORKERS_VARIABLE)
        return self.values['run']['workers']

    @property
    def reads_per_gauge(self) -> int:
        return self.values['run']['reads'] // self.values['run']['gauges']

    @property
    def output(self) -> str:
        output = self.values['output']
        if self.path and not os.path.isabs(output):
            output = os.path.join(os.path.dirname(os.path.abspath(self.path)), output)
        return output

    def schedules(self):
        """(s_p, t_p) pairs of the sweep; (None, 0.0) is the unpaused anneal."""
        pairs = [(None, 0.0)] if self.values['sweep']['no_pause'] else []
        pairs += [(s_p, t_p) for t_p in self.t_p_grid for s_p in self.s_p_grid]
        return pairs

    def to_dict(self):
        return copy.deepcopy(self.values)


def open_config(path) -> ExperimentConfig:
    try:
        with open(path, 'r') as config_file:
            values = yaml.safe_load(config_file)
    except OSError as error:
        raise ConfigException("cannot read {path}: {error}".format(
            path=path, error=error))
    except yaml.YAMLError as error:
        raise ConfigException("invalid YAML in {path}: {error}".format(
            path=path, error=error))
    logger.debug("Loaded experiment config %s", path)
    return ExperimentConfig(values or {}, path)
