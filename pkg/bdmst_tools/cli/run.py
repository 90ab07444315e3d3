"""Batch sweeps over instances, pause schedules and chain strengths.

Each grid point writes its own JSON record into ``points/`` through a
temporary file and a rename. Only the parent process touches
``manifest.json``, which lists the finished points so an interrupted run
picks up where it stopped. ``results.csv`` is rebuilt from the point
records in grid order at the end of every run.
"""
import hashlib
import json
import logging
import os
import re
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

import bdmst_tools
from bdmst_tools.embedding.embedded import embed_ising
from bdmst_tools.embedding.embedding import (
    Embedding, embedding_stats, find_embedding, open_embedding)
from bdmst_tools.embedding.hardware import open_hardware
from bdmst_tools.instances.catalog import catalog_instances, from_label
from bdmst_tools.instances.oracle import require_exact
from bdmst_tools.ising.model import qubo_to_ising, scale_to_range
from bdmst_tools.metrics.results import RunResult, write_results
from bdmst_tools.metrics.tts import p_success
from bdmst_tools.qubo.mapper import build_qubo
from bdmst_tools.samplers.annealing import SaSchedule, SimulatedAnnealingSampler
from bdmst_tools.samplers.exhaustive import ExhaustiveSampler
from bdmst_tools.samplers.experiment import run_experiment

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.json'
RESULTS = 'results.csv'


class GridPoint(namedtuple('GridPoint', ['index', 'instance', 's_p', 't_p', 'j_ferro'])):

    @property
    def key(self) -> str:
        label = re.sub(r'[^A-Za-z0-9]+', '-', self.instance)
        schedule = 'nopause' if self.s_p is None else 'sp{s}_tp{t}'.format(
            s=self.s_p, t=self.t_p)
        return '{label}_{schedule}_jf{jf}'.format(label=label, schedule=schedule,
                                                  jf=self.j_ferro)


def grid_points(config, labels):
    points = []
    for label in labels:
        for s_p, t_p in config.schedules():
            for j_ferro in config.j_ferro_grid:
                points.append(GridPoint(len(points), label, s_p, t_p, j_ferro))
    return points


def derived_seed(seed, *path) -> int:
    """A 32-bit seed for one stage of the run, independent of execution order."""
    return int(np.random.SeedSequence(seed, spawn_key=path).generate_state(1)[0])


def config_digest(config) -> str:
    """Hash of everything that changes results; worker count and output excluded."""
    values = config.to_dict()
    del values['run']['workers']
    del values['output']
    text = json.dumps(values, sort_keys=True)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def write_atomic(path, text):
    temporary = '{path}.tmp'.format(path=path)
    with open(temporary, 'w') as handle:
        handle.write(text)
    os.replace(temporary, path)


def _logical_model(label, config):
    instance = from_label(label, config['instances']['delta'],
                          config['instances']['root'])
    qubo = build_qubo(instance, epsilon=Fraction(str(config['qubo']['epsilon'])),
                      preprocess=config['qubo']['preprocess'])
    return instance, qubo, scale_to_range(qubo_to_ising(qubo))


def make_sampler(values, s_p, t_p):
    sampler = values['sampler']
    if sampler['name'] == 'exhaustive':
        return ExhaustiveSampler()
    schedule = SaSchedule.with_pause(
        s_p, t_p, t_a=values['sweep']['t_a'], sweeps=sampler['sweeps'],
        beta_start=sampler['beta_start'], beta_end=sampler['beta_end'])
    return SimulatedAnnealingSampler(schedule)


def run_point(task):
    """Sample and score one grid point; failures become an error row."""
    config, point = task['config'], GridPoint(*task['point'])
    run = config['run']
    reads_per_gauge = run['reads'] // run['gauges']
    try:
        instance, qubo, logical = _logical_model(point.instance, config)
        embedding = Embedding.from_dict(task['embedding'])
        embedded = embed_ising(logical, embedding, point.j_ferro,
                               all_couplers=config['embedding']['all_couplers'])
        sampler = make_sampler(config, point.s_p, point.t_p)
        reads = run_experiment(embedded, run['gauges'], reads_per_gauge,
                               sampler, seed=task['seed'])
        probability = p_success(reads, task['oracle_cost'], qubo, instance)
        result = RunResult(point.instance, config['sweep']['t_a'], point.s_p,
                           point.t_p, point.j_ferro, run['gauges'],
                           reads.num_reads, probability)
    except Exception as error:
        logger.error("Grid point %s failed: %s", point.key, error)
        result = _failed(point, config, error)
    write_atomic(task['path'], json.dumps(result.to_row()) + '\n')
    return point.index, result


def _failed(point, values, error):
    run = values['run']
    return RunResult(point.instance, values['sweep']['t_a'], point.s_p,
                     point.t_p, point.j_ferro, run['gauges'], 0,
                     error='{kind}: {message}'.format(
                         kind=type(error).__name__, message=error))


class ExperimentRun:

    def __init__(self, config, output=None, fresh=False):
        self.config = config
        self.output = output or config.output
        self.fresh = fresh
        self.digest = config_digest(config)
        self.points_dir = os.path.join(self.output, 'points')
        self.embeddings_dir = os.path.join(self.output, 'embeddings')

    def labels(self):
        if self.config.labels is not None:
            return self.config.labels
        instances = self.config['instances']
        return [i.label for i in catalog_instances(instances['delta'], instances['root'])]

    def _manifest_path(self):
        return os.path.join(self.output, MANIFEST)

    def load_manifest(self):
        path = self._manifest_path()
        if self.fresh or not os.path.exists(path):
            return set()
        with open(path, 'r') as manifest_file:
            manifest = json.load(manifest_file)
        if manifest.get('config') != self.digest:
            logger.warning("Manifest in %s belongs to another config; starting over",
                           self.output)
            return set()
        return set(manifest.get('done', []))

    def save_manifest(self, done):
        write_atomic(self._manifest_path(), json.dumps(
            {'config': self.digest, 'done': sorted(done)}, indent=2) + '\n')

    def embedding_for(self, index, label, logical, num_edges):
        path = os.path.join(self.embeddings_dir, '{label}.json'.format(
            label=re.sub(r'[^A-Za-z0-9]+', '-', label)))
        if os.path.exists(path) and not self.fresh:
            return open_embedding(path)
        settings = self.config['embedding']
        embedding = find_embedding(
            logical, open_hardware(settings['hardware']), settings['attempts'],
            seed=derived_seed(self.config['run']['seed'], 0, index))
        stats = embedding_stats(embedding, num_edges)
        logger.info("%s: %d logical -> %d physical qubits, max chain %d", label,
                    stats['logical_count'], stats['physical_count'], stats['max_size'])
        write_atomic(path, json.dumps(embedding.to_dict()) + '\n')
        return embedding

    def tasks(self, points, done):
        """Work for every unfinished point; failed instances yield error rows."""
        prepared = {}
        failures = []
        seed = self.config['run']['seed']
        for index, label in enumerate(self.labels()):
            try:
                instance, _, logical = _logical_model(label, self.config)
                embedding = self.embedding_for(index, label, logical, instance.m)
                prepared[label] = (embedding.to_dict(), require_exact(instance).cost)
            except Exception as error:
                logger.error("Cannot prepare %s: %s", label, error)
                prepared[label] = error
        tasks = []
        for point in points:
            path = os.path.join(self.points_dir, point.key + '.json')
            if point.key in done and os.path.exists(path):
                continue
            setup = prepared[point.instance]
            if isinstance(setup, Exception):
                result = _failed(point, self.config.values, setup)
                write_atomic(path, json.dumps(result.to_row()) + '\n')
                failures.append(point)
                continue
            tasks.append({'config': self.config.values, 'point': tuple(point),
                          'embedding': setup[0], 'oracle_cost': setup[1],
                          'seed': derived_seed(seed, 1, point.index),
                          'path': path})
        return tasks, failures

    def execute(self):
        """Run every unfinished grid point; returns the ordered results."""
        os.makedirs(self.points_dir, exist_ok=True)
        os.makedirs(self.embeddings_dir, exist_ok=True)
        points = grid_points(self.config, self.labels())
        done = self.load_manifest()
        tasks, failures = self.tasks(points, done)
        for point in failures:
            done.add(point.key)
        self.save_manifest(done)
        logger.info("%d grid points, %d already done, %d to run", len(points),
                    len(points) - len(tasks), len(tasks))

        by_index = {point.index: point for point in points}
        workers = self.config.workers
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for index, result in pool.map(run_point, tasks):
                    self._finish(by_index[index], result, done)
        else:
            for task in tasks:
                index, result = run_point(task)
                self._finish(by_index[index], result, done)
        return self.collect(points)

    def _finish(self, point, result, done):
        done.add(point.key)
        self.save_manifest(done)
        if not result.failed:
            logger.info("%s: p_success %.4g", point.key, result.p_success)

    def collect(self, points):
        results = []
        for point in points:
            path = os.path.join(self.points_dir, point.key + '.json')
            with open(path, 'r') as point_file:
                results.append(RunResult.from_row(json.load(point_file)))
        header = {'version': bdmst_tools.__version__,
                  'numpy': np.__version__,
                  'seed': self.config['run']['seed'],
                  'config': self.digest}
        write_results(results, os.path.join(self.output, RESULTS), header)
        return results


def cmd_run(config, output=None, fresh=False):
    """Run the sweep; exit code 0 only when no grid point failed."""
    results = ExperimentRun(config, output, fresh).execute()
    failed = sum(result.failed for result in results)
    if failed:
        logger.error("%d of %d grid points failed", failed, len(results))
        return 1
    return 0
