import argparse
import logging
import os
import re
import sys
from fractions import Fraction

from bdmst_tools.cli.config import ConfigException, open_config
from bdmst_tools.cli.report import cmd_report
from bdmst_tools.cli.run import cmd_run
from bdmst_tools.cli.spectrum import (
    TOYS, cmd_gap_trace, cmd_pause, load_model, load_schedule, parse_floats)
from bdmst_tools.embedding.embedded import embed_ising
from bdmst_tools.embedding.embedding import (
    EmbeddingException, embedding_stats, find_embedding, open_embedding)
from bdmst_tools.embedding.hardware import open_hardware
from bdmst_tools.instances.catalog import catalog_instances, from_label
from bdmst_tools.instances.graph import (
    InstanceException, open_instance, save_instance)
from bdmst_tools.instances.oracle import require_exact
from bdmst_tools.ising.gauge import Gauge
from bdmst_tools.ising.model import (
    IsingException, qubo_to_ising, scale_to_range, write_ising)
from bdmst_tools.metrics.tts import MetricsException, p_success, tts
from bdmst_tools.qsim.relaxation import COUPLINGS
from bdmst_tools.qsim.schedule import SimulationException
from bdmst_tools.qubo.coordinate import write_qubo
from bdmst_tools.qubo.mapper import build_qubo
from bdmst_tools.qubo.variables import QuboException
from bdmst_tools.samplers.experiment import logical_reads
from bdmst_tools.samplers.readset import ReadSet, ReadStatus, open_readset
from bdmst_tools.samplers.sampler import SamplerException

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

KNOWN_ERRORS = (ConfigException, EmbeddingException, InstanceException,
                IsingException, MetricsException, QuboException,
                SamplerException, SimulationException, OSError)


def configure_logging(level_name, log_file=None):
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise ConfigException("unknown log level {name!r}".format(name=level_name),
                              '--log-level')
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers,
                        force=True)
    logging.getLogger('numba').setLevel(logging.WARNING)


def _instance(args):
    if os.path.exists(args.instance):
        return open_instance(args.instance)
    return from_label(args.instance, args.delta, args.root)


def _file_name(label):
    return re.sub(r'[^A-Za-z0-9]+', '-', label)


def do_export(args):
    os.makedirs(args.out, exist_ok=True)
    if args.labels:
        instances = [from_label(label, args.delta, args.root) for label in args.labels]
    else:
        instances = catalog_instances(args.delta, args.root)
    for instance in instances:
        save_instance(instance, os.path.join(
            args.out, '{name}.json'.format(name=_file_name(instance.label))))
    logger.info("Exported %d instances to %s", len(instances), args.out)
    return 0


def do_map(args):
    instance = _instance(args)
    qubo = build_qubo(instance, epsilon=args.epsilon,
                      preprocess=not args.no_preprocess)
    write_qubo(qubo, args.out)
    if args.ising:
        write_ising(scale_to_range(qubo_to_ising(qubo)), args.ising)
    print('{label}: {n} variables, penalty weight {a}'.format(
        label=instance.label, n=qubo.num_vars, a=qubo.penalty_weight))
    return 0


def do_embed(args):
    instance = _instance(args)
    logical = qubo_to_ising(build_qubo(instance, epsilon=args.epsilon))
    embedding = find_embedding(logical, open_hardware(args.hardware),
                               args.attempts, seed=args.seed)
    embedding.save(args.out)
    stats = embedding_stats(embedding, instance.m)
    print('{label}: {logical} logical -> {physical} physical qubits, '
          'chains up to {size}'.format(label=instance.label,
                                       logical=stats['logical_count'],
                                       physical=stats['physical_count'],
                                       size=stats['max_size']))
    return 0


def do_run(args):
    config = open_config(args.config)
    if args.workers:
        config.values['run']['workers'] = args.workers
    return cmd_run(config, args.output, args.fresh)


def do_gap_trace(args):
    model = load_model(args.toy, args.ising, args.embedding)
    paths = cmd_gap_trace(model, parse_floats(args.jf), parse_floats(args.s_grid),
                          args.out, args.levels, load_schedule(args.schedule, args.t_a))
    for path in paths:
        print(path)
    return 0


def do_pause(args):
    model = load_model(args.toy, args.ising, args.embedding, float(args.jf))
    path = cmd_pause(model, parse_floats(args.s_p), args.t_p, args.temperature,
                     args.gamma0, args.out, load_schedule(args.schedule, args.t_a),
                     args.levels, args.steps, args.coupling)
    print(path)
    return 0


def do_score(args):
    instance = _instance(args)
    qubo = build_qubo(instance, epsilon=args.epsilon)
    reads = open_readset(args.readset)
    if args.embedding:
        logical = scale_to_range(qubo_to_ising(qubo))
        embedded = embed_ising(logical, open_embedding(args.embedding), args.jf)
        physical = [read for read in reads if read.status == ReadStatus.sampled]
        if physical:
            converted = logical_reads(ReadSet(physical), embedded,
                                      Gauge.identity(logical.num_spins))
            kept = [read for read in reads if read.status != ReadStatus.sampled]
            reads = ReadSet(kept + converted.reads, reads.meta)
    probability = p_success(reads, require_exact(instance).cost, qubo, instance)
    t_tot = args.t_a + args.t_p
    print('{label}: p_success {p:.6g}, TTS {value} us over {n} reads'.format(
        label=instance.label, p=probability, value=tts(probability, t_tot),
        n=reads.num_reads))
    return 0


def do_report(args):
    for path in cmd_report(args.results, args.out, args.bootstraps, args.seed,
                           args.jf_no_pause, args.jf_pause):
        print(path)
    return 0


def _add_instance_arguments(parser):
    parser.add_argument('instance',
                        help='catalog label such as m5ver1/w2, or an instance JSON file')
    parser.add_argument('--delta', type=int, default=2, help='degree bound')
    parser.add_argument('--root', type=int, default=None)
    parser.add_argument('--epsilon', type=Fraction, default=Fraction(0),
                        help='penalty margin above the largest weight')


def _add_model_arguments(parser):
    parser.add_argument('--toy', choices=TOYS, default='triangle')
    parser.add_argument('--ising',
                        help='Ising coordinate file to simulate instead of a toy')
    parser.add_argument('--embedding', help='embedding JSON for --ising')
    parser.add_argument('--schedule', help='CSV with columns s, A, B')
    parser.add_argument('--t-a', type=float, default=1.0)
    parser.add_argument('--out', default='spectrum')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='bdmst-tools',
        description='Degree-bounded spanning trees on quantum annealers: '
                    'QUBO compilation, embedding, sampling and analysis.')
    parser.add_argument('--log-level', default='INFO')
    parser.add_argument('--log-file')
    commands = parser.add_subparsers(dest='command', required=True)

    instances = commands.add_parser('instances', help='benchmark instances')
    instance_commands = instances.add_subparsers(dest='action', required=True)
    export = instance_commands.add_parser('export', help='write instance JSON files')
    export.add_argument('--labels', nargs='*')
    export.add_argument('--delta', type=int, default=2)
    export.add_argument('--root', type=int, default=None)
    export.add_argument('--out', default='instances')
    export.set_defaults(handler=do_export)

    mapping = commands.add_parser('map', help='compile an instance to a QUBO')
    _add_instance_arguments(mapping)
    mapping.add_argument('--no-preprocess', action='store_true')
    mapping.add_argument('--out', required=True, help='QUBO coordinate file')
    mapping.add_argument('--ising', help='also write the scaled Ising model here')
    mapping.set_defaults(handler=do_map)

    embed = commands.add_parser('embed', help='minor-embed an instance')
    _add_instance_arguments(embed)
    embed.add_argument('--hardware', default='chimera:16')
    embed.add_argument('--attempts', type=int, default=30)
    embed.add_argument('--seed', type=int, default=0)
    embed.add_argument('--out', required=True)
    embed.set_defaults(handler=do_embed)

    run = commands.add_parser('run', help='run an experiment sweep')
    run.add_argument('config', help='YAML experiment file')
    run.add_argument('--output', help='overrides the config output directory')
    run.add_argument('--workers', type=int)
    run.add_argument('--fresh', action='store_true', help='ignore the manifest')
    run.set_defaults(handler=do_run)

    spectrum = commands.add_parser('spectrum', aliases=['qsim'],
                                   help='exact spectra and thermal relaxation')
    spectrum_commands = spectrum.add_subparsers(dest='action', required=True)
    trace = spectrum_commands.add_parser('gap-trace', help='lowest levels along s')
    _add_model_arguments(trace)
    trace.add_argument('--jf', default='2,4,8', help='chain strengths')
    trace.add_argument('--s-grid', default='0.01:0.99:99',
                       help='start:stop:count or list')
    trace.add_argument('--levels', type=int, default=4)
    trace.set_defaults(handler=do_gap_trace)
    pause = spectrum_commands.add_parser(
        'pause', help='ground-state population against s_p')
    _add_model_arguments(pause)
    pause.add_argument('--jf', type=float, default=2.0)
    pause.add_argument('--s-p', default='0.2:0.8:31')
    pause.add_argument('--t-p', type=float, default=10.0)
    pause.add_argument('--temperature', type=float, required=True)
    pause.add_argument('--gamma0', type=float, default=100.0)
    pause.add_argument('--levels', type=int, default=4)
    pause.add_argument('--steps', type=int, default=1000)
    pause.add_argument('--coupling', choices=COUPLINGS, default='uniform')
    pause.set_defaults(handler=do_pause)

    score = commands.add_parser('score', help='score an externally produced read set')
    _add_instance_arguments(score)
    score.add_argument('readset', help='gzip JSON-lines read set')
    score.add_argument('--embedding', help='unembed physical reads with this embedding')
    score.add_argument('--jf', type=float, default=1.0)
    score.add_argument('--t-a', type=float, default=1.0)
    score.add_argument('--t-p', type=float, default=0.0)
    score.set_defaults(handler=do_score)

    report = commands.add_parser('report', help='ensemble summaries of result files')
    report.add_argument('results', nargs='+')
    report.add_argument('--out', default='report')
    report.add_argument('--bootstraps', type=int, default=100000)
    report.add_argument('--seed', type=int, default=0)
    report.add_argument('--jf-no-pause', type=float)
    report.add_argument('--jf-pause', type=float)
    report.set_defaults(handler=do_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level, args.log_file)
        return args.handler(args)
    except KNOWN_ERRORS as error:
        logger.error("%s", error)
        return 2


if __name__ == '__main__':
    sys.exit(main())
