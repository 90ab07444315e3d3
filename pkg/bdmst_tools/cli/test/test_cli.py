import csv
import io
import json
import math
import os
import shutil
import tempfile
import unittest

import mock
import numpy as np

import bdmst_tools.cli.commandline as commandline
import bdmst_tools.cli.config as config
import bdmst_tools.cli.report as report
import bdmst_tools.cli.run as run
import bdmst_tools.cli.spectrum as spectrum
from bdmst_tools.metrics.results import RunResult, open_results, write_results
from bdmst_tools.metrics.tts import MetricsException, tts
from bdmst_tools.qsim import toys
from bdmst_tools.qsim.schedule import SimulationException
from bdmst_tools.samplers.sampler import SamplerException

SMALL_RUN = {
    'instances': {'labels': ['m4ver1/w2']},
    'embedding': {'hardware': 'chimera:8', 'attempts': 2},
    'sweep': {'s_p': [0.3], 't_p': [1.0], 'j_ferro': [1.5]},
    'sampler': {'sweeps': 200},
    'run': {'gauges': 2, 'reads': 20, 'seed': 11},
}


def read_rows(path):
    with open(path, 'r', newline='') as csv_file:
        lines = [line for line in csv_file if not line.startswith('#')]
    return list(csv.DictReader(lines))


def read_header(path):
    with open(path, 'r') as csv_file:
        return [line.rstrip('\n') for line in csv_file if line.startswith('# ')]


class TestConfig(unittest.TestCase):

    def test_defaults(self):
        self.sut = config.ExperimentConfig()
        self.assertIsNone(self.sut.labels)
        self.assertEqual(16, len(self.sut.s_p_grid))
        self.assertEqual(0.2, self.sut.s_p_grid[0])
        self.assertEqual(0.5, self.sut.s_p_grid[-1])
        self.assertEqual(11, len(self.sut.j_ferro_grid))
        self.assertEqual((None, 0.0), self.sut.schedules()[0])
        self.assertEqual(17, len(self.sut.schedules()))
        self.assertEqual(500, self.sut.reads_per_gauge)
        self.assertEqual(0, self.sut['qubo']['epsilon'])

    def test_expand_grid(self):
        self.assertEqual([1.0, 1.5, 2.0], config.expand_grid(
            {'start': 1, 'stop': 2, 'step': 0.5}, 'x'))
        self.assertEqual([0.4], config.expand_grid(0.4, 'x'))
        self.assertEqual([1.0, 3.0], config.expand_grid([1, 3], 'x'))
        with self.assertRaises(config.ConfigException):
            config.expand_grid({'start': 1, 'stop': 2}, 'x')
        with self.assertRaises(config.ConfigException):
            config.expand_grid([], 'x')

    def test_unknown_key_names_path(self):
        with self.assertRaises(config.ConfigException) as context:
            config.ExperimentConfig({'sweep': {'tp': [1.0]}})
        self.assertEqual('sweep.tp', context.exception.key)
        self.assertTrue(str(context.exception).startswith('sweep.tp:'))

    def test_unknown_label(self):
        with self.assertRaises(config.ConfigException) as context:
            config.ExperimentConfig(
                {'instances': {'labels': ['m5ver1/w2', 'm99ver1/w2']}})
        self.assertEqual('instances.labels[1]', context.exception.key)

    def test_rejects_bad_values(self):
        for values in ({'instances': {'delta': 5}},
                       {'sweep': {'s_p': [1.5]}},
                       {'run': {'gauges': 10, 'reads': 5}},
                       {'run': {'workers': 0}},
                       {'sampler': {'name': 'qpu'}}):
            with self.assertRaises(config.ConfigException):
                config.ExperimentConfig(values)

    def test_workers_from_environment(self):
        self.sut = config.ExperimentConfig({'run': {'workers': 2}})
        with mock.patch.dict(os.environ, {config.WORKERS_VARIABLE: '3'}):
            self.assertEqual(3, self.sut.workers)
        with mock.patch.dict(os.environ, {config.WORKERS_VARIABLE: 'many'}):
            with self.assertRaises(config.ConfigException):
                self.sut.workers
        with mock.patch.dict(os.environ, clear=True):
            self.assertEqual(2, self.sut.workers)

    def test_open_config(self):
        workspace = tempfile.mkdtemp()
        try:
            path = os.path.join(workspace, 'experiment.yaml')
            with open(path, 'w') as config_file:
                config_file.write('sweep:\n  t_p: 2\noutput: out\n')
            self.sut = config.open_config(path)
            self.assertEqual([2.0], self.sut.t_p_grid)
            self.assertEqual(os.path.join(workspace, 'out'), self.sut.output)
            with open(path, 'w') as config_file:
                config_file.write('sweep: [unclosed\n')
            with self.assertRaises(config.ConfigException):
                config.open_config(path)
        finally:
            shutil.rmtree(workspace)


class TestRun(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()
        cls.config = config.ExperimentConfig(SMALL_RUN)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def output(self, name):
        return os.path.join(self.workspace, name)

    def run_sweep(self, name, fresh=False):
        with mock.patch.dict(os.environ, clear=True):
            return run.cmd_run(self.config, self.output(name), fresh)

    def test_grid_points(self):
        points = run.grid_points(self.config, ['m4ver1/w2', 'm5ver1/w2'])
        self.assertEqual(4, len(points))
        self.assertEqual('m4ver1-w2_nopause_jf1.5', points[0].key)
        self.assertEqual('m4ver1-w2_sp0.3_tp1.0_jf1.5', points[1].key)
        self.assertEqual(list(range(4)), [p.index for p in points])

    def test_default_penalty_weight_is_largest_weight(self):
        instance, qubo, _ = run._logical_model('m4ver1/w2', self.config)
        self.assertEqual(instance.w_max, qubo.penalty_weight)

    def test_derived_seed_depends_on_path(self):
        self.assertEqual(run.derived_seed(3, 1, 0), run.derived_seed(3, 1, 0))
        self.assertNotEqual(run.derived_seed(3, 1, 0), run.derived_seed(3, 1, 1))
        self.assertNotEqual(run.derived_seed(3, 0, 0), run.derived_seed(3, 1, 0))

    def test_digest_ignores_workers(self):
        other = config.ExperimentConfig(
            dict(SMALL_RUN, run=dict(SMALL_RUN['run'], workers=4)))
        self.assertEqual(run.config_digest(self.config), run.config_digest(other))
        reseeded = config.ExperimentConfig(
            dict(SMALL_RUN, run=dict(SMALL_RUN['run'], seed=12)))
        self.assertNotEqual(run.config_digest(self.config), run.config_digest(reseeded))

    def test_run_writes_results(self):
        self.assertEqual(0, self.run_sweep('first'))
        header, rows = open_results(os.path.join(self.output('first'), run.RESULTS))
        self.assertEqual(2, len(rows))
        self.assertIsNone(rows[0].s_p)
        self.assertEqual(0.3, rows[1].s_p)
        for row in rows:
            self.assertEqual('m4ver1/w2', row.instance)
            self.assertEqual(20, row.reads)
            self.assertTrue(0.0 <= row.p_success <= 1.0)
        self.assertEqual('11', header['seed'])
        self.assertEqual(run.config_digest(self.config), header['config'])
        with open(os.path.join(self.output('first'), run.MANIFEST)) as manifest_file:
            manifest = json.load(manifest_file)
        points = run.grid_points(self.config, ['m4ver1/w2'])
        self.assertEqual(sorted(p.key for p in points), manifest['done'])

    def test_rerun_is_identical(self):
        self.run_sweep('one')
        self.run_sweep('two')
        with open(os.path.join(self.output('one'), run.RESULTS), 'rb') as first:
            with open(os.path.join(self.output('two'), run.RESULTS), 'rb') as second:
                self.assertEqual(first.read(), second.read())

    def test_resume_skips_finished_points(self):
        self.run_sweep('resume')
        results_path = os.path.join(self.output('resume'), run.RESULTS)
        with open(results_path, 'rb') as results_file:
            before = results_file.read()
        with mock.patch('bdmst_tools.cli.run.run_point') as run_point:
            self.run_sweep('resume')
            run_point.assert_not_called()
        with open(results_path, 'rb') as results_file:
            self.assertEqual(before, results_file.read())

    def test_missing_point_file_is_rerun(self):
        self.run_sweep('partial')
        points = run.grid_points(self.config, ['m4ver1/w2'])
        os.remove(os.path.join(self.output('partial'), 'points',
                               points[1].key + '.json'))
        with mock.patch('bdmst_tools.cli.run.run_point',
                        side_effect=run.run_point) as run_point:
            self.assertEqual(0, self.run_sweep('partial'))
            self.assertEqual(1, run_point.call_count)

    def test_failed_point_becomes_error_row(self):
        with mock.patch('bdmst_tools.cli.run.make_sampler',
                        side_effect=SamplerException("sampler offline")):
            self.assertEqual(1, self.run_sweep('failing'))
        _, rows = open_results(os.path.join(self.output('failing'), run.RESULTS))
        self.assertEqual(2, len(rows))
        for row in rows:
            self.assertTrue(row.failed)
            self.assertIn('sampler offline', row.error)
            self.assertIsNone(row.p_success)

    def test_unembeddable_instance_fails_its_points(self):
        values = dict(SMALL_RUN, embedding={'hardware': 'chimera:1', 'attempts': 1})
        self.sut = config.ExperimentConfig(values)
        with mock.patch.dict(os.environ, clear=True):
            self.assertEqual(1, run.cmd_run(self.sut, self.output('tiny')))
        _, rows = open_results(os.path.join(self.output('tiny'), run.RESULTS))
        self.assertTrue(all(row.failed for row in rows))


class TestSpectrumCommands(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def test_parse_floats(self):
        self.assertEqual([2.0, 4.0, 8.0], spectrum.parse_floats('2,4,8'))
        np.testing.assert_allclose([0.1, 0.5, 0.9], spectrum.parse_floats('0.1:0.9:3'))

    def test_gap_trace_files(self):
        output = os.path.join(self.workspace, 'traces')
        paths = spectrum.cmd_gap_trace(toys.triangle_toy(2.0), [2.0, 4.0, 8.0],
                                       np.linspace(0.05, 0.95, 19), output)
        self.assertEqual(['trace_jf2.csv', 'trace_jf4.csv', 'trace_jf8.csv'],
                         [os.path.basename(path) for path in paths])
        rows = read_rows(paths[1])
        self.assertEqual(19, len(rows))
        self.assertEqual(['s', 'E0', 'E1', 'E2', 'E3', 'gap', 'PL0', 'PL1', 'j_ferro'],
                         list(rows[0].keys()))
        self.assertEqual(4.0, float(rows[0]['j_ferro']))
        for row in rows:
            self.assertAlmostEqual(float(row['E1']) - float(row['E0']),
                                   float(row['gap']))

    def test_missing_schedule(self):
        with self.assertRaises(SimulationException):
            spectrum.load_schedule(os.path.join(self.workspace, 'absent.csv'))

    def test_pause_files(self):
        output = os.path.join(self.workspace, 'pause')
        path = spectrum.cmd_pause(toys.triangle_toy(2.0), [0.3, 0.6], 1.0, 0.3,
                                  10.0, output)
        rows = read_rows(path)
        self.assertEqual(3, len(rows))
        self.assertEqual('', rows[0]['s_p'])
        self.assertEqual([0.3, 0.6], [float(row['s_p']) for row in rows[1:]])
        for row in rows:
            self.assertTrue(0.0 <= float(row['p_ground']) <= 1.0)
        regimes = read_rows(os.path.join(output, 'regimes_jf2.csv'))
        self.assertEqual(99, len(regimes))
        labels = {row['regime'] for row in regimes}
        self.assertTrue(labels <= {'I', 'IIa', 'IIb', 'IIc', 'III'})

    def test_pause_with_strong_chains(self):
        output = os.path.join(self.workspace, 'strong')
        path = spectrum.cmd_pause(toys.triangle_toy(8.0), [0.3, 0.6], 1.0, 0.3,
                                  10.0, output)
        self.assertTrue(path.endswith('pause_jf8.csv'))
        rows = read_rows(path)
        self.assertEqual(3, len(rows))
        for row in rows:
            self.assertTrue(0.0 <= float(row['p_ground']) <= 1.0)


class TestReport(unittest.TestCase):

    def setUp(self):
        self.workspace = tempfile.mkdtemp()
        self.results_path = os.path.join(self.workspace, 'results.csv')

    def tearDown(self):
        shutil.rmtree(self.workspace)

    def write(self, rows):
        write_results(rows, self.results_path)
        return [self.results_path]

    def test_single_instance_matches_input(self):
        paths = self.write([
            RunResult('a', 1.0, None, 0.0, 1.6, 10, 100, 0.5),
            RunResult('a', 1.0, 0.3, 1.0, 1.6, 10, 100, 0.99),
        ])
        summary_path, delta_path, _ = report.cmd_report(
            paths, os.path.join(self.workspace, 'report'), bootstraps=200, seed=7)
        self.assertIn('# seed: 7', read_header(summary_path))
        self.assertIn('# B: 200', read_header(delta_path))
        summary = {row['metric']: row for row in read_rows(summary_path)}
        self.assertEqual(['p_success[no_pause,jf=1.6]', 'tts[no_pause,jf=1.6]',
                          'p_success[s_p=0.3,t_p=1,jf=1.6]',
                          'tts[s_p=0.3,t_p=1,jf=1.6]'], list(summary))
        row = summary['tts[no_pause,jf=1.6]']
        for field in ('median', 'p35', 'p65'):
            self.assertAlmostEqual(tts(0.5, 1.0), float(row[field]))
        self.assertEqual('200', row['B'])

        deltas = read_rows(delta_path)
        self.assertEqual(1, len(deltas))
        expected = tts(0.5, 1.0) - tts(0.99, 2.0)
        self.assertAlmostEqual(expected, float(deltas[0]['median_of_differences']))
        self.assertAlmostEqual(expected, float(deltas[0]['difference_of_medians']))
        self.assertAlmostEqual(expected / tts(0.5, 1.0), float(deltas[0]['ratio_median']))
        self.assertEqual('1', deltas[0]['instances'])

    def test_infinite_tts_is_serialized(self):
        paths = self.write([
            RunResult('b', 1.0, None, 0.0, 1.6, 10, 100, 0.0),
            RunResult('b', 1.0, 0.3, 1.0, 1.6, 10, 100, 0.5),
        ])
        summary_path, delta_path, _ = report.cmd_report(
            paths, os.path.join(self.workspace, 'report'), bootstraps=50)
        summary = {row['metric']: row for row in read_rows(summary_path)}
        self.assertEqual('inf', summary['tts[no_pause,jf=1.6]']['median'])
        delta = read_rows(delta_path)[0]
        self.assertEqual('inf', delta['median_of_differences'])
        self.assertEqual('1.0', delta['ratio_median'])
        self.assertEqual('inf', delta['difference_of_medians'])

    def test_helps_and_hurts(self):
        rows = []
        for label, no_pause, pause in [('a', 0.5, 0.99), ('b', 0.9, 0.5),
                                       ('c', 0.99, 0.99), ('d', 0.0, 0.0)]:
            rows.append(RunResult(label, 1.0, None, 0.0, 1.6, 10, 100, no_pause))
            rows.append(RunResult(label, 1.0, 0.3, 1.0, 1.6, 10, 100, pause))
        _, _, helps_path = report.cmd_report(
            self.write(rows), os.path.join(self.workspace, 'report'), bootstraps=20)
        self.assertEqual('helps_hurts.csv', os.path.basename(helps_path))
        self.assertIn('# B: 20', read_header(helps_path))
        self.sut = read_rows(helps_path)
        self.assertEqual(1, len(self.sut))
        row = self.sut[0]
        self.assertEqual(('1', '2', '1'), (row['helps'], row['hurts'], row['ties']))
        self.assertAlmostEqual(1.0 - tts(0.99, 2.0) / tts(0.5, 1.0),
                               float(row['helps_median_ratio']))
        hurts = [1.0 - tts(0.5, 2.0) / tts(0.9, 1.0),
                 1.0 - tts(0.99, 2.0) / tts(0.99, 1.0)]
        self.assertAlmostEqual(np.mean(hurts), float(row['hurts_median_ratio']))

    def test_helps_hurts_empty_group(self):
        paths = self.write([
            RunResult('a', 1.0, None, 0.0, 1.6, 10, 100, 0.5),
            RunResult('a', 1.0, 0.3, 1.0, 1.6, 10, 100, 0.99),
        ])
        self.sut = report.helps_hurts_rows(report.load_results(paths))
        self.assertEqual('', self.sut[0]['hurts_median_ratio'])
        self.assertEqual(0, self.sut[0]['hurts'])

    def test_failed_rows_are_left_out(self):
        paths = self.write([
            RunResult('a', 1.0, None, 0.0, 1.6, 10, 100, 0.5),
            RunResult('c', 1.0, None, 0.0, 1.6, 10, 0, error='Boom'),
        ])
        self.sut = report.load_results(paths)
        self.assertEqual(['a'], [r.instance for r in self.sut])

    def test_nothing_to_report(self):
        paths = self.write([RunResult('c', 1.0, None, 0.0, 1.6, 10, 0, error='Boom')])
        with self.assertRaises(MetricsException):
            report.cmd_report(paths, os.path.join(self.workspace, 'report'))


class TestCommandline(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def test_map_writes_qubo(self):
        path = os.path.join(self.workspace, 'm4ver1.qubo')
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
            self.assertEqual(0, commandline.main(['map', 'm4ver1/w2', '--out', path]))
        self.assertTrue(os.path.exists(path))
        self.assertIn('m4ver1/w2', stdout.getvalue())
        # Largest weight of w2 is 2; the margin is opt-in.
        self.assertIn('penalty weight 2\n', stdout.getvalue())
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
            self.assertEqual(0, commandline.main(
                ['map', 'm4ver1/w2', '--out', path, '--epsilon', '1']))
        self.assertIn('penalty weight 3\n', stdout.getvalue())

    def test_export_instances(self):
        output = os.path.join(self.workspace, 'exported')
        self.assertEqual(0, commandline.main(
            ['instances', 'export', '--labels', 'm5ver1/w2', 'm4ver1/w7',
             '--out', output]))
        self.assertEqual(['m4ver1-w7.json', 'm5ver1-w2.json'],
                         sorted(os.listdir(output)))

    def test_gap_trace_arguments(self):
        with mock.patch('bdmst_tools.cli.commandline.cmd_gap_trace',
                        return_value=[]) as command:
            self.assertEqual(0, commandline.main(
                ['spectrum', 'gap-trace', '--jf', '2,4', '--s-grid', '0.1:0.9:5',
                 '--out', self.workspace]))
        model, jf_list, s_grid, output, levels, schedule = command.call_args[0]
        self.assertEqual([2.0, 4.0], jf_list)
        self.assertEqual(5, len(s_grid))
        self.assertEqual(self.workspace, output)
        self.assertEqual(4, levels)
        self.assertEqual(1.0, schedule.t_a)

    def test_run_workers_override(self):
        path = os.path.join(self.workspace, 'experiment.yaml')
        with open(path, 'w') as config_file:
            config_file.write('instances:\n  labels: [m4ver1/w2]\n')
        with mock.patch('bdmst_tools.cli.commandline.cmd_run',
                        return_value=0) as command:
            self.assertEqual(0, commandline.main(['run', path, '--workers', '3']))
        experiment = command.call_args[0][0]
        self.assertEqual(3, experiment['run']['workers'])

    def test_known_errors_exit_two(self):
        self.assertEqual(2, commandline.main(
            ['run', os.path.join(self.workspace, 'missing.yaml')]))
        self.assertEqual(2, commandline.main(
            ['--log-level', 'chatty', 'instances', 'export']))
        self.assertEqual(2, commandline.main(
            ['map', 'm99ver1/w2', '--out', os.path.join(self.workspace, 'x')]))

    def test_report_command(self):
        results_path = os.path.join(self.workspace, 'scored.csv')
        write_results([RunResult('a', 1.0, None, 0.0, 1.6, 10, 100, 0.25)],
                      results_path)
        output = os.path.join(self.workspace, 'report')
        with mock.patch('sys.stdout', new_callable=io.StringIO):
            self.assertEqual(0, commandline.main(
                ['report', results_path, '--out', output, '--bootstraps', '20']))
        rows = read_rows(os.path.join(output, 'summary.csv'))
        self.assertEqual(2, len(rows))
        self.assertFalse(math.isinf(float(rows[1]['median'])))
