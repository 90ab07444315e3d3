import csv
import logging
from collections import OrderedDict

from bdmst_tools.metrics.ensemble import format_value, median, parse_value
from bdmst_tools.metrics.tts import MetricsException, delta_tts, tts

logger = logging.getLogger(__name__)

RESULT_FIELDS = ['instance', 't_a', 's_p', 't_p', 'jf', 'gauges', 'reads',
                 'p_success', 'tts', 'error']


class RunResult:
    """One instance at one schedule and chain strength.

    A row with ``error`` set records a grid point that failed; it carries
    no p_success.
    """

    def __init__(self, instance, t_a, s_p, t_p, j_ferro, gauges, reads,
                 p_success=None, error=None):
        self.instance = instance
        self.t_a = float(t_a)
        self.s_p = None if s_p is None else float(s_p)
        self.t_p = float(t_p) if s_p is not None else 0.0
        self.j_ferro = float(j_ferro)
        self.gauges = int(gauges)
        self.reads = int(reads)
        self.p_success = p_success
        self.error = error

    @property
    def t_tot(self) -> float:
        return self.t_a + self.t_p

    @property
    def tts(self):
        if self.p_success is None:
            return None
        return tts(self.p_success, self.t_tot)

    @property
    def schedule_key(self):
        return (self.t_a, self.s_p, self.t_p)

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_row(self):
        return OrderedDict([
            ('instance', self.instance),
            ('t_a', format_value(self.t_a)),
            ('s_p', format_value(self.s_p)),
            ('t_p', format_value(self.t_p)),
            ('jf', format_value(self.j_ferro)),
            ('gauges', self.gauges),
            ('reads', self.reads),
            ('p_success', format_value(self.p_success)),
            ('tts', format_value(self.tts)),
            ('error', self.error or ''),
        ])

    @classmethod
    def from_row(cls, row):
        missing = [field for field in RESULT_FIELDS if field not in row]
        if missing:
            raise MetricsException("Result row misses {fields}".format(
                fields=', '.join(missing)))
        try:
            return cls(row['instance'], float(row['t_a']), parse_value(row['s_p']),
                       parse_value(row['t_p']) or 0.0, float(row['jf']),
                       int(row['gauges']), int(row['reads']),
                       parse_value(row['p_success']), row['error'] or None)
        except ValueError as error:
            raise MetricsException("Malformed result row: {error}".format(
                error=error))

    def __eq__(self, other):
        return self.to_row() == other.to_row()

    def __repr__(self):
        return "<RunResult {instance} s_p={s_p} t_p={t_p} jf={jf} p={p}>".format(
            instance=self.instance, s_p=self.s_p, t_p=self.t_p,
            jf=self.j_ferro, p=self.p_success)


def write_results(results, path, header=None):
    with open(path, 'w', newline='') as results_file:
        for key, value in (header or {}).items():
            results_file.write('# {key}: {value}\n'.format(key=key, value=value))
        writer = csv.DictWriter(results_file, fieldnames=RESULT_FIELDS)
        writer.writeheader()
        for result in results:
            writer.writerow(result.to_row())


def open_results(path):
    """(header dict, results) from a results CSV."""
    header = OrderedDict()
    with open(path, 'r', newline='') as results_file:
        lines = []
        for line in results_file:
            if line.startswith('# ') and not lines:
                key, _, value = line[2:].rstrip('\n').partition(': ')
                header[key] = value
            else:
                lines.append(line)
    reader = csv.DictReader(lines)
    if reader.fieldnames != RESULT_FIELDS:
        raise MetricsException("{path} is not a results file: columns {fields}".format(
            path=path, fields=reader.fieldnames))
    return header, [RunResult.from_row(row) for row in reader]


def _scored(results, s_p, t_p):
    key_p = None if s_p is None else float(s_p)
    return [r for r in results if not r.failed and r.s_p == key_p and
            (key_p is None or r.t_p == float(t_p))]


def optimal_j_ferro(results, s_p=None, t_p=0.0) -> float:
    """Chain strength with the lowest median TTS over instances at one schedule.

    Ties go to the weaker chain.
    """
    by_strength = OrderedDict()
    for result in _scored(results, s_p, t_p):
        by_strength.setdefault(result.j_ferro, []).append(result.tts)
    if not by_strength:
        raise MetricsException("No results for s_p={s_p}, t_p={t_p}".format(
            s_p=s_p, t_p=t_p))
    best = min(sorted(by_strength), key=lambda jf: median(by_strength[jf]))
    logger.info("Optimal |J_F| for s_p=%s: %g", s_p, best)
    return best


def paired_tts(results, s_p, t_p, j_no_pause=None, j_pause=None):
    """Per-instance (TTS no pause, TTS pause), each at its own chain strength.

    Strengths default to the optimal ones for each schedule.
    """
    if j_no_pause is None:
        j_no_pause = optimal_j_ferro(results)
    if j_pause is None:
        j_pause = optimal_j_ferro(results, s_p, t_p)
    no_pause = {r.instance: r.tts for r in _scored(results, None, 0.0)
                if r.j_ferro == j_no_pause}
    pause = {r.instance: r.tts for r in _scored(results, s_p, t_p)
             if r.j_ferro == j_pause}
    common = sorted(set(no_pause) & set(pause))
    if not common:
        raise MetricsException("No instance has both schedules")
    return OrderedDict((label, (no_pause[label], pause[label])) for label in common)


def delta_table(pairs):
    """ΔTTS and ΔTTS / TTS(no pause) per instance."""
    return OrderedDict((label, delta_tts(*values)) for label, values in pairs.items())
