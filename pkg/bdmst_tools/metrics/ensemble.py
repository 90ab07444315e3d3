"""Ensemble statistics over instances.

Infinite values stay in the ensemble. Percentiles interpolate linearly
between order statistics at position q (n - 1); an interval that touches
an infinity takes that infinity, with -inf winning an interval that spans
both.
"""
import csv
import logging
import math

import numpy as np

from bdmst_tools.metrics.tts import MetricsException, delta_tts

logger = logging.getLogger(__name__)

DEFAULT_BOOTSTRAPS = 100000
DEFAULT_PERCENTILES = (35, 50, 65)
SUMMARY_FIELDS = ['metric', 'median', 'p35', 'p65', 'B', 'seed']


def _interpolate(ordered, q):
    """Percentile q in [0, 1] of values sorted along the last axis."""
    n = ordered.shape[-1]
    position = q * (n - 1)
    lo = int(math.floor(position))
    hi = min(lo + 1, n - 1)
    fraction = position - lo
    low = ordered[..., lo]
    if fraction == 0.0:
        return low
    high = ordered[..., hi]
    with np.errstate(invalid='ignore'):
        value = low + fraction * (high - low)
    value = np.where(np.isposinf(high), np.inf, value)
    return np.where(np.isneginf(low), -np.inf, value)


def percentile(values, q) -> float:
    """Percentile q in [0, 100] of a list that may hold +-inf."""
    values = _as_array(values)
    return float(_interpolate(np.sort(values), q / 100.0))


def median(values) -> float:
    return percentile(values, 50)


def _as_array(values):
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise MetricsException("Empty ensemble")
    if np.any(np.isnan(values)):
        raise MetricsException("Ensemble holds NaN values")
    return values


class EnsembleSummary:

    def __init__(self, metric, median, p35, p65, bootstraps, seed, percentiles=None):
        self.metric = metric
        self.median = median
        self.p35 = p35
        self.p65 = p65
        self.bootstraps = bootstraps
        self.seed = seed
        self.percentiles = percentiles or {}

    def to_row(self):
        return {'metric': self.metric, 'median': format_value(self.median),
                'p35': format_value(self.p35), 'p65': format_value(self.p65),
                'B': self.bootstraps, 'seed': self.seed}

    def __eq__(self, other):
        return self.to_row() == other.to_row()

    def __repr__(self):
        return "<EnsembleSummary {metric} median={median} [{p35}, {p65}]>".format(
            metric=self.metric, median=self.median, p35=self.p35, p65=self.p65)


def bootstrap_percentiles(values, bootstraps=DEFAULT_BOOTSTRAPS,
                          percentiles=DEFAULT_PERCENTILES, seed=None,
                          metric='value', chunk=10000) -> EnsembleSummary:
    """Percentiles of the resampled median.

    Each of the ``bootstraps`` resamples draws len(values) values with
    replacement; chunk k uses the k-th child of the seed sequence.
    """
    values = _as_array(values)
    if bootstraps < 1:
        raise MetricsException("Need at least one bootstrap resample")
    n = len(values)
    low, high = int(np.isneginf(values).sum()), int(np.isposinf(values).sum())
    if low or high:
        logger.info("%s: %d of %d values rank below every finite value (-inf), "
                    "%d above (+inf)", metric, low, n, high)
    sequence = np.random.SeedSequence(seed)
    chunks = -(-bootstraps // chunk)
    statistics = []
    for k, child in enumerate(sequence.spawn(chunks)):
        size = min(chunk, bootstraps - k * chunk)
        rng = np.random.default_rng(child)
        resamples = values[rng.integers(0, n, size=(size, n))]
        statistics.append(_interpolate(np.sort(resamples, axis=1), 0.5))
    statistics = np.sort(np.concatenate(statistics))

    reported = {q: float(_interpolate(statistics, q / 100.0))
                for q in sorted(set(percentiles) | {35, 50, 65})}
    summary = EnsembleSummary(metric, reported[50], reported[35], reported[65],
                              bootstraps, seed, reported)
    logger.debug("Bootstrap %s over %d values: %s", metric, n, summary)
    return summary


def median_of_differences(no_pause, pause) -> float:
    """Median over instances of TTS(no pause) - TTS(pause)."""
    if len(no_pause) != len(pause):
        raise MetricsException("Paired ensembles differ in size")
    return median(delta_tts(a, b).difference for a, b in zip(no_pause, pause))


def difference_of_medians(no_pause, pause) -> float:
    return delta_tts(median(no_pause), median(pause)).difference


def format_value(value) -> str:
    """Floats as text, infinities as "inf" and "-inf"."""
    if value is None:
        return ''
    value = float(value)
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)


def parse_value(text):
    if text is None or text == '':
        return None
    try:
        return float(text)
    except ValueError:
        raise MetricsException("Not a number: {text!r}".format(text=text))


def write_summary(summaries, path, header=None):
    """Summary CSV; ``header`` items become leading "# key: value" lines."""
    with open(path, 'w', newline='') as summary_file:
        for key, value in (header or {}).items():
            summary_file.write('# {key}: {value}\n'.format(key=key, value=value))
        writer = csv.DictWriter(summary_file, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for summary in summaries:
            writer.writerow(summary.to_row())
