import csv
import logging
import os
from collections import OrderedDict

from bdmst_tools.metrics.ensemble import (
    DEFAULT_BOOTSTRAPS, bootstrap_percentiles, difference_of_medians,
    format_value, median, write_summary)
from bdmst_tools.metrics.results import (
    delta_table, open_results, optimal_j_ferro, paired_tts)
from bdmst_tools.metrics.tts import MetricsException

logger = logging.getLogger(__name__)

DELTA_FIELDS = ['s_p', 't_p', 'jf_no_pause', 'jf_pause', 'instances',
                'median_of_differences', 'mod_p35', 'mod_p65',
                'ratio_median', 'ratio_p35', 'ratio_p65', 'difference_of_medians']
HELPS_HURTS_FIELDS = ['s_p', 't_p', 'jf_no_pause', 'jf_pause', 'helps', 'hurts', 'ties',
                      'helps_median_ratio', 'hurts_median_ratio']


def _schedule_order(key):
    s_p, t_p, j_ferro = key
    return (s_p is not None, s_p or 0.0, t_p, j_ferro)


def _label(metric, s_p, t_p, j_ferro):
    schedule = 'no_pause' if s_p is None else 's_p={s:g},t_p={t:g}'.format(s=s_p, t=t_p)
    return '{metric}[{schedule},jf={jf:g}]'.format(metric=metric, schedule=schedule,
                                                  jf=j_ferro)


def load_results(paths):
    results = []
    for path in paths:
        _, rows = open_results(path)
        results.extend(rows)
    failed = [r for r in results if r.failed]
    if failed:
        logger.warning("Leaving out %d failed grid points", len(failed))
    return [r for r in results if not r.failed]


def grid_summaries(results, bootstraps, seed):
    """Bootstrap p_success and TTS over instances at every grid point."""
    groups = OrderedDict()
    for result in results:
        groups.setdefault((result.s_p, result.t_p, result.j_ferro), []).append(result)
    summaries = []
    for key in sorted(groups, key=_schedule_order):
        rows = groups[key]
        summaries.append(bootstrap_percentiles(
            [r.p_success for r in rows], bootstraps, seed=seed,
            metric=_label('p_success', *key)))
        summaries.append(bootstrap_percentiles(
            [r.tts for r in rows], bootstraps, seed=seed, metric=_label('tts', *key)))
    return summaries


def paired_schedules(results, j_no_pause=None, j_pause=None):
    """(s_p, t_p, jf without pause, jf with pause, pairs) per pause schedule."""
    schedules = sorted({(r.s_p, r.t_p) for r in results if r.s_p is not None})
    for s_p, t_p in schedules:
        try:
            chosen_no_pause = (j_no_pause if j_no_pause is not None
                               else optimal_j_ferro(results))
            chosen_pause = (j_pause if j_pause is not None
                            else optimal_j_ferro(results, s_p, t_p))
            pairs = paired_tts(results, s_p, t_p, chosen_no_pause, chosen_pause)
        except MetricsException as error:
            logger.warning("No ΔTTS for s_p=%g, t_p=%g: %s", s_p, t_p, error)
            continue
        yield s_p, t_p, chosen_no_pause, chosen_pause, pairs


def _schedule_fields(s_p, t_p, chosen_no_pause, chosen_pause):
    return [('s_p', format_value(s_p)), ('t_p', format_value(t_p)),
            ('jf_no_pause', format_value(chosen_no_pause)),
            ('jf_pause', format_value(chosen_pause))]


def delta_rows(results, bootstraps, seed, j_no_pause=None, j_pause=None):
    """Per pause schedule: median of per-instance ΔTTS and the difference of medians."""
    rows = []
    for s_p, t_p, chosen_no_pause, chosen_pause, pairs in paired_schedules(
            results, j_no_pause, j_pause):
        deltas = delta_table(pairs)
        differences = bootstrap_percentiles(
            [d.difference for d in deltas.values()], bootstraps, seed=seed)
        ratios = bootstrap_percentiles(
            [d.ratio for d in deltas.values()], bootstraps, seed=seed)
        no_pause = [values[0] for values in pairs.values()]
        pause = [values[1] for values in pairs.values()]
        rows.append(OrderedDict(_schedule_fields(
            s_p, t_p, chosen_no_pause, chosen_pause) + [
            ('instances', len(pairs)),
            ('median_of_differences', format_value(differences.median)),
            ('mod_p35', format_value(differences.p35)),
            ('mod_p65', format_value(differences.p65)),
            ('ratio_median', format_value(ratios.median)),
            ('ratio_p35', format_value(ratios.p35)),
            ('ratio_p65', format_value(ratios.p65)),
            ('difference_of_medians',
             format_value(difference_of_medians(no_pause, pause))),
        ]))
    return rows


def _median_ratio(deltas):
    return format_value(median([d.ratio for d in deltas])) if deltas else ''


def helps_hurts_rows(results, j_no_pause=None, j_pause=None):
    """Per pause schedule: instances the pause sped up or slowed down.

    Each group also gets the median of its ΔTTS / TTS(no pause); ties count
    in neither group.
    """
    rows = []
    for s_p, t_p, chosen_no_pause, chosen_pause, pairs in paired_schedules(
            results, j_no_pause, j_pause):
        deltas = list(delta_table(pairs).values())
        helps = [d for d in deltas if d.difference > 0]
        hurts = [d for d in deltas if d.difference < 0]
        rows.append(OrderedDict(_schedule_fields(
            s_p, t_p, chosen_no_pause, chosen_pause) + [
            ('helps', len(helps)),
            ('hurts', len(hurts)),
            ('ties', len(deltas) - len(helps) - len(hurts)),
            ('helps_median_ratio', _median_ratio(helps)),
            ('hurts_median_ratio', _median_ratio(hurts)),
        ]))
    return rows


def _write_rows(path, header, fields, rows):
    with open(path, 'w', newline='') as table:
        for key, value in header.items():
            table.write('# {key}: {value}\n'.format(key=key, value=value))
        writer = csv.DictWriter(table, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def cmd_report(paths, output, bootstraps=DEFAULT_BOOTSTRAPS, seed=0,
               j_no_pause=None, j_pause=None):
    """Write summary.csv, deltas.csv and helps_hurts.csv into ``output``.

    Returns the three paths.
    """
    results = load_results(paths)
    if not results:
        raise MetricsException("Nothing to report: no successful grid points")
    os.makedirs(output, exist_ok=True)
    header = OrderedDict([('seed', seed), ('B', bootstraps),
                          ('percentiles', 'linear, position q(n-1)')])

    summary_path = os.path.join(output, 'summary.csv')
    write_summary(grid_summaries(results, bootstraps, seed), summary_path, header)

    delta_path = os.path.join(output, 'deltas.csv')
    _write_rows(delta_path, header, DELTA_FIELDS,
                delta_rows(results, bootstraps, seed, j_no_pause, j_pause))

    helps_path = os.path.join(output, 'helps_hurts.csv')
    _write_rows(helps_path, header, HELPS_HURTS_FIELDS,
                helps_hurts_rows(results, j_no_pause, j_pause))
    logger.info("Wrote %s, %s and %s", summary_path, delta_path, helps_path)
    return summary_path, delta_path, helps_path
