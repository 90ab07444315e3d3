import csv
import logging
import os

import numpy as np

from bdmst_tools.embedding.embedded import embed_ising
from bdmst_tools.embedding.embedding import open_embedding
from bdmst_tools.ising.model import read_ising
from bdmst_tools.qsim import toys
from bdmst_tools.qsim.relaxation import pause_scan, regime_map
from bdmst_tools.qsim.schedule import AnnealSchedule, open_schedule
from bdmst_tools.qsim.spectrum import gap_trace, spectrum_trace, write_trace

logger = logging.getLogger(__name__)

TOYS = ('triangle', 'census')


def parse_floats(text):
    """Comma-separated numbers, or start:stop:count for an evenly spaced grid."""
    if ':' in text:
        start, stop, count = text.split(':')
        return list(np.linspace(float(start), float(stop), int(count)))
    return [float(value) for value in text.split(',') if value]


def load_model(toy='triangle', ising_path=None, embedding_path=None, j_ferro=2.0):
    """An embedded model: a named toy, or an Ising file placed by an embedding file."""
    if ising_path:
        return embed_ising(read_ising(ising_path), open_embedding(embedding_path),
                           j_ferro, enforce_range=False)
    if toy == 'census':
        return toys.census_toy(j_ferro)
    return toys.triangle_toy(j_ferro)


def load_schedule(path=None, t_a=1.0) -> AnnealSchedule:
    if path:
        return open_schedule(path, t_a)
    return AnnealSchedule(t_a)


def _trace_name(j_ferro):
    return 'trace_jf{jf:g}.csv'.format(jf=j_ferro)


def cmd_gap_trace(model, j_ferro_list, s_grid, output, levels=4, schedule=None):
    """One trace CSV per chain strength; returns the written paths."""
    os.makedirs(output, exist_ok=True)
    paths = []
    for trace in gap_trace(model, j_ferro_list, s_grid, levels, schedule):
        path = os.path.join(output, _trace_name(trace.j_ferro))
        write_trace(trace, path)
        paths.append(path)
    return paths


def cmd_pause(model, s_p_grid, t_p, temperature, gamma0, output, schedule=None,
              levels=4, steps=1000, coupling='uniform'):
    """Final ground-state population against pause location, plus the regimes."""
    os.makedirs(output, exist_ok=True)
    schedule = schedule or AnnealSchedule()
    no_pause, scan = pause_scan(model, s_p_grid, t_p, temperature, gamma0,
                                schedule=schedule, k=levels, num_steps=steps,
                                coupling=coupling)
    path = os.path.join(output, 'pause_jf{jf:g}.csv'.format(jf=model.j_ferro))
    with open(path, 'w', newline='') as pause_file:
        writer = csv.writer(pause_file)
        writer.writerow(['s_p', 't_p', 'p_ground'])
        writer.writerow(['', repr(0.0), repr(no_pause)])
        for s_p, p_ground in zip(s_p_grid, scan):
            writer.writerow([repr(float(s_p)), repr(float(t_p)), repr(p_ground)])

    trace = spectrum_trace(model, np.linspace(0.01, 0.99, 99), 2, schedule)
    labels = regime_map(model, trace, temperature, schedule)
    regimes = os.path.join(output, 'regimes_jf{jf:g}.csv'.format(jf=model.j_ferro))
    with open(regimes, 'w', newline='') as regime_file:
        writer = csv.writer(regime_file)
        writer.writerow(['s', 'gap', 'regime'])
        for s, gap, label in zip(trace.s_grid, trace.gap, labels):
            writer.writerow([repr(float(s)), repr(float(gap)), label])
    best = int(np.argmax(scan)) if len(scan) else None
    if best is not None:
        logger.info("Best pause at s_p=%g: p_GS %.4f (no pause %.4f)",
                    s_p_grid[best], scan[best], no_pause)
    return path
