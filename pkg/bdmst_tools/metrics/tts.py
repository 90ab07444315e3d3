import logging
import math
from collections import OrderedDict, namedtuple

from bdmst_tools.ising.model import spins_to_bits
from bdmst_tools.qubo.decode import decode

logger = logging.getLogger(__name__)

TARGET_PROBABILITY = 0.99


class MetricsException(Exception):
    pass


DeltaTts = namedtuple('DeltaTts', ['difference', 'ratio'])


def _successes(readset, oracle_cost, qubo, instance):
    """Per-read success flags, decoding each distinct assignment once."""
    instance = instance if instance is not None else qubo.instance
    verdicts = {}
    for read in readset:
        if read.failed:
            yield read, False
            continue
        if read.spins not in verdicts:
            if len(read.spins) != qubo.num_vars:
                raise MetricsException(
                    "Read has {n} spins, the QUBO {v} variables".format(
                        n=len(read.spins), v=qubo.num_vars))
            decoded = decode(spins_to_bits(read.spins), qubo, instance)
            verdicts[read.spins] = decoded.valid and decoded.cost == oracle_cost
        yield read, verdicts[read.spins]


def p_success(readset, oracle_cost, qubo, instance=None) -> float:
    """Share of all reads, chain-broken ones included, that decode to an optimal tree."""
    if readset.num_reads == 0:
        raise MetricsException("Cannot score an empty read set")
    hits = sum(read.multiplicity
               for read, success in _successes(readset, oracle_cost, qubo, instance)
               if success)
    return hits / readset.num_reads


def gauge_success(readset, oracle_cost, qubo, instance=None):
    """p_success of each gauge's reads, keyed by gauge index."""
    totals = OrderedDict()
    for read, success in _successes(readset, oracle_cost, qubo, instance):
        hits, reads = totals.get(read.gauge, (0, 0))
        totals[read.gauge] = (hits + success * read.multiplicity,
                              reads + read.multiplicity)
    return OrderedDict((gauge, hits / reads)
                       for gauge, (hits, reads) in totals.items())


def tts(p, t_tot) -> float:
    """Time to reach the optimum with 99% confidence.

    TTS = log(1 - 0.99) / log(1 - p) * t_tot, infinite when p = 0. At
    least one anneal is always needed, so p >= 0.99 gives t_tot.
    """
    if not 0.0 <= p <= 1.0:
        raise MetricsException("p_success must lie in [0, 1], got {p}".format(p=p))
    if t_tot <= 0:
        raise MetricsException("Total anneal time must be positive")
    if p == 0.0:
        return math.inf
    if p >= TARGET_PROBABILITY:
        return float(t_tot)
    return math.log(1.0 - TARGET_PROBABILITY) / math.log(1.0 - p) * t_tot


def delta_tts(tts_no_pause, tts_pause) -> DeltaTts:
    """TTS(no pause) - TTS(pause) and its ratio to TTS(no pause).

    Both infinite: the pause changed nothing, (0, 0). Only the no-pause
    run infinite: (inf, 1). Only the paused run infinite: (-inf, -inf).
    """
    no_pause_inf = math.isinf(tts_no_pause)
    pause_inf = math.isinf(tts_pause)
    if no_pause_inf and pause_inf:
        return DeltaTts(0.0, 0.0)
    if no_pause_inf:
        return DeltaTts(math.inf, 1.0)
    if pause_inf:
        return DeltaTts(-math.inf, -math.inf)
    difference = tts_no_pause - tts_pause
    return DeltaTts(difference, difference / tts_no_pause)
