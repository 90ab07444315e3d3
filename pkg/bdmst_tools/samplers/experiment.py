import logging
from collections import OrderedDict

import numpy as np

from bdmst_tools.embedding.embedded import (
    EmbeddedIsing, partial_gauge, unembed_reads)
from bdmst_tools.ising.gauge import Gauge, random_gauge, ungauge_read
from bdmst_tools.samplers.readset import Read, ReadSet, ReadStatus
from bdmst_tools.samplers.sampler import Sampler, SamplerException

logger = logging.getLogger(__name__)


def gauge_seeds(seed, num_gauges):
    """(gauge seed, sampler seed) per gauge, spawned from the master seed."""
    children = np.random.SeedSequence(seed).spawn(num_gauges)
    return [tuple(int(v) for v in child.generate_state(2)) for child in children]


def logical_reads(physical: ReadSet, embedded: EmbeddedIsing,
                  logical_gauge: Gauge, gauge_index=None) -> ReadSet:
    """Unembed and ungauge physical reads into the original logical frame.

    Chain-broken reads are kept with status chain_break and no energy.
    """
    reads = []
    for read in physical:
        logical, broken = unembed_reads([read.spins], embedded)
        if broken.any():
            reads.append(Read(read.spins, None, read.multiplicity,
                              ReadStatus.chain_break, gauge_index))
            continue
        spins = ungauge_read(logical[0], logical_gauge)
        reads.append(Read(spins, None, read.multiplicity,
                          ReadStatus.logical, gauge_index))
    return ReadSet(reads)


def run_experiment(embedded: EmbeddedIsing, num_gauges, reads_per_gauge,
                   sampler: Sampler, seed=None, use_gauges=True) -> ReadSet:
    """Sample an embedded model under partial gauges and pool the reads.

    Reads come back at the logical level in the original frame, tagged
    with the index of the gauge they were drawn under.
    """
    if num_gauges < 1 or reads_per_gauge < 1:
        raise SamplerException("Need at least one gauge and one read")
    num_vars = embedded.logical.num_spins
    records = []
    pooled = ReadSet()
    for index, (gauge_seed, sampler_seed) in enumerate(
            gauge_seeds(seed, num_gauges)):
        if use_gauges:
            logical_gauge = random_gauge(num_vars, gauge_seed)
        else:
            logical_gauge = Gauge.identity(num_vars)
        gauged = partial_gauge(embedded, logical_gauge)
        physical = sampler.sample(gauged.ising, reads_per_gauge,
                                  seed=sampler_seed)
        if physical.num_reads != reads_per_gauge:
            raise SamplerException(
                "Sampler returned {got} reads, asked for {want}".format(
                    got=physical.num_reads, want=reads_per_gauge))
        reads = logical_reads(physical, embedded, logical_gauge, index)
        logger.debug("Gauge %d (seed %d): %d of %d reads chain-broken",
                     index, gauge_seed, reads.count(ReadStatus.chain_break),
                     reads_per_gauge)
        pooled.extend(reads)
        records.append(OrderedDict([('gauge', index),
                                    ('gauge_seed', gauge_seed if use_gauges else None),
                                    ('sampler_seed', sampler_seed)]))

    for read in pooled:
        if read.status == ReadStatus.logical:
            read.energy = embedded.logical.energy(np.array(read.spins))
    pooled.meta = OrderedDict([
        ('seed', seed),
        ('num_gauges', num_gauges),
        ('reads_per_gauge', reads_per_gauge),
        ('num_reads', num_gauges * reads_per_gauge),
        ('j_ferro', embedded.j_ferro),
        ('gauges', records),
    ])
    pooled.meta.update(sampler.describe())
    result = pooled.aggregate()
    logger.info("Experiment at |J_F|=%g: %d reads, %.1f%% chain-broken",
                embedded.j_ferro, result.num_reads,
                100 * result.fraction(ReadStatus.chain_break))
    return result
