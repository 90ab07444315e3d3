import logging

import numpy as np

from bdmst_tools.embedding.embedded import EmbeddedIsing, unembed_reads
from bdmst_tools.samplers.annealing import SimulatedAnnealingSampler
from bdmst_tools.samplers.exhaustive import (
    MAX_EXHAUSTIVE_SPINS, codes_to_spins, exhaustive_energies)
from bdmst_tools.samplers.sampler import SamplerException

logger = logging.getLogger(__name__)

METHODS = ('exhaustive', 'sampled')


class Census:

    def __init__(self, ground, threshold, states, broken):
        self.ground = ground
        self.threshold = threshold
        self.states = states
        self.broken = broken

    @property
    def fraction(self) -> float:
        return self.broken / self.states if self.states else 0.0

    def __repr__(self):
        return "<Census {b}/{n} chain-broken below {t:g}>".format(
            b=self.broken, n=self.states, t=self.threshold)


def _threshold(energies, window, relative):
    ground = energies.min()
    if relative:
        return ground, ground + window * (energies.max() - ground)
    return ground, ground + window


def low_energy_census(embedded: EmbeddedIsing, energy_window, method='exhaustive',
                      relative=True, sampler=None, num_reads=1000, seed=None,
                      max_spins=MAX_EXHAUSTIVE_SPINS) -> Census:
    """Share of chain-broken states among those near the ground energy.

    ``energy_window`` is a fraction of the spectral width with
    ``relative``, otherwise an absolute energy. The sampled method counts
    distinct configurations among the reads and measures the window from
    the best read and the observed spread.
    """
    if energy_window < 0:
        raise SamplerException("Energy window cannot be negative")
    if method == 'exhaustive':
        energies = exhaustive_energies(embedded.ising, max_spins)
        ground, threshold = _threshold(energies, energy_window, relative)
        codes = np.flatnonzero(energies <= threshold + 1e-9)
        states = codes_to_spins(codes, embedded.num_qubits)
    elif method == 'sampled':
        sampler = sampler or SimulatedAnnealingSampler()
        reads = sampler.sample(embedded.ising, num_reads, seed=seed)
        states = np.array([read.spins for read in reads], dtype=int)
        energies = embedded.ising.energies(states)
        ground, threshold = _threshold(energies, energy_window, relative)
        states = states[energies <= threshold + 1e-9]
    else:
        raise SamplerException("Unknown census method {method}, use {known}".format(
            method=method, known=', '.join(METHODS)))
    _, broken = unembed_reads(states, embedded)
    census = Census(float(ground), float(threshold), len(states),
                    int(broken.any(axis=1).sum()))
    logger.info("Census at |J_F|=%g: %s", embedded.j_ferro, census)
    return census
