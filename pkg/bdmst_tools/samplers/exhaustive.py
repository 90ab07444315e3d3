import logging

import numba
import numpy as np

from bdmst_tools.instances.graph import SizeGuardException
from bdmst_tools.ising.model import IsingModel
from bdmst_tools.samplers.annealing import coupling_matrix
from bdmst_tools.samplers.readset import ReadSet
from bdmst_tools.samplers.sampler import Sampler, SamplerException, timed

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_SPINS = 24
TOLERANCE = 1e-9


@numba.jit(nopython=True)
def _gray_walk(h, indptr, indices, data, offset, n, energies):
    """Visit every state by single flips; energies[code] for bit i = spin i up."""
    spins = -np.ones(n, dtype=np.int64)
    energy = offset
    for i in range(n):
        energy -= h[i]
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] > i:
                energy += data[k]
    code = 0
    energies[0] = energy
    for step in range(1, 2 ** n):
        flip = 0
        while not (step >> flip) & 1:
            flip += 1
        field = h[flip]
        for k in range(indptr[flip], indptr[flip + 1]):
            field += data[k] * spins[indices[k]]
        energy -= 2.0 * spins[flip] * field
        spins[flip] = -spins[flip]
        code ^= 1 << flip
        energies[code] = energy


def _guard(ising, max_spins):
    if ising.num_spins > max_spins:
        raise SizeGuardException(
            "Exhaustive enumeration limited to {limit} spins, model has {n}".format(
                limit=max_spins, n=ising.num_spins))


def codes_to_spins(codes, num_spins):
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(num_spins)) & 1) * 2 - 1


def exhaustive_energies(ising: IsingModel, max_spins=MAX_EXHAUSTIVE_SPINS):
    """Energy of every configuration, indexed by code (bit i set = spin i up)."""
    _guard(ising, max_spins)
    indptr, indices, data = coupling_matrix(ising)
    energies = np.zeros(2 ** ising.num_spins)
    _gray_walk(ising.h.astype(np.float64), indptr.astype(np.int64),
               indices.astype(np.int64), data.astype(np.float64),
               ising.offset, ising.num_spins, energies)
    return energies


def exhaustive_ground(ising: IsingModel, max_spins=MAX_EXHAUSTIVE_SPINS):
    """Exact minimum energy and every minimising configuration."""
    if ising.num_spins < 1:
        raise SamplerException("Cannot enumerate an empty model")
    energies = exhaustive_energies(ising, max_spins)
    ground = energies.min()
    codes = np.flatnonzero(energies <= ground + TOLERANCE)
    configs = codes_to_spins(codes, ising.num_spins)
    order = np.lexsort(configs.T[::-1])
    return float(ground), configs[order]


class ExhaustiveSampler(Sampler):
    """Reads drawn uniformly among the exact ground states."""

    name = 'exhaustive'

    def __init__(self, max_spins=MAX_EXHAUSTIVE_SPINS):
        self.max_spins = max_spins

    @timed
    def sample(self, ising, num_reads, seed=None):
        ground, configs = exhaustive_ground(ising, self.max_spins)
        rng = np.random.default_rng(seed)
        picks = configs[rng.integers(len(configs), size=num_reads)]
        meta = {'sampler': self.name, 'seed': seed, 'num_reads': num_reads,
                'ground_states': len(configs)}
        logger.debug("Sampling %d reads among %d ground states at %g",
                     num_reads, len(configs), ground)
        return ReadSet.from_arrays(picks, np.full(num_reads, ground), meta)
