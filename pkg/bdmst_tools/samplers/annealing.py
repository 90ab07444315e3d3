import logging

import numba
import numpy as np
import scipy.sparse

from bdmst_tools.ising.model import IsingModel
from bdmst_tools.samplers.readset import ReadSet
from bdmst_tools.samplers.sampler import Sampler, SamplerException, timed

logger = logging.getLogger(__name__)


class SaSchedule:
    """Linear-in-beta sweep schedule with an optional pause.

    With ``pause_at`` set, beta is held at the value reached at that
    fraction of the ramp for ``pause_sweeps`` extra sweeps.
    """

    def __init__(self, sweeps=1000, beta_start=0.1, beta_end=10.0,
                 pause_at=None, pause_sweeps=0):
        if sweeps < 1:
            raise SamplerException("Schedule needs at least one sweep")
        if not 0 < beta_start <= beta_end:
            raise SamplerException(
                "Need 0 < beta_start <= beta_end, got {start}, {end}".format(
                    start=beta_start, end=beta_end))
        if pause_at is not None and not 0 <= pause_at <= 1:
            raise SamplerException("Pause location must lie in [0, 1]")
        if pause_sweeps < 0:
            raise SamplerException("Pause length cannot be negative")
        self.sweeps = int(sweeps)
        self.beta_start = float(beta_start)
        self.beta_end = float(beta_end)
        self.pause_at = pause_at
        self.pause_sweeps = int(pause_sweeps) if pause_at is not None else 0

    @classmethod
    def with_pause(cls, s_p, t_p, t_a=1.0, sweeps=1000, **kwargs):
        """Pause for a number of sweeps proportional to t_p / t_a."""
        if t_a <= 0:
            raise SamplerException("Anneal time must be positive")
        if s_p is None or t_p == 0:
            return cls(sweeps, **kwargs)
        return cls(sweeps, pause_at=s_p,
                   pause_sweeps=int(round(sweeps * t_p / t_a)), **kwargs)

    def betas(self) -> np.ndarray:
        ramp = np.linspace(self.beta_start, self.beta_end, self.sweeps)
        if not self.pause_sweeps:
            return ramp
        split = int(round(self.pause_at * (self.sweeps - 1)))
        hold = np.full(self.pause_sweeps, ramp[split])
        return np.concatenate([ramp[:split + 1], hold, ramp[split + 1:]])

    def to_dict(self):
        return {'sweeps': self.sweeps, 'beta_start': self.beta_start,
                'beta_end': self.beta_end, 'pause_at': self.pause_at,
                'pause_sweeps': self.pause_sweeps}

    def __eq__(self, other):
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return "<SaSchedule {sweeps} sweeps beta {start}->{end} pause {at}x{p}>".format(
            sweeps=self.sweeps, start=self.beta_start, end=self.beta_end,
            at=self.pause_at, p=self.pause_sweeps)


def coupling_matrix(ising: IsingModel):
    """Symmetric CSR matrix of the couplings."""
    rows, cols, values = ising.coupling_arrays()
    n = ising.num_spins
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate([values, values]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n)).tocsr()
    return matrix.indptr, matrix.indices, matrix.data


@numba.jit(nopython=True)
def _local_field(h, indptr, indices, data, spins, i):
    field = h[i]
    for k in range(indptr[i], indptr[i + 1]):
        field += data[k] * spins[indices[k]]
    return field


@numba.jit(nopython=True)
def _anneal(h, indptr, indices, data, betas, seeds, out):
    num_reads, n = out.shape
    for r in range(num_reads):
        np.random.seed(seeds[r])
        spins = out[r]
        for i in range(n):
            spins[i] = 1 if np.random.random() < 0.5 else -1
        for beta in betas:
            for i in range(n):
                delta = -2.0 * spins[i] * _local_field(
                    h, indptr, indices, data, spins, i)
                if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                    spins[i] = -spins[i]


def read_seeds(seed, num_reads):
    """One independent stream per read, derived from the master seed."""
    return np.random.SeedSequence(seed).generate_state(
        num_reads, dtype=np.uint32).astype(np.int64)


def simulated_annealing(ising: IsingModel, schedule: SaSchedule = None,
                        num_reads=1000, seed=None) -> ReadSet:
    """Independent Metropolis single-spin-flip anneals.

    Each read is the final configuration of one anneal.
    """
    if ising.num_spins < 1:
        raise SamplerException("Cannot anneal an empty model")
    if num_reads < 1:
        raise SamplerException("Need at least one read")
    schedule = schedule or SaSchedule()
    indptr, indices, data = coupling_matrix(ising)
    out = np.zeros((num_reads, ising.num_spins), dtype=np.int64)
    _anneal(ising.h.astype(np.float64), indptr.astype(np.int64),
            indices.astype(np.int64), data.astype(np.float64),
            schedule.betas(), read_seeds(seed, num_reads), out)
    meta = {'sampler': SimulatedAnnealingSampler.name, 'seed': seed,
            'num_reads': num_reads, 'schedule': schedule.to_dict()}
    return ReadSet.from_arrays(out, ising.energies(out), meta)


class SimulatedAnnealingSampler(Sampler):

    name = 'sa'

    def __init__(self, schedule: SaSchedule = None):
        self.schedule = schedule or SaSchedule()

    @timed
    def sample(self, ising, num_reads, seed=None):
        return simulated_annealing(ising, self.schedule, num_reads, seed)

    def describe(self):
        return {'sampler': self.name, 'schedule': self.schedule.to_dict()}
