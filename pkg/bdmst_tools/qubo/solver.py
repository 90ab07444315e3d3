import itertools
import logging

import numpy as np

from bdmst_tools.instances.graph import SizeGuardException
from bdmst_tools.qubo.qubo import Qubo

logger = logging.getLogger(__name__)

TOLERANCE = 1e-7


class ExhaustiveResult:

    def __init__(self, energy, minimizers, core_size):
        self.energy = energy
        self.minimizers = minimizers
        self.core_size = core_size

    def __repr__(self):
        return "<ExhaustiveResult energy={energy} minimizers={count}>".format(
            energy=self.energy, count=len(self.minimizers))


def free_variables(qubo: Qubo):
    """Greedy independent set of the interaction graph, highest index first.

    Given the rest of the assignment, each of these variables can be
    minimised on its own.
    """
    neighbors = qubo.interaction_graph()
    free = []
    taken = set()
    for i in reversed(range(qubo.num_vars)):
        if neighbors[i] & taken:
            continue
        free.append(i)
        taken.add(i)
    return sorted(free)


def _core_bits(start, stop, width):
    states = np.arange(start, stop, dtype=np.int64)
    return ((states[:, None] >> np.arange(width)) & 1).astype(float)


def minimize_exhaustive(qubo: Qubo, max_core=26, chunk_bits=16,
                        max_minimizers=4096) -> ExhaustiveResult:
    """Exact minimum of a QUBO and every assignment attaining it."""
    free = free_variables(qubo)
    free_set = set(free)
    core = [i for i in range(qubo.num_vars) if i not in free_set]
    if len(core) > max_core:
        raise SizeGuardException(
            "Exhaustive search over {c} core variables exceeds {limit}".format(
                c=len(core), limit=max_core))
    logger.debug("Exhaustive QUBO search: %d core, %d free variables",
                 len(core), len(free))

    linear, matrix = qubo.to_arrays()
    symmetric = matrix + matrix.T
    core_linear = linear[core]
    core_matrix = matrix[np.ix_(core, core)]
    free_linear = linear[free]
    cross = symmetric[np.ix_(core, free)]
    offset = float(qubo.offset)

    best = np.inf
    best_states = []
    total = 1 << len(core)
    chunk = 1 << min(chunk_bits, len(core))
    for start in range(0, total, chunk):
        bits = _core_bits(start, min(start + chunk, total), len(core))
        fields = free_linear + bits @ cross
        energies = (offset + bits @ core_linear +
                    np.einsum('ki,ij,kj->k', bits, core_matrix, bits) +
                    np.minimum(fields, 0.0).sum(axis=1))
        low = energies.min()
        if low < best - TOLERANCE:
            best = low
            best_states = []
        if low <= best + TOLERANCE:
            hits = np.flatnonzero(energies <= best + TOLERANCE)
            best_states.extend((start + hits).tolist())

    minimizers = []
    for state in best_states:
        core_values = [(state >> k) & 1 for k in range(len(core))]
        bits = np.zeros(qubo.num_vars, dtype=int)
        bits[core] = core_values
        fields = free_linear + np.asarray(core_values, dtype=float) @ cross
        choices = []
        for field in fields:
            if field < -TOLERANCE:
                choices.append((1,))
            elif field > TOLERANCE:
                choices.append((0,))
            else:
                choices.append((0, 1))
        for values in itertools.product(*choices):
            bits[free] = values
            minimizers.append(tuple(int(b) for b in bits))
            if len(minimizers) >= max_minimizers:
                logger.warning("Stopped listing minimizers at %d",
                               max_minimizers)
                return ExhaustiveResult(
                    qubo.energy(minimizers[0]), minimizers, len(core))
    return ExhaustiveResult(qubo.energy(minimizers[0]), minimizers, len(core))
