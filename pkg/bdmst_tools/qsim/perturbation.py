import logging

import numpy as np

from bdmst_tools.qsim.hamiltonian import AnnealHamiltonian
from bdmst_tools.qsim.schedule import AnnealSchedule, SimulationException
from bdmst_tools.qsim.spectrum import (
    SpectrumTrace, aligned_mask, chain_diagonal, lowest_eigs)

logger = logging.getLogger(__name__)

DEGENERACY_TOLERANCE = 1e-6


def perturbation_gap_shift(trace: SpectrumTrace, lam):
    """First-order gap after weakening the chains by lam.

    Exact to first order for a single chain of two qubits, where
    <H_F> = 2 P_L - 1 for every level.
    """
    if lam < 0:
        raise SimulationException("Chain weakening must be non-negative")
    return trace.gap + 2 * trace.b_values * lam * (
        trace.p_logical[:, 1] - trace.p_logical[:, 0])


class LevelShift:

    def __init__(self, level, energy, predicted, exact, p_logical, degenerate):
        self.level = level
        self.energy = energy
        self.predicted = predicted
        self.exact = exact
        self.p_logical = p_logical
        self.degenerate = degenerate

    @property
    def shift(self) -> float:
        return self.predicted - self.energy

    @property
    def error(self) -> float:
        return abs(self.exact - self.predicted)

    def __repr__(self):
        return ("<LevelShift E{level} {energy:.6g} -> {predicted:.6g} "
                "(exact {exact:.6g}){flag}>").format(
            level=self.level, energy=self.energy, predicted=self.predicted,
            exact=self.exact, flag=' degenerate' if self.degenerate else '')


def energy_shift_check(embedded, s, lam, k=4, schedule=None,
                       degeneracy=DEGENERACY_TOLERANCE):
    """Predicted E_i + B lam <H_F>_i against exact levels at |J_F| - lam.

    Levels closer than ``degeneracy`` to a neighbour are flagged rather
    than trusted.
    """
    if lam < 0 or lam >= embedded.j_ferro:
        raise SimulationException(
            "Need 0 <= lam < |J_F|, got {lam}".format(lam=lam))
    schedule = schedule or AnnealSchedule()
    energies, vectors = lowest_eigs(AnnealHamiltonian(embedded, schedule).at(s),
                                    k + 1)
    weakened = embedded.with_j_ferro(embedded.j_ferro - lam)
    exact, _ = lowest_eigs(AnnealHamiltonian(weakened, schedule).at(s), k)
    weights = np.abs(vectors) ** 2
    hf = chain_diagonal(embedded) @ weights
    p_logical = weights[aligned_mask(embedded)].sum(axis=0)
    b = float(schedule.B(s))

    shifts = []
    for level in range(k):
        neighbours = [abs(energies[level] - energies[other])
                      for other in (level - 1, level + 1)
                      if 0 <= other < len(energies)]
        degenerate = min(neighbours) < degeneracy
        if degenerate:
            logger.warning("Level %d at s=%g is near-degenerate; "
                           "first-order shift not reliable", level, s)
        shifts.append(LevelShift(level, float(energies[level]),
                                 float(energies[level] + b * lam * hf[level]),
                                 float(exact[level]), float(p_logical[level]),
                                 degenerate))
    return shifts
