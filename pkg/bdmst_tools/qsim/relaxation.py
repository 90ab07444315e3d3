"""Thermal relaxation over the lowest instantaneous levels of H(s).

Populations follow the instantaneous eigenbasis from one grid point to the
next and relax under a Pauli master equation with Metropolis rates.
Coherent and diabatic effects are not modelled.
"""
import logging

import numpy as np
import scipy.linalg

from bdmst_tools.qsim.hamiltonian import AnnealHamiltonian
from bdmst_tools.qsim.schedule import (
    AnnealSchedule, GridResolutionException, SimulationException)
from bdmst_tools.qsim.spectrum import basis_spins, lowest_eigs

logger = logging.getLogger(__name__)

COUPLINGS = ('sigma_z', 'uniform')
DEGENERACY_TOLERANCE = 1e-6
LEAKAGE_WARNING = 0.01
MAX_REFINEMENTS = 8


def gibbs_populations(energies, temperature):
    if temperature <= 0:
        raise SimulationException("Temperature must be positive")
    energies = np.asarray(energies, dtype=float)
    weights = np.exp(-(energies - energies.min()) / temperature)
    return weights / weights.sum()


def thermal_rate_matrix(energies, temperature, gamma0, vectors=None,
                        coupling='uniform', spins=None):
    """W[j, i] is the rate i -> j; columns sum to zero.

    Rates are gamma0 min(1, exp(-(E_j - E_i) / T)). With the sigma_z
    coupling each rate is weighted by sum_q |<j|Z_q|i>|^2, which vanishes
    once the eigenstates become computational basis states.
    """
    if coupling not in COUPLINGS:
        raise SimulationException("Unknown coupling {c}, use {known}".format(
            c=coupling, known=', '.join(COUPLINGS)))
    if temperature <= 0 or gamma0 < 0:
        raise SimulationException("Need T > 0 and gamma0 >= 0")
    energies = np.asarray(energies, dtype=float)
    difference = energies[:, None] - energies[None, :]
    rates = gamma0 * np.exp(-np.clip(difference, 0.0, None) / temperature)
    if coupling == 'sigma_z':
        if vectors is None or spins is None:
            raise SimulationException("sigma_z coupling needs eigenvectors")
        factor = np.zeros_like(rates)
        for q in range(spins.shape[1]):
            element = vectors.conj().T @ (spins[:, q, None] * vectors)
            factor += np.abs(element) ** 2
        rates = rates * factor
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=0))
    return rates


def relax(populations, rates, duration):
    if duration <= 0:
        return np.asarray(populations, dtype=float)
    evolved = scipy.linalg.expm(rates * duration) @ populations
    evolved = np.clip(evolved, 0.0, None)
    return evolved / evolved.sum()


def _clusters(energies, tolerance):
    labels = np.zeros(len(energies), dtype=int)
    for i in range(1, len(energies)):
        labels[i] = labels[i - 1] + (energies[i] - energies[i - 1] > tolerance)
    return labels


def transfer(old_vectors, old_energies, new_vectors, new_energies,
             resolution=0.99, tolerance=DEGENERACY_TOLERANCE):
    """Overlap matrix |<new_j|old_i>|^2, refusing steps that are too coarse.

    Only non-degenerate old levels are checked: each must land, to within
    ``resolution``, on one new level or one degenerate group of new levels.
    """
    overlaps = np.abs(new_vectors.conj().T @ old_vectors) ** 2
    old_labels = _clusters(old_energies, tolerance)
    new_labels = _clusters(new_energies, tolerance)
    for i in range(len(old_energies)):
        if np.sum(old_labels == old_labels[i]) > 1:
            continue
        best = int(np.argmax(overlaps[:, i]))
        captured = overlaps[new_labels == new_labels[best], i].sum()
        if captured < resolution and overlaps[:, i].sum() >= resolution:
            raise GridResolutionException(
                "Level {i} keeps only {w:.4f} of its weight between grid "
                "points; refine the grid".format(i=i, w=captured))
    return overlaps


def _substeps(hamiltonian, k, start, stop, old, resolution, depth=0):
    """(s, energies, vectors, overlaps) from start to stop.

    A step that transfer rejects is halved, at most MAX_REFINEMENTS times.
    """
    energies, vectors = lowest_eigs(hamiltonian.at(stop), k)
    try:
        overlaps = transfer(old[1], old[0], vectors, energies, resolution)
    except GridResolutionException:
        if depth >= MAX_REFINEMENTS:
            raise
        middle = 0.5 * (start + stop)
        logger.debug("Refining %.6f..%.6f at depth %d", start, stop, depth + 1)
        first = _substeps(hamiltonian, k, start, middle, old, resolution, depth + 1)
        return first + _substeps(hamiltonian, k, middle, stop, first[-1][1:3],
                                 resolution, depth + 1)
    return [(stop, energies, vectors, overlaps)]


class RelaxationResult:

    def __init__(self, s_grid, populations, leakage):
        self.s_grid = np.asarray(s_grid)
        self.populations = np.asarray(populations)
        self.leakage = leakage

    @property
    def p_ground(self) -> float:
        return float(self.populations[-1, 0])

    def __repr__(self):
        return "<RelaxationResult {n} points, final p_GS={p:.4f}>".format(
            n=len(self.s_grid), p=self.p_ground)


def relax_at(embedded, s, temperature, gamma0, duration, populations=None,
             k=8, schedule=None, coupling='uniform'):
    """Hold H(s) fixed for ``duration``; starts from Gibbs by default."""
    schedule = schedule or AnnealSchedule()
    energies, vectors = lowest_eigs(AnnealHamiltonian(embedded, schedule).at(s), k)
    if populations is None:
        populations = gibbs_populations(energies, temperature)
    rates = thermal_rate_matrix(energies, temperature, gamma0, vectors,
                                coupling, basis_spins(embedded.num_qubits))
    return relax(np.asarray(populations, dtype=float), rates, duration)


def pause_relax_evolve(embedded, schedule: AnnealSchedule, temperature, gamma0,
                       k=8, num_steps=1000, initial='ground', coupling='uniform',
                       resolution=0.99) -> RelaxationResult:
    """Populations of the k lowest levels along the anneal.

    The pause, if the schedule has one, relaxes at fixed H(s_p) for t_p.
    """
    if k < 2:
        raise SimulationException("Track at least two levels")
    hamiltonian = AnnealHamiltonian(embedded, schedule)
    if k > hamiltonian.dim:
        raise SimulationException("Cannot track more levels than states")
    spins = basis_spins(hamiltonian.num_qubits)
    s_grid = np.linspace(0.0, 1.0, num_steps + 1)
    if schedule.s_p is not None:
        s_grid = np.union1d(s_grid, [schedule.s_p])

    energies, vectors = lowest_eigs(hamiltonian.at(s_grid[0]), k)
    if initial == 'gibbs':
        populations = gibbs_populations(energies, temperature)
    else:
        populations = np.zeros(k)
        populations[0] = 1.0
    history = [populations]
    leakage = 0.0
    for previous, s in zip(s_grid[:-1], s_grid[1:]):
        steps = _substeps(hamiltonian, k, previous, s, (energies, vectors),
                          resolution)
        for s_sub, energies, vectors, overlaps in steps:
            moved = overlaps @ populations
            leakage = max(leakage, 1.0 - moved.sum())
            populations = moved / moved.sum()
            rates = thermal_rate_matrix(energies, temperature, gamma0,
                                        vectors, coupling, spins)
            populations = relax(populations, rates,
                                (s_sub - previous) * schedule.t_a)
            previous = s_sub
        if schedule.s_p is not None and s == schedule.s_p and schedule.t_p:
            populations = relax(populations, rates, schedule.t_p)
        history.append(populations)

    if leakage > LEAKAGE_WARNING:
        logger.warning("Population leaking past the %d tracked levels: %.3f; "
                       "increase k", k, leakage)
    result = RelaxationResult(s_grid, history, leakage)
    logger.debug("Relaxation %s: %s", schedule, result)
    return result


def pause_scan(embedded, s_p_grid, t_p, temperature, gamma0, t_a=1.0,
               schedule=None, **kwargs):
    """Final ground-state probability for each pause location, and without a pause."""
    base = schedule or AnnealSchedule(t_a)
    no_pause = pause_relax_evolve(embedded, base.with_pause(None, 0.0),
                                  temperature, gamma0, **kwargs).p_ground
    scan = [pause_relax_evolve(embedded, base.with_pause(s_p, t_p),
                               temperature, gamma0, **kwargs).p_ground
            for s_p in s_p_grid]
    return no_pause, scan


def regime_map(embedded, trace, temperature, schedule=None, dominance=10.0):
    """Label each point of a spectrum trace with its anneal regime.

    I and III: one part of H(s) dominates the other and the temperature.
    IIa: before the minimal gap with gap above T. IIb: gap at or below T.
    IIc: after the minimal gap with gap above T.
    """
    schedule = schedule or AnnealSchedule()
    hamiltonian = AnnealHamiltonian(embedded, schedule)
    s_star, _ = trace.minimum_gap()
    labels = []
    for s, gap in zip(trace.s_grid, trace.gap):
        driver, problem = hamiltonian.norms(s)
        if driver >= dominance * problem and driver >= dominance * temperature:
            labels.append('I')
        elif problem >= dominance * driver and problem >= dominance * temperature:
            labels.append('III')
        elif gap <= temperature:
            labels.append('IIb')
        elif s < s_star:
            labels.append('IIa')
        else:
            labels.append('IIc')
    return labels
