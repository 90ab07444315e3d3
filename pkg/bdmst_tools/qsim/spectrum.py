import csv
import logging

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from bdmst_tools.embedding.embedded import unembed_reads
from bdmst_tools.qsim.hamiltonian import AnnealHamiltonian
from bdmst_tools.qsim.schedule import (
    AnnealSchedule, ConvergenceException, SimulationException)
from bdmst_tools.samplers.exhaustive import codes_to_spins

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2 ** 10
RESIDUAL_TOLERANCE = 1e-8


def lowest_eigs(H, k, tol=RESIDUAL_TOLERANCE):
    """The k smallest eigenpairs, energies ascending, vectors as columns."""
    dim = H.shape[0]
    if not 1 <= k <= dim:
        raise SimulationException(
            "Cannot take {k} levels of a {dim}-dimensional operator".format(
                k=k, dim=dim))
    if dim <= DENSE_LIMIT or k >= dim - 1:
        dense = H.toarray() if scipy.sparse.issparse(H) else np.asarray(H)
        energies, vectors = scipy.linalg.eigh(dense, subset_by_index=[0, k - 1])
    else:
        energies, vectors = scipy.sparse.linalg.eigsh(H, k=k, which='SA',
                                                      tol=tol / 10)
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
    residuals = np.linalg.norm(H @ vectors - vectors * energies, axis=0)
    if np.any(residuals > tol * max(1.0, np.abs(energies).max())):
        raise ConvergenceException(
            "Eigenpairs did not converge, worst residual {worst:g}".format(
                worst=residuals.max()), residuals)
    return energies, vectors


def basis_spins(num_qubits):
    return codes_to_spins(np.arange(2 ** num_qubits), num_qubits)


def aligned_mask(embedded):
    """Basis states whose vertex models all agree."""
    _, broken = unembed_reads(basis_spins(embedded.num_qubits), embedded)
    return ~broken.any(axis=1)


def chain_diagonal(embedded):
    """H_F = sum of s_p s_q over chain couplers, per basis state."""
    spins = basis_spins(embedded.num_qubits)
    values = np.zeros(len(spins))
    for p, q in embedded.chain_edges:
        values += spins[:, p] * spins[:, q]
    return values


def logical_probability(vector, embedded, mask=None):
    """Weight of a state on the chain-aligned basis states."""
    mask = aligned_mask(embedded) if mask is None else mask
    weights = np.abs(np.asarray(vector)) ** 2
    return float(weights[mask].sum())


def hf_expectation(vector, embedded, diagonal=None):
    diagonal = chain_diagonal(embedded) if diagonal is None else diagonal
    return float(np.abs(np.asarray(vector)) ** 2 @ diagonal)


class SpectrumTrace:
    """Lowest levels of H(s) over an s grid at one chain strength."""

    def __init__(self, s_grid, energies, p_logical, hf, b_values, j_ferro):
        self.s_grid = np.asarray(s_grid, dtype=float)
        self.energies = np.asarray(energies, dtype=float)
        self.p_logical = np.asarray(p_logical, dtype=float)
        self.hf = np.asarray(hf, dtype=float)
        self.b_values = np.asarray(b_values, dtype=float)
        self.j_ferro = j_ferro

    @property
    def num_levels(self) -> int:
        return self.energies.shape[1]

    @property
    def gap(self) -> np.ndarray:
        return self.energies[:, 1] - self.energies[:, 0]

    def minimum_gap(self):
        """(s*, minimal gap) over the grid."""
        index = int(np.argmin(self.gap))
        return float(self.s_grid[index]), float(self.gap[index])

    def __eq__(self, other):
        return ((self.j_ferro == other.j_ferro) and
                np.array_equal(self.s_grid, other.s_grid) and
                np.array_equal(self.energies, other.energies) and
                np.array_equal(self.p_logical, other.p_logical))

    def __repr__(self):
        s_star, gap = self.minimum_gap()
        return "<SpectrumTrace |J_F|={jf} min gap {gap:.4g} at s={s:.3f}>".format(
            jf=self.j_ferro, gap=gap, s=s_star)


def spectrum_trace(embedded, s_grid, k=4, schedule=None) -> SpectrumTrace:
    schedule = schedule or AnnealSchedule()
    hamiltonian = AnnealHamiltonian(embedded, schedule)
    mask = aligned_mask(embedded)
    chains = chain_diagonal(embedded)
    energies, p_logical, hf = [], [], []
    for s in s_grid:
        values, vectors = lowest_eigs(hamiltonian.at(s), k)
        energies.append(values)
        weights = np.abs(vectors) ** 2
        p_logical.append(weights[mask].sum(axis=0))
        hf.append(chains @ weights)
    return SpectrumTrace(s_grid, energies, p_logical, hf,
                         schedule.B(np.asarray(s_grid)), embedded.j_ferro)


def gap_trace(embedded, j_ferro_list, s_grid, k=4, schedule=None):
    """One trace per chain strength, each reporting where its gap is smallest."""
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid <= 0) or np.any(s_grid >= 1):
        raise SimulationException("Gap traces need s strictly inside (0, 1)")
    traces = []
    for j_ferro in j_ferro_list:
        trace = spectrum_trace(embedded.with_j_ferro(j_ferro), s_grid, k,
                               schedule)
        s_star, gap = trace.minimum_gap()
        logger.info("|J_F|=%g: minimum gap %.5g at s=%.4f", j_ferro, gap, s_star)
        traces.append(trace)
    return traces


def write_trace(trace: SpectrumTrace, path):
    header = (['s'] + ['E{i}'.format(i=i) for i in range(trace.num_levels)] +
              ['gap', 'PL0', 'PL1', 'j_ferro'])
    with open(path, 'w', newline='') as trace_file:
        writer = csv.writer(trace_file)
        writer.writerow(header)
        for row, s in enumerate(trace.s_grid):
            writer.writerow(
                [repr(float(s))] +
                [repr(float(e)) for e in trace.energies[row]] +
                [repr(float(trace.gap[row])),
                 repr(float(trace.p_logical[row, 0])),
                 repr(float(trace.p_logical[row, 1])),
                 repr(float(trace.j_ferro))])
    logger.debug("Wrote %d trace points to %s", len(trace.s_grid), path)
