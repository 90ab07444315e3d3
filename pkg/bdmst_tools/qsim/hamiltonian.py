import numpy as np
import scipy.sparse

from bdmst_tools.instances.graph import SizeGuardException
from bdmst_tools.samplers.exhaustive import exhaustive_energies

MAX_QUBITS = 14


def physical_model(model):
    """Physical model of an EmbeddedIsing, or a plain model as given."""
    return getattr(model, 'ising', model)


def _guard(num_qubits):
    if num_qubits > MAX_QUBITS:
        raise SizeGuardException(
            "Quantum simulation limited to {limit} qubits, model has {n}".format(
                limit=MAX_QUBITS, n=num_qubits))


def driver_operator(num_qubits):
    """-sum_i X_i in the computational basis (bit i set = qubit i up)."""
    _guard(num_qubits)
    dim = 2 ** num_qubits
    states = np.arange(dim)
    rows = np.concatenate([states] * num_qubits)
    cols = np.concatenate([states ^ (1 << i) for i in range(num_qubits)])
    values = -np.ones(len(rows))
    return scipy.sparse.csr_matrix((values, (rows, cols)), shape=(dim, dim))


def problem_diagonal(model):
    """Classical energies of every basis state."""
    ising = physical_model(model)
    _guard(ising.num_spins)
    return exhaustive_energies(ising, max_spins=MAX_QUBITS)


class AnnealHamiltonian:
    """H(s) = A(s) (-sum X_i) + B(s) H_C for one model, operators cached."""

    def __init__(self, model, schedule):
        ising = physical_model(model)
        self.num_qubits = ising.num_spins
        self.schedule = schedule
        self.driver = driver_operator(self.num_qubits)
        self.diagonal = problem_diagonal(ising)
        self.problem = scipy.sparse.diags(self.diagonal, format='csr')

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    def at(self, s):
        return (float(self.schedule.A(s)) * self.driver +
                float(self.schedule.B(s)) * self.problem)

    def norms(self, s):
        """Energy scales (half spectral width) of the driver and problem parts at s.

        The half width ignores the constant offset of the problem energies.
        """
        spread = float(self.diagonal.max() - self.diagonal.min()) / 2
        return (float(self.schedule.A(s)) * self.num_qubits,
                float(self.schedule.B(s)) * spread)


def hamiltonian_at(model, schedule, s):
    return AnnealHamiltonian(model, schedule).at(s)
