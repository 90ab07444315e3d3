import logging

import networkx as nx
import numpy as np

from bdmst_tools.embedding.embedding import (
    Embedding, coupler_between, validate_embedding)
from bdmst_tools.embedding.hardware import EmbeddingException
from bdmst_tools.ising.gauge import Gauge, gauge_transform
from bdmst_tools.ising.model import IsingModel

logger = logging.getLogger(__name__)

LOGICAL_RANGE = (-1.0, 1.0)
CHAIN_RANGE = (-2.0, 1.0)
TOLERANCE = 1e-9


class EmbeddedIsing:
    """An Ising model over the physical qubits used by an embedding.

    Physical qubits are indexed compactly: spin k of ``ising`` is qubit
    ``qubits[k]``. ``chain_edges`` holds compact index pairs carrying
    -j_ferro.
    """

    def __init__(self, ising: IsingModel, logical: IsingModel,
                 embedding: Embedding, j_ferro, chain_edges,
                 all_couplers=False, enforce_range=True):
        self.ising = ising
        self.logical = logical
        self.embedding = embedding
        self.j_ferro = float(j_ferro)
        self.chain_edges = sorted(chain_edges)
        self.all_couplers = all_couplers
        self.enforce_range = enforce_range
        self.qubits = embedding.physical_qubits
        self.index = {q: k for k, q in enumerate(self.qubits)}
        self.logical_range = LOGICAL_RANGE
        self.chain_range = CHAIN_RANGE

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @property
    def chain_offset(self) -> float:
        """Energy contributed by the chains when every chain is aligned."""
        return -self.j_ferro * len(self.chain_edges)

    def model_indices(self, var):
        return [self.index[q] for q in self.embedding.model(var)]

    def with_j_ferro(self, j_ferro) -> 'EmbeddedIsing':
        return embed_ising(self.logical, self.embedding, j_ferro,
                           all_couplers=self.all_couplers,
                           enforce_range=self.enforce_range)

    def __repr__(self):
        return "<EmbeddedIsing {n} logical -> {p} physical, |J_F|={jf}>".format(
            n=self.logical.num_spins, p=self.num_qubits, jf=self.j_ferro)


def _check_range(logical: IsingModel, j_ferro):
    low, high = LOGICAL_RANGE
    if logical.J and not all(low - TOLERANCE <= v <= high + TOLERANCE
                             for v in logical.J.values()):
        raise EmbeddingException(
            "Logical couplings must lie in [{low}, {high}]; "
            "scale the model first".format(low=low, high=high))
    if np.any(np.abs(logical.h) > max(abs(low), abs(high)) + TOLERANCE):
        raise EmbeddingException("Logical fields outside the hardware range")
    if not 0 < j_ferro <= -CHAIN_RANGE[0]:
        raise EmbeddingException(
            "Chain strength {jf} outside (0, {top}]".format(
                jf=j_ferro, top=-CHAIN_RANGE[0]))


def chain_structure(embedding: Embedding, var, all_couplers=False):
    """Physical couplers used inside one vertex model.

    A BFS spanning tree rooted at the smallest qubit, or every internal
    coupler with ``all_couplers``.
    """
    qubits = embedding.model(var)
    if len(qubits) < 2:
        return []
    induced = embedding.hardware.graph.subgraph(qubits)
    if all_couplers:
        edges = induced.edges
    else:
        edges = nx.bfs_tree(induced, source=min(qubits)).edges
    return sorted((min(p, q), max(p, q)) for p, q in edges)


def embed_ising(logical: IsingModel, embedding: Embedding, j_ferro,
                all_couplers=False, enforce_range=True) -> EmbeddedIsing:
    if embedding.hardware is None:
        raise EmbeddingException("Embedding has no hardware graph")
    if j_ferro <= 0:
        raise EmbeddingException("Chain strength must be positive")
    if enforce_range:
        _check_range(logical, j_ferro)
    interaction = nx.Graph()
    interaction.add_nodes_from(range(logical.num_spins))
    interaction.add_edges_from(logical.J)
    verdict = validate_embedding(embedding, interaction)
    if not verdict:
        raise EmbeddingException(
            "Embedding does not fit the model: {verdict}".format(verdict=verdict))
    extra = set(embedding.vertex_models) - set(range(logical.num_spins))
    if extra:
        raise EmbeddingException(
            "Embedding has models for unknown variables {extra}".format(
                extra=sorted(extra)))

    qubits = embedding.physical_qubits
    index = {q: k for k, q in enumerate(qubits)}
    h = np.zeros(len(qubits))
    J = {}
    for var in range(logical.num_spins):
        model = embedding.model(var)
        for q in model:
            h[index[q]] = logical.h[var] / len(model)
    for (i, j), value in sorted(logical.J.items()):
        p, q = coupler_between(embedding, embedding.hardware, i, j)
        J[(index[p], index[q])] = value

    chain_edges = []
    for var in range(logical.num_spins):
        for p, q in chain_structure(embedding, var, all_couplers):
            key = (index[p], index[q])
            J[key] = -float(j_ferro)
            chain_edges.append(key)

    ising = IsingModel(len(qubits), h, J, logical.offset, logical.scale)
    logger.debug("Embedded %d spins on %d qubits with %d chain couplers",
                 logical.num_spins, len(qubits), len(chain_edges))
    return EmbeddedIsing(ising, logical, embedding, j_ferro, chain_edges,
                         all_couplers=all_couplers, enforce_range=enforce_range)


def sufficient_chain_strength(logical: IsingModel) -> float:
    """Largest |h_i| + sum_j |J_ij| over the logical variables.

    Chains at least this strong make every ground state chain-aligned.
    """
    strength = np.abs(logical.h).astype(float)
    for (i, j), value in logical.J.items():
        strength[i] += abs(value)
        strength[j] += abs(value)
    return float(strength.max()) if len(strength) else 0.0


def encode_read(logical_spins, embedded: EmbeddedIsing):
    """Copy each logical spin onto every qubit of its vertex model."""
    logical_spins = np.asarray(logical_spins, dtype=int)
    physical = np.zeros(logical_spins.shape[:-1] + (embedded.num_qubits,),
                        dtype=int)
    for var in range(embedded.logical.num_spins):
        physical[..., embedded.model_indices(var)] = \
            logical_spins[..., var, None]
    return physical


class UnembeddedRead:

    def __init__(self, spins, broken):
        self.spins = spins
        self.broken = list(broken)

    @property
    def valid(self) -> bool:
        return not self.broken

    def __bool__(self):
        return self.valid

    def __repr__(self):
        if self.broken:
            return "<UnembeddedRead chain-break {broken}>".format(
                broken=self.broken)
        return "<UnembeddedRead {spins}>".format(spins=self.spins.tolist())


def unembed_reads(physical_spins, embedded: EmbeddedIsing):
    """Logical spins and a per-read chain-break mask for many reads.

    Broken reads keep the value of the smallest qubit of each model in
    the logical array; callers discard them.
    """
    physical_spins = np.atleast_2d(np.asarray(physical_spins, dtype=int))
    if physical_spins.shape[1] != embedded.num_qubits:
        raise EmbeddingException(
            "Read has {got} qubits, embedding uses {want}".format(
                got=physical_spins.shape[1], want=embedded.num_qubits))
    num_vars = embedded.logical.num_spins
    logical = np.zeros((len(physical_spins), num_vars), dtype=int)
    broken = np.zeros((len(physical_spins), num_vars), dtype=bool)
    for var in range(num_vars):
        chain = physical_spins[:, embedded.model_indices(var)]
        logical[:, var] = chain[:, 0]
        broken[:, var] = np.any(chain != chain[:, :1], axis=1)
    return logical, broken


def unembed_read(physical_spins, embedded: EmbeddedIsing) -> UnembeddedRead:
    """Discard policy: any disagreeing chain makes the read a chain-break."""
    logical, broken = unembed_reads(physical_spins, embedded)
    broken_vars = np.flatnonzero(broken[0]).tolist()
    if broken_vars:
        return UnembeddedRead(None, broken_vars)
    return UnembeddedRead(logical[0], [])


def physical_gauge(embedded: EmbeddedIsing, logical_gauge: Gauge) -> Gauge:
    """Spread logical signs over every qubit of the matching vertex model."""
    if len(logical_gauge) != embedded.logical.num_spins:
        raise EmbeddingException(
            "Gauge covers {g} variables, model has {n}".format(
                g=len(logical_gauge), n=embedded.logical.num_spins))
    signs = np.ones(embedded.num_qubits, dtype=int)
    for var in range(embedded.logical.num_spins):
        signs[embedded.model_indices(var)] = logical_gauge.signs[var]
    return Gauge(signs, seed=logical_gauge.seed)


def partial_gauge(embedded: EmbeddedIsing, logical_gauge: Gauge) -> EmbeddedIsing:
    """Gauge only the problem couplings and fields.

    Both ends of a chain coupler share a sign, so chains keep -j_ferro and
    the result equals embedding the gauged logical model.
    """
    signs = physical_gauge(embedded, logical_gauge)
    return EmbeddedIsing(gauge_transform(embedded.ising, signs),
                         gauge_transform(embedded.logical, logical_gauge),
                         embedded.embedding, embedded.j_ferro,
                         embedded.chain_edges,
                         all_couplers=embedded.all_couplers,
                         enforce_range=embedded.enforce_range)
