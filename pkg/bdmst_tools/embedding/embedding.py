import json
import logging
import statistics
from enum import Enum

import minorminer
import networkx as nx
import numpy as np

from bdmst_tools.embedding.hardware import (
    EmbeddingException, HardwareGraph, NoEmbeddingFoundException)

logger = logging.getLogger(__name__)

# Physical qubit ranges reported for the mapped five-vertex problems,
# keyed by edge count.
REFERENCE_QUBIT_RANGES = {
    'chimera': {4: (118, 150), 5: (142, 189), 6: (168, 226), 7: (200, 276),
                8: (230, 319), 9: (262, 367), 10: (380, 485)},
}


class Embedding:
    """Vertex models: logical variable -> set of physical qubits."""

    def __init__(self, vertex_models, hardware: HardwareGraph = None):
        self.vertex_models = {
            int(var): tuple(sorted(int(q) for q in qubits))
            for var, qubits in vertex_models.items()}
        self.hardware = hardware

    @property
    def num_logical(self) -> int:
        return len(self.vertex_models)

    @property
    def physical_qubits(self):
        return sorted(q for qubits in self.vertex_models.values()
                      for q in qubits)

    @property
    def physical_count(self) -> int:
        return sum(len(qubits) for qubits in self.vertex_models.values())

    def model(self, var):
        return self.vertex_models[var]

    def __eq__(self, other):
        return self.vertex_models == other.vertex_models

    def __repr__(self):
        return "<Embedding {n} logical -> {p} physical>".format(
            n=self.num_logical, p=self.physical_count)

    def to_dict(self):
        return {
            'hardware': self.hardware.to_dict() if self.hardware else None,
            'chains': {str(var): list(qubits) for var, qubits in
                       sorted(self.vertex_models.items())},
        }

    @classmethod
    def from_dict(cls, data):
        hardware = data.get('hardware')
        if hardware is not None:
            hardware = HardwareGraph.from_dict(hardware)
        try:
            chains = data['chains']
        except KeyError:
            raise EmbeddingException("Embedding record has no chains")
        return cls({int(var): qubits for var, qubits in chains.items()},
                   hardware)

    def save(self, path):
        with open(path, 'w') as embedding_file:
            json.dump(self.to_dict(), embedding_file, indent=2)
            embedding_file.write('\n')


def open_embedding(path) -> Embedding:
    with open(path, 'r') as embedding_file:
        return Embedding.from_dict(json.load(embedding_file))


class EmbeddingReason(Enum):
    valid = 0
    empty_model = 1        # A logical variable has no qubits
    unknown_qubit = 2      # A qubit is not on the hardware
    overlap = 3            # Two vertex models share a qubit
    disconnected = 4       # A vertex model is not connected on the hardware
    missing_edge = 5       # No coupler joins the models of a logical edge


class EmbeddingVerdict:

    def __init__(self, reason, detail=None):
        self.reason = reason
        self.detail = detail

    @property
    def valid(self) -> bool:
        return self.reason == EmbeddingReason.valid

    def __bool__(self):
        return self.valid

    def __repr__(self):
        return "<EmbeddingVerdict {reason}: {detail}>".format(
            reason=self.reason.name, detail=self.detail)


def logical_graph(source) -> nx.Graph:
    """Interaction graph of an Ising model, QUBO, or networkx graph."""
    if isinstance(source, nx.Graph):
        return source
    graph = nx.Graph()
    if hasattr(source, 'num_spins'):
        graph.add_nodes_from(range(source.num_spins))
        graph.add_edges_from(source.J)
    elif hasattr(source, 'num_vars'):
        graph.add_nodes_from(range(source.num_vars))
        graph.add_edges_from(source.quadratic)
    else:
        graph.add_edges_from(source)
    return graph


def validate_embedding(embedding: Embedding, logical, hardware: HardwareGraph = None):
    hardware = hardware if hardware is not None else embedding.hardware
    logical = logical_graph(logical)
    owner = {}
    for var in sorted(logical.nodes):
        qubits = embedding.vertex_models.get(var, ())
        if not qubits:
            return EmbeddingVerdict(EmbeddingReason.empty_model, var)
        for q in qubits:
            if q not in hardware.graph:
                return EmbeddingVerdict(EmbeddingReason.unknown_qubit, q)
            if q in owner:
                return EmbeddingVerdict(
                    EmbeddingReason.overlap, (owner[q], var, q))
            owner[q] = var
        if not nx.is_connected(hardware.graph.subgraph(qubits)):
            return EmbeddingVerdict(EmbeddingReason.disconnected, var)
    for u, v in sorted((min(e), max(e)) for e in logical.edges):
        if coupler_between(embedding, hardware, u, v) is None:
            return EmbeddingVerdict(EmbeddingReason.missing_edge, (u, v))
    return EmbeddingVerdict(EmbeddingReason.valid)


def coupler_between(embedding: Embedding, hardware: HardwareGraph, u, v):
    """Smallest physical coupler joining the models of u and v, or None."""
    couplers = [(min(p, q), max(p, q))
                for p in embedding.model(u) for q in embedding.model(v)
                if hardware.has_edge(p, q)]
    return min(couplers) if couplers else None


def _place_isolated(chains, logical, hardware):
    used = {q for qubits in chains.values() for q in qubits}
    spare = (q for q in hardware.nodes if q not in used)
    for var in sorted(logical.nodes):
        if var not in chains:
            try:
                chains[var] = [next(spare)]
            except StopIteration:
                return None
    return chains


def find_embedding(logical, hardware: HardwareGraph, attempts=30, seed=None,
                   **params) -> Embedding:
    """Best of several seeded minor-embedding attempts by qubit count."""
    logical = logical_graph(logical)
    if attempts < 1:
        raise EmbeddingException("Need at least one embedding attempt")
    seeds = np.random.SeedSequence(seed).generate_state(attempts)
    source = sorted((min(e), max(e)) for e in logical.edges)
    target = hardware.edges

    best = None
    for attempt, attempt_seed in enumerate(seeds):
        chains = {}
        if source:
            chains = minorminer.find_embedding(
                source, target, random_seed=int(attempt_seed), tries=1,
                threads=1, **params)
            if not chains:
                logger.debug("Embedding attempt %d found nothing", attempt)
                continue
        chains = _place_isolated(dict(chains), logical, hardware)
        if chains is None:
            continue
        candidate = Embedding(chains, hardware)
        if not validate_embedding(candidate, logical, hardware):
            continue
        logger.debug("Embedding attempt %d uses %d qubits",
                     attempt, candidate.physical_count)
        if best is None or candidate.physical_count < best.physical_count:
            best = candidate

    if best is None:
        raise NoEmbeddingFoundException(
            "No embedding of {n} variables into {hw} after {k} attempts".format(
                n=logical.number_of_nodes(), hw=hardware, k=attempts))
    logger.info("Embedded %d logical variables on %d physical qubits",
                best.num_logical, best.physical_count)
    return best


def embedding_stats(embedding: Embedding, num_edges=None):
    sizes = sorted(len(qubits) for qubits in embedding.vertex_models.values())
    stats = {
        'logical_count': embedding.num_logical,
        'physical_count': embedding.physical_count,
        'sizes': sizes,
        'median_size': statistics.median(sizes) if sizes else 0,
        'max_size': max(sizes) if sizes else 0,
    }
    family = embedding.hardware.family if embedding.hardware else None
    reference = REFERENCE_QUBIT_RANGES.get(family, {}).get(num_edges)
    if reference is not None:
        low, high = reference
        stats['reference_range'] = [low, high]
        stats['within_reference'] = low <= embedding.physical_count <= high
        if not stats['within_reference']:
            logger.warning("Embedding uses %d qubits, reference range %d-%d",
                           embedding.physical_count, low, high)
    return stats
