"""Small embedded models that can be diagonalised exactly.

The triangle is not native to a bipartite Chimera cell, so it lands on a
square of four qubits with logical variable 2 chained over qubits 1 and 5.
"""
from bdmst_tools.embedding.embedded import embed_ising
from bdmst_tools.embedding.embedding import Embedding
from bdmst_tools.embedding.hardware import chimera_graph
from bdmst_tools.ising.model import IsingModel

GAP_COUPLING = -1.0
GAP_FIELD = 0.1
CENSUS_COUPLING = 1.0


def triangle_embedding() -> Embedding:
    return Embedding({0: [0], 1: [4], 2: [1, 5]}, chimera_graph(1, 1, 4))


def triangle(coupling, field=0.0) -> IsingModel:
    return IsingModel(3, [field] * 3,
                      {(0, 1): coupling, (0, 2): coupling, (1, 2): coupling})


def triangle_toy(j_ferro, coupling=GAP_COUPLING, field=GAP_FIELD):
    """Embedded triangle; chain strengths beyond the hardware range allowed."""
    return embed_ising(triangle(coupling, field), triangle_embedding(),
                       j_ferro, enforce_range=False)


def census_toy(j_ferro):
    """Frustrated triangle with a six-fold degenerate logical ground state."""
    return triangle_toy(j_ferro, CENSUS_COUPLING, 0.0)
