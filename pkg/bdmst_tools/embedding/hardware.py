import dwave_networkx as dnx
import networkx as nx


class EmbeddingException(Exception):
    pass


class NoEmbeddingFoundException(EmbeddingException):
    pass


class HardwareGraph:
    """Physical qubit connectivity with integer qubit labels."""

    def __init__(self, family, graph: nx.Graph, params=None):
        self.family = family
        self.graph = graph
        self.params = dict(params or {})

    @property
    def nodes(self):
        return sorted(self.graph.nodes)

    @property
    def edges(self):
        return sorted((min(u, v), max(u, v)) for u, v in self.graph.edges)

    def has_edge(self, u, v) -> bool:
        return self.graph.has_edge(u, v)

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)

    def __len__(self):
        return self.graph.number_of_nodes()

    def __eq__(self, other):
        return ((self.family == other.family) and
                (self.nodes == other.nodes) and
                (self.edges == other.edges))

    def __repr__(self):
        return "<HardwareGraph {family}{params}: {n} qubits, {m} couplers>".format(
            family=self.family, params=self.params or '', n=len(self),
            m=self.graph.number_of_edges())

    def to_dict(self):
        data = {'family': self.family, 'params': self.params}
        if self.family == 'custom':
            data['nodes'] = self.nodes
            data['edges'] = [list(edge) for edge in self.edges]
        return data

    @classmethod
    def from_dict(cls, data):
        family = data.get('family')
        params = data.get('params', {})
        if family == 'chimera':
            return chimera_graph(params['M'], params.get('N'), params.get('L', 4))
        if family == 'pegasus':
            return pegasus_graph(params['P'])
        if family == 'custom':
            return custom_graph(data['edges'], nodes=data.get('nodes'))
        raise EmbeddingException(
            "Unknown hardware family {family}".format(family=family))


def chimera_graph(M, N=None, L=4) -> HardwareGraph:
    """M rows by N columns of K_{L,L} unit cells."""
    N = M if N is None else N
    if min(M, N, L) < 1:
        raise EmbeddingException("Chimera dimensions must be positive")
    return HardwareGraph('chimera', dnx.chimera_graph(M, N, L),
                         {'M': M, 'N': N, 'L': L})


def pegasus_graph(P) -> HardwareGraph:
    if P < 2:
        raise EmbeddingException("Pegasus size must be at least 2")
    return HardwareGraph('pegasus', dnx.pegasus_graph(P, fabric_only=True),
                         {'P': P})


def custom_graph(edges, nodes=None) -> HardwareGraph:
    graph = nx.Graph()
    if nodes is not None:
        graph.add_nodes_from(int(q) for q in nodes)
    graph.add_edges_from((int(u), int(v)) for u, v in edges)
    return HardwareGraph('custom', graph)


def open_hardware(spec: str) -> HardwareGraph:
    """Parse a short description such as ``chimera:16,16,4`` or ``pegasus:6``."""
    try:
        family, _, args = spec.partition(':')
        values = [int(v) for v in args.split(',') if v]
        if family == 'chimera':
            return chimera_graph(*values)
        if family == 'pegasus':
            return pegasus_graph(*values)
    except (TypeError, ValueError):
        pass
    raise EmbeddingException(
        "Cannot parse hardware description {spec!r}".format(spec=spec))
