import json
import logging
from typing import Dict, Iterable, List, Tuple, Union

import networkx as nx

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class InstanceException(Exception):
    pass


class InfeasibleInstanceException(InstanceException):
    pass


class SizeGuardException(InstanceException):
    pass


def normalize_edge(u, v) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple connected undirected graph on the vertices 1..n.

    Edges keep the order they were given in, since catalog weight lists are
    aligned with that order.
    """

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]], label: str = None):
        self.n = int(n)
        self.label = label
        self.edges = []  # type: List[Edge]
        seen = set()
        if self.n < 1:
            raise InstanceException("Graph needs at least one vertex")
        for u, v in edges:
            if u == v:
                raise InstanceException(
                    "Self-loop on vertex {v}".format(v=u))
            edge = normalize_edge(u, v)
            if edge[0] < 1 or edge[1] > self.n:
                raise InstanceException(
                    "Edge {edge} outside vertex range 1..{n}".format(
                        edge=edge, n=self.n))
            if edge in seen:
                raise InstanceException(
                    "Duplicate edge {edge}".format(edge=edge))
            seen.add(edge)
            self.edges.append(edge)

        self._adjacency = {v: [] for v in self.vertices}
        for u, v in self.edges:
            self._adjacency[u].append(v)
            self._adjacency[v].append(u)
        for v in self._adjacency:
            self._adjacency[v].sort()
        self._edge_set = frozenset(self.edges)

        if len(self.distances(1)) != self.n:
            raise InstanceException(
                "Graph {label} is not connected".format(label=label))

    @property
    def vertices(self) -> List[int]:
        return list(range(1, self.n + 1))

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u, v) -> bool:
        return normalize_edge(u, v) in self._edge_set

    def neighbors(self, v) -> List[int]:
        return self._adjacency[v]

    def degree(self, v) -> int:
        return len(self._adjacency[v])

    def distances(self, root) -> Dict[int, int]:
        """Hop count from root to every reachable vertex."""
        return dict(nx.single_source_shortest_path_length(self.to_networkx(), root))

    def to_networkx(self, weights: Dict[Edge, int] = None) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            if weights is None:
                graph.add_edge(*edge)
            else:
                graph.add_edge(*edge, weight=weights[edge])
        return graph

    def __eq__(self, other):
        return ((self.n == other.n) and
                (sorted(self.edges) == sorted(other.edges)))

    def __repr__(self):
        return "<Graph {label}: n={n}, m={m}>".format(
            label=self.label, n=self.n, m=self.m)


def select_root(graph: Graph) -> int:
    """Highest-degree vertex, ties broken by smallest id."""
    return min(graph.vertices, key=lambda v: (-graph.degree(v), v))


class ProblemInstance:
    """Weighted graph plus degree bound and root: one BD-MST problem."""

    def __init__(
            self,
            graph: Graph,
            weights: Union[Dict[Edge, int], List[int]],
            degree_bound: int,
            root: int = None,
            label: str = None):
        self.graph = graph
        if isinstance(weights, dict):
            self.weights = {normalize_edge(*edge): int(w)
                            for edge, w in weights.items()}
        else:
            weights = list(weights)
            if len(weights) != graph.m:
                raise InstanceException(
                    "Got {count} weights for {m} edges".format(
                        count=len(weights), m=graph.m))
            self.weights = {edge: int(w)
                            for edge, w in zip(graph.edges, weights)}
        missing = [edge for edge in graph.edges if edge not in self.weights]
        if missing:
            raise InstanceException(
                "No weight for edges {missing}".format(missing=missing))
        if any(w <= 0 for w in self.weights.values()):
            raise InstanceException("Edge weights must be positive")
        if int(degree_bound) < 2:
            raise InstanceException(
                "Degree bound must be at least 2, got {delta}".format(
                    delta=degree_bound))
        self.degree_bound = int(degree_bound)
        self.root = select_root(graph) if root is None else int(root)
        if self.root not in graph.vertices:
            raise InstanceException(
                "Root {root} is not a vertex".format(root=self.root))
        self.label = label if label is not None else graph.label

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def delta(self) -> int:
        return self.degree_bound

    @property
    def root_degree(self) -> int:
        return self.graph.degree(self.root)

    @property
    def w_max(self) -> int:
        return max(self.weights.values())

    def weight(self, u, v) -> int:
        return self.weights[normalize_edge(u, v)]

    def weight_list(self) -> List[int]:
        return [self.weights[edge] for edge in self.graph.edges]

    def to_networkx(self) -> nx.Graph:
        return self.graph.to_networkx(self.weights)

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'n': self.n,
            'edges': [list(edge) for edge in self.graph.edges],
            'weights': self.weight_list(),
            'delta': self.degree_bound,
            'root': self.root,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ProblemInstance':
        try:
            graph = Graph(data['n'], data['edges'], label=data.get('label'))
            return cls(graph, data['weights'], data['delta'],
                       root=data.get('root'), label=data.get('label'))
        except KeyError as missing:
            raise InstanceException(
                "Instance record is missing key {key}".format(key=missing))

    def __eq__(self, other):
        return ((self.graph == other.graph) and
                (self.weights == other.weights) and
                (self.degree_bound == other.degree_bound) and
                (self.root == other.root))

    def __repr__(self):
        return ("<ProblemInstance {label}: n={n}, m={m}, "
                "delta={delta}, root={root}>").format(
            label=self.label, n=self.n, m=self.m, delta=self.degree_bound,
            root=self.root)


class SpanningTree:

    def __init__(self, edges: Iterable[Tuple[int, int]], cost: int = None):
        self.edges = frozenset(normalize_edge(*edge) for edge in edges)
        self.cost = cost

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def degrees(self) -> Dict[int, int]:
        degrees = {}
        for u, v in self.edges:
            degrees[u] = degrees.get(u, 0) + 1
            degrees[v] = degrees.get(v, 0) + 1
        return degrees

    def max_degree(self) -> int:
        return max(self.degrees().values()) if self.edges else 0

    def __len__(self):
        return len(self.edges)

    def __eq__(self, other):
        return (self.edges == other.edges) and (self.cost == other.cost)

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self):
        return "<SpanningTree cost={cost}: {edges}>".format(
            cost=self.cost, edges=self.sorted_edges())


def open_instance(path) -> ProblemInstance:
    with open(path, 'r') as instance_file:
        return ProblemInstance.from_dict(json.load(instance_file))


def save_instance(instance: ProblemInstance, path) -> None:
    with open(path, 'w') as instance_file:
        json.dump(instance.to_dict(), instance_file, indent=2)
        instance_file.write('\n')
    logger.debug("Wrote instance %s to %s", instance.label, path)
