import logging
from enum import Enum
from typing import Iterable, Iterator, Tuple

import networkx as nx
import numpy as np

from bdmst_tools.instances.graph import (
    Graph, InfeasibleInstanceException, ProblemInstance, SizeGuardException,
    SpanningTree, normalize_edge)

logger = logging.getLogger(__name__)

MAX_ORACLE_VERTICES = 10


class TreeReason(Enum):
    valid = 0             # Spanning tree within the degree bound
    not_subgraph = 1      # Uses an edge the graph does not have
    cyclic = 2            # Contains a cycle
    disconnected = 3      # Acyclic but misses vertices
    degree_violation = 4  # Some vertex exceeds the bound


class TreeVerdict:

    def __init__(self, reason, detail=None):
        self.reason = reason
        self.detail = detail

    @property
    def valid(self) -> bool:
        return self.reason == TreeReason.valid

    def __bool__(self):
        return self.valid

    def __eq__(self, other):
        return (self.reason == other.reason) and (self.detail == other.detail)

    def __repr__(self):
        if self.detail is None:
            return "<TreeVerdict {reason}>".format(reason=self.reason.name)
        return "<TreeVerdict {reason}: {detail}>".format(
            reason=self.reason.name, detail=self.detail)


class ExactSolution:
    """Result of the exact oracle; tree is None when infeasible."""

    def __init__(self, cost, tree):
        self.cost = cost
        self.tree = tree

    @property
    def feasible(self) -> bool:
        return self.tree is not None

    def __repr__(self):
        if not self.feasible:
            return "<ExactSolution infeasible>"
        return "<ExactSolution cost={cost}>".format(cost=self.cost)


def _guard(graph: Graph):
    if graph.n > MAX_ORACLE_VERTICES:
        raise SizeGuardException(
            "Exact enumeration limited to {limit} vertices, got {n}".format(
                limit=MAX_ORACLE_VERTICES, n=graph.n))


def _tree_edges(tree: nx.Graph):
    return [normalize_edge(u, v) for u, v in tree.edges()]


def enumerate_spanning_trees(graph: Graph) -> Iterator[SpanningTree]:
    _guard(graph)
    for tree in nx.SpanningTreeIterator(graph.to_networkx()):
        yield SpanningTree(_tree_edges(tree))


def kirchhoff_count(graph: Graph) -> int:
    """Number of spanning trees from the reduced Laplacian determinant."""
    laplacian = nx.laplacian_matrix(
        graph.to_networkx(), nodelist=graph.vertices).toarray()
    return int(round(np.linalg.det(laplacian[1:, 1:].astype(float))))


def tree_cost(instance: ProblemInstance, edges: Iterable[Tuple[int, int]]):
    return sum(instance.weight(u, v) for u, v in edges)


def validate_tree(graph: Graph, edges, delta) -> TreeVerdict:
    edges = [normalize_edge(u, v) for u, v in edges]
    foreign = [edge for edge in edges if not graph.has_edge(*edge)]
    if foreign:
        return TreeVerdict(TreeReason.not_subgraph, foreign[0])
    if len(set(edges)) != len(edges):
        return TreeVerdict(TreeReason.cyclic, 'repeated edge')

    tree = nx.Graph()
    tree.add_nodes_from(graph.vertices)
    tree.add_edges_from(edges)
    if not nx.is_forest(tree):
        return TreeVerdict(TreeReason.cyclic, nx.find_cycle(tree))
    if not nx.is_connected(tree):
        return TreeVerdict(
            TreeReason.disconnected,
            nx.number_connected_components(tree))

    for vertex, degree in sorted(tree.degree()):
        if degree > delta:
            return TreeVerdict(TreeReason.degree_violation, vertex)
    return TreeVerdict(TreeReason.valid)


def solve_bdmst_exact(instance: ProblemInstance) -> ExactSolution:
    """Minimum-weight spanning tree with every degree at most delta.

    Trees are visited in non-decreasing weight order. All feasible trees of
    the optimal weight are collected and the one with the lexicographically
    smallest sorted edge list is returned.
    """
    _guard(instance.graph)
    best_cost = None
    optima = []
    iterator = nx.SpanningTreeIterator(instance.to_networkx(), minimum=True)
    for tree in iterator:
        cost = int(tree.size(weight='weight'))
        if best_cost is not None and cost > best_cost:
            break
        if max(degree for _, degree in tree.degree()) > instance.delta:
            continue
        best_cost = cost
        optima.append(sorted(_tree_edges(tree)))

    if best_cost is None:
        logger.info("Instance %s has no spanning tree with degree <= %d",
                    instance.label, instance.delta)
        return ExactSolution(None, None)
    return ExactSolution(best_cost, SpanningTree(min(optima), best_cost))


def require_exact(instance: ProblemInstance) -> ExactSolution:
    solution = solve_bdmst_exact(instance)
    if not solution.feasible:
        raise InfeasibleInstanceException(
            "Instance {label} has no spanning tree with degree <= {delta}".format(
                label=instance.label, delta=instance.delta))
    return solution


def is_feasible(instance: ProblemInstance) -> bool:
    return solve_bdmst_exact(instance).feasible


def kruskal_mst(graph: Graph, weights) -> SpanningTree:
    weighted = graph.to_networkx(
        {normalize_edge(*edge): w for edge, w in weights.items()})
    tree = nx.minimum_spanning_tree(weighted, algorithm='kruskal')
    return SpanningTree(_tree_edges(tree), int(tree.size(weight='weight')))
