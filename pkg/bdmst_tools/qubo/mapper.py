import logging
from collections import OrderedDict

import networkx as nx

from bdmst_tools.instances.graph import (
    InfeasibleInstanceException, ProblemInstance, SpanningTree)
from bdmst_tools.instances.oracle import MAX_ORACLE_VERTICES, is_feasible
from bdmst_tools.qubo.qubo import Qubo
from bdmst_tools.qubo.variables import (
    ANC, QuboException, VarKind, X, Y, Z, build_registry, parent_pairs,
    slack_width)

logger = logging.getLogger(__name__)

GROUPS = ('cost', 'pen1', 'pen2', 'pen3', 'pen4')


def ancilla_penalty(x, y, a):
    """Zero iff a == x * y, positive otherwise."""
    return 3 * a + x * y - 2 * a * x - 2 * a * y


class QuboMapping:
    """Level-based BD-MST encoding of one instance."""

    def __init__(self, instance: ProblemInstance, epsilon=0, preprocess=True):
        if epsilon < 0:
            raise QuboException(
                "Penalty margin must be non-negative, got {e}".format(
                    e=epsilon))
        self.instance = instance
        self.epsilon = epsilon
        self.preprocess = preprocess
        self.registry = build_registry(instance, preprocess=preprocess)
        self.penalty_weight = instance.w_max + epsilon
        self.pairs = parent_pairs(instance)

    def _children(self, p):
        return [(q, v) for q, v in self.pairs if q == p]

    def _parents(self, v):
        return [(p, w) for p, w in self.pairs if w == v]

    def _new(self):
        return Qubo(self.registry, self.penalty_weight)

    def cost(self) -> Qubo:
        cost = self._new()
        for p, v in self.pairs:
            cost.add_linear(X(p, v), self.instance.weight(p, v))
        return cost

    def one_parent(self) -> Qubo:
        penalty = self._new()
        for v in self.instance.graph.vertices:
            if v == self.instance.root:
                continue
            penalty.add_square(
                [(X(p, v), 1) for p, _ in self._parents(v)], -1)
        return penalty

    def one_level(self) -> Qubo:
        penalty = self._new()
        for v in self.instance.graph.vertices:
            if v == self.instance.root:
                continue
            penalty.add_square(
                [(var, 1) for var in self.registry.of_kind(VarKind.Y)
                 if var.key[0] == v], -1)
        return penalty

    def degree_bound(self) -> Qubo:
        penalty = self._new()
        for p in self.instance.graph.vertices:
            terms = [(X(p, v), 1) for _, v in self._children(p)]
            terms.extend(
                (Z(p, j), -1) for j in range(1, slack_width(self.instance, p) + 1))
            penalty.add_square(terms)
        return penalty

    def level_consistency(self) -> Qubo:
        penalty = self._new()
        root = self.instance.root
        for p, v in self.pairs:
            if p == root:
                # x(1 - y) + y(1 - x)
                x, y = X(p, v), Y(v, 2)
                penalty.add_linear(x, 1)
                penalty.add_linear(y, 1)
                penalty.add_quadratic(x, y, -2)
                continue
            for var in self.registry.of_kind(VarKind.Y):
                child, level = var.key
                if child != v or level < 3:
                    continue
                # x*y*(1 - y_parent) with the ancilla standing for x*y
                x, y, a = X(p, v), var, ANC(p, v, level)
                penalty.add_linear(a, 4)
                penalty.add_quadratic(x, y, 1)
                penalty.add_quadratic(a, x, -2)
                penalty.add_quadratic(a, y, -2)
                parent_level = Y(p, level - 1)
                if parent_level in self.registry:
                    penalty.add_quadratic(a, parent_level, -1)
        if not self.preprocess:
            adjacent = set(self.instance.graph.neighbors(root))
            for v in self.instance.graph.vertices:
                if v != root and v not in adjacent:
                    penalty.add_linear(Y(v, 2), 1)
        return penalty

    def build(self) -> Qubo:
        groups = OrderedDict([
            ('cost', self.cost()),
            ('pen1', self.one_parent()),
            ('pen2', self.one_level()),
            ('pen3', self.degree_bound()),
            ('pen4', self.level_consistency()),
        ])
        qubo = self._new()
        qubo.add(groups['cost'])
        for name in GROUPS[1:]:
            qubo.add(groups[name], self.penalty_weight)
        qubo.groups = groups
        logger.info("Compiled %s: %d variables, A=%s",
                    self.instance.label, qubo.num_vars, self.penalty_weight)
        return qubo


def build_qubo(instance: ProblemInstance, epsilon=0, preprocess=True,
               allow_infeasible=False) -> Qubo:
    """C = C0 + A * (pen1 + pen2 + pen3 + pen4) with A = w_max + epsilon."""
    if not allow_infeasible and instance.n <= MAX_ORACLE_VERTICES:
        if not is_feasible(instance):
            raise InfeasibleInstanceException(
                "Instance {label} has no spanning tree with degree <= {delta}".format(
                    label=instance.label, delta=instance.delta))
    qubo = QuboMapping(instance, epsilon=epsilon, preprocess=preprocess).build()
    qubo.instance = instance
    return qubo


def penalty_terms(qubo: Qubo):
    """The cost polynomial and the four unweighted penalty polynomials."""
    if not qubo.groups:
        raise QuboException("QUBO was not built by the level mapping")
    return qubo.groups


def tree_levels(instance: ProblemInstance, tree: SpanningTree):
    """Parent and level of every vertex of a tree hung from the root."""
    graph = nx.Graph()
    graph.add_nodes_from(instance.graph.vertices)
    graph.add_edges_from(tree.edges)
    parents = {instance.root: None}
    parents.update(nx.bfs_predecessors(graph, instance.root, sort_neighbors=sorted))
    levels = {v: depth + 1 for v, depth in
              nx.single_source_shortest_path_length(graph, instance.root).items()}
    return parents, levels


def encode_tree(qubo: Qubo, tree: SpanningTree, instance: ProblemInstance = None):
    """Canonical assignment of a spanning tree.

    Slack bits are filled from the lowest index and every ancilla equals
    the product it stands for.
    """
    instance = instance if instance is not None else qubo.instance
    registry = qubo.registry
    parents, levels = tree_levels(instance, tree)
    if len(levels) != instance.n:
        raise QuboException("Edges do not span the instance graph")
    bits = [0] * len(registry)

    def set_bit(var):
        index = registry.get(var)
        if index is None:
            raise QuboException(
                "Tree needs {var}, which the encoding does not have".format(
                    var=var))
        bits[index] = 1

    children = {v: 0 for v in instance.graph.vertices}
    for v, p in parents.items():
        if p is None:
            continue
        set_bit(X(p, v))
        set_bit(Y(v, levels[v]))
        children[p] += 1
    for p, count in children.items():
        for j in range(1, min(count, slack_width(instance, p)) + 1):
            set_bit(Z(p, j))
    for var in registry.of_kind(VarKind.ANC):
        p, v, level = var.key
        x = bits[registry.index(X(p, v))]
        y = bits[registry.index(Y(v, level))]
        bits[registry.index(var)] = x * y
    return bits
