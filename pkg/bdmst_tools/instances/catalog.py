from collections import OrderedDict
from typing import List

from bdmst_tools.instances.graph import (
    Graph, InstanceException, ProblemInstance)
from bdmst_tools.instances.oracle import is_feasible


# Five-vertex benchmark graphs, edges in their published order.
GRAPHS = OrderedDict([
    ('m4ver1', [(1, 2), (2, 3), (3, 4), (4, 5)]),
    ('m5ver1', [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]),
    ('m5ver2', [(1, 2), (2, 3), (2, 5), (3, 4), (4, 5)]),
    ('m5ver3', [(1, 2), (2, 3), (2, 4), (3, 4), (4, 5)]),
    ('m5ver5', [(1, 2), (1, 3), (1, 4), (1, 5), (4, 5)]),
    ('m5ver6', [(1, 2), (2, 3), (3, 4), (4, 5), (3, 5)]),
    ('m6ver1', [(1, 2), (1, 5), (2, 5), (2, 3), (3, 4), (4, 5)]),
    ('m6ver2', [(1, 2), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)]),
    ('m6ver3', [(1, 2), (2, 3), (2, 5), (3, 5), (3, 4), (4, 5)]),
    ('m6ver4', [(1, 2), (1, 5), (1, 3), (2, 3), (3, 4), (4, 5)]),
    ('m6ver5', [(1, 2), (1, 3), (2, 3), (3, 5), (3, 4), (4, 5)]),
    ('m6ver6', [(1, 2), (2, 3), (3, 4), (1, 4), (2, 5), (4, 5)]),
    ('m7ver1', [(1, 2), (1, 5), (1, 4), (2, 5), (2, 3), (3, 4), (4, 5)]),
    ('m7ver2', [(1, 2), (1, 5), (2, 5), (2, 3), (2, 4), (3, 5), (4, 5)]),
    ('m7ver3', [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)]),
    ('m7ver4', [(1, 2), (1, 3), (1, 4), (2, 4), (2, 3), (3, 4), (4, 5)]),
    ('m7ver5', [(1, 2), (2, 3), (3, 4), (1, 4), (4, 5), (2, 5), (3, 5)]),
    ('m7ver6', [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)]),
    ('m8ver1', [(1, 2), (1, 5), (1, 3), (1, 4), (2, 5), (2, 3), (3, 4),
                (4, 5)]),
    ('m8ver2', [(1, 2), (1, 5), (2, 5), (2, 3), (2, 4), (3, 4), (3, 5),
                (4, 5)]),
    ('m9ver1', [(1, 2), (2, 3), (4, 5), (1, 5), (1, 4), (1, 3), (2, 5),
                (2, 4), (3, 5)]),
    ('m10ver1', [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 4), (1, 3),
                 (2, 5), (2, 4), (3, 5)]),
])

# Weight lists; a graph with m edges takes the first m entries.
WEIGHTS = OrderedDict([
    ('w2', [1, 2, 1, 2, 1, 2, 1, 2, 1, 2]),
    ('w3', [1, 1, 2, 1, 1, 2, 1, 1, 2, 1]),
    ('w4', [1, 1, 2, 2, 1, 1, 2, 2, 1, 1]),
    ('w5', [1, 4, 1, 4, 1, 4, 1, 4, 1, 4]),
    ('w6', [1, 3, 6, 1, 3, 6, 1, 3, 6, 1]),
    ('w7', [1, 7, 1, 7, 1, 7, 1, 7, 1, 7]),
    ('w8', [3, 2, 1, 3, 2, 1, 3, 2, 1, 3]),
    ('w9', [4, 3, 2, 1, 4, 3, 2, 1, 4, 3]),
    ('w10', [5, 4, 3, 2, 1, 5, 4, 3, 2, 1]),
    ('w11', [6, 5, 4, 3, 2, 1, 6, 5, 4, 3]),
    ('w12', [7, 6, 5, 4, 3, 2, 1, 7, 6, 5]),
    ('w13', [1, 1, 3, 4, 2, 1, 2, 3, 4, 2]),
    ('w14', [3, 2, 1, 1, 1, 1, 2, 4, 2, 2]),
    ('w15', [2, 1, 2, 1, 4, 1, 1, 3, 3, 2]),
    ('w16', [4, 3, 3, 4, 3, 3, 4, 3, 4]),
    ('w17', [3, 4, 7, 5, 5, 5, 5]),
    ('w18', [2, 1, 4, 1, 2, 1, 2]),
    ('w19', [4, 6, 4, 7, 4, 7]),
    ('w20', [1, 1, 2, 3, 2, 3]),
    ('w21', [4, 5, 4, 5, 5]),
    ('w22', [2, 2, 6, 2, 4]),
    ('w23', [3, 3, 5, 2, 3, 2, 5, 2, 5]),
    ('w24', [4, 3, 2, 2]),
    ('w25', [2, 2, 6, 2, 4]),
    ('w26', [4, 3, 3, 3]),
    ('w27', [3, 4, 7, 5, 5, 5, 5]),
    ('w28', [4, 6, 4, 7, 4, 7]),
    ('w29', [6, 4, 2, 2]),
])

NUM_VERTICES = 5


class Catalog:
    """The built-in benchmark graphs and weight lists."""

    def __init__(self, graphs, weights):
        self.graphs = graphs
        self.weights = weights

    def graph(self, label: str) -> Graph:
        try:
            return self.graphs[label]
        except KeyError:
            raise InstanceException(
                "Unknown catalog graph {label}".format(label=label))

    def weight_list(self, label: str) -> List[int]:
        try:
            return self.weights[label]
        except KeyError:
            raise InstanceException(
                "Unknown catalog weight list {label}".format(label=label))

    def instance(self, graph_label, weight_label, delta=2, root=None):
        graph = self.graph(graph_label)
        weights = self.weight_list(weight_label)
        if len(weights) < graph.m:
            raise InstanceException(
                "Weight list {w} has {count} entries, {g} needs {m}".format(
                    w=weight_label, count=len(weights), g=graph_label,
                    m=graph.m))
        return ProblemInstance(
            graph, weights[:graph.m], delta, root=root,
            label='{g}/{w}'.format(g=graph_label, w=weight_label))

    def pairings(self):
        for graph_label, graph in self.graphs.items():
            for weight_label, weights in self.weights.items():
                if len(weights) >= graph.m:
                    yield graph_label, weight_label

    def __len__(self):
        return len(self.graphs)


def load_catalog() -> Catalog:
    graphs = OrderedDict(
        (label, Graph(NUM_VERTICES, edges, label=label))
        for label, edges in GRAPHS.items())
    weights = OrderedDict(
        (label, list(values)) for label, values in WEIGHTS.items())
    return Catalog(graphs, weights)


def catalog_instances(delta=2, root=None, feasible_only=True):
    """Every graph/weight pairing whose weight list covers the graph.

    With feasible_only, pairings whose graph has no spanning tree within
    the degree bound (m5ver5 at delta 2) are left out.
    """
    catalog = load_catalog()
    instances = [catalog.instance(g, w, delta=delta, root=root)
                 for g, w in catalog.pairings()]
    if feasible_only:
        instances = [i for i in instances if is_feasible(i)]
    return instances


def from_label(label: str, delta=2, root=None) -> ProblemInstance:
    """Build a catalog instance from a "graph/weights" label."""
    try:
        graph_label, weight_label = label.split('/')
    except ValueError:
        raise InstanceException(
            "Catalog label {label} is not of the form graph/weights".format(
                label=label))
    return load_catalog().instance(graph_label, weight_label, delta=delta,
                                   root=root)
