from enum import Enum

from bdmst_tools.instances.graph import ProblemInstance, SpanningTree
from bdmst_tools.instances.oracle import TreeReason, tree_cost, validate_tree
from bdmst_tools.qubo.qubo import Qubo
from bdmst_tools.qubo.variables import QuboException, VarKind


class EncodingStatus(Enum):
    valid_tree = 0        # Bits encode a degree-bounded spanning tree
    no_parent = 1         # A non-root vertex has no parent
    multiple_parents = 2  # A non-root vertex has several parents
    level = 3             # A non-root vertex does not sit at exactly one level
    level_mismatch = 4    # Parent level is not one less than the child's
    degree = 5            # Child count exceeds the bound
    not_tree = 6          # Parent edges do not form a spanning tree


class DecodedSolution:

    def __init__(self, status, energy, tree=None, vertex=None):
        self.status = status
        self.energy = energy
        self.tree = tree
        self.vertex = vertex

    @property
    def valid(self) -> bool:
        return self.status == EncodingStatus.valid_tree

    @property
    def cost(self):
        return self.tree.cost if self.tree is not None else None

    def __eq__(self, other):
        return ((self.status == other.status) and
                (self.energy == other.energy) and
                (self.tree == other.tree))

    def __repr__(self):
        if self.valid:
            return "<DecodedSolution valid cost={cost} energy={energy}>".format(
                cost=self.cost, energy=self.energy)
        return "<DecodedSolution {status} at {vertex} energy={energy}>".format(
            status=self.status.name, vertex=self.vertex, energy=self.energy)


def decode(bits, qubo: Qubo, instance: ProblemInstance = None) -> DecodedSolution:
    """Rebuild the tree from an assignment, reporting the first broken rule."""
    instance = instance if instance is not None else qubo.instance
    if instance is None:
        raise QuboException("Decoding needs the instance the QUBO encodes")
    bits = [int(b) for b in bits]
    energy = qubo.energy(bits)
    registry = qubo.registry

    parents = {}
    levels = {}
    for index, var in enumerate(registry):
        if not bits[index]:
            continue
        if var.kind == VarKind.X:
            p, v = var.key
            parents.setdefault(v, []).append(p)
        elif var.kind == VarKind.Y:
            v, level = var.key
            levels.setdefault(v, []).append(level)

    non_root = [v for v in instance.graph.vertices if v != instance.root]

    def broken(status, vertex):
        return DecodedSolution(status, energy, vertex=vertex)

    for v in non_root:
        count = len(parents.get(v, []))
        if count == 0:
            return broken(EncodingStatus.no_parent, v)
        if count > 1:
            return broken(EncodingStatus.multiple_parents, v)
    for v in non_root:
        if len(levels.get(v, [])) != 1:
            return broken(EncodingStatus.level, v)

    level_of = {v: levels[v][0] for v in non_root}
    level_of[instance.root] = 1
    for v in non_root:
        if level_of[parents[v][0]] != level_of[v] - 1:
            return broken(EncodingStatus.level_mismatch, v)

    edges = [(parents[v][0], v) for v in non_root]
    verdict = validate_tree(instance.graph, edges, instance.delta)
    if verdict.reason == TreeReason.degree_violation:
        return broken(EncodingStatus.degree, verdict.detail)
    if not verdict.valid:
        return broken(EncodingStatus.not_tree, verdict.detail)

    tree = SpanningTree(edges, tree_cost(instance, edges))
    return DecodedSolution(EncodingStatus.valid_tree, energy, tree=tree)
