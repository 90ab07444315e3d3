from collections import OrderedDict, namedtuple
from enum import Enum
from typing import Dict, List

from bdmst_tools.instances.graph import ProblemInstance


class QuboException(Exception):
    pass


class VarKind(Enum):
    X = 0    # x[p, v]: p is the parent of v
    Y = 1    # y[v, l]: v sits at level l
    Z = 2    # z[p, j]: unary slack for the child count of p
    ANC = 3  # a[p, v, l]: ancilla standing for x[p, v] * y[v, l]


class VarId(namedtuple('VarId', ['kind', 'key'])):
    __slots__ = ()

    def __str__(self):
        return '{kind}({key})'.format(
            kind=self.kind.name, key=','.join(str(k) for k in self.key))

    def to_list(self):
        return [self.kind.name] + list(self.key)

    @classmethod
    def from_list(cls, values):
        return cls(VarKind[values[0]], tuple(int(v) for v in values[1:]))


def X(p, v):
    return VarId(VarKind.X, (p, v))


def Y(v, level):
    return VarId(VarKind.Y, (v, level))


def Z(p, j):
    return VarId(VarKind.Z, (p, j))


def ANC(p, v, level):
    return VarId(VarKind.ANC, (p, v, level))


class Registry:
    """Bidirectional map between variables and dense indices.

    Variables are laid out X block first, then Y, Z and ANC, each block
    sorted by its index tuple.
    """

    def __init__(self, variables):
        ordered = sorted(variables, key=lambda var: (var.kind.value, var.key))
        self._variables = ordered
        self._index = {var: i for i, var in enumerate(ordered)}
        if len(self._index) != len(ordered):
            raise QuboException("Duplicate variables in registry")

    def index(self, var: VarId) -> int:
        return self._index[var]

    def get(self, var: VarId, default=None):
        return self._index.get(var, default)

    def variable(self, index: int) -> VarId:
        return self._variables[index]

    def of_kind(self, kind: VarKind) -> List[VarId]:
        return [var for var in self._variables if var.kind == kind]

    def __contains__(self, var):
        return var in self._index

    def __iter__(self):
        return iter(self._variables)

    def __len__(self):
        return len(self._variables)

    def __eq__(self, other):
        return self._variables == other._variables

    def to_list(self):
        return [var.to_list() for var in self._variables]

    @classmethod
    def from_list(cls, values):
        return cls(VarId.from_list(value) for value in values)


def level_preprocess(instance: ProblemInstance, preprocess=True) -> Dict[int, List[int]]:
    """Allowed tree levels for every non-root vertex.

    The root is level 1. A vertex at hop distance d from the root cannot sit
    above level d + 1.
    """
    n = instance.n
    distances = instance.graph.distances(instance.root)
    levels = OrderedDict()
    for v in instance.graph.vertices:
        if v == instance.root:
            continue
        lowest = distances[v] + 1 if preprocess else 2
        levels[v] = list(range(lowest, n + 1))
    return levels


def parent_pairs(instance: ProblemInstance):
    """(p, v) pairs with p adjacent to v and v not the root."""
    pairs = []
    for u, v in instance.graph.edges:
        if v != instance.root:
            pairs.append((u, v))
        if u != instance.root:
            pairs.append((v, u))
    return sorted(pairs)


def slack_width(instance: ProblemInstance, p) -> int:
    if p == instance.root:
        return instance.delta
    return instance.delta - 1


def build_registry(instance: ProblemInstance, preprocess=True) -> Registry:
    levels = level_preprocess(instance, preprocess=preprocess)
    variables = []
    pairs = parent_pairs(instance)
    variables.extend(X(p, v) for p, v in pairs)
    for v, allowed in levels.items():
        variables.extend(Y(v, level) for level in allowed)
    for p in instance.graph.vertices:
        variables.extend(Z(p, j) for j in range(1, slack_width(instance, p) + 1))
    for p, v in pairs:
        if p == instance.root:
            continue
        variables.extend(
            ANC(p, v, level) for level in levels[v] if level >= 3)
    return Registry(variables)


def count_variables(instance: ProblemInstance, preprocess=True) -> Dict[str, int]:
    registry = build_registry(instance, preprocess=preprocess)
    counts = OrderedDict(
        (kind.name, len(registry.of_kind(kind))) for kind in VarKind)
    counts['total'] = len(registry)
    return counts


def variable_upper_bound(n, m, root_degree, delta) -> int:
    """Variable count of the mapping without level preprocessing."""
    return ((2 * m - root_degree) + (n - 1) ** 2 + n * (delta - 1) + 1 +
            (2 * m - 2 * root_degree) * (n - 2))
