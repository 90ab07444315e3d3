from collections import OrderedDict
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Tuple

import numpy as np

from bdmst_tools.qubo.variables import QuboException, Registry, VarId


def _exact(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Rational):
        value = Fraction(value)
        return int(value) if value.denominator == 1 else value
    raise QuboException(
        "QUBO coefficients must be exact, got {value!r}".format(value=value))


class Qubo:
    """Quadratic polynomial over binary variables with exact coefficients.

    Linear terms live in ``linear`` keyed by index; quadratic terms in
    ``quadratic`` keyed by an ``(i, j)`` pair with ``i < j``. Since
    ``x * x == x`` for binaries, diagonal products fold into ``linear``.
    """

    def __init__(self, registry: Registry, penalty_weight=None):
        self.registry = registry
        self.linear = {}
        self.quadratic = {}
        self.offset = 0
        self.penalty_weight = penalty_weight
        self.groups = OrderedDict()
        self.instance = None

    @property
    def num_vars(self) -> int:
        return len(self.registry)

    def _resolve(self, var):
        if isinstance(var, VarId):
            return self.registry.index(var)
        return int(var)

    def add_offset(self, value):
        self.offset = _exact(self.offset + _exact(value))

    def add_linear(self, var, value):
        i = self._resolve(var)
        value = _exact(self.linear.get(i, 0) + _exact(value))
        if value == 0:
            self.linear.pop(i, None)
        else:
            self.linear[i] = value

    def add_quadratic(self, u, v, value):
        i, j = self._resolve(u), self._resolve(v)
        if i == j:
            self.add_linear(i, value)
            return
        key = (i, j) if i < j else (j, i)
        value = _exact(self.quadratic.get(key, 0) + _exact(value))
        if value == 0:
            self.quadratic.pop(key, None)
        else:
            self.quadratic[key] = value

    def add_square(self, terms: Iterable[Tuple[VarId, int]], constant=0):
        """Add ``(sum(c * x) + constant) ** 2``."""
        terms = [(self._resolve(var), _exact(c)) for var, c in terms]
        self.add_offset(_exact(constant) ** 2)
        for k, (i, ci) in enumerate(terms):
            self.add_linear(i, ci * ci + 2 * ci * _exact(constant))
            for j, cj in terms[k + 1:]:
                self.add_quadratic(i, j, 2 * ci * cj)

    def add(self, other: 'Qubo', factor=1):
        if other.registry is not self.registry and other.registry != self.registry:
            raise QuboException("Cannot add QUBOs over different registries")
        factor = _exact(factor)
        self.add_offset(factor * other.offset)
        for i, value in other.linear.items():
            self.add_linear(i, factor * value)
        for (i, j), value in other.quadratic.items():
            self.add_quadratic(i, j, factor * value)

    def energy(self, bits):
        """Exact value of the polynomial on one assignment."""
        bits = [int(b) for b in bits]
        if len(bits) != self.num_vars:
            raise QuboException(
                "Assignment has {got} bits, QUBO has {want} variables".format(
                    got=len(bits), want=self.num_vars))
        total = self.offset
        for i, value in self.linear.items():
            if bits[i]:
                total += value
        for (i, j), value in self.quadratic.items():
            if bits[i] and bits[j]:
                total += value
        return total

    def to_arrays(self):
        """Float linear vector and upper-triangular coupling matrix."""
        linear = np.zeros(self.num_vars)
        matrix = np.zeros((self.num_vars, self.num_vars))
        for i, value in self.linear.items():
            linear[i] = float(value)
        for (i, j), value in self.quadratic.items():
            matrix[i, j] = float(value)
        return linear, matrix

    def energies(self, bits) -> np.ndarray:
        """Vectorised float energies for a (samples, num_vars) 0/1 array."""
        bits = np.atleast_2d(np.asarray(bits, dtype=float))
        linear, matrix = self.to_arrays()
        return (float(self.offset) + bits @ linear +
                np.einsum('ki,ij,kj->k', bits, matrix, bits))

    def interaction_graph(self):
        neighbors = {i: set() for i in range(self.num_vars)}
        for i, j in self.quadratic:
            neighbors[i].add(j)
            neighbors[j].add(i)
        return neighbors

    def copy(self) -> 'Qubo':
        other = Qubo(self.registry, self.penalty_weight)
        other.linear = dict(self.linear)
        other.quadratic = dict(self.quadratic)
        other.offset = self.offset
        other.groups = OrderedDict(self.groups)
        other.instance = self.instance
        return other

    def __eq__(self, other):
        return ((self.registry == other.registry) and
                (self.linear == other.linear) and
                (self.quadratic == other.quadratic) and
                (self.offset == other.offset))

    def __repr__(self):
        return "<Qubo vars={n} linear={lin} quadratic={quad} A={a}>".format(
            n=self.num_vars, lin=len(self.linear), quad=len(self.quadratic),
            a=self.penalty_weight)
