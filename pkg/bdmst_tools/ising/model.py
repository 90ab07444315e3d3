import logging

import numpy as np

from bdmst_tools.qubo.coordinate import read_coordinates, write_coordinates
from bdmst_tools.qubo.qubo import Qubo

logger = logging.getLogger(__name__)


class IsingException(Exception):
    pass


class IsingModel:
    """E(s) = sum(h_i s_i) + sum(J_ij s_i s_j) + offset, s_i in {-1, +1}.

    ``scale`` is the factor applied to the original cost; dividing an
    energy by it gives the original units back.
    """

    def __init__(self, num_spins, h=None, J=None, offset=0.0, scale=1.0):
        self.num_spins = int(num_spins)
        self.h = np.zeros(self.num_spins)
        if h is not None:
            if isinstance(h, dict):
                for i, value in h.items():
                    self.h[int(i)] = value
            else:
                self.h[:] = np.asarray(h, dtype=float)
        self.J = {}
        for (i, j), value in (J or {}).items():
            if i == j:
                raise IsingException(
                    "Coupling on a single spin {i}".format(i=i))
            key = (int(i), int(j)) if i < j else (int(j), int(i))
            if key[1] >= self.num_spins or key[0] < 0:
                raise IsingException(
                    "Coupling {key} outside {n} spins".format(
                        key=key, n=self.num_spins))
            self.J[key] = self.J.get(key, 0.0) + float(value)
        self.offset = float(offset)
        self.scale = float(scale)

    def coupling_arrays(self):
        if not self.J:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0)
        keys = sorted(self.J)
        rows = np.array([i for i, _ in keys], dtype=np.int64)
        cols = np.array([j for _, j in keys], dtype=np.int64)
        values = np.array([self.J[key] for key in keys])
        return rows, cols, values

    def energy(self, spins) -> float:
        return float(self.energies(np.asarray(spins)[None, :])[0])

    def energies(self, spins) -> np.ndarray:
        """Energies of a (samples, num_spins) array of +-1 spins."""
        spins = np.atleast_2d(np.asarray(spins, dtype=float))
        rows, cols, values = self.coupling_arrays()
        return (self.offset + spins @ self.h +
                (spins[:, rows] * spins[:, cols]) @ values)

    def max_abs(self) -> float:
        values = [abs(v) for v in self.h] + [abs(v) for v in self.J.values()]
        return max(values) if values else 0.0

    def neighbors(self):
        neighbors = {i: set() for i in range(self.num_spins)}
        for i, j in self.J:
            neighbors[i].add(j)
            neighbors[j].add(i)
        return neighbors

    def copy(self) -> 'IsingModel':
        return IsingModel(self.num_spins, self.h.copy(), dict(self.J),
                          self.offset, self.scale)

    def __eq__(self, other):
        return ((self.num_spins == other.num_spins) and
                np.array_equal(self.h, other.h) and
                (self.J == other.J) and
                (self.offset == other.offset))

    def __repr__(self):
        return "<IsingModel spins={n} couplings={m} scale={scale}>".format(
            n=self.num_spins, m=len(self.J), scale=self.scale)


def bits_to_spins(bits):
    """Bit 1 is spin +1, bit 0 is spin -1."""
    return 2 * np.asarray(bits, dtype=int) - 1


def spins_to_bits(spins):
    return (np.asarray(spins, dtype=int) + 1) // 2


def qubo_to_ising(qubo: Qubo) -> IsingModel:
    """Substitute x = (1 + s) / 2 term by term."""
    h = np.zeros(qubo.num_vars)
    J = {}
    offset = float(qubo.offset)
    for i, value in qubo.linear.items():
        value = float(value)
        h[i] += value / 2
        offset += value / 2
    for (i, j), value in qubo.quadratic.items():
        value = float(value)
        J[(i, j)] = value / 4
        h[i] += value / 4
        h[j] += value / 4
        offset += value / 4
    return IsingModel(qubo.num_vars, h, J, offset)


def scale_to_range(ising: IsingModel, j_max=1.0) -> IsingModel:
    """Uniformly rescale so the largest |h| or |J| equals j_max."""
    largest = ising.max_abs()
    if largest == 0:
        raise IsingException("Cannot scale an all-zero model")
    factor = j_max / largest
    if factor == 1.0:
        return ising.copy()
    scaled = IsingModel(
        ising.num_spins, ising.h * factor,
        {key: value * factor for key, value in ising.J.items()},
        ising.offset * factor, ising.scale * factor)
    logger.debug("Scaled Ising model by %g", factor)
    return scaled


def unscale_energy(ising: IsingModel, energy):
    return energy / ising.scale


def write_ising(ising: IsingModel, path):
    linear = {i: repr(float(v)) for i, v in enumerate(ising.h) if v != 0}
    quadratic = {key: repr(v) for key, v in ising.J.items()}
    header = ['spins {n}'.format(n=ising.num_spins),
              'offset {value!r}'.format(value=ising.offset),
              'scale {value!r}'.format(value=ising.scale)]
    with open(path, 'w') as ising_file:
        write_coordinates(ising_file, linear, quadratic, header)


def read_ising(path) -> IsingModel:
    with open(path, 'r') as ising_file:
        header, linear, quadratic = read_coordinates(ising_file)
    meta = dict(line.split(None, 1) for line in header if ' ' in line)
    try:
        num_spins = int(meta['spins'])
    except KeyError:
        raise IsingException(
            "Ising file {path} has no spin count header".format(path=path))
    return IsingModel(num_spins, linear, quadratic,
                      float(meta.get('offset', 0.0)),
                      float(meta.get('scale', 1.0)))
