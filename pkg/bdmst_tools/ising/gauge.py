import json

import numpy as np

from bdmst_tools.ising.model import IsingException, IsingModel


class Gauge:
    """Spin relabelling s_i -> a_i s_i with a_i in {-1, +1}."""

    def __init__(self, signs, seed=None):
        self.signs = np.asarray(signs, dtype=int)
        if not np.all(np.abs(self.signs) == 1):
            raise IsingException("Gauge signs must be +1 or -1")
        self.seed = seed

    @classmethod
    def identity(cls, num_spins):
        return cls(np.ones(num_spins, dtype=int))

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.signs == 1))

    def __len__(self):
        return len(self.signs)

    def __eq__(self, other):
        return np.array_equal(self.signs, other.signs)

    def __repr__(self):
        return "<Gauge spins={n} flipped={flipped} seed={seed}>".format(
            n=len(self.signs), flipped=int(np.sum(self.signs < 0)),
            seed=self.seed)

    def to_dict(self):
        return {'signs': self.signs.tolist(), 'seed': self.seed}

    @classmethod
    def from_dict(cls, data):
        return cls(data['signs'], seed=data.get('seed'))

    def save(self, path):
        with open(path, 'w') as gauge_file:
            json.dump(self.to_dict(), gauge_file)
            gauge_file.write('\n')


def random_gauge(num_spins, seed) -> Gauge:
    rng = np.random.default_rng(seed)
    return Gauge(rng.choice((-1, 1), size=num_spins), seed=seed)


def gauge_transform(ising: IsingModel, gauge: Gauge) -> IsingModel:
    """h_i -> a_i h_i, J_ij -> a_i a_j J_ij."""
    if len(gauge) != ising.num_spins:
        raise IsingException(
            "Gauge covers {g} spins, model has {n}".format(
                g=len(gauge), n=ising.num_spins))
    a = gauge.signs
    J = {(i, j): a[i] * a[j] * value for (i, j), value in ising.J.items()}
    return IsingModel(ising.num_spins, a * ising.h, J, ising.offset,
                      ising.scale)


def ungauge_read(config, gauge: Gauge, binary=False):
    """Map a read of the gauged model back to the original frame.

    Spins flip sign where a_i = -1; with ``binary`` the bits flip instead.
    Applying it twice gives the read back.
    """
    config = np.asarray(config, dtype=int)
    if config.shape[-1] != len(gauge):
        raise IsingException(
            "Read has {got} values, gauge covers {want}".format(
                got=config.shape[-1], want=len(gauge)))
    if binary:
        return np.where(gauge.signs < 0, 1 - config, config)
    return config * gauge.signs
