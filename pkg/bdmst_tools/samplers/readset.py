import gzip
import json
import logging
from collections import OrderedDict
from enum import Enum

import numpy as np

from bdmst_tools.samplers.sampler import SamplerException

logger = logging.getLogger(__name__)


class ReadStatus(Enum):
    sampled = 0       # Raw read of the model handed to the sampler
    logical = 1       # Every chain agreed; spins are logical
    chain_break = 2   # At least one vertex model disagreed; read is a failure


class Read:

    def __init__(self, spins, energy, multiplicity=1,
                 status=ReadStatus.sampled, gauge=None):
        self.spins = tuple(int(s) for s in spins)
        self.energy = None if energy is None else float(energy)
        self.multiplicity = int(multiplicity)
        self.status = status
        self.gauge = gauge

    @property
    def key(self):
        return (self.spins, self.status, self.gauge)

    @property
    def failed(self) -> bool:
        return self.status == ReadStatus.chain_break

    def __eq__(self, other):
        return ((self.spins == other.spins) and
                (self.energy == other.energy) and
                (self.multiplicity == other.multiplicity) and
                (self.status == other.status) and
                (self.gauge == other.gauge))

    def __repr__(self):
        return "<Read {status} x{count} E={energy}>".format(
            status=self.status.name, count=self.multiplicity,
            energy=self.energy)

    def to_dict(self):
        return OrderedDict([
            ('spins', list(self.spins)),
            ('energy', self.energy),
            ('count', self.multiplicity),
            ('status', self.status.name),
            ('gauge', self.gauge),
        ])

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data['spins'], data.get('energy'), data.get('count', 1),
                       ReadStatus[data.get('status', 'sampled')],
                       data.get('gauge'))
        except KeyError as error:
            raise SamplerException("Malformed read record: {error}".format(
                error=error))


def _sort_key(read):
    energy = float('inf') if read.energy is None else read.energy
    gauge = -1 if read.gauge is None else read.gauge
    return (read.status.value, energy, gauge, read.spins)


class ReadSet:
    """Reads with multiplicities and the metadata of the run that made them."""

    def __init__(self, reads=None, meta=None):
        self.reads = list(reads or [])
        self.meta = OrderedDict(meta or {})

    @classmethod
    def from_arrays(cls, spins, energies, meta=None, status=ReadStatus.sampled,
                    gauge=None):
        reads = [Read(row, energy, 1, status, gauge)
                 for row, energy in zip(np.asarray(spins), energies)]
        return cls(reads, meta).aggregate()

    @property
    def num_reads(self) -> int:
        return sum(read.multiplicity for read in self.reads)

    def count(self, status) -> int:
        return sum(read.multiplicity for read in self.reads
                   if read.status == status)

    def fraction(self, status) -> float:
        total = self.num_reads
        return self.count(status) / total if total else 0.0

    def lowest(self):
        candidates = [read for read in self.reads if read.energy is not None]
        if not candidates:
            return None
        return min(candidates, key=lambda read: (read.energy, read.spins))

    def spins(self):
        """All reads expanded by multiplicity, one row each."""
        rows = [read.spins for read in self.reads
                for _ in range(read.multiplicity)]
        return np.array(rows, dtype=int)

    def by_gauge(self):
        groups = OrderedDict()
        for read in sorted(self.reads, key=_sort_key):
            groups.setdefault(read.gauge, []).append(read)
        return OrderedDict((gauge, ReadSet(reads, self.meta))
                           for gauge, reads in sorted(
                               groups.items(),
                               key=lambda item: -1 if item[0] is None else item[0]))

    def aggregate(self) -> 'ReadSet':
        """Merge identical reads, summing their multiplicities."""
        merged = OrderedDict()
        for read in self.reads:
            if read.key in merged:
                merged[read.key].multiplicity += read.multiplicity
            else:
                merged[read.key] = Read(read.spins, read.energy,
                                        read.multiplicity, read.status,
                                        read.gauge)
        return ReadSet(sorted(merged.values(), key=_sort_key), self.meta)

    def extend(self, other: 'ReadSet'):
        self.reads.extend(other.reads)

    def __len__(self):
        return len(self.reads)

    def __iter__(self):
        return iter(self.reads)

    def __eq__(self, other):
        return (self.reads == other.reads) and (self.meta == other.meta)

    def __repr__(self):
        return "<ReadSet {n} reads, {d} distinct>".format(
            n=self.num_reads, d=len(self.reads))

    def save(self, path):
        """Gzip JSON lines: a meta header, then one read per line."""
        with open(path, 'wb') as raw:
            with gzip.GzipFile(filename='', mode='wb', fileobj=raw,
                               mtime=0) as readset_file:
                lines = [json.dumps({'meta': self.meta})]
                lines.extend(json.dumps(read.to_dict()) for read in self.reads)
                readset_file.write(('\n'.join(lines) + '\n').encode('utf-8'))
        logger.debug("Wrote %d reads to %s", self.num_reads, path)


def open_readset(path) -> ReadSet:
    with gzip.open(path, 'rt', encoding='utf-8') as readset_file:
        lines = [line for line in readset_file if line.strip()]
    if not lines:
        raise SamplerException("Empty read file {path}".format(path=path))
    try:
        header = json.loads(lines[0], object_pairs_hook=OrderedDict)
        records = [json.loads(line) for line in lines[1:]]
    except ValueError as error:
        raise SamplerException("Malformed read file {path}: {error}".format(
            path=path, error=error))
    if 'meta' not in header:
        raise SamplerException(
            "Read file {path} has no meta header".format(path=path))
    return ReadSet([Read.from_dict(record) for record in records],
                   header['meta'])
