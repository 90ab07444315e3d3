"""Coordinate text format: one ``i j coeff`` term per line, ``i == j`` for
linear terms, ``#`` header lines for metadata. The variable registry also
goes to a JSON sidecar next to the text file.
"""
import json
import logging
from fractions import Fraction

from bdmst_tools.qubo.qubo import Qubo
from bdmst_tools.qubo.variables import QuboException, Registry

logger = logging.getLogger(__name__)


def sidecar_path(path):
    return '{path}.json'.format(path=path)


def write_coordinates(handle, linear, quadratic, header=()):
    for line in header:
        handle.write('# {line}\n'.format(line=line))
    for i in sorted(linear):
        handle.write('{i} {i} {value}\n'.format(i=i, value=linear[i]))
    for i, j in sorted(quadratic):
        handle.write('{i} {j} {value}\n'.format(
            i=i, j=j, value=quadratic[(i, j)]))


def read_coordinates(handle, parse=float):
    header = []
    linear = {}
    quadratic = {}
    for number, line in enumerate(handle, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith('#'):
            header.append(line[1:].strip())
            continue
        try:
            i, j, value = line.split()
            i, j, value = int(i), int(j), parse(value)
        except ValueError:
            raise QuboException(
                "Malformed coordinate line {number}: {line}".format(
                    number=number, line=line))
        if i == j:
            linear[i] = value
        else:
            quadratic[(min(i, j), max(i, j))] = value
    return header, linear, quadratic


def _exact(text):
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value


def write_qubo(qubo: Qubo, path):
    header = ['offset {value}'.format(value=qubo.offset),
              'penalty_weight {value}'.format(value=qubo.penalty_weight)]
    header.extend(
        'var {index} {kind} {params}'.format(
            index=index, kind=var.kind.name,
            params=' '.join(str(k) for k in var.key))
        for index, var in enumerate(qubo.registry))
    with open(path, 'w') as qubo_file:
        write_coordinates(qubo_file, qubo.linear, qubo.quadratic, header)
    with open(sidecar_path(path), 'w') as registry_file:
        json.dump({'registry': qubo.registry.to_list(),
                   'offset': str(qubo.offset),
                   'penalty_weight': str(qubo.penalty_weight)},
                  registry_file, indent=2)
        registry_file.write('\n')
    logger.debug("Wrote %d-variable QUBO to %s", qubo.num_vars, path)


def read_qubo(path) -> Qubo:
    with open(sidecar_path(path), 'r') as registry_file:
        sidecar = json.load(registry_file)
    with open(path, 'r') as qubo_file:
        _, linear, quadratic = read_coordinates(qubo_file, parse=_exact)
    penalty_weight = sidecar.get('penalty_weight')
    qubo = Qubo(Registry.from_list(sidecar['registry']),
                None if penalty_weight in (None, 'None') else _exact(penalty_weight))
    qubo.offset = _exact(sidecar['offset'])
    qubo.linear = linear
    qubo.quadratic = quadratic
    return qubo
