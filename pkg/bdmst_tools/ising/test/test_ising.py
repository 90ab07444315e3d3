import itertools
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

import bdmst_tools.ising.gauge as gauge
import bdmst_tools.ising.model as model
import bdmst_tools.qubo.qubo as qubo
import bdmst_tools.qubo.variables as variables


def all_spins(n):
    return np.array(list(itertools.product((-1, 1), repeat=n)))


def random_model(rng, n, density=0.5):
    J = {}
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            J[(i, j)] = rng.uniform(-1, 1)
    return model.IsingModel(n, rng.uniform(-1, 1, size=n), J,
                            rng.uniform(-1, 1))


def plain_qubo(num_vars, linear, quadratic, offset=0):
    registry = variables.Registry(
        [variables.X(1, v) for v in range(2, num_vars + 2)])
    sut = qubo.Qubo(registry)
    for i, value in linear.items():
        sut.add_linear(i, value)
    for (i, j), value in quadratic.items():
        sut.add_quadratic(i, j, value)
    sut.add_offset(offset)
    return sut


class TestConversion(unittest.TestCase):

    def test_single_linear_term(self):
        sut = model.qubo_to_ising(plain_qubo(1, {0: 1}, {}))
        self.assertEqual(0.5, sut.h[0])
        self.assertEqual(0.5, sut.offset)

    def test_single_product(self):
        sut = model.qubo_to_ising(plain_qubo(2, {}, {(0, 1): 1}))
        self.assertEqual({(0, 1): 0.25}, sut.J)
        self.assertEqual([0.25, 0.25], sut.h.tolist())
        self.assertEqual(0.25, sut.offset)

    def test_energies_agree_pointwise(self):
        rng = np.random.default_rng(3)
        linear = {i: int(rng.integers(-5, 6)) for i in range(8)}
        quadratic = {(i, j): int(rng.integers(-5, 6))
                     for i, j in itertools.combinations(range(8), 2)}
        source = plain_qubo(8, linear, quadratic, offset=7)
        sut = model.qubo_to_ising(source)
        bits = np.array(list(itertools.product((0, 1), repeat=8)))
        expected = [source.energy(row) for row in bits]
        np.testing.assert_allclose(
            expected, sut.energies(model.bits_to_spins(bits)), atol=1e-12)

    def test_spin_convention(self):
        self.assertEqual([-1, 1], model.bits_to_spins([0, 1]).tolist())
        self.assertEqual([0, 1], model.spins_to_bits([-1, 1]).tolist())


class TestScaling(unittest.TestCase):

    def test_scales_down(self):
        source = model.IsingModel(2, [2.0, -1.0], {(0, 1): 4.0})
        sut = model.scale_to_range(source)
        self.assertEqual([0.5, -0.25], sut.h.tolist())
        self.assertEqual({(0, 1): 1.0}, sut.J)
        self.assertEqual(0.25, sut.scale)
        self.assertEqual(8.0, model.unscale_energy(sut, 2.0))

    def test_identity_when_at_range(self):
        source = model.IsingModel(2, [1.0, -0.5], {(0, 1): 0.25})
        sut = model.scale_to_range(source)
        self.assertEqual(source, sut)
        self.assertEqual(1.0, sut.scale)

    def test_all_zero_rejected(self):
        with self.assertRaises(model.IsingException):
            model.scale_to_range(model.IsingModel(3))

    def test_ground_states_preserved(self):
        rng = np.random.default_rng(5)
        spins = all_spins(10)
        for _ in range(10):
            source = random_model(rng, 10)
            source.J = {k: 3 * v for k, v in source.J.items()}
            sut = model.scale_to_range(source)
            self.assertAlmostEqual(1.0, sut.max_abs())
            self.assertEqual(np.argmin(source.energies(spins)),
                             np.argmin(sut.energies(spins)))


class TestGauge(unittest.TestCase):

    def test_identity(self):
        rng = np.random.default_rng(1)
        source = random_model(rng, 5)
        sut = gauge.gauge_transform(source, gauge.Gauge.identity(5))
        self.assertEqual(source, sut)

    def test_two_spin_example(self):
        source = model.IsingModel(2, [0.3, -0.7], {(0, 1): 0.5})
        sut = gauge.gauge_transform(source, gauge.Gauge([1, -1]))
        self.assertEqual([0.3, 0.7], sut.h.tolist())
        self.assertEqual({(0, 1): -0.5}, sut.J)

    def test_incomplete_gauge(self):
        with self.assertRaises(model.IsingException):
            gauge.gauge_transform(model.IsingModel(3), gauge.Gauge([1, 1]))

    def test_bad_signs(self):
        with self.assertRaises(model.IsingException):
            gauge.Gauge([1, 0])

    def test_spectrum_invariant(self):
        rng = np.random.default_rng(17)
        spins = all_spins(10)
        for trial in range(50):
            source = random_model(rng, 10)
            a = gauge.random_gauge(10, seed=trial)
            sut = gauge.gauge_transform(source, a)
            np.testing.assert_allclose(
                np.sort(source.energies(spins)), np.sort(sut.energies(spins)),
                atol=1e-12)

    def test_ungauge_round_trip_energy(self):
        rng = np.random.default_rng(23)
        source = random_model(rng, 6)
        a = gauge.random_gauge(6, seed=4)
        gauged = gauge.gauge_transform(source, a)
        read = rng.choice((-1, 1), size=6)
        original = gauge.ungauge_read(read, a)
        self.assertAlmostEqual(gauged.energy(read), source.energy(original))
        np.testing.assert_array_equal(
            read, gauge.ungauge_read(original, a))
        bits = model.spins_to_bits(read)
        np.testing.assert_array_equal(
            model.spins_to_bits(original),
            gauge.ungauge_read(bits, a, binary=True))

    def test_random_gauge_seeded(self):
        self.assertEqual(gauge.random_gauge(20, seed=9),
                         gauge.random_gauge(20, seed=9))
        self.assertEqual(9, gauge.random_gauge(20, seed=9).seed)


class TestFiles(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def test_ising_file(self):
        sut = model.IsingModel(3, [0.1, 0.0, -0.3], {(0, 2): -0.75},
                               offset=1.5, scale=0.5)
        path = os.path.join(self.workspace, 'model.ising')
        model.write_ising(sut, path)
        loaded = model.read_ising(path)
        self.assertEqual(sut, loaded)
        self.assertEqual(0.5, loaded.scale)

    def test_gauge_file(self):
        sut = gauge.random_gauge(6, seed=12)
        path = os.path.join(self.workspace, 'gauge.json')
        sut.save(path)
        with open(path) as gauge_file:
            loaded = gauge.Gauge.from_dict(json.load(gauge_file))
        self.assertEqual(sut, loaded)
        self.assertEqual(12, loaded.seed)
