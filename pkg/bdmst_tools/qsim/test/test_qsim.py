import csv
import functools
import os
import shutil
import tempfile
import unittest

import mock
import numpy as np

import bdmst_tools.embedding.embedded as embedded
import bdmst_tools.embedding.embedding as embedding
import bdmst_tools.embedding.hardware as hardware
import bdmst_tools.ising.model as model
import bdmst_tools.qsim.hamiltonian as hamiltonian
import bdmst_tools.qsim.perturbation as perturbation
import bdmst_tools.qsim.relaxation as relaxation
import bdmst_tools.qsim.schedule as schedule
import bdmst_tools.qsim.spectrum as spectrum
import bdmst_tools.qsim.toys as toys
from bdmst_tools.instances.graph import SizeGuardException
from bdmst_tools.samplers.exhaustive import exhaustive_energies

ZERO = np.array([1.0, 0.0])
ONE = np.array([0.0, 1.0])
PLUS = (ZERO + ONE) / np.sqrt(2)
MINUS = (ZERO - ONE) / np.sqrt(2)

# Toy qubits 0, 1, 4, 5 are spins 0..3; the chain is spins 1 and 3.
S_GRID = np.linspace(0.01, 0.99, 99)


def product_state(*qubits):
    """Qubit 0 first; qubit 0 is the least significant bit of the index."""
    return functools.reduce(np.kron, reversed(qubits))


def random_model(rng, n):
    J = {(i, j): rng.uniform(-1, 1) for i in range(n) for j in range(i + 1, n)
         if rng.random() < 0.5}
    return model.IsingModel(n, rng.uniform(-1, 1, size=n), J)


def single_qubit(field):
    layout = embedding.Embedding({0: [0]}, hardware.chimera_graph(1, 1, 4))
    return embedded.embed_ising(model.IsingModel(1, [field]), layout, 1.0)


class TestSchedule(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def test_default_curves(self):
        self.sut = schedule.AnnealSchedule()
        self.assertAlmostEqual(0.7, self.sut.A(0.3))
        self.assertAlmostEqual(0.3, self.sut.B(0.3))

    def test_pause(self):
        self.sut = schedule.AnnealSchedule(t_a=1.0, s_p=0.4, t_p=2.0)
        self.assertEqual(3.0, self.sut.total_time)
        np.testing.assert_allclose([0.0, 0.2, 0.4, 0.4, 0.4, 1.0],
                                   self.sut.s_of_t([0.0, 0.2, 0.4, 1.0, 2.4, 3.0]))

    def test_no_pause(self):
        self.sut = schedule.AnnealSchedule(t_a=2.0)
        self.assertEqual(2.0, self.sut.total_time)
        np.testing.assert_allclose([0.0, 0.5, 1.0], self.sut.s_of_t([0.0, 1.0, 2.0]))

    def test_invalid(self):
        with self.assertRaises(schedule.SimulationException):
            schedule.AnnealSchedule(t_a=0.0)
        with self.assertRaises(schedule.SimulationException):
            schedule.AnnealSchedule(s_p=1.5, t_p=1.0)
        with self.assertRaises(schedule.SimulationException):
            schedule.AnnealSchedule(table=([0.0, 1.0], [0.0, 1.0], [0.0, 1.0]))

    def test_open_schedule(self):
        path = os.path.join(self.workspace, 'schedule.csv')
        with open(path, 'w', newline='') as schedule_file:
            writer = csv.writer(schedule_file)
            writer.writerows([['s', 'A', 'B'], [0, 1, 0], [0.5, 0.4, 0.6],
                              [1, 0, 1]])
        self.sut = schedule.open_schedule(path, t_a=2.0)
        self.assertAlmostEqual(0.7, self.sut.A(0.25))
        self.assertAlmostEqual(0.8, self.sut.B(0.75))
        self.assertEqual(2.0, self.sut.t_a)

    def test_missing_schedule(self):
        with self.assertRaises(schedule.SimulationException):
            schedule.open_schedule(os.path.join(self.workspace, 'missing.csv'))


class TestHamiltonian(unittest.TestCase):

    def setUp(self):
        self.toy = toys.triangle_toy(2.0)
        self.schedule = schedule.AnnealSchedule()

    def test_diagonal_at_end(self):
        self.sut = hamiltonian.hamiltonian_at(self.toy, self.schedule, 1.0)
        np.testing.assert_allclose(exhaustive_energies(self.toy.ising),
                                   self.sut.diagonal())
        self.assertEqual(0, (self.sut - hamiltonian.scipy.sparse.diags(
            self.sut.diagonal())).count_nonzero())

    def test_driver_ground_state(self):
        self.sut = hamiltonian.hamiltonian_at(self.toy, self.schedule, 0.0)
        energies, vectors = spectrum.lowest_eigs(self.sut, 2)
        self.assertAlmostEqual(-4.0, energies[0])
        np.testing.assert_allclose(np.full(16, 0.25), np.abs(vectors[:, 0]))

    def test_single_qubit(self):
        for s in (0.1, 0.3, 0.8):
            self.sut = hamiltonian.hamiltonian_at(model.IsingModel(1, [1.0]),
                                                  self.schedule, s)
            energies, _ = spectrum.lowest_eigs(self.sut, 2)
            level = np.sqrt((1 - s) ** 2 + s ** 2)
            np.testing.assert_allclose([-level, level], energies)

    def test_hermitian(self):
        self.sut = hamiltonian.hamiltonian_at(self.toy, self.schedule, 0.37)
        self.assertEqual(0, (self.sut - self.sut.T).count_nonzero())

    def test_size_guard(self):
        with self.assertRaises(SizeGuardException):
            hamiltonian.hamiltonian_at(model.IsingModel(15), self.schedule, 0.5)

    def test_norms(self):
        self.sut = hamiltonian.AnnealHamiltonian(model.IsingModel(2, [1.0, 0.0]),
                                                 self.schedule)
        self.assertEqual((1.0, 0.5), self.sut.norms(0.5))


class TestSpectrum(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.workspace = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.workspace)

    def setUp(self):
        self.toy = toys.triangle_toy(2.0)

    def test_dense_agreement(self):
        rng = np.random.default_rng(6)
        for n in (4, 6, 11):
            source = random_model(rng, n)
            H = hamiltonian.hamiltonian_at(source, schedule.AnnealSchedule(), 0.4)
            energies, _ = spectrum.lowest_eigs(H, 3)
            exact = np.linalg.eigvalsh(H.toarray())[:3]
            np.testing.assert_allclose(exact, energies, atol=1e-10)

    def test_ferromagnet_degenerate_at_end(self):
        H = hamiltonian.hamiltonian_at(model.IsingModel(2, J={(0, 1): -1.0}),
                                       schedule.AnnealSchedule(), 1.0)
        energies, _ = spectrum.lowest_eigs(H, 2)
        np.testing.assert_allclose([-1.0, -1.0], energies)

    @mock.patch('bdmst_tools.qsim.spectrum.scipy.sparse.linalg.eigsh')
    def test_convergence_failure(self, mock_eigsh):
        source = random_model(np.random.default_rng(2), 11)
        H = hamiltonian.hamiltonian_at(source, schedule.AnnealSchedule(), 0.5)
        vectors = np.zeros((2 ** 11, 2))
        vectors[0, 0] = vectors[1, 1] = 1.0
        mock_eigsh.return_value = (np.array([0.0, 1.0]), vectors)
        with self.assertRaises(schedule.ConvergenceException) as context:
            spectrum.lowest_eigs(H, 2)
        self.assertEqual(2, len(context.exception.residuals))

    def test_logical_probability(self):
        uniform = product_state(PLUS, PLUS, PLUS, PLUS)
        self.assertAlmostEqual(0.5, spectrum.logical_probability(uniform, self.toy))
        chain_pair = (product_state(ZERO, MINUS, ZERO, PLUS) +
                      product_state(ZERO, PLUS, ZERO, MINUS))
        chain_pair /= np.linalg.norm(chain_pair)
        self.assertAlmostEqual(1.0, spectrum.logical_probability(chain_pair, self.toy))
        aligned = product_state(ONE, ONE, ZERO, ONE)
        self.assertAlmostEqual(1.0, spectrum.logical_probability(aligned, self.toy))

    def test_hf_expectation(self):
        self.assertAlmostEqual(1.0, spectrum.hf_expectation(
            product_state(ONE, ONE, ZERO, ONE), self.toy))
        self.assertAlmostEqual(-1.0, spectrum.hf_expectation(
            product_state(ONE, ZERO, ZERO, ONE), self.toy))
        self.assertAlmostEqual(0.0, spectrum.hf_expectation(
            product_state(PLUS, PLUS, PLUS, PLUS), self.toy))
        rng = np.random.default_rng(1)
        for _ in range(10):
            state = rng.normal(size=16)
            state /= np.linalg.norm(state)
            self.assertAlmostEqual(
                2 * spectrum.logical_probability(state, self.toy) - 1,
                spectrum.hf_expectation(state, self.toy), places=12)

    def test_gap_closes_earlier_with_stronger_chains(self):
        traces = spectrum.gap_trace(self.toy, [2.0, 4.0, 8.0], S_GRID, k=4)
        (s2, gap2), (s4, gap4), (s8, gap8) = [t.minimum_gap() for t in traces]
        self.assertLess(s8, s4)
        self.assertLess(s4, s2)
        self.assertLess(gap8, gap4)
        self.assertLess(gap4, gap2)

    def test_single_qubit_gap(self):
        self.sut = spectrum.spectrum_trace(single_qubit(0.5), S_GRID, k=2)
        expected = 2 * np.sqrt((1 - S_GRID) ** 2 + (0.5 * S_GRID) ** 2)
        np.testing.assert_allclose(expected, self.sut.gap)
        np.testing.assert_allclose(1.0, self.sut.p_logical)

    def test_duplicate_strengths_agree(self):
        first, second = spectrum.gap_trace(self.toy, [4.0, 4.0], S_GRID[::10])
        self.assertEqual(first, second)

    def test_grid_inside_interval(self):
        with self.assertRaises(schedule.SimulationException):
            spectrum.gap_trace(self.toy, [2.0], [0.0, 0.5])

    def test_probabilities_bounded(self):
        self.sut = spectrum.spectrum_trace(self.toy, S_GRID[::5], k=4)
        self.assertTrue(np.all(self.sut.p_logical >= -1e-12))
        self.assertTrue(np.all(self.sut.p_logical <= 1 + 1e-12))
        self.assertTrue(np.all(self.sut.gap >= 0))
        self.assertTrue(np.all(np.diff(self.sut.energies, axis=1) >= -1e-12))

    def test_write_trace(self):
        self.sut = spectrum.spectrum_trace(self.toy, [0.2, 0.5], k=3)
        path = os.path.join(self.workspace, 'trace.csv')
        spectrum.write_trace(self.sut, path)
        with open(path, newline='') as trace_file:
            rows = list(csv.reader(trace_file))
        self.assertEqual(['s', 'E0', 'E1', 'E2', 'gap', 'PL0', 'PL1', 'j_ferro'],
                         rows[0])
        self.assertEqual(3, len(rows))
        self.assertEqual(0.5, float(rows[2][0]))
        self.assertAlmostEqual(self.sut.gap[1], float(rows[2][4]))


class TestPerturbation(unittest.TestCase):

    def setUp(self):
        self.toy = toys.triangle_toy(4.0)

    def exact_gap(self, j_ferro, s):
        return spectrum.spectrum_trace(self.toy.with_j_ferro(j_ferro), [s],
                                       k=4).gap[0]

    def test_zero_weakening(self):
        trace = spectrum.spectrum_trace(self.toy, S_GRID[::10], k=4)
        np.testing.assert_array_equal(trace.gap,
                                      perturbation.perturbation_gap_shift(trace, 0.0))

    def test_second_order_residual(self):
        trace = spectrum.spectrum_trace(self.toy, [0.3], k=4)
        errors = [abs(self.exact_gap(4.0 - lam, 0.3) -
                      perturbation.perturbation_gap_shift(trace, lam)[0])
                  for lam in (0.08, 0.04)]
        ratio = errors[0] / errors[1]
        self.assertGreaterEqual(ratio, 3.0)
        self.assertLessEqual(ratio, 5.0)

    def test_gap_grows_where_excited_level_is_more_logical(self):
        trace = spectrum.spectrum_trace(self.toy, S_GRID[::5], k=4)
        shifted = perturbation.perturbation_gap_shift(trace, 0.1)
        more_logical = trace.p_logical[:, 1] > trace.p_logical[:, 0]
        self.assertTrue(np.all(shifted[more_logical] > trace.gap[more_logical]))

    def test_energy_shifts(self):
        self.sut = perturbation.energy_shift_check(self.toy, 0.5, 0.0)
        for level in self.sut:
            self.assertEqual(0.0, level.shift)
        shifts = perturbation.energy_shift_check(self.toy, 0.5, 0.1)
        ground = shifts[0]
        self.assertGreater(ground.p_logical, 0.5)
        self.assertGreater(ground.predicted, ground.energy)
        self.assertGreater(ground.exact, ground.energy)
        for level in shifts:
            if level.p_logical > 0.5 and not level.degenerate:
                self.assertGreater(level.predicted, level.energy)

    def test_energy_shift_converges_quadratically(self):
        errors = [perturbation.energy_shift_check(self.toy, 0.3, lam)[0].error
                  for lam in (0.08, 0.04)]
        ratio = errors[0] / errors[1]
        self.assertGreaterEqual(ratio, 3.0)
        self.assertLessEqual(ratio, 5.0)

    def test_degenerate_levels_flagged(self):
        shifts = perturbation.energy_shift_check(toys.census_toy(1.0), 1.0, 0.1)
        self.assertTrue(shifts[0].degenerate)

    def test_bad_weakening(self):
        with self.assertRaises(schedule.SimulationException):
            perturbation.energy_shift_check(self.toy, 0.5, 4.0)


class TestRelaxation(unittest.TestCase):

    def setUp(self):
        self.toy = toys.triangle_toy(2.0)
        self.schedule = schedule.AnnealSchedule()

    def levels(self, s, k=8):
        H = hamiltonian.hamiltonian_at(self.toy, self.schedule, s)
        return spectrum.lowest_eigs(H, k)

    def test_gibbs(self):
        self.sut = relaxation.gibbs_populations([0.0, 1.0], 0.5)
        self.assertAlmostEqual(1.0, self.sut.sum())
        self.assertAlmostEqual(np.exp(-2.0), self.sut[1] / self.sut[0])

    def test_detailed_balance(self):
        energies, vectors = self.levels(0.4)
        gibbs = relaxation.gibbs_populations(energies, 0.3)
        for coupling in relaxation.COUPLINGS:
            self.sut = relaxation.thermal_rate_matrix(
                energies, 0.3, 5.0, vectors, coupling, spectrum.basis_spins(4))
            np.testing.assert_allclose(0.0, self.sut.sum(axis=0), atol=1e-12)
            flux = self.sut * gibbs[None, :]
            np.testing.assert_allclose(flux, flux.T, atol=1e-12)

    def test_gibbs_is_stationary(self):
        energies, _ = self.levels(0.4)
        gibbs = relaxation.gibbs_populations(energies, 0.3)
        self.sut = relaxation.relax_at(self.toy, 0.4, 0.3, 5.0, 10.0)
        np.testing.assert_allclose(gibbs, self.sut, atol=1e-9)

    def test_gibbs_is_stationary_under_sigma_z(self):
        energies, _ = self.levels(0.4)
        gibbs = relaxation.gibbs_populations(energies, 0.3)
        self.sut = relaxation.relax_at(self.toy, 0.4, 0.3, 5.0, 10.0,
                                       coupling='sigma_z')
        np.testing.assert_allclose(gibbs, self.sut, atol=1e-9)

    def test_long_pause_reaches_gibbs(self):
        energies, _ = self.levels(0.6)
        gibbs = relaxation.gibbs_populations(energies, 0.3)
        start = np.zeros(8)
        start[0] = 1.0
        self.sut = relaxation.relax_at(self.toy, 0.6, 0.3, 5.0, 1000.0,
                                       populations=start, coupling='uniform')
        divergence = float(np.sum(self.sut * np.log(self.sut / gibbs)))
        self.assertLess(divergence, 1e-6)

    def test_populations_conserved(self):
        self.sut = relaxation.pause_relax_evolve(
            self.toy, schedule.AnnealSchedule(1.0, s_p=0.5, t_p=1.0), 0.3, 10.0)
        np.testing.assert_allclose(1.0, self.sut.populations.sum(axis=1),
                                   atol=1e-9)
        self.assertTrue(np.all(self.sut.populations >= 0))
        self.assertIn(0.5, self.sut.s_grid)
        self.assertLessEqual(self.sut.p_ground, 1.0)

    def test_coarse_step_refused(self):
        old = np.eye(2)
        new = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2)
        with self.assertRaises(schedule.GridResolutionException):
            relaxation.transfer(old, np.array([0.0, 1.0]), new, np.array([0.0, 1.0]))
        overlaps = relaxation.transfer(old, np.array([0.0, 1.0]), old,
                                       np.array([0.0, 1.0]))
        np.testing.assert_allclose(np.eye(2), overlaps)

    def test_degenerate_levels_not_checked(self):
        old = np.eye(2)
        new = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2)
        overlaps = relaxation.transfer(old, np.array([0.0, 0.0]), new,
                                       np.array([0.0, 0.5]))
        np.testing.assert_allclose(0.5, overlaps)

    def test_pause_after_minimum_gap_helps(self):
        trace = spectrum.spectrum_trace(self.toy, S_GRID, k=2)
        s_star, gap = trace.minimum_gap()
        s_p = round(min(s_star + 0.1, 0.95), 3)
        no_pause = relaxation.pause_relax_evolve(
            self.toy, schedule.AnnealSchedule(1.0), gap, 100.0, k=8,
            coupling='sigma_z')
        paused = relaxation.pause_relax_evolve(
            self.toy, schedule.AnnealSchedule(1.0, s_p=s_p, t_p=10.0), gap, 100.0,
            k=8, coupling='sigma_z')
        self.assertGreater(paused.p_ground, no_pause.p_ground)

    def test_pause_scan(self):
        no_pause, scan = relaxation.pause_scan(self.toy, [0.3, 0.6], 1.0, 0.3,
                                               10.0)
        self.assertEqual(2, len(scan))
        self.assertTrue(0.0 <= no_pause <= 1.0)

    def test_regimes(self):
        trace = spectrum.spectrum_trace(self.toy, S_GRID, k=2)
        s_star, gap = trace.minimum_gap()
        cold = relaxation.regime_map(self.toy, trace, 0.01)
        self.assertEqual('I', cold[0])
        self.assertEqual('III', cold[-1])
        self.sut = relaxation.regime_map(self.toy, trace, gap)
        star = int(np.argmin(trace.gap))
        self.assertEqual('IIb', self.sut[star])
        for index, label in enumerate(self.sut):
            if label == 'IIa':
                self.assertLess(index, star)
            if label == 'IIc':
                self.assertGreater(index, star)

    def test_stronger_chains_pause_earlier(self):
        _, gap = spectrum.spectrum_trace(self.toy, S_GRID, k=2).minimum_gap()
        s_p_grid = np.round(np.arange(0.20, 0.99, 0.02), 2)
        best = []
        for j_ferro in (2.0, 8.0):
            _, scan = relaxation.pause_scan(
                toys.triangle_toy(j_ferro), s_p_grid, 10.0, 1.5 * gap, 100.0,
                k=4, num_steps=2000, coupling='sigma_z')
            best.append(s_p_grid[int(np.argmax(scan))])
        self.assertLessEqual(best[1], best[0])


class TestGridRefinement(unittest.TestCase):

    def setUp(self):
        self.toy = toys.triangle_toy(8.0)
        self.schedule = schedule.AnnealSchedule(1.0, s_p=0.5, t_p=1.0)

    def test_rejected_step_is_halved(self):
        H = hamiltonian.AnnealHamiltonian(self.toy, self.schedule)
        old = spectrum.lowest_eigs(H.at(0.0), 2)
        refused = schedule.GridResolutionException("too coarse")
        with mock.patch.object(relaxation, 'transfer',
                               side_effect=[refused, np.eye(2), np.eye(2)]):
            self.sut = relaxation._substeps(H, 2, 0.0, 0.5, old, 0.99)
        self.assertEqual([0.25, 0.5], [step[0] for step in self.sut])

    def test_refinement_is_capped(self):
        H = hamiltonian.AnnealHamiltonian(self.toy, self.schedule)
        old = spectrum.lowest_eigs(H.at(0.0), 2)
        refused = schedule.GridResolutionException("too coarse")
        with mock.patch.object(relaxation, 'transfer', side_effect=refused):
            with mock.patch.object(relaxation, 'MAX_REFINEMENTS', 3):
                with self.assertRaises(schedule.GridResolutionException):
                    relaxation._substeps(H, 2, 0.0, 0.5, old, 0.99)

    def test_strong_chains_on_default_grid(self):
        with mock.patch.object(relaxation, 'MAX_REFINEMENTS', 0):
            with self.assertRaises(schedule.GridResolutionException):
                relaxation.pause_relax_evolve(
                    self.toy, schedule.AnnealSchedule(1.0), 0.3, 10.0, k=4,
                    num_steps=1000)
        self.sut = relaxation.pause_relax_evolve(self.toy, self.schedule, 0.3,
                                                 10.0, k=4, num_steps=1000)
        np.testing.assert_allclose(1.0, self.sut.populations.sum(axis=1),
                                   atol=1e-9)
        self.assertIn(0.5, self.sut.s_grid)
