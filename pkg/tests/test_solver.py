# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import unittest
from types import SimpleNamespace

import numpy as np
import scipy.sparse as sp

from glassfrac import _sparse, solver
from glassfrac._errors import ConfigurationError, StepFailure
from glassfrac.beam1d import BarProblem, LayeredBeamSection
from glassfrac.materials import MaterialGlass
from glassfrac.mesh import Mesh1D
from glassfrac.phasefield import (
    Kind,
    Known,
    PhaseFieldFormulation,
    Reduction,
    Scheme,
    Split,
    calibrate,
    homogeneous_peak_stress,
)

from .unittest_data import data_decorator, data


def _glass():
    material = MaterialGlass()
    pair = calibrate(Kind.PF_P, Reduction.PLANE_STRESS, Known.GF, 4.0, material)
    return material.with_pair(pair.length_scale, pair.fracture_energy)


def _bar_scenario(scheme=Scheme.HYBRID, kind=Kind.PF_P, elements=10, material=None):
    """
    A homogeneous bar reaching the tensile strength at t = 1
    """

    if material is None:
        material = _glass()
    mesh = Mesh1D(np.linspace(0.0, 0.1, elements + 1))
    section = LayeredBeamSection(1.0, (0.01,), material.young_modulus, material.poisson_ratio)
    formulation = PhaseFieldFormulation(kind, Split.SPECTRAL, scheme)
    problem = BarProblem(mesh, section, material, formulation)
    return SimpleNamespace(
        problem=problem,
        loading_rate=0.1 * material.tensile_strength / material.young_modulus,
        temperature=20.0,
        interlayer=None,
        initial_damage=problem.initial_damage(),
        probes={'sigma_mid': SimpleNamespace(x=0.05, fiber='bottom', component='xx')},
    )


def _m_matrix(n, rng):
    main = 2.0 + rng.uniform(0.0, 1.0, n)
    off = -rng.uniform(0.1, 1.0, n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format='csr')


def _spd_matrix(n, rng):
    b = rng.normal(size=(n, n))
    return b.dot(b.T) / n + np.eye(n)


def _projected_gradient(matrix, rhs, lower, upper, iterations=4000):
    step = 1.0 / np.linalg.eigvalsh(matrix)[-1]
    x = np.clip(np.zeros_like(rhs), lower, upper)
    for _ in range(iterations):
        x = np.clip(x - step * (matrix.dot(x) - rhs), lower, upper)
    return x


@data_decorator
class SolverTests(unittest.TestCase):

    def test_config_defaults(self):
        config = solver.StaggeredConfig()
        self.assertEqual(((1.0, 0.1),), config.schedule)
        self.assertEqual(1.0, config.end_time)
        self.assertAlmostEqual(0.1 / 16.0, config.smallest_increment)
        self.assertIsNone(config.scheme)

    def test_nominal_increment(self):
        config = solver.StaggeredConfig(schedule=[(120, 0.5), (200, 0.1)], min_increment=0.01)
        self.assertEqual((120.0, 0.5), config.nominal_increment(0.0))
        self.assertEqual((120.0, 0.5), config.nominal_increment(119.5))
        self.assertEqual((200.0, 0.1), config.nominal_increment(120.0))
        self.assertIsNone(config.nominal_increment(200.0))
        self.assertEqual(200.0, config.end_time)
        self.assertEqual(0.01, config.smallest_increment)

    @staticmethod
    def bad_schedules():
        return (
            ('empty', (), 1),
            ('zero_increment', ((1.0, 0.0),), 1),
            ('decreasing', ((1.0, 0.1), (0.5, 0.1)), 1),
            ('not_pairs', ((1.0,), (2.0, 0.1)), 1),
            ('two_problems', ((1.0, -0.1), (0.5, 0.1)), 2),
        )

    @data('bad_schedules', True)
    def schedule_validation(self, schedule, count):
        with self.assertRaises(ConfigurationError) as context:
            solver.StaggeredConfig(schedule=schedule)
        self.assertEqual(count, len(context.exception.violations))

    def test_config_validation(self):
        with self.assertRaises(ConfigurationError) as context:
            solver.StaggeredConfig(
                energy_tolerance=0.0,
                max_newton_iterations='many',
                max_staggered_iterations=True,
                max_damage_increment=1.5,
                localization_drop=1.0,
                scheme='hybrid',
            )
        self.assertEqual(6, len(context.exception.violations))

    def test_bound_constrained_kkt(self):
        rng = np.random.RandomState(5)
        for _ in range(5):
            n = 40
            matrix = _m_matrix(n, rng)
            rhs = rng.uniform(-2.0, 3.0, n)
            lower = rng.uniform(0.0, 0.3, n)
            x = solver.solve_bound_constrained((matrix, rhs), lower, 1.0)
            gradient = matrix.dot(x) - rhs
            self.assertTrue(np.all(x >= lower))
            self.assertTrue(np.all(x <= 1.0))
            free = (x > lower) & (x < 1.0)
            np.testing.assert_allclose(gradient[free], 0.0, atol=1e-10)
            self.assertTrue(np.all(gradient[x == lower] >= -1e-10))
            self.assertTrue(np.all(gradient[x == 1.0] <= 1e-10))

    def test_bound_constrained_random_spd(self):
        rng = np.random.RandomState(11)
        worst = 0.0
        for _ in range(200):
            n = 20
            matrix = _spd_matrix(n, rng)
            rhs = rng.uniform(-1.0, 2.0, n)
            lower = rng.uniform(0.0, 0.3, n)
            x = solver.solve_bound_constrained((matrix, rhs), lower, 1.0)
            np.testing.assert_allclose(x, _projected_gradient(matrix, rhs, lower, 1.0), atol=1e-8)

            gradient = matrix.dot(x) - rhs
            self.assertTrue(np.all(x >= lower))
            self.assertTrue(np.all(x <= 1.0))
            free = (x > lower) & (x < 1.0)
            worst = max(
                worst,
                float(np.max(np.abs(gradient[free]), initial=0.0)),
                float(np.max(-gradient[x == lower], initial=0.0)),
                float(np.max(gradient[x == 1.0], initial=0.0)),
            )
        self.assertLessEqual(worst, 1e-8)

    def test_newton_order_on_smooth_energy(self):
        n = 6
        load = np.linspace(0.3, 0.6, n)
        coupling = 0.2 * sp.diags([-np.ones(n - 1), np.r_[1.0, 2.0 * np.ones(n - 2), 1.0], -np.ones(n - 1)],
                                  [-1, 0, 1], format='csr')

        def evaluate(u):
            ku = coupling.dot(u)
            energy = float(np.sum(np.cosh(u) - load * u) + 0.5 * u.dot(ku))
            return energy, np.sinh(u) - load + ku, (sp.diags(np.cosh(u)) + coupling).tocsr()

        result = _sparse.newton(evaluate, np.zeros(n), np.array([0]), np.array([0.0]), 1e-6, 50)
        self.assertEqual('residual', result.reason)
        r = result.residuals
        self.assertGreaterEqual(len(r), 3)
        order = np.log(r[-1] / r[-2]) / np.log(r[-2] / r[-3])
        self.assertGreaterEqual(order, 1.8)

    def test_bound_constrained_unconstrained_solution(self):
        matrix = np.array([[2.0, -1.0], [-1.0, 2.0]])
        x = solver.solve_bound_constrained((matrix, np.array([0.5, 0.5])))
        np.testing.assert_allclose(x, [0.5, 0.5])

    def test_bound_constrained_arguments(self):
        matrix = sp.identity(3, format='csr')
        with self.assertRaises(TypeError):
            solver.solve_bound_constrained([matrix, np.zeros(3)])
        with self.assertRaises(ValueError):
            solver.solve_bound_constrained((matrix, np.zeros(4)))
        with self.assertRaises(ValueError):
            solver.solve_bound_constrained((matrix, np.zeros(3)), np.full(3, 0.5), 0.25)
        with self.assertRaises(ValueError):
            solver.solve_bound_constrained((sp.csr_matrix((3, 3)), np.zeros(3)))

    def test_staggered_step_elastic(self):
        scenario = _bar_scenario()
        problem = scenario.problem
        config = solver.StaggeredConfig()
        start = solver.SimulationState(0.0, 0.0, np.zeros(problem.n_dofs), problem.initial_damage())
        state = solver.staggered_step_hybrid(problem, start, 0.5, 2e-5, config)
        self.assertEqual(0.5, state.t)
        self.assertEqual(2e-5, state.w_bar)
        self.assertEqual(0.0, float(np.max(state.d)))
        self.assertLessEqual(state.xi, config.energy_tolerance)
        expected = problem.material.young_modulus * 0.01 * 2e-5 / 0.1
        self.assertAlmostEqual(1.0, problem.reaction(state.internal_force) / expected, delta=1e-5)

        anisotropic = _bar_scenario(Scheme.ANISOTROPIC).problem
        state = solver.staggered_step_anisotropic(anisotropic, start, 0.5, 2e-5, config)
        self.assertAlmostEqual(1.0, anisotropic.reaction(state.internal_force) / expected, delta=1e-5)

    @staticmethod
    def schemes():
        return (
            ('hybrid', Scheme.HYBRID),
            ('anisotropic', Scheme.ANISOTROPIC),
        )

    @data('schemes', True)
    def bar_localizes_at_strength(self, scheme):
        scenario = _bar_scenario(scheme)
        snapshots = []

        def snapshot(step, state, final):
            snapshots.append((step, state.d.copy(), final))

        config = solver.StaggeredConfig(schedule=((3.0, 0.1),), energy_tolerance=1e-8)
        result = solver.run_quasistatic(scenario, config, snapshot, snapshot_every=1)
        self.assertEqual('localization', result.termination)
        peak = homogeneous_peak_stress(Kind.PF_P, scenario.problem.material)
        self.assertAlmostEqual(1.0, result.failure_stress / peak, delta=1e-2)
        self.assertAlmostEqual(1.0, result.peak_reaction / (peak * 0.01), delta=1e-2)
        self.assertLess(result.series('reaction')[-1], 0.1 * result.peak_reaction)
        self.assertGreater(result.series('max_d')[-1], 0.5)

        damage = [d for _, d, final in snapshots if not final]
        self.assertEqual(len(result.steps), len(damage))
        for before, after in zip(damage, damage[1:]):
            self.assertTrue(np.all(after >= before))
        self.assertLess(float(np.ptp(damage[-1])), 1e-8)
        self.assertTrue(snapshots[-1][2])

        elastic = [s for s in result.steps if s.max_d == 0.0]
        self.assertTrue(elastic)
        for step in elastic:
            self.assertAlmostEqual(1.0, step.external / step.elastic, delta=1e-9)
            self.assertEqual(0.0, step.dissipated)
        self.assertGreater(result.steps[-1].dissipated, 0.0)

        rows = result.probe_rows()
        self.assertEqual(len(result.steps), len(rows))
        self.assertEqual(len(solver.PROBE_COLUMNS), len(rows[0]))
        self.assertEqual(len(solver.ENERGY_COLUMNS), len(result.energy_rows()[0]))

    @staticmethod
    def calibrated_kinds():
        return (
            ('pf_p', Kind.PF_P),
            ('pf_b', Kind.PF_B),
        )

    @data('calibrated_kinds', True)
    def bar_peak_at_calibrated_strength(self, kind):
        material = MaterialGlass()
        pair = calibrate(kind, Reduction.PLANE_STRESS, Known.LC, 3e-3, material)
        material = material.with_pair(pair.length_scale, pair.fracture_energy)
        scenario = _bar_scenario(Scheme.HYBRID, kind, elements=50, material=material)
        result = solver.run_quasistatic(scenario, solver.StaggeredConfig(schedule=((3.0, 0.05),)))
        self.assertAlmostEqual(45e6, result.peak_reaction / 0.01, delta=0.05 * 45e6)

    def test_secant_slopes_by_formulation(self):
        slopes = {}
        for kind in (Kind.PF_P, Kind.PF_B):
            result = solver.run_quasistatic(_bar_scenario(kind=kind), solver.StaggeredConfig())
            slopes[kind] = [(s.reaction / s.w_bar, s.max_d) for s in result.steps]

        intact = [slope for slope, max_d in slopes[Kind.PF_P] if max_d == 0.0]
        self.assertGreater(len(intact), 5)
        np.testing.assert_allclose(intact, intact[0], rtol=1e-6)

        # no elastic phase: damage and softening start with the first increment
        pf_b = slopes[Kind.PF_B]
        self.assertGreater(pf_b[0][1], 0.0)
        for before, after in zip(pf_b, pf_b[1:]):
            self.assertLess(after[0], before[0])

    def test_staggered_energy_decreases(self):
        scenario = _bar_scenario(Scheme.ANISOTROPIC)
        problem = scenario.problem
        config = solver.StaggeredConfig(energy_tolerance=1e-10)
        rate = scenario.loading_rate
        start = solver.SimulationState(0.0, 0.0, np.zeros(problem.n_dofs), problem.initial_damage())
        state = solver.staggered_step_anisotropic(problem, start, 1.0, rate * 1.0, config)
        state = solver.staggered_step_anisotropic(problem, state, 1.3, rate * 1.3, config)
        history = state.energy_history[1:]
        self.assertGreater(len(history), 1)
        for before, after in zip(history, history[1:]):
            self.assertLessEqual(after, before * (1.0 + 1e-12))

    def test_cutbacks_limit_damage_jumps(self):
        scenario = _bar_scenario()
        config = solver.StaggeredConfig(schedule=((1.6, 0.25),), max_damage_increment=0.05)
        result = solver.run_quasistatic(scenario, config)
        self.assertEqual('schedule', result.termination)
        self.assertGreater(result.cutbacks, 0)
        max_d = np.concatenate([[0.0], result.series('max_d')])
        self.assertTrue(np.all(np.diff(max_d) <= 0.05 + 1e-12))
        self.assertAlmostEqual(1.6, result.steps[-1].t, places=12)

    def test_failure_carries_partial_result(self):
        scenario = _bar_scenario(Scheme.ANISOTROPIC)
        config = solver.StaggeredConfig(max_newton_iterations=1)
        finals = []
        with self.assertRaises(StepFailure) as context:
            solver.run_quasistatic(scenario, config, lambda step, state, final: finals.append(final))
        result = context.exception.result
        self.assertEqual('failure', result.termination)
        self.assertEqual([], result.steps)
        self.assertEqual([True], finals)
        self.assertIn('staggered_iteration', context.exception.diagnostics)

    def test_run_arguments(self):
        scenario = _bar_scenario()
        with self.assertRaises(TypeError):
            solver.run_quasistatic(scenario, {'schedule': ((1.0, 0.1),)})
        with self.assertRaises(ConfigurationError):
            solver.run_quasistatic(scenario, solver.StaggeredConfig(scheme=Scheme.ANISOTROPIC))
        scenario.loading_rate = 0.0
        with self.assertRaises(ValueError):
            solver.run_quasistatic(scenario, solver.StaggeredConfig())
