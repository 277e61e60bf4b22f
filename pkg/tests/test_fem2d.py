# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import unittest

import numpy as np

from glassfrac import fem2d
from glassfrac._errors import ConfigurationError, QueryError
from glassfrac._problem import BoundaryPlan
from glassfrac._sparse import solve_constrained
from glassfrac.materials import Box, MaterialGlass, StrengthField
from glassfrac.mesh import LayerTag, Mesh2D, RefinementSpec, build_section_mesh
from glassfrac.phasefield import Kind, PhaseFieldFormulation, Scheme, Split, driving_force, scaling_constant, split_energy
from glassfrac.solver import solve_bound_constrained

from .unittest_data import data_decorator, data


GLASS = MaterialGlass(length_scale=1e-3, fracture_energy=4.0)
ELASTIC = {LayerTag.GLASS_MONO: (GLASS.young_modulus, GLASS.poisson_ratio)}


def _plan(symmetry='half'):
    return BoundaryPlan(0.2, 0.05, 0.02, 0.06, symmetry)


def _section_mesh(plan, layers=(0.01,), size=2.5e-3):
    return build_section_mesh(plan.length, list(layers), RefinementSpec.uniform(size), plan.symmetry, plan.fixed_points())


def _stretch(mesh, strain, poisson_ratio=GLASS.poisson_ratio):
    u = np.zeros(2 * mesh.n_nodes)
    u[0::2] = strain * mesh.nodes[:, 0]
    u[1::2] = -poisson_ratio * strain * mesh.nodes[:, 1]
    return u


@data_decorator
class Fem2dTests(unittest.TestCase):

    def test_single_element_matches_hand_assembly(self):
        nodes = np.array([[0.0, 0.0], [1e-2, 0.0], [0.0, 1e-2]])
        element = Mesh2D(nodes, [[0, 1, 2]], [int(LayerTag.GLASS_MONO)])
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.ANISOTROPIC, 0.0)
        u = np.zeros(6)
        u[0::2] = 1e-3 * nodes[:, 0]
        system = fem2d.assemble_displacement(element, ELASTIC, formulation, None, u)

        E, nu = GLASS.young_modulus, GLASS.poisson_ratio
        D = E / (1.0 - nu ** 2) * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])
        area = 0.5e-4
        b = np.array([0.0 - 1e-2, 1e-2 - 0.0, 0.0]) / (2.0 * area)
        c = np.array([0.0 - 1e-2, 0.0, 1e-2 - 0.0]) / (2.0 * area)
        B = np.zeros((3, 6))
        B[0, 0::2] = b
        B[1, 1::2] = c
        B[2, 0::2] = c
        B[2, 1::2] = b
        expected = area * B.T.dot(D.dot(np.array([1e-3, 0.0, 0.0])))
        np.testing.assert_allclose(system.internal_force, expected, rtol=1e-10, atol=1e-10 * np.abs(expected).max())
        self.assertAlmostEqual(0.5 * area * E / (1.0 - nu ** 2) * 1e-6, system.energy, delta=1e-10 * system.energy)
        np.testing.assert_allclose(system.matrix.toarray(), area * B.T.dot(D).dot(B), rtol=1e-10, atol=1e-3)

    def test_degradation_at_mean_damage(self):
        nodes = np.array([[0.0, 0.0], [1e-2, 0.0], [0.0, 1e-2]])
        element = Mesh2D(nodes, [[0, 1, 2]], [int(LayerTag.GLASS_MONO)])
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.HYBRID, 0.0)
        u = np.zeros(6)
        intact = fem2d.assemble_displacement(element, ELASTIC, formulation, None, u).matrix.toarray()
        damaged = fem2d.assemble_displacement(element, ELASTIC, formulation, np.array([1.0, 0.0, 0.0]), u)
        # g(1/3) = 4/9, not the nodal mean of g which is 2/3
        np.testing.assert_allclose(damaged.matrix.toarray(), 4.0 / 9.0 * intact, rtol=1e-12, atol=1e-6)

    def test_uniaxial_patch_test(self):
        plan = _plan('full')
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.HYBRID, 0.0)
        system = fem2d.assemble_displacement(mesh, ELASTIC, formulation, None, np.zeros(2 * mesh.n_nodes))
        left = mesh.nodes_on_line(x=0.0)
        right = mesh.nodes_on_line(x=plan.length)
        corner = mesh.nearest_node((0.0, 0.0))
        strain = 1e-4
        dofs = np.concatenate([2 * left, 2 * right, [2 * corner + 1]])
        values = np.concatenate([np.zeros(left.shape[0]), np.full(right.shape[0], strain * plan.length), [0.0]])
        u, reactions = solve_constrained(system.matrix, np.zeros(2 * mesh.n_nodes), dofs, values)
        np.testing.assert_allclose(u, _stretch(mesh, strain), rtol=0, atol=1e-12 * plan.length)
        self.assertAlmostEqual(
            GLASS.young_modulus * strain * 0.01,
            float(np.sum(reactions[2 * right])),
            delta=1e-8 * GLASS.young_modulus * strain * 0.01
        )

    @staticmethod
    def schemes():
        return (
            ('anisotropic_spectral', Split.SPECTRAL, Scheme.ANISOTROPIC),
            ('anisotropic_volumetric', Split.VOLUMETRIC_DEVIATORIC, Scheme.ANISOTROPIC),
            ('hybrid', Split.SPECTRAL, Scheme.HYBRID),
        )

    @data('schemes', True)
    def tangent_matches_force_gradient(self, split, scheme):
        mesh = build_section_mesh(0.02, [0.01], RefinementSpec.uniform(5e-3), 'full')
        formulation = PhaseFieldFormulation(Kind.PF_P, split, scheme)
        rng = np.random.RandomState(7)
        u = 1e-6 * rng.uniform(-1.0, 1.0, 2 * mesh.n_nodes)
        d = rng.uniform(0.0, 0.9, mesh.n_nodes)
        direction = rng.uniform(-1.0, 1.0, 2 * mesh.n_nodes)
        system = fem2d.assemble_displacement(mesh, ELASTIC, formulation, d, u)
        step = 1e-12
        hi = fem2d.assemble_displacement(mesh, ELASTIC, formulation, d, u + step * direction)
        lo = fem2d.assemble_displacement(mesh, ELASTIC, formulation, d, u - step * direction)
        fd = (hi.internal_force - lo.internal_force) / (2.0 * step)
        expected = system.matrix.dot(direction)
        np.testing.assert_allclose(fd, expected, rtol=0, atol=1e-5 * np.abs(expected).max())

    def test_fourpoint_equilibrium(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.HYBRID)
        problem = fem2d.SectionProblem(mesh, GLASS, formulation, plan)
        constraints = problem.constraints()
        stiffness = problem.linear_stiffness(problem.initial_damage())
        u, _ = solve_constrained(stiffness, np.zeros(problem.n_dofs), constraints.dofs, constraints.values(1e-5))
        force = stiffness.dot(u)
        vertical = force[1::2]
        self.assertAlmostEqual(0.0, float(vertical.sum()), delta=1e-8 * float(np.abs(vertical).max()))
        support = float(np.sum(force[constraints.support_dofs]))
        load = float(np.sum(force[constraints.load_dofs]))
        self.assertAlmostEqual(-support, load, delta=1e-8 * abs(load))
        self.assertGreater(problem.reaction(force), 0.0)
        self.assertGreater(problem.midspan_deflection(u), 1e-5)
        self.assertGreater(problem.probe(u, problem.initial_damage(), plan.midspan, 'bottom'), 0.0)
        self.assertLess(problem.probe(u, problem.initial_damage(), plan.midspan, 'top'), 0.0)

    def test_reaction_counts_width_and_symmetry(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        constraints = fem2d.fourpoint_constraints(mesh, plan)
        force = np.zeros(2 * mesh.n_nodes)
        force[constraints.load_dofs] = -1.0 / constraints.load_dofs.shape[0]
        self.assertAlmostEqual(2.0 * 0.05, fem2d.reaction_force(force, constraints, plan))
        self.assertAlmostEqual(2.0, fem2d.reaction_force(force, constraints, plan, width=1.0))

    def test_fourpoint_constraints(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        constraints = fem2d.fourpoint_constraints(mesh, plan)
        self.assertEqual(1, constraints.support_dofs.shape[0])
        self.assertEqual(1, constraints.load_dofs.shape[0])
        midspan = mesh.nodes_on_line(x=plan.midspan)
        self.assertEqual(1 + 1 + midspan.shape[0], constraints.dofs.shape[0])
        values = dict(zip(constraints.dofs.tolist(), constraints.values(2e-3).tolist()))
        self.assertEqual(-2e-3, values[int(constraints.load_dofs[0])])
        self.assertEqual(0.0, values[int(constraints.support_dofs[0])])

        full = _plan('full')
        constraints = fem2d.fourpoint_constraints(_section_mesh(full), full)
        self.assertEqual(2, constraints.support_dofs.shape[0])
        self.assertEqual(2, constraints.load_dofs.shape[0])
        self.assertEqual(5, constraints.dofs.shape[0])

    def test_fourpoint_constraints_need_nodes(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        shifted = BoundaryPlan(0.2, 0.05, 0.0211, 0.0611, 'half')
        with self.assertRaises(ConfigurationError) as context:
            fem2d.fourpoint_constraints(mesh, shifted)
        self.assertEqual(2, len(context.exception.violations))

    def test_apply_fourpoint_bcs(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.HYBRID)
        system = fem2d.assemble_displacement(mesh, ELASTIC, formulation, None, np.zeros(2 * mesh.n_nodes))
        self.assertIsNone(system.fixed_dofs)
        constrained = fem2d.apply_fourpoint_bcs(system, mesh, plan, 1e-3)
        self.assertEqual(fem2d.fourpoint_constraints(mesh, plan).dofs.tolist(), constrained.fixed_dofs.tolist())
        self.assertEqual(-1e-3, float(constrained.fixed_values.min()))
        np.testing.assert_allclose(constrained.residual, system.internal_force)

    def test_homogeneous_damage(self):
        plan = _plan('full')
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.ANISOTROPIC)
        strain = 3e-4
        u = _stretch(mesh, strain)
        system = fem2d.assemble_damage(mesh, formulation, GLASS, u, np.zeros(mesh.n_nodes))
        d = solve_bound_constrained(system)
        psi_plus, _ = split_energy(Split.SPECTRAL, [strain, -GLASS.poisson_ratio * strain, 0.0], *GLASS.lame_plane_stress())
        force = driving_force(Kind.PF_P, psi_plus, None, GLASS)
        self.assertGreater(force, 1.0 / scaling_constant(Kind.PF_P))
        np.testing.assert_allclose(d, 1.0 - 1.0 / (scaling_constant(Kind.PF_P) * force), rtol=1e-8)

        weak = StrengthField(GLASS.tensile_strength, ((Box(-1.0, -1.0, 1.0, 1.0), 0.5),))
        system = fem2d.assemble_damage(mesh, formulation, GLASS, u, np.zeros(mesh.n_nodes), weak)
        d_weak = solve_bound_constrained(system)
        np.testing.assert_allclose(d_weak, 1.0 - 1.0 / (scaling_constant(Kind.PF_P) * 4.0 * force), rtol=1e-8)

    def test_damage_below_threshold(self):
        plan = _plan('full')
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.ANISOTROPIC)
        u = _stretch(mesh, 1e-7)
        system = fem2d.assemble_damage(mesh, formulation, GLASS, u, np.zeros(mesh.n_nodes))
        np.testing.assert_array_equal(np.zeros(mesh.n_nodes), solve_bound_constrained(system))
        previous = np.full(mesh.n_nodes, 0.25)
        system = fem2d.assemble_damage(mesh, formulation, GLASS, u, previous)
        np.testing.assert_array_equal(previous, solve_bound_constrained(system))

    def test_assemble_damage_arguments(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        formulation = PhaseFieldFormulation()
        with self.assertRaises(TypeError):
            fem2d.assemble_damage(mesh, formulation, {'E': 70e9}, np.zeros(2 * mesh.n_nodes), np.zeros(mesh.n_nodes))
        with self.assertRaises(ValueError):
            fem2d.assemble_damage(mesh, formulation, GLASS, np.zeros(2 * mesh.n_nodes), np.full(mesh.n_nodes, 1.5))
        with self.assertRaises(TypeError):
            fem2d.assemble_displacement(mesh.nodes, ELASTIC, formulation, None, np.zeros(2 * mesh.n_nodes))
        with self.assertRaises(TypeError):
            fem2d.assemble_displacement(mesh, ELASTIC, 'pf-p', None, np.zeros(2 * mesh.n_nodes))

    def test_laminate_needs_interlayer(self):
        plan = _plan()
        mesh = _section_mesh(plan, (0.005, 0.00076, 0.005), 2e-3)
        with self.assertRaises(ConfigurationError):
            fem2d.SectionProblem(mesh, GLASS, PhaseFieldFormulation(), plan)

    def test_interlayer_coupling_stiffens(self):
        plan = _plan()
        mesh = _section_mesh(plan, (0.005, 0.00076, 0.005), 2e-3)
        formulation = PhaseFieldFormulation(Kind.PF_P, Split.SPECTRAL, Scheme.HYBRID)
        problem = fem2d.SectionProblem(mesh, GLASS, formulation, plan, interlayer=(3e4, 0.49))
        constraints = problem.constraints()
        d = problem.initial_damage()
        self.assertEqual(problem.submesh.n_nodes, d.shape[0])
        reactions = []
        for shear in (1e4, 1e6, 1e8):
            problem.set_interlayer(2.0 * shear * 1.49, 0.49)
            stiffness = problem.linear_stiffness(d)
            u, _ = solve_constrained(stiffness, np.zeros(problem.n_dofs), constraints.dofs, constraints.values(1e-4))
            reactions.append(problem.reaction(stiffness.dot(u)))
        self.assertLess(reactions[0], reactions[1])
        self.assertLess(reactions[1], reactions[2])

    def test_probe_stress(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        square = Mesh2D(nodes, [[0, 1, 3], [0, 3, 2]], [3, 3])
        stresses = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        self.assertEqual(1.0, fem2d.probe_stress(square, stresses, (0.9, 0.1), 'xx'))
        self.assertEqual(6.0, fem2d.probe_stress(square, stresses, (0.1, 0.9), 'xy'))
        self.assertEqual(2.0, fem2d.probe_stress(square, stresses, (0.5, 0.0), 'yy', fiber='bottom'))
        self.assertEqual(4.0, fem2d.probe_stress(square, stresses, (0.5, 0.0), 'xx', fiber='top'))
        with self.assertRaises(QueryError):
            fem2d.probe_stress(square, stresses, (1.5, 0.5), 'xx')
        with self.assertRaises(QueryError):
            fem2d.probe_stress(square, stresses, (2.0, 0.0), 'xx', fiber='bottom')
        with self.assertRaises(ValueError):
            fem2d.probe_stress(square, stresses, (0.5, 0.5), 'zz')
        with self.assertRaises(ValueError):
            fem2d.probe_stress(square, stresses, (0.5, 0.5), 'xx', fiber='middle')

    def test_field_data(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        problem = fem2d.SectionProblem(mesh, GLASS, PhaseFieldFormulation(), plan)
        u = _stretch(mesh, 1e-5)
        point, cell = problem.field_data(u, problem.initial_damage())
        self.assertEqual((mesh.n_nodes, 2), point['u'].shape)
        self.assertEqual((mesh.n_nodes,), point['d'].shape)
        self.assertEqual((mesh.n_elements,), cell['sigma_xx'].shape)
        self.assertTrue(np.all(cell['psi_plus'] > 0.0))
        np.testing.assert_allclose(cell['sigma_xx'], GLASS.young_modulus * 1e-5 * (1.0 + 1e-6), rtol=1e-9)

    def test_damage_nodes(self):
        plan = _plan()
        mesh = _section_mesh(plan)
        problem = fem2d.SectionProblem(mesh, GLASS, PhaseFieldFormulation(), plan)
        nodes = problem.damage_nodes(LayerTag.GLASS_MONO, 0.049, 0.061)
        xs = problem.submesh.nodes[nodes, 0]
        self.assertTrue(np.all((xs >= 0.049) & (xs <= 0.061)))
        self.assertEqual(5 * 5, nodes.shape[0])
