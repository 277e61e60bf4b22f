# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import unittest

import numpy as np

from glassfrac import mesh
from glassfrac._errors import AssemblyError, ConfigurationError
from glassfrac.mesh import LayerTag, Mesh1D, Mesh2D, RefinementSpec

from .unittest_data import data_decorator, data


LAMINATE = [0.01, 0.00076, 0.01]


@data_decorator
class MeshTests(unittest.TestCase):

    def test_uniform_monolith_counts(self):
        section = mesh.build_section_mesh(1.1, [0.02], RefinementSpec.uniform(2e-3), symmetry='full')
        self.assertEqual(11000, section.n_elements)
        self.assertEqual(551 * 11, section.n_nodes)
        self.assertTrue(np.all(section.layer_tags == int(LayerTag.GLASS_MONO)))
        np.testing.assert_allclose(section.areas, 2e-3 * 2e-3 / 2.0, rtol=1e-9)

    def test_half_model_ends_at_midspan(self):
        section = mesh.build_section_mesh(1.1, [0.02], RefinementSpec.uniform(5e-3))
        lower, upper = section.bounds()
        self.assertEqual(0.0, lower[0])
        self.assertAlmostEqual(0.55, upper[0], delta=1e-15)
        self.assertAlmostEqual(0.02, upper[1], delta=1e-15)

    def test_laminate_interfaces_are_node_rows(self):
        section = mesh.build_section_mesh(0.1, LAMINATE, RefinementSpec.uniform(2e-3), symmetry='full')
        ys = section.y_axis
        self.assertIn(0.01, ys.tolist())
        self.assertIn(0.01076, [round(y, 12) for y in ys])
        self.assertEqual(0.02076, round(float(ys[-1]), 12))
        tags = set(section.layer_tags.tolist())
        self.assertEqual(set([0, 1, 2]), tags)
        interlayer_rows = np.sum((ys > 0.01 + 1e-12) & (ys < 0.01076 - 1e-12))
        self.assertGreaterEqual(interlayer_rows, 1)

    def test_min_angle(self):
        refinement = RefinementSpec(2e-3, ((0.03, 0.07, 0.5e-3),), 1.3)
        for layers in ([0.02], LAMINATE):
            section = mesh.build_section_mesh(0.1, layers, refinement, symmetry='full')
            self.assertGreaterEqual(float(section.min_angles().min()), 21.8 - 1e-6)

    @staticmethod
    def grading_ratios():
        return (
            ('ratio_1_2', 1.2),
            ('ratio_1_3', 1.3),
            ('ratio_1_5', 1.5),
        )

    @data('grading_ratios', True)
    def grading_limit(self, ratio):
        refinement = RefinementSpec(0.01, ((0.4, 0.45, 0.5e-3),), ratio)
        xs = mesh.graded_axis(0.0, 0.55, refinement, fixed_points=(0.05, 0.2))
        sizes = np.diff(xs)
        ratios = np.maximum(sizes[1:] / sizes[:-1], sizes[:-1] / sizes[1:])
        self.assertLessEqual(float(ratios.max()), ratio * (1.0 + 1e-9))
        inside = sizes[(xs[:-1] >= 0.4) & (xs[1:] <= 0.45)]
        self.assertLessEqual(float(inside.max()), 0.5e-3 * (1.0 + 1e-9))
        self.assertLessEqual(float(sizes.max()), 0.01 * (1.0 + 1e-9))

    def test_fixed_points_are_nodes(self):
        refinement = RefinementSpec(0.01, ((0.43, 0.55, 2e-3),), 1.3)
        xs = mesh.graded_axis(0.0, 0.55, refinement, fixed_points=(0.05, 0.3, 0.45))
        for x in (0.0, 0.05, 0.3, 0.45, 0.55):
            self.assertAlmostEqual(0.0, float(np.min(np.abs(xs - x))), delta=1e-15)
        self.assertTrue(np.all(np.diff(xs) > 0.0))

    def test_half_symmetry_mirrors_bands(self):
        refinement = RefinementSpec(0.01, ((0.60, 0.70, 1e-3),), 1.3)
        beam = mesh.build_beam_mesh(1.1, refinement, symmetry='half')
        sizes = beam.sizes
        centroids = beam.centroids
        mirrored = sizes[(centroids > 0.41) & (centroids < 0.49)]
        self.assertLessEqual(float(mirrored.max()), 1e-3 * (1.0 + 1e-9))

    def test_refinement_validation(self):
        with self.assertRaises(ConfigurationError) as context:
            RefinementSpec(1e-3, ((0.2, 0.1, 1e-3), (0.3, 0.4, 2e-3)))
        self.assertEqual(2, len(context.exception.violations))
        with self.assertRaises(ValueError):
            RefinementSpec(1e-3, (), 0.9)

    def test_band_outside_domain(self):
        refinement = RefinementSpec(0.01, ((1.0, 1.2, 1e-3),))
        with self.assertRaises(ConfigurationError):
            mesh.build_section_mesh(1.1, [0.02], refinement)

    def test_layer_validation(self):
        with self.assertRaises(ConfigurationError):
            mesh.build_section_mesh(1.1, [0.01, 0.01], RefinementSpec.uniform(0.01))
        with self.assertRaises(ConfigurationError) as context:
            mesh.build_section_mesh(1.1, [0.01, -0.001, 0.0], RefinementSpec.uniform(0.01))
        self.assertEqual(2, len(context.exception.violations))
        with self.assertRaises(ConfigurationError):
            mesh.build_section_mesh(1.1, [0.02], RefinementSpec.uniform(0.01), symmetry='quarter')
        with self.assertRaises(TypeError):
            mesh.build_section_mesh(1.1, [0.02], 0.01)

    def test_explicit_layer_tags(self):
        section = mesh.build_section_mesh(
            0.1,
            [0.01, 0.01],
            RefinementSpec.uniform(5e-3),
            symmetry='full',
            layer_tags=[LayerTag.GLASS_BOTTOM, LayerTag.GLASS_TOP]
        )
        self.assertEqual(set([0, 2]), set(section.layer_tags.tolist()))

    def test_mesh2d_rejects_clockwise(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        with self.assertRaises(AssemblyError) as context:
            Mesh2D(nodes, [[0, 1, 2], [1, 2, 3]], [3, 3])
        self.assertEqual(1, context.exception.element)
        with self.assertRaises(ValueError):
            Mesh2D(nodes, [[0, 1, 2]], [3, 3])

    def test_mesh2d_queries(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        square = Mesh2D(nodes, [[0, 1, 3], [0, 3, 2]], [3, 3])
        self.assertEqual(3, square.nearest_node((0.9, 0.8)))
        self.assertEqual([1, 3], square.nodes_on_line(x=1.0).tolist())
        self.assertEqual([1], square.nodes_on_line(x=1.0, y=0.0).tolist())
        np.testing.assert_allclose([45.0, 45.0], square.min_angles())
        self.assertFalse(square.nodes.flags.writeable)

    def test_mesh1d(self):
        line = Mesh1D([0.0, 0.1, 0.3, 0.6])
        self.assertEqual(3, line.n_elements)
        np.testing.assert_allclose([0.1, 0.2, 0.3], line.sizes)
        self.assertEqual(0, line.element_at(0.0))
        self.assertEqual(0, line.element_at(0.1))
        self.assertEqual(1, line.element_at(0.2))
        self.assertEqual(2, line.element_at(0.6))
        self.assertEqual(2, line.nearest_node(0.35))
        with self.assertRaises(ValueError):
            Mesh1D([0.0, 0.2, 0.1])
        with self.assertRaises(ValueError):
            Mesh1D([0.0])

    def test_glass_submesh_includes_interface_nodes(self):
        section = mesh.build_section_mesh(0.1, LAMINATE, RefinementSpec.uniform(2e-3), symmetry='full')
        sub = mesh.glass_submesh(section)
        interlayer_only = np.setdiff1d(
            np.unique(section.elements[section.layer_tags == int(LayerTag.INTERLAYER)]),
            np.unique(section.elements[section.layer_tags != int(LayerTag.INTERLAYER)])
        )
        self.assertEqual(section.n_nodes - interlayer_only.shape[0], sub.n_nodes)
        interface = section.nodes_on_line(y=0.01)
        self.assertTrue(np.all(sub.parent_to_sub[interface] >= 0))
        self.assertTrue(np.all(sub.parent_to_sub[interlayer_only] == -1))
        self.assertEqual(
            int(np.sum(section.layer_tags != int(LayerTag.INTERLAYER))),
            sub.n_elements
        )
        np.testing.assert_array_equal(sub.node_map[sub.elements], section.elements[sub.element_map])

    def test_glass_submesh_layer_nodes(self):
        section = mesh.build_section_mesh(0.1, LAMINATE, RefinementSpec.uniform(2e-3), symmetry='full')
        sub = mesh.glass_submesh(section)
        bottom = sub.nodes[sub.layer_nodes(LayerTag.GLASS_BOTTOM)]
        top = sub.nodes[sub.layer_nodes(LayerTag.GLASS_TOP)]
        self.assertLessEqual(float(bottom[:, 1].max()), 0.01 + 1e-12)
        self.assertGreaterEqual(float(top[:, 1].min()), 0.01076 - 1e-12)
        expanded = sub.to_parent(np.ones(sub.n_nodes), fill=-1.0)
        self.assertEqual(sub.n_nodes, int(np.sum(expanded == 1.0)))

    def test_glass_submesh_requires_glass(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        with self.assertRaises(ConfigurationError):
            mesh.glass_submesh(Mesh2D(nodes, [[0, 1, 2]], [int(LayerTag.INTERLAYER)]))
        with self.assertRaises(TypeError):
            mesh.glass_submesh(nodes)

    def test_beam_mesh(self):
        refinement = RefinementSpec(0.01, ((0.43, 0.67, 2e-3),), 1.3)
        beam = mesh.build_beam_mesh(1.1, refinement, fixed_points=(0.05, 0.3, 0.45, 0.55))
        self.assertEqual(0.0, beam.nodes[0])
        self.assertAlmostEqual(0.55, beam.nodes[-1], delta=1e-15)
        for x in (0.05, 0.3, 0.45):
            self.assertAlmostEqual(x, beam.nodes[beam.nearest_node(x)], delta=1e-15)
        full = mesh.build_beam_mesh(1.1, refinement, symmetry='full')
        self.assertAlmostEqual(1.1, full.nodes[-1], delta=1e-15)
