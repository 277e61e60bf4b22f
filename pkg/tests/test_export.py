# coding: utf-8
from __future__ import unicode_literals, division, absolute_import, print_function

import dataclasses
import hashlib
import io
import json
import os
import tempfile
import unittest

import numpy as np

from glassfrac.beam1d import BEAM_COLUMNS
from glassfrac.config import OutputSettings, RunConfig
from glassfrac.export import (
    atomic_write,
    build_manifest,
    file_digest,
    load_schema,
    validate_manifest,
    write_beam_csv,
    write_csv,
    write_manifest,
    write_vtk_fields,
    write_vtk_mesh,
)
from glassfrac.mesh import LayerTag, Mesh2D
from glassfrac.scenarios import build_scenario
from glassfrac.solver import PROBE_COLUMNS, run_quasistatic
from glassfrac.version import __version__

try:
    import jsonschema
except ImportError:
    jsonschema = None


tests_root = os.path.dirname(os.path.abspath(__file__))
fixtures_dir = os.path.join(tests_root, 'fixtures')


def _square():
    nodes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
    tag = int(LayerTag.GLASS_MONO)
    return Mesh2D(nodes, [[0, 1, 3], [0, 3, 2]], [tag, tag])


def _read(path):
    with io.open(path, 'rb') as f:
        return f.read()


class ExportTests(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def test_csv(self):
        path = os.path.join(self.tmp, 'series.csv')
        write_csv(path, ('t_s', 'R_N'), [(1, 0.1), (np.int64(2), 1.0 / 3.0)])
        self.assertEqual(b't_s,R_N\r\n1,0.1\r\n2,0.3333333333333333\r\n', _read(path))

    def test_csv_row_length(self):
        path = os.path.join(self.tmp, 'series.csv')
        with self.assertRaises(ValueError):
            write_csv(path, PROBE_COLUMNS, [(0.0, 1.0)])
        self.assertFalse(os.path.exists(path))
        self.assertEqual([], os.listdir(self.tmp))

    def test_atomic_write_keeps_previous_file(self):
        path = os.path.join(self.tmp, 'out.txt')
        with atomic_write(path) as f:
            f.write('first\n')
        with self.assertRaises(RuntimeError):
            with atomic_write(path) as f:
                f.write('second\n')
                raise RuntimeError('interrupted')
        self.assertEqual(b'first\n', _read(path))
        self.assertEqual(['out.txt'], os.listdir(self.tmp))

    def test_vtk_mesh(self):
        path = write_vtk_mesh(os.path.join(self.tmp, 'mesh.vtk'), _square())
        lines = _read(path).decode('utf-8').splitlines()
        self.assertEqual('# vtk DataFile Version 2.0', lines[0])
        self.assertEqual('DATASET UNSTRUCTURED_GRID', lines[3])
        self.assertEqual('POINTS 4 double', lines[4])
        self.assertEqual('1.0 1.0 0', lines[8])
        self.assertEqual('CELLS 2 8', lines[9])
        self.assertEqual('3 0 1 3', lines[10])
        self.assertEqual('CELL_TYPES 2', lines[12])
        self.assertEqual(['5', '5'], lines[13:15])
        self.assertEqual(['CELL_DATA 2', 'SCALARS layer double 1', 'LOOKUP_TABLE default'], lines[15:18])
        self.assertEqual([str(int(LayerTag.GLASS_MONO))] * 2, lines[18:20])

    def test_vtk_fields(self):
        mesh = _square()
        point = {
            'd': np.array([0.0, 0.25, 0.5, 1.0]),
            'u': np.array([[0.0, 0.0], [1e-6, 0.0], [0.0, -2e-7], [1e-6, -2e-7]]),
        }
        cell = {'sigma_xx': np.array([7e5, 7e5])}
        path = write_vtk_fields(os.path.join(self.tmp, 'fields.vtk'), mesh, point, cell)
        lines = _read(path).decode('utf-8').splitlines()
        self.assertIn('POINT_DATA 4', lines)
        start = lines.index('VECTORS u double')
        self.assertEqual('1e-06 -2e-07 0.0', lines[start + 4])
        start = lines.index('SCALARS d double 1')
        self.assertEqual(['0.0', '0.25', '0.5', '1.0'], lines[start + 2:start + 6])
        self.assertLess(lines.index('POINT_DATA 4'), lines.index('CELL_DATA 2'))
        self.assertEqual('700000.0', lines[-1])

    def test_digest(self):
        path = os.path.join(self.tmp, 'blob')
        with io.open(path, 'wb') as f:
            f.write(b'glass\n')
        self.assertEqual(hashlib.sha256(b'glass\n').hexdigest(), file_digest(path))

    def test_schema_ships(self):
        schema = load_schema()
        self.assertIn('files', schema['required'])
        self.assertEqual(['schedule', 'localization', 'failure'], schema['properties']['termination']['enum'])

    def test_manifest_of_beam_run(self):
        config = RunConfig.from_file(os.path.join(fixtures_dir, 'monolith_beam.ini'))
        config = dataclasses.replace(config, output=OutputSettings(self.tmp, 1, True))
        scenario = build_scenario(config.scenario)
        result = run_quasistatic(scenario, config.solver)
        self.assertEqual('schedule', result.termination)

        problem = scenario.problem
        write_beam_csv(os.path.join(self.tmp, 'beam.csv'), problem, result.state.u, result.state.d)
        with io.open(os.path.join(self.tmp, 'beam.csv'), 'r', encoding='utf-8') as f:
            rows = f.read().splitlines()
        self.assertEqual(','.join(BEAM_COLUMNS), rows[0])
        self.assertEqual(problem.mesh.n_nodes + 1, len(rows))

        manifest = build_manifest(config, scenario, result, ['beam.csv'])
        self.assertEqual(__version__, manifest['glassfrac_version'])
        self.assertEqual(2, manifest['accepted_steps'])
        self.assertEqual('beam', manifest['calibration']['reduction'])
        self.assertEqual(0.01, manifest['calibration']['length_scale_m'])
        self.assertEqual(file_digest(os.path.join(self.tmp, 'beam.csv')), manifest['files']['beam.csv'])
        self.assertEqual('beam', manifest['config']['scenario']['model'])
        self.assertEqual([0, 0], manifest['cutbacks'])

        path = write_manifest(os.path.join(self.tmp, 'manifest.json'), manifest)
        with io.open(path, 'r', encoding='utf-8') as f:
            self.assertEqual(manifest, json.load(f))

    @unittest.skipIf(jsonschema is None, 'jsonschema is not installed')
    def test_manifest_validation(self):
        manifest = {
            'glassfrac_version': __version__,
            'config': {'scenario': {'layup': 'monolith'}},
            'termination': 'localization',
            'accepted_steps': 3,
            'peak_reaction_N': 812.5,
            'failure_stress_Pa': 4.5e7,
            'wall_time_s': 0.5,
            'calibration': {
                'kind': 'pf-p',
                'reduction': 'plane-stress',
                'length_scale_m': 0.001,
                'fracture_energy_J_m2': 4.0,
                'tensile_strength_Pa': 4.5e7,
                'heuristic': False,
            },
            'probes': {'sigma_mid': {'x_m': 0.55, 'snapped_x_m': 0.55, 'fiber': 'bottom', 'component': 'xx'}},
            'interlayer_modulus_Pa': {'first': None, 'last': None},
            'cutbacks': [0, 1, 0],
            'assumptions': {},
            'files': {'probes.csv': '0' * 64},
        }
        self.assertTrue(validate_manifest(manifest))
        manifest['termination'] = 'crashed'
        with self.assertRaises(jsonschema.ValidationError):
            validate_manifest(manifest)
