# coding: utf-8

"""
Result files: CSV series, legacy-VTK ASCII meshes and fields, beam node
tables and the JSON run manifest. Every file is written to a temporary name
and renamed into place. Exports the following items:

 - atomic_write()
 - write_csv()
 - write_vtk_mesh()
 - write_vtk_fields()
 - write_beam_csv()
 - file_digest()
 - build_manifest()
 - write_manifest()
 - validate_manifest()
 - load_schema()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from contextlib import contextmanager

import numpy as np

from ._errors import unwrap
from .beam1d import BEAM_COLUMNS, beam_rows
from .version import __version__


__all__ = [
    'atomic_write',
    'build_manifest',
    'file_digest',
    'load_schema',
    'validate_manifest',
    'write_beam_csv',
    'write_csv',
    'write_manifest',
    'write_vtk_fields',
    'write_vtk_mesh',
]


logger = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'schema', 'manifest.schema.json')

_VTK_TRIANGLE = 5


def _number(value):
    """
    Shortest text that reads back to the same float
    """

    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


@contextmanager
def atomic_write(path, newline=None):
    """
    Context manager yielding a text file object; the file appears at path
    only when the block exits without an exception

    :param path:
        A unicode string of the destination path

    :param newline:
        Passed to io.open(), use '' for csv writers
    """

    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix='.%s.' % os.path.basename(path), dir=directory)
    try:
        with io.open(fd, 'w', encoding='utf-8', newline=newline) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, columns, rows):
    """
    Writes an RFC 4180 CSV with a header row and round-trip float precision

    :param path:
        A unicode string of the destination path

    :param columns:
        A sequence of column names

    :param rows:
        An iterable of row sequences, one value per column

    :return:
        The path
    """

    with atomic_write(path, newline='') as f:
        writer = csv.writer(f, lineterminator='\r\n')
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(unwrap(
                    '''
                    row has %d values for %d columns
                    ''',
                    len(row),
                    len(columns)
                ))
            writer.writerow([_number(v) for v in row])
    return path


def _vtk_header(f, title, mesh):
    f.write('# vtk DataFile Version 2.0\n')
    f.write('%s\n' % title)
    f.write('ASCII\n')
    f.write('DATASET UNSTRUCTURED_GRID\n')
    f.write('POINTS %d double\n' % mesh.n_nodes)
    for x, y in mesh.nodes:
        f.write('%s %s 0\n' % (_number(x), _number(y)))
    m = mesh.n_elements
    f.write('CELLS %d %d\n' % (m, 4 * m))
    for a, b, c in mesh.elements:
        f.write('3 %d %d %d\n' % (a, b, c))
    f.write('CELL_TYPES %d\n' % m)
    for _ in range(m):
        f.write('%d\n' % _VTK_TRIANGLE)


def _vtk_array(f, name, values):
    values = np.asarray(values)
    if values.ndim == 1:
        f.write('SCALARS %s double 1\n' % name)
        f.write('LOOKUP_TABLE default\n')
        for v in values:
            f.write('%s\n' % _number(v))
    else:
        f.write('VECTORS %s double\n' % name)
        for row in values:
            padded = list(row) + [0.0] * (3 - len(row))
            f.write('%s\n' % ' '.join(_number(v) for v in padded))


def write_vtk_mesh(path, mesh, title='glassfrac mesh'):
    """
    Writes the bare mesh with the layer tag as cell data

    :param path:
        A unicode string of the destination path

    :param mesh:
        A Mesh2D object

    :return:
        The path
    """

    with atomic_write(path) as f:
        _vtk_header(f, title, mesh)
        f.write('CELL_DATA %d\n' % mesh.n_elements)
        _vtk_array(f, 'layer', mesh.layer_tags.astype(np.int64))
    return path


def write_vtk_fields(path, mesh, point_data, cell_data, title='glassfrac fields'):
    """
    :param path:
        A unicode string of the destination path

    :param mesh:
        A Mesh2D object

    :param point_data:
        A dict of name -> numpy array of shape (n,) or (n, 2)

    :param cell_data:
        A dict of name -> numpy array of shape (m,)

    :return:
        The path
    """

    with atomic_write(path) as f:
        _vtk_header(f, title, mesh)
        if point_data:
            f.write('POINT_DATA %d\n' % mesh.n_nodes)
            for name in sorted(point_data):
                _vtk_array(f, name, point_data[name])
        if cell_data:
            f.write('CELL_DATA %d\n' % mesh.n_elements)
            for name in sorted(cell_data):
                _vtk_array(f, name, cell_data[name])
    return path


def write_beam_csv(path, problem, u, d):
    """
    Writes the per-node beam table

    :param problem:
        A glassfrac.beam1d.BeamProblem object

    :return:
        The path
    """

    return write_csv(path, BEAM_COLUMNS, beam_rows(problem, u, d))


def file_digest(path):
    """
    :return:
        The hex SHA-256 of the file contents
    """

    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def build_manifest(config, scenario, result, files, termination_message=None):
    """
    Assembles the run manifest

    :param config:
        A glassfrac.config.RunConfig object

    :param scenario:
        A glassfrac.scenarios.FourPointScenario object

    :param result:
        A glassfrac.solver.SimulationResult object

    :param files:
        A list of paths of emitted files, relative to the output directory

    :return:
        A dict ready for json serialisation
    """

    steps = result.steps
    moduli = [s.interlayer_modulus for s in steps if s.interlayer_modulus is not None]
    directory = config.output.directory
    manifest = {
        'glassfrac_version': __version__,
        'config': config.echo,
        'config_path': config.path,
        'termination': result.termination,
        'termination_message': termination_message,
        'accepted_steps': len(steps),
        'peak_reaction_N': result.peak_reaction,
        'failure_stress_Pa': result.failure_stress,
        'wall_time_s': result.wall_time,
        'calibration': {
            'kind': scenario.formulation.kind.value,
            'reduction': scenario.reduction.value,
            'length_scale_m': scenario.material.length_scale,
            'fracture_energy_J_m2': scenario.material.fracture_energy,
            'tensile_strength_Pa': scenario.material.tensile_strength,
            'heuristic': scenario.calibration.heuristic,
        },
        'probes': {
            name: {'x_m': probe.x, 'snapped_x_m': probe.snapped_x, 'fiber': probe.fiber, 'component': probe.component}
            for name, probe in scenario.probes.items()
        },
        'interlayer_modulus_Pa': {
            'first': moduli[0] if moduli else None,
            'last': moduli[-1] if moduli else None,
        },
        'cutbacks': [s.cutbacks for s in steps],
        'assumptions': dict(
            scenario.assumptions(),
            localization_drop=config.solver.localization_drop,
        ),
        'files': {
            name: file_digest(os.path.join(directory, name))
            for name in sorted(files)
        },
    }
    return _jsonable(manifest)


def load_schema():
    with io.open(SCHEMA_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


def validate_manifest(manifest):
    """
    Validates a manifest against the shipped schema when jsonschema is
    installed

    :raises:
        jsonschema.ValidationError - when the manifest does not conform

    :return:
        True if validated, False when jsonschema is unavailable
    """

    try:
        import jsonschema
    except ImportError:
        logger.warning('jsonschema is not installed, skipping manifest validation')
        return False
    jsonschema.validate(instance=manifest, schema=load_schema())
    return True


def write_manifest(path, manifest):
    """
    Validates and writes the manifest with sorted keys

    :return:
        The path
    """

    validate_manifest(manifest)
    with atomic_write(path) as f:
        json.dump(manifest, f, indent=2, sort_keys=True, allow_nan=False)
        f.write('\n')
    return path
