# coding: utf-8

"""
INI run configuration. Sections: scenario, mesh, formulation, strength,
solver, output and initial_cracks; every value is SI. Exports the following
items:

 - RunConfig()
 - OutputSettings()
 - parse_schedule()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import configparser
import io
import logging
import os
from dataclasses import dataclass, field

from ._errors import unwrap, ConfigurationError
from .beam1d import DrivingForceMode
from .materials import Box, MaterialGlass, builtin_interlayer
from .mesh import LayerTag
from .phasefield import Kind, Known, PhaseFieldFormulation, Reduction, Scheme, Split
from .scenarios import FourPointSpec, InitialCrackSpec, Layup, ModelKind, crack_positions
from .solver import StaggeredConfig


__all__ = [
    'OutputSettings',
    'parse_schedule',
    'RunConfig',
]


logger = logging.getLogger(__name__)

_KEYS = {
    'scenario': {
        'layup', 'length', 'width', 'glass_thickness', 'glass_thicknesses', 'interlayer',
        'interlayer_thickness', 'interlayer_poisson_ratio', 'support_x', 'load_x', 'symmetry',
        'loading_rate', 'temperature', 'model', 'beam_mode',
    },
    'mesh': {'element_size', 'band_size', 'grading_ratio'},
    'formulation': {
        'kind', 'split', 'scheme', 'length_scale', 'fracture_energy', 'tensile_strength', 'young_modulus',
        'poisson_ratio', 'residual_stiffness', 'reduction', 'validation_strength',
    },
    'strength': {'edge_weakening', 'patches'},
    'solver': {
        'schedule', 'energy_tolerance', 'newton_tolerance', 'max_staggered_iterations', 'max_newton_iterations',
        'max_active_set_iterations', 'max_damage_increment', 'min_increment', 'localization_drop',
    },
    'output': {'directory', 'snapshot_every', 'fields'},
    'initial_cracks': {'layer', 'count', 'positions', 'width'},
}

_LAYERS = {
    'bottom': LayerTag.GLASS_BOTTOM,
    'top': LayerTag.GLASS_TOP,
}


def parse_schedule(text):
    """
    Parses "until:increment" pairs separated by commas

    :param text:
        A unicode string such as "120:0.5, 200:0.1"

    :raises:
        ValueError - for malformed pairs

    :return:
        A tuple of (until, increment) float tuples
    """

    pairs = []
    for chunk in text.split(','):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(':')
        if len(parts) != 2:
            raise ValueError('schedule entry %r is not of the form until:increment' % chunk)
        pairs.append((float(parts[0]), float(parts[1])))
    if not pairs:
        raise ValueError('the schedule is empty')
    return tuple(pairs)


class _Reader(object):
    """
    Typed access to a ConfigParser that records problems instead of raising
    """

    def __init__(self, parser):
        self.parser = parser
        self.problems = []

    def _raw(self, section, key):
        if not self.parser.has_section(section):
            return None
        value = self.parser.get(section, key, fallback=None)
        if value is None or value.strip() == '':
            return None
        return value.strip()

    def has(self, section, key):
        return self._raw(section, key) is not None

    def text(self, section, key, default=None):
        value = self._raw(section, key)
        return default if value is None else value

    def real(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            self.problems.append('[%s] %s must be a number, got %r' % (section, key, value))
            return default

    def integer(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            self.problems.append('[%s] %s must be an integer, got %r' % (section, key, value))
            return default

    def boolean(self, section, key, default=None):
        if self._raw(section, key) is None:
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            self.problems.append('[%s] %s must be yes or no' % (section, key))
            return default

    def reals(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        try:
            return tuple(float(v) for v in value.replace(';', ',').split(',') if v.strip())
        except ValueError:
            self.problems.append('[%s] %s must be a comma separated list of numbers, got %r' % (section, key, value))
            return default

    def choice(self, section, key, enum_class, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        try:
            return enum_class(value.lower())
        except ValueError:
            allowed = ', '.join(m.value for m in enum_class)
            self.problems.append('[%s] %s must be one of %s, got %r' % (section, key, allowed, value))
            return default


@dataclass(frozen=True)
class OutputSettings(object):
    directory: str = 'results'
    snapshot_every: int = 25
    fields: bool = True


@dataclass(frozen=True)
class RunConfig(object):
    """
    A validated run: the scenario spec, the solver settings and the output
    settings, plus the source text for the manifest
    """

    scenario: FourPointSpec
    solver: StaggeredConfig
    output: OutputSettings
    source: str = None
    path: str = None
    echo: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path):
        """
        :param path:
            A unicode string of the INI file path; relative paths inside it
            resolve against its directory

        :raises:
            ConfigurationError - listing every problem found

        :return:
            A RunConfig object
        """

        try:
            with io.open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except (IOError, OSError) as e:
            raise ConfigurationError('unable to read %s: %s' % (path, e))
        return cls.from_string(text, base_dir=os.path.dirname(os.path.abspath(path)), path=path)

    @classmethod
    def from_string(cls, text, base_dir=None, path=None):
        """
        :param text:
            A unicode string of INI content

        :param base_dir:
            The directory relative paths resolve against, default the
            working directory

        :raises:
            ConfigurationError - listing every problem found

        :return:
            A RunConfig object
        """

        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise ConfigurationError('malformed configuration: %s' % e)
        base_dir = base_dir or os.getcwd()
        reader = _Reader(parser)
        problems = reader.problems

        for section in parser.sections():
            if section not in _KEYS:
                problems.append('unknown section [%s]' % section)
                continue
            for key in parser.options(section):
                if key not in _KEYS[section]:
                    problems.append('unknown key %s in [%s]' % (key, section))

        spec_args = {}
        layup = reader.choice('scenario', 'layup', Layup, Layup.MONOLITH)
        spec_args['layup'] = layup
        for key in ('length', 'width', 'interlayer_thickness', 'interlayer_poisson_ratio', 'support_x', 'load_x',
                    'loading_rate', 'temperature'):
            value = reader.real('scenario', key)
            if value is not None:
                spec_args[key] = value
        if reader.has('scenario', 'glass_thickness') and reader.has('scenario', 'glass_thicknesses'):
            problems.append('[scenario] give glass_thickness or glass_thicknesses, not both')
        thicknesses = reader.reals('scenario', 'glass_thicknesses')
        if thicknesses is None and reader.has('scenario', 'glass_thickness'):
            thicknesses = (reader.real('scenario', 'glass_thickness', 0.0),)
        if thicknesses is None:
            thicknesses = (0.01, 0.01) if layup is Layup.LAMINATE else (0.02,)
        spec_args['glass_thicknesses'] = thicknesses
        symmetry = reader.text('scenario', 'symmetry')
        if symmetry is not None:
            spec_args['symmetry'] = symmetry.lower()
        spec_args['model'] = reader.choice('scenario', 'model', ModelKind, ModelKind.PS)
        spec_args['beam_mode'] = reader.choice('scenario', 'beam_mode', DrivingForceMode, DrivingForceMode.INTEGRATED)

        interlayer = reader.text('scenario', 'interlayer', 'eva')
        if interlayer.lower() not in ('eva', 'pvb'):
            candidate = interlayer if os.path.isabs(interlayer) else os.path.join(base_dir, interlayer)
            if os.path.exists(candidate):
                interlayer = candidate
            elif layup is Layup.LAMINATE:
                try:
                    builtin_interlayer(interlayer)
                except ValueError as e:
                    problems.append('[scenario] interlayer: %s' % e)
        spec_args['interlayer'] = interlayer

        for key in ('element_size', 'band_size', 'grading_ratio'):
            value = reader.real('mesh', key)
            if value is not None:
                spec_args[key] = value

        kind = reader.choice('formulation', 'kind', Kind, Kind.PF_P)
        split = reader.choice('formulation', 'split', Split, Split.SPECTRAL)
        scheme = reader.choice('formulation', 'scheme', Scheme, Scheme.ANISOTROPIC)
        residual = reader.real('formulation', 'residual_stiffness', 1e-6)
        try:
            spec_args['formulation'] = PhaseFieldFormulation(kind, split, scheme, residual)
        except (TypeError, ValueError) as e:
            problems.append('[formulation] %s' % e)
        material_args = {}
        for key in ('young_modulus', 'poisson_ratio', 'tensile_strength'):
            value = reader.real('formulation', key)
            if value is not None:
                material_args[key] = value
        try:
            spec_args['material'] = MaterialGlass(**material_args)
        except (TypeError, ValueError) as e:
            problems.append('[formulation] %s' % e)

        has_lc = reader.has('formulation', 'length_scale')
        has_gf = reader.has('formulation', 'fracture_energy')
        if has_lc and has_gf:
            problems.append(unwrap(
                '''
                [formulation] length_scale and fracture_energy are both given;
                set one, the other follows from the calibration
                '''
            ))
        elif has_lc:
            spec_args['known'] = Known.LC
            spec_args['known_value'] = reader.real('formulation', 'length_scale')
        elif has_gf:
            spec_args['known'] = Known.GF
            spec_args['known_value'] = reader.real('formulation', 'fracture_energy')
        reduction = reader.choice('formulation', 'reduction', Reduction)
        if reduction is not None:
            spec_args['reduction'] = reduction
        validation = reader.real('formulation', 'validation_strength')
        if validation is not None:
            spec_args['validation_strength'] = validation

        edge = reader.real('strength', 'edge_weakening')
        if edge is not None:
            spec_args['edge_weakening'] = edge
        patches_text = reader.text('strength', 'patches')
        if patches_text is not None:
            patches = []
            for chunk in patches_text.split(';'):
                if not chunk.strip():
                    continue
                try:
                    x_min, y_min, x_max, y_max, factor = [float(v) for v in chunk.split()]
                    patches.append((Box(x_min, y_min, x_max, y_max), factor))
                except ValueError:
                    problems.append(unwrap(
                        '''
                        [strength] patch %r must be "x_min y_min x_max y_max
                        factor"
                        ''',
                        chunk.strip()
                    ))
            spec_args['strength_patches'] = tuple(patches)

        if parser.has_section('initial_cracks'):
            layer_name = reader.text('initial_cracks', 'layer', 'bottom').lower()
            layer = _LAYERS.get(layer_name)
            if layer is None:
                problems.append('[initial_cracks] layer must be bottom or top, got %r' % layer_name)
                layer = LayerTag.GLASS_BOTTOM
            if reader.has('initial_cracks', 'count') and reader.has('initial_cracks', 'positions'):
                problems.append('[initial_cracks] give count or positions, not both')
            positions = reader.reals('initial_cracks', 'positions')
            count = reader.integer('initial_cracks', 'count')
            if positions is None and count is not None:
                if count < 0:
                    problems.append('[initial_cracks] count must not be negative, got %r' % count)
                else:
                    length = spec_args.get('length', 1.1)
                    load_x = spec_args.get('load_x', FourPointSpec(length=length).resolved_load_x)
                    positions = crack_positions(count, load_x, length / 2.0)
            if positions:
                try:
                    spec_args['initial_cracks'] = (
                        InitialCrackSpec(layer, positions, reader.real('initial_cracks', 'width')),
                    )
                except ConfigurationError as e:
                    problems.extend(e.violations)

        solver_args = {}
        schedule = reader.text('solver', 'schedule')
        if schedule is not None:
            try:
                solver_args['schedule'] = parse_schedule(schedule)
            except ValueError as e:
                problems.append('[solver] schedule: %s' % e)
        for key in ('energy_tolerance', 'newton_tolerance', 'max_damage_increment', 'min_increment',
                    'localization_drop'):
            value = reader.real('solver', key)
            if value is not None:
                solver_args[key] = value
        for key in ('max_staggered_iterations', 'max_newton_iterations', 'max_active_set_iterations'):
            value = reader.integer('solver', key)
            if value is not None:
                solver_args[key] = value

        directory = reader.text('output', 'directory', 'results')
        if not os.path.isabs(directory):
            directory = os.path.join(base_dir, directory)
        snapshot_every = reader.integer('output', 'snapshot_every', 25)
        if snapshot_every is not None and snapshot_every < 1:
            problems.append('[output] snapshot_every must be a positive integer, got %r' % snapshot_every)
        output = OutputSettings(directory, snapshot_every, reader.boolean('output', 'fields', True))

        spec = None
        solver = None
        if 'formulation' in spec_args and 'material' in spec_args:
            try:
                spec = FourPointSpec(**spec_args)
                problems.extend(spec.violations())
            except (TypeError, ValueError) as e:
                problems.append(str(e))
        try:
            solver = StaggeredConfig(**solver_args)
        except ConfigurationError as e:
            problems.extend('[solver] %s' % v for v in e.violations)

        if problems:
            raise ConfigurationError(problems)

        echo = {
            section: dict(parser.items(section))
            for section in parser.sections()
        }
        logger.debug('Configuration read with sections %s', ', '.join(sorted(echo)))
        return cls(spec, solver, output, text, path, echo)
