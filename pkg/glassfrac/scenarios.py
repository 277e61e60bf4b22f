# coding: utf-8

"""
Four-point bending set-ups of monolithic and laminated glass strips: layups,
probes, calibration against the scenario strength, edge weakening and
pre-cracked layers. Exports the following items:

 - Layup
 - ModelKind
 - SampleType
 - InitialCrackSpec()
 - Probe()
 - FourPointSpec()
 - FourPointScenario()
 - build_scenario()
 - apply_initial_cracks()
 - crack_positions()
 - edge_patch()
 - expected_failure_window()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import enum
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ._errors import unwrap, ConfigurationError
from ._problem import BoundaryPlan
from ._types import type_name
from .beam1d import BeamProblem, DrivingForceMode, LayeredBeamSection
from .fem2d import SectionProblem
from .materials import (
    Box,
    INTERLAYER_POISSON_RATIO,
    MaterialGlass,
    StrengthField,
    equivalent_elastic_constants,
    equivalent_shear_modulus,
    interlayer_model,
)
from .mesh import LayerTag, RefinementSpec, build_beam_mesh, build_section_mesh
from .phasefield import Known, PhaseFieldFormulation, Reduction, calibrate


__all__ = [
    'apply_initial_cracks',
    'build_scenario',
    'crack_positions',
    'edge_patch',
    'expected_failure_window',
    'FourPointScenario',
    'FourPointSpec',
    'InitialCrackSpec',
    'Layup',
    'ModelKind',
    'Probe',
    'SampleType',
]


logger = logging.getLogger(__name__)

# Distance of each support from the specimen end, and of each loading line
# from midspan, in m
DEFAULT_SUPPORT_OFFSET = 0.05
DEFAULT_LOAD_OFFSET = 0.1

# Refinement extends this far outside the loading lines
BAND_MARGIN = 0.02

EDGE_PATCH_DISTANCE = 0.05
EDGE_PATCH_FACTOR = 0.8

_FAILURE_WINDOWS = {
    'ang-eva': (32.0e6, 60.0e6),
    'ang-pvb': (28.0e6, 69.0e6),
}


class Layup(enum.Enum):
    MONOLITH = 'monolith'
    LAMINATE = 'laminate'


class ModelKind(enum.Enum):
    PS = 'ps'
    BEAM = 'beam'


class SampleType(enum.Enum):
    MONOLITH = 'monolith'
    ANG_EVA = 'ang-eva'
    ANG_PVB = 'ang-pvb'


@dataclass(frozen=True)
class InitialCrackSpec(object):
    """
    Fully damaged bands across a glass layer. width None gives 2 l_c.
    """

    layer: LayerTag = LayerTag.GLASS_BOTTOM
    positions: tuple = field(default_factory=tuple)
    width: float = None

    def __post_init__(self):
        if not isinstance(self.layer, LayerTag) or self.layer is LayerTag.INTERLAYER:
            raise ConfigurationError(unwrap(
                '''
                initial cracks need a glass layer, not %r
                ''',
                self.layer
            ))
        if self.width is not None and not self.width > 0.0:
            raise ConfigurationError('initial crack width must be positive, got %r' % (self.width,))
        object.__setattr__(self, 'positions', tuple(float(x) for x in self.positions))

    @classmethod
    def evenly(cls, count, load_x, midspan, layer=LayerTag.GLASS_BOTTOM, width=None):
        return cls(layer, crack_positions(count, load_x, midspan), width)


@dataclass(frozen=True)
class Probe(object):
    """
    A stress probe on a surface fibre. x is the requested position, snapped_x
    the mesh position the value is read at.
    """

    name: str
    x: float
    fiber: str
    component: str = 'xx'
    snapped_x: float = None


@dataclass(frozen=True)
class FourPointSpec(object):
    """
    Everything needed to build a four-point bending run. Lengths in m,
    strengths in Pa, rate in m/s and temperature in degrees C.

    load_x None places the loading lines DEFAULT_LOAD_OFFSET either side of
    midspan. known_value None sets l_c to twice the refined element size.
    validation_strength replaces the glass tensile strength before
    calibration. reduction None picks PLANE_STRESS for section models and
    for SURFACE beams, BEAM for INTEGRATED beams.
    """

    length: float = 1.1
    width: float = 0.36
    layup: Layup = Layup.MONOLITH
    glass_thicknesses: tuple = (0.02,)
    interlayer_thickness: float = 0.00076
    interlayer: str = 'eva'
    interlayer_poisson_ratio: float = INTERLAYER_POISSON_RATIO
    support_x: float = DEFAULT_SUPPORT_OFFSET
    load_x: float = None
    symmetry: str = 'half'
    loading_rate: float = 0.03e-3
    temperature: float = 25.0
    model: ModelKind = ModelKind.PS
    beam_mode: DrivingForceMode = DrivingForceMode.INTEGRATED
    formulation: PhaseFieldFormulation = field(default_factory=PhaseFieldFormulation)
    material: MaterialGlass = field(default_factory=MaterialGlass)
    known: Known = Known.LC
    known_value: float = None
    reduction: Reduction = None
    validation_strength: float = None
    element_size: float = 2.0e-3
    band_size: float = 0.5e-3
    grading_ratio: float = 1.3
    strength_patches: tuple = field(default_factory=tuple)
    edge_weakening: float = None
    initial_cracks: tuple = field(default_factory=tuple)

    @property
    def resolved_load_x(self):
        if self.load_x is not None:
            return self.load_x
        return self.length / 2.0 - DEFAULT_LOAD_OFFSET

    @property
    def layer_thicknesses(self):
        if self.layup is Layup.LAMINATE:
            return (self.glass_thicknesses[0], self.interlayer_thickness, self.glass_thicknesses[1])
        return tuple(self.glass_thicknesses)

    @property
    def total_thickness(self):
        return sum(self.layer_thicknesses)

    def violations(self):
        """
        :return:
            A list of unicode strings, one per inconsistency, empty when the
            spec is well formed
        """

        problems = []
        for name, value in (('length', self.length), ('width', self.width), ('loading_rate', self.loading_rate),
                            ('element_size', self.element_size), ('band_size', self.band_size)):
            if not value > 0.0:
                problems.append('%s must be positive, got %r' % (name, value))
        if not isinstance(self.layup, Layup):
            problems.append('layup must be a Layup member, not %s' % type_name(self.layup))
        elif self.layup is Layup.MONOLITH and len(self.glass_thicknesses) != 1:
            problems.append('a monolith has one glass thickness, got %d' % len(self.glass_thicknesses))
        elif self.layup is Layup.LAMINATE:
            if len(self.glass_thicknesses) != 2:
                problems.append('a laminate has two glass thicknesses, got %d' % len(self.glass_thicknesses))
            if not self.interlayer_thickness > 0.0:
                problems.append('interlayer_thickness must be positive, got %r' % (self.interlayer_thickness,))
            if not self.interlayer:
                problems.append('a laminate needs an interlayer')
        problems.extend(
            'glass thickness %d must be positive, got %r' % (i, h)
            for i, h in enumerate(self.glass_thicknesses) if not h > 0.0
        )
        if not isinstance(self.model, ModelKind):
            problems.append('model must be a ModelKind member, not %s' % type_name(self.model))
        if not isinstance(self.beam_mode, DrivingForceMode):
            problems.append('beam_mode must be a DrivingForceMode member, not %s' % type_name(self.beam_mode))
        if self.symmetry not in ('half', 'full'):
            problems.append('symmetry must be "half" or "full", not %r' % (self.symmetry,))
        load_x = self.resolved_load_x
        if not 0.0 <= self.support_x < load_x < self.length / 2.0:
            problems.append(unwrap(
                '''
                positions must satisfy 0 <= support (%r) < load (%r) < midspan
                (%r)
                ''',
                self.support_x,
                load_x,
                self.length / 2.0
            ))
        if self.band_size > self.element_size:
            problems.append('band_size %r is larger than element_size %r' % (self.band_size, self.element_size))
        if self.known_value is not None and not self.known_value > 0.0:
            problems.append('the known %s value must be positive, got %r' % (self.known.value, self.known_value))
        if self.validation_strength is not None and not self.validation_strength > 0.0:
            problems.append('validation_strength must be positive, got %r' % (self.validation_strength,))
        if self.edge_weakening is not None and not 0.0 < self.edge_weakening <= 1.0:
            problems.append('edge_weakening factor must lie in (0, 1], got %r' % (self.edge_weakening,))

        model_end = self.length / 2.0 if self.symmetry == 'half' else self.length
        for crack in self.initial_cracks:
            if self.layup is Layup.MONOLITH and crack.layer is LayerTag.GLASS_TOP:
                problems.append('a monolith has no top glass layer for initial cracks')
            if self.layup is Layup.LAMINATE and crack.layer is LayerTag.GLASS_MONO:
                problems.append('initial cracks in a laminate name the bottom or top glass layer')
            for x in crack.positions:
                if not self.support_x <= x <= self.length - self.support_x:
                    problems.append('initial crack at x = %r lies outside the span' % x)
                elif x > model_end + 1e-12:
                    problems.append('initial crack at x = %r lies outside the modelled part' % x)
        return problems


class FourPointScenario(object):
    """
    A built run: mesh, calibrated material, problem, probes and the initial
    damage. Instances are not modified after build_scenario() returns, apart
    from the interlayer stiffness the solver refreshes each step.
    """

    def __init__(self, spec, mesh, material, calibration, reduction, plan, problem, probes, interlayer,
                 strength_field, initial_damage):
        self.spec = spec
        self.mesh = mesh
        self.material = material
        self.calibration = calibration
        self.reduction = reduction
        self.plan = plan
        self.problem = problem
        self.probes = probes
        self.interlayer = interlayer
        self.strength_field = strength_field
        self.initial_damage = initial_damage

    @property
    def loading_rate(self):
        return self.spec.loading_rate

    @property
    def temperature(self):
        return self.spec.temperature

    @property
    def formulation(self):
        return self.spec.formulation

    def assumptions(self):
        """
        :return:
            A dict of the defaults this run relies on that the test programme
            does not fix
        """

        spec = self.spec
        out = {
            'support_x_m': spec.support_x,
            'support_x_assumed': spec.support_x == DEFAULT_SUPPORT_OFFSET,
            'load_x_m': spec.resolved_load_x,
            'load_x_assumed': spec.load_x is None,
            'quarter_probe_x_m': self.probes['sigma_quarter_top'].x,
            'refinement_band_margin_m': BAND_MARGIN,
            'length_scale_default': spec.known_value is None and spec.known is Known.LC,
            'calibration_heuristic': self.calibration.heuristic,
        }
        if self.interlayer is not None:
            out['interlayer_poisson_ratio'] = self.interlayer.poisson_ratio
        return out

    def __repr__(self):
        return '<FourPointScenario %s %s, %d dofs>' % (
            self.spec.layup.value,
            self.spec.model.value,
            self.problem.n_dofs
        )


def crack_positions(count, load_x, midspan):
    """
    Evenly spaced crack positions between a loading line and midspan

    :param count:
        The number of cracks in the half specimen

    :return:
        A tuple of x coordinates in m
    """

    if count < 0:
        raise ValueError('crack count must not be negative, got %r' % (count,))
    spacing = (midspan - load_x) / count if count else 0.0
    return tuple(load_x + (k + 0.5) * spacing for k in range(count))


def edge_patch(length, length_scale, factor=EDGE_PATCH_FACTOR):
    """
    A square weakened patch of side 1.5 l_c on the bottom edge,
    EDGE_PATCH_DISTANCE from midspan

    :return:
        A 2-element tuple of (Box, factor)
    """

    x0 = length / 2.0 - EDGE_PATCH_DISTANCE
    half = 0.75 * length_scale
    return Box(x0 - half, 0.0, x0 + half, 1.5 * length_scale), factor


def expected_failure_window(sample_type):
    """
    Range of bottom-surface failure stresses measured for a sample type

    :param sample_type:
        A SampleType member or its value

    :raises:
        ValueError - for an unknown sample type

    :return:
        A 2-element tuple of (min Pa, max Pa)
    """

    if isinstance(sample_type, SampleType):
        key = sample_type.value
    else:
        key = str(sample_type).strip().lower().replace('_', '-')
    if key == SampleType.MONOLITH.value:
        strength = MaterialGlass().tensile_strength
        return strength, strength
    if key not in _FAILURE_WINDOWS:
        raise ValueError(unwrap(
            '''
            sample_type must be one of "monolith", "ang-eva", "ang-pvb", not %r
            ''',
            sample_type
        ))
    return _FAILURE_WINDOWS[key]


def _reduction(spec):
    if spec.reduction is not None:
        return spec.reduction
    if spec.model is ModelKind.BEAM and spec.beam_mode is DrivingForceMode.INTEGRATED:
        return Reduction.BEAM
    return Reduction.PLANE_STRESS


def _layer_key(problem, layer):
    if isinstance(problem, BeamProblem):
        return 1 if layer is LayerTag.GLASS_TOP else 0
    if layer is LayerTag.GLASS_BOTTOM and not np.any(problem.mesh.layer_tags == int(LayerTag.GLASS_BOTTOM)):
        return LayerTag.GLASS_MONO
    return layer


def apply_initial_cracks(problem, d, cracks, length_scale):
    """
    Sets d = 1 on the damage nodes of the named layer within half a crack
    width of each position

    :param problem:
        A SectionProblem or BeamProblem

    :param d:
        A numpy array of nodal damage

    :param cracks:
        An iterable of InitialCrackSpec objects

    :param length_scale:
        l_c in m, the default half width

    :raises:
        ConfigurationError - when a position is outside of the mesh

    :return:
        A new numpy array of nodal damage
    """

    d = np.array(d, dtype=np.float64)
    if isinstance(problem, BeamProblem):
        x_lo, x_hi = float(problem.mesh.nodes[0]), float(problem.mesh.nodes[-1])
    else:
        lower, upper = problem.mesh.bounds()
        x_lo, x_hi = float(lower[0]), float(upper[0])
    problems = []
    for crack in cracks:
        half = crack.width / 2.0 if crack.width is not None else length_scale
        for x in crack.positions:
            if not x_lo - 1e-12 <= x <= x_hi + 1e-12:
                problems.append('initial crack at x = %r lies outside of the mesh [%r, %r]' % (x, x_lo, x_hi))
                continue
            nodes = problem.damage_nodes(_layer_key(problem, crack.layer), x - half, x + half)
            if nodes.size == 0:
                problems.append('initial crack at x = %r covers no damage node' % x)
            d[nodes] = 1.0
    if problems:
        raise ConfigurationError(problems)
    return d


def _snap(mesh, x, fiber):
    if hasattr(mesh, 'bounds'):
        lower, upper = mesh.bounds()
        y = lower[1] if fiber == 'bottom' else upper[1]
        return float(mesh.nodes[mesh.nearest_node((x, y)), 0])
    return float(mesh.nodes[mesh.nearest_node(x)])


def build_scenario(spec):
    """
    Builds the mesh, calibrated material and problem of a four-point bending
    run

    :param spec:
        A FourPointSpec object

    :raises:
        ConfigurationError - listing every inconsistency of the FourPointSpec

    :return:
        A FourPointScenario object
    """

    if not isinstance(spec, FourPointSpec):
        raise TypeError(unwrap(
            '''
            spec must be an instance of FourPointSpec, not %s
            ''',
            type_name(spec)
        ))
    problems = spec.violations()
    if problems:
        raise ConfigurationError(problems)

    load_x = spec.resolved_load_x
    plan = BoundaryPlan(spec.length, spec.width, spec.support_x, load_x, spec.symmetry)
    quarter_x = spec.support_x + plan.span / 4.0

    reduction = _reduction(spec)
    material = spec.material
    if spec.validation_strength is not None:
        material = replace(material, tensile_strength=spec.validation_strength)
    if spec.known_value is not None:
        known, value = spec.known, spec.known_value
    else:
        known, value = Known.LC, 2.0 * spec.band_size
    calibration = calibrate(spec.formulation.kind, reduction, known, value, material)
    material = material.with_pair(calibration.length_scale, calibration.fracture_energy)
    logger.info(
        'Calibrated %s (%s): l_c = %.4g m, G_f = %.4g J/m^2',
        spec.formulation.kind.value,
        reduction.value,
        material.length_scale,
        material.fracture_energy
    )

    patches = list(spec.strength_patches)
    if spec.edge_weakening is not None:
        patches.append(edge_patch(spec.length, material.length_scale, spec.edge_weakening))
    strength_field = StrengthField(material.tensile_strength, tuple(patches)) if patches else None

    interlayer = None
    if spec.layup is Layup.LAMINATE:
        interlayer = interlayer_model(spec.interlayer, spec.interlayer_poisson_ratio)

    refinement = RefinementSpec(
        spec.element_size,
        ((load_x - BAND_MARGIN, spec.length - load_x + BAND_MARGIN, spec.band_size),),
        spec.grading_ratio
    )
    fixed_points = sorted(set(plan.fixed_points() + [quarter_x]))
    if spec.symmetry == 'half':
        fixed_points = [x for x in fixed_points if x <= plan.midspan]

    if spec.model is ModelKind.PS:
        mesh = build_section_mesh(spec.length, spec.layer_thicknesses, refinement, spec.symmetry, fixed_points)
        constants = None
        if interlayer is not None:
            constants = equivalent_elastic_constants(interlayer, 0.0, spec.temperature)
        problem = SectionProblem(mesh, material, spec.formulation, plan, constants, strength_field)
    else:
        mesh = build_beam_mesh(spec.length, refinement, spec.symmetry, fixed_points)
        shear = 0.0
        if interlayer is not None:
            shear = equivalent_shear_modulus(interlayer, 0.0, spec.temperature)
        section = LayeredBeamSection(
            spec.width,
            tuple(spec.glass_thicknesses),
            material.young_modulus,
            material.poisson_ratio,
            spec.interlayer_thickness if spec.layup is Layup.LAMINATE else 0.0,
            shear
        )
        problem = BeamProblem(mesh, section, material, spec.formulation, plan, spec.beam_mode, strength_field)

    probes = {
        'sigma_mid': Probe('sigma_mid', plan.midspan, 'bottom', 'xx', _snap(mesh, plan.midspan, 'bottom')),
        'sigma_quarter_top': Probe('sigma_quarter_top', quarter_x, 'top', 'xx', _snap(mesh, quarter_x, 'top')),
    }
    initial_damage = apply_initial_cracks(
        problem,
        problem.initial_damage(),
        spec.initial_cracks,
        material.length_scale
    )
    scenario = FourPointScenario(
        spec,
        mesh,
        material,
        calibration,
        reduction,
        plan,
        problem,
        probes,
        interlayer,
        strength_field,
        initial_damage
    )
    logger.info('Built %r', scenario)
    return scenario
