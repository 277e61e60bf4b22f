# coding: utf-8

"""
Glass and interlayer material data. Exports the following items:

 - MaterialGlass()
 - Box()
 - StrengthField()
 - PronySeries()
 - WlfShift()
 - InterlayerModel()
 - wlf_shift_factor()
 - equivalent_shear_modulus()
 - equivalent_elastic_constants()
 - effective_strength()
 - load_prony_csv()
 - builtin_interlayer()
 - interlayer_model()
 - EVA
 - PVB
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import csv
import io
import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from ._errors import unwrap, ConfigurationError, DomainError
from ._types import type_name, check_real


__all__ = [
    'Box',
    'builtin_interlayer',
    'effective_strength',
    'equivalent_elastic_constants',
    'equivalent_shear_modulus',
    'EVA',
    'InterlayerModel',
    'interlayer_model',
    'load_prony_csv',
    'MaterialGlass',
    'PronySeries',
    'PVB',
    'StrengthField',
    'WlfShift',
    'wlf_shift_factor',
]


logger = logging.getLogger(__name__)


# Annealed soda-lime glass
GLASS_YOUNG_MODULUS = 70.0e9
GLASS_POISSON_RATIO = 0.22
GLASS_TENSILE_STRENGTH = 45.0e6
GLASS_FRACTURE_ENERGY = 4.0

INTERLAYER_POISSON_RATIO = 0.49


@dataclass(frozen=True)
class MaterialGlass(object):
    """
    Isotropic elastic glass with the phase-field pair (G_f, l_c). All values
    are SI.
    """

    young_modulus: float = GLASS_YOUNG_MODULUS
    poisson_ratio: float = GLASS_POISSON_RATIO
    tensile_strength: float = GLASS_TENSILE_STRENGTH
    fracture_energy: float = GLASS_FRACTURE_ENERGY
    length_scale: float = 1.0e-3

    def __post_init__(self):
        check_real('young_modulus', self.young_modulus, 0.0, inclusive=(False, True))
        check_real('poisson_ratio', self.poisson_ratio, 0.0, 0.5, inclusive=(True, False))
        check_real('tensile_strength', self.tensile_strength, 0.0, inclusive=(False, True))
        check_real('fracture_energy', self.fracture_energy, 0.0, inclusive=(False, True))
        check_real('length_scale', self.length_scale, 0.0, inclusive=(False, True))

    def lame_plane_stress(self):
        """
        :return:
            A 2-element tuple of (lambda*, mu), the plane-stress reduced Lamé
            parameters in Pa
        """

        return plane_stress_lame(self.young_modulus, self.poisson_ratio)

    def with_pair(self, length_scale, fracture_energy):
        """
        :return:
            A copy of the material with a new (l_c, G_f) pair
        """

        return replace(self, length_scale=length_scale, fracture_energy=fracture_energy)


def plane_stress_lame(young_modulus, poisson_ratio):
    """
    :param young_modulus:
        Young's modulus in Pa

    :param poisson_ratio:
        Poisson's ratio

    :return:
        A 2-element tuple of (lambda*, mu) in Pa
    """

    lam = young_modulus * poisson_ratio / (1.0 - poisson_ratio ** 2)
    mu = young_modulus / (2.0 * (1.0 + poisson_ratio))
    return lam, mu


@dataclass(frozen=True)
class Box(object):
    """
    An axis-aligned box in model coordinates. Points on the boundary are
    covered.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise ValueError(unwrap(
                '''
                box corners must be ordered, got (%r, %r) - (%r, %r)
                ''',
                self.x_min,
                self.y_min,
                self.x_max,
                self.y_max
            ))

    @classmethod
    def centered(cls, x, y, width, height):
        return cls(x - width / 2.0, y - height / 2.0, x + width / 2.0, y + height / 2.0)

    def contains(self, points):
        """
        :param points:
            A numpy array of shape (n, 2), or a single (x, y) pair

        :return:
            A numpy bool array of shape (n,), or a single bool
        """

        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        inside = (
            (pts[:, 0] >= self.x_min) & (pts[:, 0] <= self.x_max)
            & (pts[:, 1] >= self.y_min) & (pts[:, 1] <= self.y_max)
        )
        if single:
            return bool(inside[0])
        return inside


@dataclass(frozen=True)
class StrengthField(object):
    """
    Tensile strength with multiplicative weakening patches. Overlapping
    patches do not compound: the smallest factor applies.
    """

    base_strength: float = GLASS_TENSILE_STRENGTH
    patches: tuple = field(default_factory=tuple)

    def __post_init__(self):
        check_real('base_strength', self.base_strength, 0.0, inclusive=(False, True))
        for patch in self.patches:
            if len(patch) != 2 or not isinstance(patch[0], Box):
                raise TypeError(unwrap(
                    '''
                    patches must be (Box, factor) pairs, not %s
                    ''',
                    type_name(patch)
                ))
            check_real('patch factor', patch[1], 0.0, 1.0, inclusive=(False, True))
        object.__setattr__(self, 'patches', tuple(tuple(p) for p in self.patches))

    def factors(self, points):
        """
        :param points:
            A numpy array of shape (n, 2)

        :return:
            A numpy array of shape (n,) with the strength factor at each point
        """

        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        out = np.ones(pts.shape[0])
        for box, factor in self.patches:
            hit = box.contains(pts)
            out[hit] = np.minimum(out[hit], factor)
        return out

    def strengths(self, points):
        """
        :param points:
            A numpy array of shape (n, 2)

        :return:
            A numpy array of shape (n,) of effective strengths in Pa
        """

        return self.base_strength * self.factors(points)


def effective_strength(strength_field, point):
    """
    Evaluates the tensile strength at a single point

    :param strength_field:
        A StrengthField object

    :param point:
        An (x, y) pair in model coordinates

    :return:
        The effective strength in Pa
    """

    if not isinstance(strength_field, StrengthField):
        raise TypeError(unwrap(
            '''
            strength_field must be an instance of StrengthField, not %s
            ''',
            type_name(strength_field)
        ))
    return float(strength_field.strengths(np.array([point], dtype=np.float64))[0])


@dataclass(frozen=True)
class PronySeries(object):
    """
    Generalised Maxwell shear relaxation modulus
    G(t) = G_inf + sum_p G_p exp(-t / tau_p), moduli in Pa and times in s
    """

    long_term_modulus: float
    terms: tuple

    def __post_init__(self):
        check_real('long_term_modulus', self.long_term_modulus, 0.0)
        terms = tuple((float(t), float(g)) for t, g in self.terms)
        previous = 0.0
        for tau, modulus in terms:
            if not tau > previous:
                raise ValueError(unwrap(
                    '''
                    relaxation times must be strictly positive and strictly
                    increasing, got %r after %r
                    ''',
                    tau,
                    previous
                ))
            if not modulus > 0.0:
                raise ValueError('term moduli must be positive, got %r' % modulus)
            previous = tau
        object.__setattr__(self, 'terms', terms)

    @property
    def relaxation_times(self):
        return np.array([t for t, _ in self.terms])

    @property
    def moduli(self):
        return np.array([g for _, g in self.terms])

    @property
    def instantaneous_modulus(self):
        return self.long_term_modulus + math.fsum(g for _, g in self.terms)


@dataclass(frozen=True)
class WlfShift(object):
    """
    Williams-Landel-Ferry time-temperature shift, temperatures in degrees C
    """

    reference_temperature: float
    c1: float
    c2: float


@dataclass(frozen=True)
class InterlayerModel(object):
    name: str
    prony: PronySeries
    wlf: WlfShift
    poisson_ratio: float = INTERLAYER_POISSON_RATIO

    def __post_init__(self):
        check_real('poisson_ratio', self.poisson_ratio, 0.0, 0.5, inclusive=(True, False))

    def with_poisson_ratio(self, poisson_ratio):
        return replace(self, poisson_ratio=poisson_ratio)


def wlf_shift_factor(wlf, temperature):
    """
    Computes the shift factor a_T = 10^(-C1 (T - T0) / (C2 + T - T0))

    :param wlf:
        A WlfShift object

    :param temperature:
        The temperature in degrees C

    :raises:
        glassfrac.DomainError - when C2 + T - T0 is zero

    :return:
        The dimensionless shift factor
    """

    if not isinstance(wlf, WlfShift):
        raise TypeError(unwrap(
            '''
            wlf must be an instance of WlfShift, not %s
            ''',
            type_name(wlf)
        ))
    temperature = check_real('temperature', temperature)
    delta = temperature - wlf.reference_temperature
    if delta == 0.0:
        return 1.0
    denominator = wlf.c2 + delta
    if denominator == 0.0:
        raise DomainError(unwrap(
            '''
            WLF shift is singular at %r degrees C (C2 + T - T0 = 0)
            ''',
            temperature
        ))
    return 10.0 ** (-wlf.c1 * delta / denominator)


def equivalent_shear_modulus(model, duration, temperature):
    """
    Secant shear modulus of the interlayer for a load of the given total
    duration, with the Prony terms evaluated at half of the duration

    :param model:
        An InterlayerModel object

    :param duration:
        The elapsed load time in seconds, may be float('inf')

    :param temperature:
        The temperature in degrees C

    :return:
        The shear modulus in Pa
    """

    if not isinstance(model, InterlayerModel):
        raise TypeError(unwrap(
            '''
            model must be an instance of InterlayerModel, not %s
            ''',
            type_name(model)
        ))
    duration = check_real('duration', duration, 0.0)
    a_t = wlf_shift_factor(model.wlf, temperature)
    prony = model.prony
    if not prony.terms:
        return prony.long_term_modulus
    if duration == 0.0:
        return prony.instantaneous_modulus
    decay = np.exp(-(duration / 2.0) / (a_t * prony.relaxation_times))
    return prony.long_term_modulus + math.fsum(prony.moduli * decay)


def equivalent_elastic_constants(model, duration, temperature):
    """
    Isotropic elastic pair reconstructed from the equivalent shear modulus

    :return:
        A 2-element tuple of (young_modulus in Pa, poisson_ratio)
    """

    shear = equivalent_shear_modulus(model, duration, temperature)
    return 2.0 * shear * (1.0 + model.poisson_ratio), model.poisson_ratio


def _kpa_terms(pairs):
    return tuple((tau, 1.0e3 * g) for tau, g in pairs)


EVA = InterlayerModel(
    'eva',
    PronySeries(
        682.18e3,
        _kpa_terms([
            (1e-9, 6933.9), (1e-8, 3898.6), (1e-7, 2289.2), (1e-6, 1672.7),
            (1e-5, 761.6), (1e-4, 2401.0), (1e-3, 65.2), (1e-2, 248.0),
            (1e-1, 575.6), (1e0, 56.3), (1e1, 188.6), (1e2, 445.1),
            (1e3, 300.1), (1e4, 401.6), (1e5, 348.1), (1e6, 111.6),
            (1e7, 127.2), (1e8, 137.8), (1e9, 50.5), (1e10, 322.9),
            (1e11, 100.0), (1e12, 199.9),
        ])
    ),
    WlfShift(20.0, 339.102, 1185.816),
)

PVB = InterlayerModel(
    'pvb',
    PronySeries(
        232.26e3,
        _kpa_terms([
            (1e-5, 1782124.2), (1e-4, 519208.7), (1e-3, 546176.8),
            (1e-2, 216893.2), (1e-1, 13618.3), (1e0, 4988.3),
            (1e1, 1663.8), (1e2, 587.2), (1e3, 258.0), (1e4, 63.8),
            (1e5, 168.4),
        ])
    ),
    WlfShift(20.0, 8.635, 42.422),
)

_BUILTIN = {'eva': EVA, 'pvb': PVB}


def builtin_interlayer(name):
    """
    :param name:
        A unicode string, "eva" or "pvb" (case-insensitive)

    :raises:
        ConfigurationError - when the name is unknown

    :return:
        An InterlayerModel object
    """

    try:
        return _BUILTIN[name.strip().lower()]
    except KeyError:
        raise ConfigurationError(unwrap(
            '''
            unknown interlayer %r, expected one of %s or a CSV path
            ''',
            name,
            ', '.join(sorted(_BUILTIN))
        ))


def load_prony_csv(source):
    """
    Reads a Prony table with the columns tau_s, G_Pa. A row with tau_s set
    to inf gives the long-term modulus; without one it is zero.

    :param source:
        A unicode string path, or a file-like object opened in text mode

    :raises:
        ConfigurationError - when the table is malformed

    :return:
        A PronySeries object
    """

    if hasattr(source, 'read'):
        text = source.read()
    else:
        with io.open(source, 'r', encoding='utf-8', newline='') as f:
            text = f.read()

    reader = csv.DictReader(io.StringIO(text), skipinitialspace=True)
    fields = [f.strip() for f in (reader.fieldnames or [])]
    if fields[:2] != ['tau_s', 'G_Pa']:
        raise ConfigurationError(unwrap(
            '''
            Prony CSV must start with the columns tau_s, G_Pa, got %s
            ''',
            ', '.join(fields) or 'no header'
        ))
    reader.fieldnames = fields

    problems = []
    long_term = 0.0
    terms = []
    for line_num, row in enumerate(reader, 2):
        try:
            tau = float(row['tau_s'])
            modulus = float(row['G_Pa'])
        except (TypeError, ValueError):
            problems.append('line %d: non-numeric value' % line_num)
            continue
        if math.isinf(tau):
            long_term = modulus
        else:
            terms.append((tau, modulus))
    if problems:
        raise ConfigurationError(problems)
    terms.sort()
    try:
        return PronySeries(long_term, tuple(terms))
    except ValueError as e:
        raise ConfigurationError('invalid Prony table: %s' % e)


def interlayer_model(name_or_path, poisson_ratio=INTERLAYER_POISSON_RATIO, wlf=None):
    """
    Resolves an interlayer by built-in name or CSV path. CSV tables reuse the
    EVA shift parameters unless wlf is given.

    :param name_or_path:
        "eva", "pvb" or a path to a tau_s, G_Pa CSV file

    :param poisson_ratio:
        The interlayer Poisson ratio

    :param wlf:
        None or a WlfShift object

    :return:
        An InterlayerModel object
    """

    key = name_or_path.strip().lower()
    if key in _BUILTIN:
        model = _BUILTIN[key]
        if wlf is not None:
            model = replace(model, wlf=wlf)
        return model.with_poisson_ratio(poisson_ratio)

    if not os.path.exists(name_or_path):
        return builtin_interlayer(name_or_path)
    prony = load_prony_csv(name_or_path)
    logger.debug('Loaded %d Prony terms from %s', len(prony.terms), name_or_path)
    return InterlayerModel(
        os.path.splitext(os.path.basename(name_or_path))[0],
        prony,
        wlf if wlf is not None else EVA.wlf,
        poisson_ratio
    )
