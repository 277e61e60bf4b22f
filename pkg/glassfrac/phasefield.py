# coding: utf-8

"""
Phase-field formulation registry: crack geometric functions, degradation,
tension/compression energy splits, normalised driving forces and the
calibration of the (l_c, G_f) pair. Exports the following items:

 - Kind
 - Split
 - Scheme
 - Reduction
 - Known
 - PhaseFieldFormulation()
 - StrainState2D()
 - CalibrationResult()
 - geometric_function()
 - scaling_constant()
 - degradation()
 - principal_values()
 - split_energy()
 - split_stress()
 - split_tangent()
 - driving_force()
 - calibrate()
 - homogeneous_peak_stress()
 - damage_operator()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._errors import unwrap
from ._types import type_name, check_real, check_unit_interval


__all__ = [
    'calibrate',
    'CalibrationResult',
    'damage_operator',
    'degradation',
    'driving_force',
    'geometric_function',
    'homogeneous_peak_stress',
    'Kind',
    'Known',
    'PhaseFieldFormulation',
    'principal_values',
    'Reduction',
    'scaling_constant',
    'Scheme',
    'Split',
    'split_energy',
    'split_stress',
    'split_tangent',
    'StrainState2D',
]


logger = logging.getLogger(__name__)


class Kind(enum.Enum):
    PF_B = 'pf-b'
    PF_M = 'pf-m'
    PF_P = 'pf-p'


class Split(enum.Enum):
    VOLUMETRIC_DEVIATORIC = 'volumetric-deviatoric'
    SPECTRAL = 'spectral'


class Scheme(enum.Enum):
    ANISOTROPIC = 'anisotropic'
    HYBRID = 'hybrid'


class Reduction(enum.Enum):
    PLANE_STRESS = 'plane-stress'
    BEAM = 'beam'


class Known(enum.Enum):
    LC = 'lc'
    GF = 'gf'


# Relative size of the eigenvalue gap below which a 2x2 strain is treated
# as having a repeated eigenvalue
_UMBILIC_TOLERANCE = 1e-12

# l_c = k E G_f / f_t^2 from homogeneous 1D solutions
_CALIBRATION_FACTOR = {
    Kind.PF_B: 27.0 / 256.0,
    Kind.PF_M: 27.0 / 256.0,
    Kind.PF_P: 3.0 / 8.0,
}

_BEAM_FACTOR = 6.0

_SCALING_CONSTANT = {
    Kind.PF_B: 2.0,
    Kind.PF_M: 2.0,
    Kind.PF_P: 8.0 / 3.0,
}


def _check_kind(kind):
    if not isinstance(kind, Kind):
        raise TypeError(unwrap(
            '''
            kind must be a member of glassfrac.phasefield.Kind, not %s
            ''',
            type_name(kind)
        ))


def _check_split(split):
    if not isinstance(split, Split):
        raise TypeError(unwrap(
            '''
            split must be a member of glassfrac.phasefield.Split, not %s
            ''',
            type_name(split)
        ))


@dataclass(frozen=True)
class PhaseFieldFormulation(object):
    """
    Selects the crack function, driving force, energy split and the
    displacement scheme. Every combination of the three axes is valid.
    """

    kind: Kind = Kind.PF_P
    split: Split = Split.SPECTRAL
    scheme: Scheme = Scheme.ANISOTROPIC
    residual_stiffness: float = 1e-6

    def __post_init__(self):
        _check_kind(self.kind)
        _check_split(self.split)
        if not isinstance(self.scheme, Scheme):
            raise TypeError(unwrap(
                '''
                scheme must be a member of glassfrac.phasefield.Scheme, not %s
                ''',
                type_name(self.scheme)
            ))
        check_real('residual_stiffness', self.residual_stiffness, 0.0, 1e-3)

    @property
    def c_alpha(self):
        return scaling_constant(self.kind)

    def degradation(self, d):
        return degradation(d, self.residual_stiffness)


@dataclass(frozen=True)
class StrainState2D(object):
    """
    Small in-plane strain. eps_xy is the tensor shear component, half of the
    engineering shear strain.
    """

    eps_xx: float = 0.0
    eps_yy: float = 0.0
    eps_xy: float = 0.0

    def as_array(self):
        return np.array([[self.eps_xx, self.eps_yy, self.eps_xy]], dtype=np.float64)

    @property
    def trace(self):
        return self.eps_xx + self.eps_yy


@dataclass(frozen=True)
class CalibrationResult(object):
    length_scale: float
    fracture_energy: float
    heuristic: bool = False


def _strain_array(strain):
    """
    :return:
        A 2-element tuple of (float64 array of shape (n, 3) with tensor
        components, bool if a single state was given)
    """

    if isinstance(strain, StrainState2D):
        return strain.as_array(), True
    arr = np.asarray(strain, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape[0] != 3:
            raise ValueError('strain must have 3 components, got %d' % arr.shape[0])
        return arr[np.newaxis, :], True
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError('strain arrays must have shape (n, 3), got %r' % (arr.shape,))
    return arr, False


def _macaulay(a):
    return 0.5 * (a + np.abs(a))


def _heaviside(a):
    return (a > 0.0).astype(np.float64)


def geometric_function(kind, d):
    """
    Crack geometric function alpha(d) and its derivative

    :param kind:
        A Kind member

    :param d:
        A float or numpy array of damage values in [0, 1]

    :raises:
        ValueError - when any damage value is outside of [0, 1]

    :return:
        A 2-element tuple of (alpha, dalpha)
    """

    _check_kind(kind)
    d = check_unit_interval('d', d)
    if kind is Kind.PF_P:
        return d, np.ones_like(d) if isinstance(d, np.ndarray) else 1.0
    return d * d, 2.0 * d


def scaling_constant(kind):
    """
    :param kind:
        A Kind member

    :return:
        c_alpha = 4 int_0^1 sqrt(alpha(s)) ds
    """

    _check_kind(kind)
    return _SCALING_CONSTANT[kind]


def degradation(d, residual_stiffness=0.0):
    """
    Quadratic degradation g(d) = (1 - d)^2 + k and dg/dd = -2 (1 - d)

    :param d:
        A float or numpy array of damage values in [0, 1]

    :param residual_stiffness:
        The residual stiffness k

    :return:
        A 2-element tuple of (g, dg)
    """

    d = check_unit_interval('d', d)
    return (1.0 - d) ** 2 + residual_stiffness, -2.0 * (1.0 - d)


def principal_values(tensor):
    """
    Closed-form eigen decomposition of symmetric 2x2 tensors

    :param tensor:
        A numpy array of shape (n, 3) of (xx, yy, xy) tensor components

    :return:
        A 3-element tuple of (larger eigenvalues (n,), smaller eigenvalues (n,),
        projector onto the larger eigenvector as (n, 3) components). At
        repeated eigenvalues the projector is the x axis.
    """

    t = np.asarray(tensor, dtype=np.float64)
    mean = 0.5 * (t[:, 0] + t[:, 1])
    half_diff = 0.5 * (t[:, 0] - t[:, 1])
    radius = np.hypot(half_diff, t[:, 2])
    norm = np.sqrt(t[:, 0] ** 2 + t[:, 1] ** 2 + 2.0 * t[:, 2] ** 2)
    umbilic = radius <= _UMBILIC_TOLERANCE * norm
    safe = np.where(umbilic, 1.0, radius)
    cos2 = np.where(umbilic, 1.0, half_diff / safe)
    sin2 = np.where(umbilic, 0.0, t[:, 2] / safe)
    projector = np.column_stack([0.5 * (1.0 + cos2), 0.5 * (1.0 - cos2), 0.5 * sin2])
    return mean + radius, mean - radius, projector


def _positive_strain(eps):
    """
    :return:
        A 4-element tuple of (e1, e2, P1 components, eps+ components)
    """

    e1, e2, p1 = principal_values(eps)
    p2 = np.column_stack([1.0 - p1[:, 0], 1.0 - p1[:, 1], -p1[:, 2]])
    eps_plus = _macaulay(e1)[:, None] * p1 + _macaulay(e2)[:, None] * p2
    return e1, e2, p1, eps_plus


def split_energy(split, strain, lam, mu):
    """
    Tensile and compressive parts of the plane-stress elastic energy density

    :param split:
        A Split member

    :param strain:
        A StrainState2D, or numpy array of shape (n, 3) of tensor components

    :param lam:
        The plane-stress Lamé parameter lambda* in Pa

    :param mu:
        The shear modulus in Pa

    :return:
        A 2-element tuple of (psi_plus, psi_minus) in Pa, floats for a single
        state or numpy arrays of shape (n,)
    """

    _check_split(split)
    eps, single = _strain_array(strain)
    trace = eps[:, 0] + eps[:, 1]

    if split is Split.VOLUMETRIC_DEVIATORIC:
        bulk = lam + mu
        dev_sq = 0.5 * (eps[:, 0] - eps[:, 1]) ** 2 + 2.0 * eps[:, 2] ** 2
        psi_plus = 0.5 * bulk * _macaulay(trace) ** 2 + mu * dev_sq
        psi_minus = 0.5 * bulk * _macaulay(-trace) ** 2
    else:
        e1, e2, _ = principal_values(eps)
        psi_plus = 0.5 * lam * _macaulay(trace) ** 2 + mu * (_macaulay(e1) ** 2 + _macaulay(e2) ** 2)
        psi_minus = 0.5 * lam * _macaulay(-trace) ** 2 + mu * (_macaulay(-e1) ** 2 + _macaulay(-e2) ** 2)

    if single:
        return float(psi_plus[0]), float(psi_minus[0])
    return psi_plus, psi_minus


def split_stress(split, strain, lam, mu):
    """
    Stresses conjugate to the split energies, sigma+- = d psi+- / d eps

    :return:
        A 2-element tuple of (sigma_plus, sigma_minus), each a numpy array of
        (xx, yy, xy) tensor components with shape (3,) for a single state or
        (n, 3)
    """

    _check_split(split)
    eps, single = _strain_array(strain)
    trace = eps[:, 0] + eps[:, 1]
    ones = np.array([1.0, 1.0, 0.0])

    if split is Split.VOLUMETRIC_DEVIATORIC:
        bulk = lam + mu
        dev = np.column_stack([
            0.5 * (eps[:, 0] - eps[:, 1]),
            -0.5 * (eps[:, 0] - eps[:, 1]),
            eps[:, 2],
        ])
        sigma_plus = bulk * _macaulay(trace)[:, None] * ones + 2.0 * mu * dev
        sigma_minus = -bulk * _macaulay(-trace)[:, None] * ones
    else:
        _, _, _, eps_plus = _positive_strain(eps)
        eps_minus = eps - eps_plus
        sigma_plus = lam * _macaulay(trace)[:, None] * ones + 2.0 * mu * eps_plus
        sigma_minus = -lam * _macaulay(-trace)[:, None] * ones + 2.0 * mu * eps_minus

    if single:
        return sigma_plus[0], sigma_minus[0]
    return sigma_plus, sigma_minus


# Engineering-strain basis increments as 2x2 tensors
_VOIGT_BASIS = np.array([
    [[1.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 1.0]],
    [[0.0, 0.5], [0.5, 0.0]],
])


def _as_matrices(components):
    out = np.empty((components.shape[0], 2, 2))
    out[:, 0, 0] = components[:, 0]
    out[:, 1, 1] = components[:, 1]
    out[:, 0, 1] = components[:, 2]
    out[:, 1, 0] = components[:, 2]
    return out


def split_tangent(split, strain, lam, mu):
    """
    Consistent tangents of the split stresses with respect to the
    engineering strain vector (eps_xx, eps_yy, gamma_xy)

    :param strain:
        A numpy array of shape (n, 3) of tensor components

    :return:
        A 2-element tuple of (D_plus, D_minus), numpy arrays of shape
        (n, 3, 3) mapping engineering strain to (xx, yy, xy) stress
    """

    _check_split(split)
    eps, _ = _strain_array(strain)
    n = eps.shape[0]
    trace = eps[:, 0] + eps[:, 1]
    mm = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    linear = np.array([
        [lam + 2.0 * mu, lam, 0.0],
        [lam, lam + 2.0 * mu, 0.0],
        [0.0, 0.0, mu],
    ])

    if split is Split.VOLUMETRIC_DEVIATORIC:
        bulk = lam + mu
        deviatoric = mu * np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        d_plus = bulk * _heaviside(trace)[:, None, None] * mm + deviatoric
    else:
        e1, e2, p1c = principal_values(eps)
        p1 = _as_matrices(p1c)
        p2 = np.eye(2)[None, :, :] - p1
        h1 = _heaviside(e1)
        h2 = _heaviside(e2)
        gap = e1 - e2
        distinct = gap > _UMBILIC_TOLERANCE * np.maximum(np.abs(e1), np.abs(e2))
        safe_gap = np.where(distinct, gap, 1.0)
        coupling = np.where(distinct, (_macaulay(e1) - _macaulay(e2)) / safe_gap, h1)

        # d eps+ = sum_i H(e_i) P_i (P_i : d eps) + q (P1 d eps P2 + P2 d eps P1)
        proj1 = np.einsum('nij,kij->nk', p1, _VOIGT_BASIS)
        proj2 = np.einsum('nij,kij->nk', p2, _VOIGT_BASIS)
        cross = (
            np.einsum('nij,kjl,nlm->nkim', p1, _VOIGT_BASIS, p2)
            + np.einsum('nij,kjl,nlm->nkim', p2, _VOIGT_BASIS, p1)
        )
        d_eps = (
            (h1[:, None] * proj1)[:, :, None, None] * p1[:, None, :, :]
            + (h2[:, None] * proj2)[:, :, None, None] * p2[:, None, :, :]
            + coupling[:, None, None, None] * cross
        )
        d_plus = np.empty((n, 3, 3))
        d_plus[:, 0, :] = d_eps[:, :, 0, 0]
        d_plus[:, 1, :] = d_eps[:, :, 1, 1]
        d_plus[:, 2, :] = d_eps[:, :, 0, 1]
        d_plus *= 2.0 * mu
        d_plus += lam * _heaviside(trace)[:, None, None] * mm

    d_minus = linear[None, :, :] - d_plus
    return d_plus, d_minus


def driving_force(kind, psi_plus, effective_principal_stresses, material, strength=None):
    """
    Normalised crack driving force F~

    :param kind:
        A Kind member

    :param psi_plus:
        A float or numpy array of tensile energy densities in Pa

    :param effective_principal_stresses:
        A numpy array of shape (n, k) of undegraded principal stresses, only
        used by PF_M (may be None otherwise)

    :param material:
        A MaterialGlass object providing G_f, l_c and the tensile strength

    :param strength:
        None, or a float/array overriding the tensile strength pointwise for
        PF_M, or the fracture energy scaling for PF_B/PF_P, see below

    :return:
        A float or numpy array, always >= 0
    """

    _check_kind(kind)
    if kind is Kind.PF_M:
        sig = np.atleast_2d(np.asarray(effective_principal_stresses, dtype=np.float64))
        sigma_c = material.tensile_strength if strength is None else np.asarray(strength)
        value = _macaulay(np.sum(_macaulay(sig) ** 2, axis=1) / sigma_c ** 2 - 1.0)
        if np.ndim(effective_principal_stresses) == 1:
            return float(value[0])
        return value

    gf = material.fracture_energy
    if strength is not None:
        # G_f scales with the square of the local strength at fixed l_c
        gf = gf * (np.asarray(strength) / material.tensile_strength) ** 2
    value = 2.0 * np.maximum(psi_plus, 0.0) * material.length_scale / gf
    if np.ndim(value) == 0:
        return float(value)
    return value


def calibrate(kind, reduction, known, value, material):
    """
    Completes the (l_c, G_f) pair so the homogeneous 1D response peaks at the
    material tensile strength

    :param kind:
        A Kind member

    :param reduction:
        A Reduction member, BEAM multiplies the length scale by 6

    :param known:
        A Known member naming which quantity value is

    :param value:
        The known l_c in m or G_f in J/m^2

    :param material:
        A MaterialGlass providing E and f_t

    :return:
        A CalibrationResult object
    """

    _check_kind(kind)
    if not isinstance(reduction, Reduction):
        raise TypeError(unwrap(
            '''
            reduction must be a member of glassfrac.phasefield.Reduction, not %s
            ''',
            type_name(reduction)
        ))
    if not isinstance(known, Known):
        raise TypeError(unwrap(
            '''
            known must be a member of glassfrac.phasefield.Known, not %s
            ''',
            type_name(known)
        ))
    value = check_real('value', value, 0.0, inclusive=(False, True))

    factor = _CALIBRATION_FACTOR[kind]
    if reduction is Reduction.BEAM:
        factor *= _BEAM_FACTOR
    ratio = factor * material.young_modulus / material.tensile_strength ** 2

    if known is Known.LC:
        result = CalibrationResult(value, value / ratio, kind is Kind.PF_M)
    else:
        result = CalibrationResult(ratio * value, value, kind is Kind.PF_M)
    if result.heuristic:
        logger.warning('PF-M calibration reuses the PF-B energetic relation')
    return result


def homogeneous_peak_stress(kind, material):
    """
    Peak stress of the homogeneous 1D tension response

    :param kind:
        A Kind member

    :param material:
        A MaterialGlass object

    :return:
        The peak stress in Pa
    """

    _check_kind(kind)
    if kind is Kind.PF_M:
        return material.tensile_strength
    factor = _CALIBRATION_FACTOR[kind]
    return math.sqrt(factor * material.young_modulus * material.fracture_energy / material.length_scale)


def damage_operator(kind, length_scale, n_nodes, connectivity, weights, laplacians, scales, forces):
    """
    Assembles the damage system A d = b of the evolution equation
    (1/c_a)(alpha'(d) - 2 l_c^2 lap d) = -(1/2) g'(d) F~, multiplied by a
    per-element energy scale. The crack-function reaction uses nodal (lumped)
    quadrature. The degradation coupling is taken at the element mean damage,
    the point the displacement assembly evaluates g at, so it contributes a
    full rank-one block per element.

    :param kind:
        A Kind member

    :param length_scale:
        l_c in m

    :param n_nodes:
        The number of damage nodes

    :param connectivity:
        An int numpy array of shape (m, k) of element node indices

    :param weights:
        A numpy array of shape (m,) of the lumped weight per element node
        (measure / k)

    :param laplacians:
        A numpy array of shape (m, k, k) of element gradient matrices
        int grad N_i . grad N_j

    :param scales:
        A numpy array of shape (m,) of element energy scales G_f/l_c (times
        the cross-section area for beams)

    :param forces:
        A numpy array of shape (m,) of element driving forces F~

    :return:
        A 2-element tuple of (scipy.sparse.csr_matrix, numpy array)
    """

    _check_kind(kind)
    m, k = connectivity.shape
    lc2 = length_scale * length_scale
    if kind is Kind.PF_P:
        gradient = 2.0 * lc2 / scaling_constant(kind)
        reaction = np.zeros(m)
        source = scales * weights * (forces - 1.0 / scaling_constant(kind))
    else:
        gradient = lc2
        reaction = scales * weights
        source = scales * weights * forces

    local = (gradient * scales)[:, None, None] * laplacians
    local += (scales * weights * forces / k)[:, None, None]
    local[:, np.arange(k), np.arange(k)] += reaction[:, None]

    rows = np.repeat(connectivity, k, axis=1).ravel()
    cols = np.tile(connectivity, (1, k)).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    rhs = np.bincount(connectivity.ravel(), weights=np.repeat(source, k), minlength=n_nodes)
    return matrix, rhs
