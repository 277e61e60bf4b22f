# coding: utf-8

"""
Common pieces of the discrete phase-field problems: the four-point boundary
plan, constraint sets and the PhaseFieldProblem base class holding the damage
discretisation and energy bookkeeping
"""

from __future__ import unicode_literals, division, absolute_import, print_function

from dataclasses import dataclass

import numpy as np

from ._errors import unwrap, ConfigurationError
from .phasefield import Scheme, damage_operator, geometric_function, degradation


@dataclass(frozen=True)
class BoundaryPlan(object):
    """
    Four-point bending geometry in full-length coordinates. support_x and
    load_x are measured from the left end of the specimen.
    """

    length: float
    width: float
    support_x: float
    load_x: float
    symmetry: str = 'half'

    def __post_init__(self):
        problems = []
        if self.symmetry not in ('half', 'full'):
            problems.append('symmetry must be "half" or "full", not %r' % (self.symmetry,))
        if not 0.0 <= self.support_x < self.load_x < self.length / 2.0:
            problems.append(unwrap(
                '''
                positions must satisfy 0 <= support (%r) < load (%r) < midspan
                (%r)
                ''',
                self.support_x,
                self.load_x,
                self.length / 2.0
            ))
        if not self.width > 0.0:
            problems.append('width must be positive, got %r' % (self.width,))
        if problems:
            raise ConfigurationError(problems)

    @property
    def midspan(self):
        return self.length / 2.0

    @property
    def model_end(self):
        return self.midspan if self.symmetry == 'half' else self.length

    @property
    def span(self):
        return self.length - 2.0 * self.support_x

    @property
    def symmetry_factor(self):
        """
        Multiplier from the modelled part to the whole specimen
        """

        return 2.0 if self.symmetry == 'half' else 1.0

    def supports(self):
        if self.symmetry == 'half':
            return [self.support_x]
        return [self.support_x, self.length - self.support_x]

    def loads(self):
        if self.symmetry == 'half':
            return [self.load_x]
        return [self.load_x, self.length - self.load_x]

    def fixed_points(self):
        """
        :return:
            The x coordinates that must be mesh nodes
        """

        return self.supports() + self.loads() + [self.midspan]


class Constraints(object):
    """
    Dirichlet constraints proportional to the loading parameter: the
    prescribed values are unit_values * w_bar
    """

    def __init__(self, dofs, unit_values, load_dofs, support_dofs):
        order = np.argsort(dofs, kind='stable')
        self.dofs = np.asarray(dofs, dtype=np.int64)[order]
        self.unit_values = np.asarray(unit_values, dtype=np.float64)[order]
        if np.unique(self.dofs).shape[0] != self.dofs.shape[0]:
            raise ConfigurationError('a degree of freedom is constrained twice')
        self.load_dofs = np.asarray(load_dofs, dtype=np.int64)
        self.support_dofs = np.asarray(support_dofs, dtype=np.int64)

    def values(self, w_bar):
        return self.unit_values * w_bar


class PhaseFieldProblem(object):
    """
    Base class of the section and beam problems. Subclasses set up the
    damage discretisation with _set_damage_elements() and implement the
    displacement side:

     - internal(u, d) -> (elastic energy, internal force, tangent)
     - linear_stiffness(d) -> degraded linear stiffness (hybrid scheme)
     - driving_forces(u) -> F~ per damage element
     - constraints() -> Constraints
     - reaction(internal_force) -> N
     - probes(u, d) -> dict of probe values
     - regime(u, d) -> None or quadratic-piece labels
    """

    formulation = None
    material = None
    plan = None
    n_dofs = 0

    # Energies of the modelled part times this give whole-specimen joules
    energy_scale = 1.0

    def _set_damage_elements(self, n_damage, connectivity, measures, laplacians, scales):
        """
        :param n_damage:
            The number of damage nodes

        :param connectivity:
            An int numpy array of shape (m, k) of damage element nodes

        :param measures:
            A numpy array of shape (m,) of element areas (or lengths)

        :param laplacians:
            A numpy array of shape (m, k, k) of int grad N_i . grad N_j

        :param scales:
            A numpy array of shape (m,) of element energy scales
        """

        self.n_damage = int(n_damage)
        self.damage_connectivity = np.asarray(connectivity, dtype=np.int64)
        k = self.damage_connectivity.shape[1]
        self.damage_weights = np.asarray(measures, dtype=np.float64) / k
        self.damage_laplacians = np.asarray(laplacians, dtype=np.float64)
        self.damage_scales = np.asarray(scales, dtype=np.float64)

    def locate(self, error):
        return error

    def initial_damage(self):
        return np.zeros(self.n_damage)

    def element_degradation(self, d):
        """
        :return:
            The degradation g evaluated at the mean nodal damage of each damage
            element
        """

        d_bar = np.mean(d[self.damage_connectivity], axis=1)
        g, _ = degradation(d_bar, self.formulation.residual_stiffness)
        return g

    def damage_system(self, u):
        """
        :return:
            A 2-element tuple of (scipy.sparse.csr_matrix, rhs) for the damage
            given the displacement u
        """

        return damage_operator(
            self.formulation.kind,
            self.material.length_scale,
            self.n_damage,
            self.damage_connectivity,
            self.damage_weights,
            self.damage_laplacians,
            self.damage_scales,
            self.driving_forces(u)
        )

    def dissipated_energy(self, d):
        kind = self.formulation.kind
        alpha, _ = geometric_function(kind, d)
        local = alpha[self.damage_connectivity].sum(axis=1) * self.damage_weights
        de = d[self.damage_connectivity]
        gradient = np.einsum('mi,mij,mj->m', de, self.damage_laplacians, de)
        lc = self.material.length_scale
        return float(np.sum(self.damage_scales * (local + lc * lc * gradient)) / self.formulation.c_alpha)

    def elastic_energy(self, u, d):
        if self.formulation.scheme is Scheme.HYBRID:
            stiffness = self.linear_stiffness(d)
            return 0.5 * float(u.dot(stiffness.dot(u)))
        return self.internal(u, d)[0]

    def energy(self, u, d):
        """
        :return:
            The total discrete energy of the modelled part
        """

        return self.elastic_energy(u, d) + self.dissipated_energy(d)

    def energies(self, u, d):
        """
        :return:
            A dict of whole-specimen elastic, dissipated and total energies in J
        """

        elastic = self.elastic_energy(u, d) * self.energy_scale
        dissipated = self.dissipated_energy(d) * self.energy_scale
        return {'elastic': elastic, 'dissipated': dissipated, 'total': elastic + dissipated}

