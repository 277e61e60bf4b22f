# coding: utf-8

"""
Layered Timoshenko beam reduction of the four-point bending test: one
(u, phi) pair per glass layer, a shared deflection w, an interlayer shear
coupling and one damage field per glass layer. Exports the following items:

 - DrivingForceMode
 - BeamLayer()
 - LayeredBeamSection()
 - BeamProblem()
 - BarProblem()
 - cross_section_energy()
 - beam_driving_force()
 - assemble_beam_displacement()
 - solve_beam_phasefield()
 - beam_rows()
 - BEAM_COLUMNS
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import enum
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ._errors import unwrap, ConfigurationError
from ._problem import Constraints, PhaseFieldProblem
from ._sparse import active_set, assemble_matrix, assemble_vector
from ._types import type_name, check_unit_interval
from .materials import MaterialGlass
from .mesh import Mesh1D
from .phasefield import Kind, PhaseFieldFormulation, Scheme, degradation, driving_force


__all__ = [
    'assemble_beam_displacement',
    'BarProblem',
    'BEAM_COLUMNS',
    'beam_driving_force',
    'beam_rows',
    'BeamLayer',
    'BeamProblem',
    'cross_section_energy',
    'DrivingForceMode',
    'LayeredBeamSection',
    'solve_beam_phasefield',
]


logger = logging.getLogger(__name__)

SHEAR_CORRECTION = 5.0 / 6.0

BEAM_COLUMNS = (
    'x', 'w', 'u_bot', 'phi_bot', 'u_top', 'phi_top', 'd_bot', 'd_top',
    'sigma_bot_surface', 'sigma_top_surface',
)


class DrivingForceMode(enum.Enum):
    INTEGRATED = 'integrated'
    SURFACE = 'surface'


@dataclass(frozen=True)
class BeamLayer(object):
    """
    One glass layer. offset is the height of the layer centroid above the
    bottom face of the section.
    """

    thickness: float
    offset: float
    width: float
    young_modulus: float
    shear_modulus: float

    @property
    def area(self):
        return self.width * self.thickness

    @property
    def inertia(self):
        return self.width * self.thickness ** 3 / 12.0

    @property
    def bottom(self):
        return self.offset - self.thickness / 2.0


@dataclass(frozen=True)
class LayeredBeamSection(object):
    """
    A monolith (one glass thickness) or a laminate (two glass thicknesses
    bonded by an interlayer of the given thickness and shear modulus)
    """

    width: float
    glass_thicknesses: tuple
    young_modulus: float
    poisson_ratio: float
    interlayer_thickness: float = 0.0
    interlayer_shear_modulus: float = 0.0
    shear_correction: float = SHEAR_CORRECTION
    layers: tuple = field(init=False, repr=False)

    def __post_init__(self):
        problems = []
        thicknesses = tuple(float(h) for h in self.glass_thicknesses)
        if len(thicknesses) not in (1, 2):
            problems.append('a beam section has one or two glass layers, got %d' % len(thicknesses))
        problems.extend(
            'glass layer %d thickness must be positive, got %r' % (i, h)
            for i, h in enumerate(thicknesses) if not h > 0.0
        )
        if not self.width > 0.0:
            problems.append('section width must be positive, got %r' % (self.width,))
        if len(thicknesses) == 2:
            if not self.interlayer_thickness > 0.0:
                problems.append('a laminate needs a positive interlayer thickness')
            if self.interlayer_shear_modulus < 0.0:
                problems.append('the interlayer shear modulus must not be negative')
        if problems:
            raise ConfigurationError(problems)

        shear = self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))
        layers = [BeamLayer(thicknesses[0], thicknesses[0] / 2.0, self.width, self.young_modulus, shear)]
        if len(thicknesses) == 2:
            base = thicknesses[0] + self.interlayer_thickness
            layers.append(BeamLayer(thicknesses[1], base + thicknesses[1] / 2.0, self.width, self.young_modulus, shear))
        object.__setattr__(self, 'glass_thicknesses', thicknesses)
        object.__setattr__(self, 'layers', tuple(layers))

    @property
    def n_layers(self):
        return len(self.layers)

    @property
    def is_laminate(self):
        return len(self.layers) == 2

    @property
    def total_thickness(self):
        return sum(self.glass_thicknesses) + (self.interlayer_thickness if self.is_laminate else 0.0)

    @property
    def coupling_stiffness(self):
        """
        Interlayer shear stiffness per unit length and unit slip, G b / h_int
        """

        if not self.is_laminate:
            return 0.0
        return self.interlayer_shear_modulus * self.width / self.interlayer_thickness

    def with_interlayer(self, shear_modulus):
        return replace(self, interlayer_shear_modulus=shear_modulus)

    def layered_stiffness(self):
        """
        :return:
            The bending stiffness of independent layers, sum of E I_i
        """

        return sum(layer.young_modulus * layer.inertia for layer in self.layers)

    def monolithic_stiffness(self):
        """
        :return:
            The bending stiffness of the rigidly bonded glass layers about
            their common neutral axis
        """

        area = sum(layer.area for layer in self.layers)
        neutral = sum(layer.area * layer.offset for layer in self.layers) / area
        return sum(
            layer.young_modulus * (layer.inertia + layer.area * (layer.offset - neutral) ** 2)
            for layer in self.layers
        )


def _positive_part(a, kappa, h):
    """
    Limits of the tensile part of the linear profile a + kappa z on
    [-h/2, h/2] and the thickness moments over it

    :return:
        A 5-element tuple of (m0, m1, m2, f_lo, f_hi)
    """

    a = np.asarray(a, dtype=np.float64)
    kappa = np.asarray(kappa, dtype=np.float64)
    half = 0.5 * h
    flat = kappa == 0.0
    safe = np.where(flat, 1.0, kappa)
    crossing = np.clip(-a / safe, -half, half)
    lo = np.where(flat, np.where(a > 0.0, -half, half), np.where(kappa > 0.0, crossing, -half))
    hi = np.where(flat, half, np.where(kappa > 0.0, half, crossing))
    m0 = hi - lo
    m1 = 0.5 * (hi * hi - lo * lo)
    m2 = (hi ** 3 - lo ** 3) / 3.0
    return m0, m1, m2, a + kappa * lo, a + kappa * hi


def cross_section_energy(layer, a, kappa):
    """
    Tensile and compressive parts of the axial-bending energy per unit length,
    integrated exactly over the thickness of a layer

    :param layer:
        A BeamLayer object

    :param a:
        A float or numpy array of centreline axial strains

    :param kappa:
        A float or numpy array of curvatures dphi/dx

    :return:
        A dict with numpy arrays: psi_plus, psi_minus (J/m), resultants
        n_plus, m_plus, n_minus, m_minus and the 2x2 tangents
        tangent_plus, tangent_minus of shape (m, 2, 2)
    """

    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    kappa = np.atleast_1d(np.asarray(kappa, dtype=np.float64))
    E, b, h = layer.young_modulus, layer.width, layer.thickness
    m0, m1, m2, f_lo, f_hi = _positive_part(a, kappa, h)

    psi_plus = 0.5 * E * b * m0 * (f_lo * f_lo + f_lo * f_hi + f_hi * f_hi) / 3.0
    psi = 0.5 * E * layer.area * a * a + 0.5 * E * layer.inertia * kappa * kappa
    n_plus = E * b * m0 * 0.5 * (f_lo + f_hi)
    m_plus = E * b * (a * m1 + kappa * m2)

    tangent_plus = np.empty(a.shape + (2, 2))
    tangent_plus[:, 0, 0] = E * b * m0
    tangent_plus[:, 0, 1] = tangent_plus[:, 1, 0] = E * b * m1
    tangent_plus[:, 1, 1] = E * b * m2
    full = np.zeros((2, 2))
    full[0, 0] = E * layer.area
    full[1, 1] = E * layer.inertia

    return {
        'psi_plus': psi_plus,
        'psi_minus': np.maximum(psi - psi_plus, 0.0),
        'n_plus': n_plus,
        'm_plus': m_plus,
        'n_minus': E * layer.area * a - n_plus,
        'm_minus': E * layer.inertia * kappa - m_plus,
        'tangent_plus': tangent_plus,
        'tangent_minus': full[None, :, :] - tangent_plus,
    }


def _surface_strains(layer, a, kappa):
    half = 0.5 * layer.thickness
    return a - kappa * half, a + kappa * half


def beam_driving_force(layer, a, kappa, mode, material, kind, strength=None):
    """
    Normalised driving force of one glass layer per element

    :param layer:
        A BeamLayer object

    :param a:
        A numpy array of centreline axial strains per element

    :param kappa:
        A numpy array of curvatures per element

    :param mode:
        A DrivingForceMode member. INTEGRATED uses the tensile energy of the
        axial strain profile integrated over the thickness, SURFACE the larger of the two surface
        energies (E A / 2) <eps_s>^2.

    :param material:
        A MaterialGlass object carrying (l_c, G_f)

    :param kind:
        A Kind member

    :param strength:
        None or a numpy array of local tensile strengths

    :return:
        A numpy array of F~ values
    """

    if not isinstance(mode, DrivingForceMode):
        raise TypeError(unwrap(
            '''
            mode must be a member of glassfrac.beam1d.DrivingForceMode, not %s
            ''',
            type_name(mode)
        ))
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    kappa = np.atleast_1d(np.asarray(kappa, dtype=np.float64))
    bottom, top = _surface_strains(layer, a, kappa)

    if kind is Kind.PF_M:
        fibre = layer.young_modulus * np.maximum(np.maximum(bottom, top), 0.0)
        return np.atleast_1d(driving_force(kind, None, fibre[:, None], material, strength))

    if mode is DrivingForceMode.INTEGRATED:
        line = cross_section_energy(layer, a, kappa)['psi_plus']
    else:
        surface = np.maximum(np.maximum(bottom, 0.0) ** 2, np.maximum(top, 0.0) ** 2)
        line = 0.5 * layer.young_modulus * layer.area * surface
    return np.atleast_1d(driving_force(kind, line / layer.area, None, material, strength))


class _BeamKernel(object):
    """
    Element loops of the layered beam with one-point integration of every
    term
    """

    def __init__(self, mesh, section, formulation):
        self.mesh = mesh
        self.section = section
        self.formulation = formulation
        self.per_node = 2 * section.n_layers + 1
        m = mesh.n_elements
        k = 2 * self.per_node
        self.lengths = mesh.sizes
        nodes = mesh.elements
        self.dofs = np.empty((m, k), dtype=np.int64)
        for j in range(self.per_node):
            self.dofs[:, j] = self.per_node * nodes[:, 0] + j
            self.dofs[:, self.per_node + j] = self.per_node * nodes[:, 1] + j

        inv = 1.0 / self.lengths
        w = 2 * section.n_layers
        self.B_w = np.zeros((m, k))
        self.B_w[:, w] = -inv
        self.B_w[:, self.per_node + w] = inv
        self.B_a = []
        self.B_k = []
        self.B_g = []
        for i in range(section.n_layers):
            u, phi = 2 * i, 2 * i + 1
            B_a = np.zeros((m, k))
            B_a[:, u] = -inv
            B_a[:, self.per_node + u] = inv
            B_k = np.zeros((m, k))
            B_k[:, phi] = -inv
            B_k[:, self.per_node + phi] = inv
            B_g = self.B_w.copy()
            B_g[:, phi] += 0.5
            B_g[:, self.per_node + phi] += 0.5
            self.B_a.append(B_a)
            self.B_k.append(B_k)
            self.B_g.append(B_g)

    def coupling_operator(self):
        section = self.section
        B_s = section.interlayer_thickness * self.B_w
        h_bot, h_top = section.glass_thicknesses
        for node in (0, self.per_node):
            B_s[:, node + 0] += -0.5
            B_s[:, node + 1] += -0.5 * 0.5 * h_bot
            B_s[:, node + 2] += 0.5
            B_s[:, node + 3] += -0.5 * 0.5 * h_top
        return B_s

    def generalized_strains(self, u, layer):
        ue = u[self.dofs]
        return (
            np.einsum('mk,mk->m', self.B_a[layer], ue),
            np.einsum('mk,mk->m', self.B_k[layer], ue),
            np.einsum('mk,mk->m', self.B_g[layer], ue),
        )

    def slip(self, u):
        if not self.section.is_laminate:
            return np.zeros(self.mesh.n_elements)
        return np.einsum('mk,mk->m', self.coupling_operator(), u[self.dofs])

    def assemble(self, u, g_hat, scheme, tangent=True):
        """
        :param g_hat:
            A numpy array of shape (n_layers, m) of element degradation

        :return:
            A 3-element tuple of (energy, internal force, csr matrix or None)
        """

        section = self.section
        m, k = self.B_w.shape
        L = self.lengths
        forces = np.zeros((m, k))
        local = np.zeros((m, k, k)) if tangent else None
        energy = 0.0

        for i, layer in enumerate(section.layers):
            a, kappa, gamma = self.generalized_strains(u, i)
            g = g_hat[i]
            shear = section.shear_correction * layer.shear_modulus * layer.area
            if scheme is Scheme.HYBRID:
                ea = layer.young_modulus * layer.area
                ei = layer.young_modulus * layer.inertia
                density = g * (0.5 * ea * a * a + 0.5 * ei * kappa * kappa)
                n_force = g * ea * a
                moment = g * ei * kappa
                stiff = np.zeros((m, 2, 2))
                stiff[:, 0, 0] = g * ea
                stiff[:, 1, 1] = g * ei
            else:
                parts = cross_section_energy(layer, a, kappa)
                density = g * parts['psi_plus'] + parts['psi_minus']
                n_force = g * parts['n_plus'] + parts['n_minus']
                moment = g * parts['m_plus'] + parts['m_minus']
                stiff = g[:, None, None] * parts['tangent_plus'] + parts['tangent_minus']
            density = density + 0.5 * g * shear * gamma * gamma
            energy += float(np.sum(L * density))

            forces += L[:, None] * (
                n_force[:, None] * self.B_a[i]
                + moment[:, None] * self.B_k[i]
                + (g * shear * gamma)[:, None] * self.B_g[i]
            )
            if tangent:
                stacked = np.stack([self.B_a[i], self.B_k[i]], axis=1)
                local += L[:, None, None] * np.einsum('mpi,mpq,mqj->mij', stacked, stiff, stacked)
                local += (L * g * shear)[:, None, None] * np.einsum('mi,mj->mij', self.B_g[i], self.B_g[i])

        if section.is_laminate:
            B_s = self.coupling_operator()
            s = np.einsum('mk,mk->m', B_s, u[self.dofs])
            stiffness = section.coupling_stiffness
            energy += float(np.sum(L * 0.5 * stiffness * s * s))
            forces += (L * stiffness * s)[:, None] * B_s
            if tangent:
                local += (L * stiffness)[:, None, None] * np.einsum('mi,mj->mij', B_s, B_s)

        size = self.per_node * self.mesh.n_nodes
        force = assemble_vector(size, self.dofs, forces)
        matrix = assemble_matrix(size, self.dofs, local) if tangent else None
        return energy, force, matrix

    def surface_stresses(self, u, g_hat, scheme):
        """
        :return:
            A 2-element tuple of numpy arrays of shape (m,): the degraded axial
            stress on the bottom face of the bottom layer and on the top face
            of the top layer
        """

        out = []
        for i, side in ((0, 0), (self.section.n_layers - 1, 1)):
            layer = self.section.layers[i]
            a, kappa, _ = self.generalized_strains(u, i)
            eps = _surface_strains(layer, a, kappa)[side]
            g = g_hat[i]
            E = layer.young_modulus
            if scheme is Scheme.HYBRID:
                out.append(g * E * eps)
            else:
                out.append(g * E * np.maximum(eps, 0.0) + E * np.minimum(eps, 0.0))
        return out[0], out[1]


def _check_beam_inputs(mesh, section, formulation):
    if not isinstance(mesh, Mesh1D):
        raise TypeError(unwrap(
            '''
            mesh must be an instance of glassfrac.mesh.Mesh1D, not %s
            ''',
            type_name(mesh)
        ))
    if not isinstance(section, LayeredBeamSection):
        raise TypeError(unwrap(
            '''
            section must be an instance of LayeredBeamSection, not %s
            ''',
            type_name(section)
        ))
    if not isinstance(formulation, PhaseFieldFormulation):
        raise TypeError(unwrap(
            '''
            formulation must be an instance of PhaseFieldFormulation, not %s
            ''',
            type_name(formulation)
        ))


def assemble_beam_displacement(mesh, section, formulation, d, u):
    """
    Assembles the layered beam at the current state

    :param mesh:
        A Mesh1D object

    :param section:
        A LayeredBeamSection object

    :param formulation:
        A PhaseFieldFormulation object selecting the scheme

    :param d:
        None, or a numpy array of nodal damage stacked per layer (layer-major)

    :param u:
        A numpy array of nodal degrees of freedom

    :return:
        A 3-element tuple of (energy, internal force, csr matrix)
    """

    _check_beam_inputs(mesh, section, formulation)
    kernel = _BeamKernel(mesh, section, formulation)
    n = mesh.n_nodes
    if d is None:
        d = np.zeros(section.n_layers * n)
    d = check_unit_interval('d', d)
    d = d.reshape(section.n_layers, n)
    g_hat, _ = degradation(0.5 * (d[:, :-1] + d[:, 1:]), formulation.residual_stiffness)
    return kernel.assemble(np.asarray(u, dtype=np.float64), g_hat, formulation.scheme)


class BeamProblem(PhaseFieldProblem):
    """
    Half (or full) four-point bending beam. Degrees of freedom per node are
    [u, phi, w] for a monolith and [u_bot, phi_bot, u_top, phi_top, w] for a
    laminate; damage is stacked layer by layer.
    """

    def __init__(self, mesh, section, material, formulation, plan, mode=DrivingForceMode.INTEGRATED,
                 strength_field=None):
        """
        :param mesh:
            A Mesh1D object

        :param section:
            A LayeredBeamSection object

        :param material:
            A MaterialGlass object carrying the calibrated (l_c, G_f)

        :param formulation:
            A PhaseFieldFormulation object

        :param plan:
            A BoundaryPlan object, or None for subclasses with their own
            constraints

        :param mode:
            A DrivingForceMode member

        :param strength_field:
            None or a StrengthField object
        """

        _check_beam_inputs(mesh, section, formulation)
        if not isinstance(material, MaterialGlass):
            raise TypeError(unwrap(
                '''
                material must be an instance of MaterialGlass, not %s
                ''',
                type_name(material)
            ))
        self.mesh = mesh
        self.section = section
        self.material = material
        self.formulation = formulation
        self.plan = plan
        self.mode = mode
        self.kernel = _BeamKernel(mesh, section, formulation)
        self.n_dofs = self.kernel.per_node * mesh.n_nodes
        self.energy_scale = plan.symmetry_factor if plan is not None else 1.0

        n, m = mesh.n_nodes, mesh.n_elements
        lengths = mesh.sizes
        base = np.array([[1.0, -1.0], [-1.0, 1.0]])[None, :, :]
        connectivity = []
        scales = []
        strengths = []
        for i, layer in enumerate(section.layers):
            connectivity.append(mesh.elements + i * n)
            gf = np.full(m, material.fracture_energy)
            local = None
            if strength_field is not None:
                points = np.column_stack([mesh.centroids, np.full(m, layer.bottom)])
                local = strength_field.strengths(points)
                if formulation.kind is not Kind.PF_M:
                    gf = gf * (local / material.tensile_strength) ** 2
            strengths.append(local)
            scales.append(gf * layer.area / material.length_scale)
        self.strengths = strengths
        self._set_damage_elements(
            section.n_layers * n,
            np.concatenate(connectivity),
            np.tile(lengths, section.n_layers),
            np.tile(base / lengths[:, None, None], (section.n_layers, 1, 1)),
            np.concatenate(scales)
        )
        self._constraints = self._build_constraints()
        logger.debug(
            'Beam problem: %d layers, %d elements, %d dofs',
            section.n_layers,
            m,
            self.n_dofs
        )

    def _node_at(self, x, what):
        node = self.mesh.nearest_node(x)
        if abs(self.mesh.nodes[node] - x) > 1e-9 * max(1.0, abs(x)):
            raise ConfigurationError('%s position %r is not a mesh node' % (what, x))
        return node

    def _build_constraints(self):
        plan = self.plan
        per = self.kernel.per_node
        w = per - 1
        problems = []
        supports = []
        loads = []
        for x in plan.supports():
            try:
                supports.append(self._node_at(x, 'support'))
            except ConfigurationError as e:
                problems.extend(e.violations)
        for x in plan.loads():
            try:
                loads.append(self._node_at(x, 'load'))
            except ConfigurationError as e:
                problems.extend(e.violations)
        if problems:
            raise ConfigurationError(problems)

        support_dofs = [per * n + w for n in supports]
        load_dofs = [per * n + w for n in loads]
        if plan.symmetry == 'half':
            mid = self._node_at(plan.midspan, 'midspan')
            anchor = [per * mid + j for j in range(w)]
        else:
            anchor = [per * supports[0] + 2 * i for i in range(self.section.n_layers)]
        dofs = support_dofs + load_dofs + anchor
        values = [0.0] * len(support_dofs) + [-1.0] * len(load_dofs) + [0.0] * len(anchor)
        return Constraints(dofs, values, load_dofs, support_dofs)

    def set_interlayer(self, young_modulus, poisson_ratio):
        self.section = self.section.with_interlayer(young_modulus / (2.0 * (1.0 + poisson_ratio)))
        self.kernel.section = self.section

    def constraints(self):
        return self._constraints

    def layer_degradation(self, d):
        return self.element_degradation(d).reshape(self.section.n_layers, self.mesh.n_elements)

    def internal(self, u, d):
        return self.kernel.assemble(u, self.layer_degradation(d), Scheme.ANISOTROPIC)

    def linear_stiffness(self, d):
        return self.kernel.assemble(np.zeros(self.n_dofs), self.layer_degradation(d), Scheme.HYBRID)[2]

    def driving_forces(self, u):
        out = []
        for i, layer in enumerate(self.section.layers):
            a, kappa, _ = self.kernel.generalized_strains(u, i)
            out.append(beam_driving_force(
                layer,
                a,
                kappa,
                self.mode,
                self.material,
                self.formulation.kind,
                strength=self.strengths[i]
            ))
        return np.concatenate(out)

    def regime(self, u, d):
        labels = []
        for i, layer in enumerate(self.section.layers):
            a, kappa, _ = self.kernel.generalized_strains(u, i)
            bottom, top = _surface_strains(layer, a, kappa)
            if np.any((bottom > 0.0) != (top > 0.0)):
                return None
            labels.append(bottom > 0.0)
        return np.concatenate(labels).astype(np.int8)

    def reaction(self, internal_force):
        return -float(np.sum(internal_force[self._constraints.load_dofs])) * self.plan.symmetry_factor

    def surface_stresses(self, u, d):
        return self.kernel.surface_stresses(u, self.layer_degradation(d), self.formulation.scheme)

    def probe(self, u, d, x, fiber, component='xx'):
        if component != 'xx':
            raise ValueError('beam probes only provide the axial stress "xx", not %r' % (component,))
        bottom, top = self.surface_stresses(u, d)
        element = self.mesh.element_at(x)
        return float((bottom if fiber == 'bottom' else top)[element])

    def midspan_deflection(self, u):
        node = self.mesh.nearest_node(self.plan.midspan)
        return -float(u[self.kernel.per_node * node + self.kernel.per_node - 1])

    def damage_nodes(self, layer, x_min, x_max):
        """
        :param layer:
            The glass layer index, 0 for the bottom layer

        :return:
            An int array of damage nodes of the layer with x in [x_min, x_max]
        """

        xs = self.mesh.nodes
        return np.nonzero((xs >= x_min) & (xs <= x_max))[0] + layer * self.mesh.n_nodes


class BarProblem(BeamProblem):
    """
    Uniaxial bar on [0, L] with u(0) = 0, u(L) = u_bar and the deflection held
    at both ends: the homogeneous tension test of a formulation
    """

    def __init__(self, mesh, section, material, formulation, mode=DrivingForceMode.INTEGRATED):
        if section.is_laminate:
            raise ConfigurationError('the bar problem takes a single glass layer')
        BeamProblem.__init__(self, mesh, section, material, formulation, None, mode)

    def _build_constraints(self):
        per = self.kernel.per_node
        last = self.mesh.n_nodes - 1
        dofs = [0, per - 1, per * last, per * last + per - 1]
        values = [0.0, 0.0, 1.0, 0.0]
        return Constraints(dofs, values, [per * last], [0])

    def reaction(self, internal_force):
        return float(np.sum(internal_force[self._constraints.load_dofs]))

    def probe(self, u, d, x, fiber, component='xx'):
        a, _, _ = self.kernel.generalized_strains(u, 0)
        g = self.layer_degradation(d)[0]
        E = self.section.layers[0].young_modulus
        return float((g * E * a)[self.mesh.element_at(x)])

    def midspan_deflection(self, u):
        return 0.0


def solve_beam_phasefield(problem, u, d_prev, max_iterations=100):
    """
    Bound-constrained damage update of every glass layer of a beam

    :param problem:
        A BeamProblem object

    :param u:
        A numpy array of nodal degrees of freedom

    :param d_prev:
        A numpy array of the previous damage, the irreversibility bound

    :return:
        A numpy array of the updated damage stacked per layer
    """

    if not isinstance(problem, BeamProblem):
        raise TypeError(unwrap(
            '''
            problem must be an instance of BeamProblem, not %s
            ''',
            type_name(problem)
        ))
    lower = check_unit_interval('d_prev', np.asarray(d_prev, dtype=np.float64))
    matrix, rhs = problem.damage_system(np.asarray(u, dtype=np.float64))
    d, _ = active_set(matrix, rhs, lower, np.ones_like(lower), max_iterations)
    return d


def beam_rows(problem, u, d):
    """
    Nodal result rows in the order of BEAM_COLUMNS. Monoliths repeat the
    single layer in the top columns; surface stresses are averaged from the
    adjacent elements.

    :return:
        A list of tuples of floats
    """

    mesh = problem.mesh
    per = problem.kernel.per_node
    n = mesh.n_nodes
    values = u.reshape(n, per)
    top = 2 if problem.section.is_laminate else 0
    damage = d.reshape(problem.section.n_layers, n)
    bottom_stress, top_stress = problem.surface_stresses(u, d)

    def nodal(element_values):
        out = np.empty(n)
        out[0] = element_values[0]
        out[-1] = element_values[-1]
        out[1:-1] = 0.5 * (element_values[:-1] + element_values[1:])
        return out

    sigma_bot = nodal(bottom_stress)
    sigma_top = nodal(top_stress)
    rows = []
    for j in range(n):
        rows.append((
            float(mesh.nodes[j]),
            float(values[j, per - 1]),
            float(values[j, 0]),
            float(values[j, 1]),
            float(values[j, top]),
            float(values[j, top + 1]),
            float(damage[0, j]),
            float(damage[-1, j]),
            float(sigma_bot[j]),
            float(sigma_top[j]),
        ))
    return rows
