# coding: utf-8

"""
Plane-stress constant-strain triangle assembly of the degraded elastic
problem and the phase-field system on the glass submesh. Exports the
following items:

 - DisplacementSystem()
 - DamageSystem()
 - SectionProblem()
 - assemble_displacement()
 - assemble_damage()
 - apply_fourpoint_bcs()
 - fourpoint_constraints()
 - reaction_force()
 - probe_stress()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging
from dataclasses import dataclass, replace

import numpy as np

from ._errors import unwrap, ConfigurationError, QueryError
from ._problem import Constraints, PhaseFieldProblem
from ._sparse import assemble_matrix, assemble_vector, chunked_map
from ._types import type_name, check_unit_interval
from .materials import MaterialGlass, plane_stress_lame
from .mesh import GLASS_TAGS, LayerTag, Mesh2D, glass_submesh
from .phasefield import (
    Kind,
    PhaseFieldFormulation,
    Scheme,
    Split,
    damage_operator,
    degradation,
    driving_force,
    principal_values,
    split_energy,
    split_stress,
    split_tangent,
)


__all__ = [
    'apply_fourpoint_bcs',
    'assemble_damage',
    'assemble_displacement',
    'DamageSystem',
    'DisplacementSystem',
    'fourpoint_constraints',
    'probe_stress',
    'reaction_force',
    'SectionProblem',
]


logger = logging.getLogger(__name__)

_COMPONENTS = {'xx': 0, 'yy': 1, 'xy': 2}


@dataclass(frozen=True)
class DisplacementSystem(object):
    """
    Tangent (or linear) stiffness with the internal force and energy at the
    state it was assembled at. fixed_dofs/fixed_values are empty until
    apply_fourpoint_bcs() is used.
    """

    matrix: object
    rhs: np.ndarray
    internal_force: np.ndarray
    energy: float
    fixed_dofs: np.ndarray = None
    fixed_values: np.ndarray = None

    @property
    def residual(self):
        return self.internal_force - self.rhs


@dataclass(frozen=True)
class DamageSystem(object):
    matrix: object
    rhs: np.ndarray
    lower: np.ndarray
    upper: float = 1.0


class _Kinematics(object):
    """
    Per-element CST data: areas, engineering strain-displacement matrices of
    shape (m, 3, 6) and the element degrees of freedom
    """

    def __init__(self, mesh):
        p = mesh.nodes[mesh.elements]
        x, y = p[:, :, 0], p[:, :, 1]
        self.areas = mesh.areas
        b = np.column_stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]])
        c = np.column_stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]])
        twice = 2.0 * self.areas[:, None]
        b = b / twice
        c = c / twice
        m = mesh.n_elements
        self.B = np.zeros((m, 3, 6))
        self.B[:, 0, 0::2] = b
        self.B[:, 1, 1::2] = c
        self.B[:, 2, 0::2] = c
        self.B[:, 2, 1::2] = b
        self.gradients = np.stack([b, c], axis=2)
        self.dofs = np.empty((m, 6), dtype=np.int64)
        self.dofs[:, 0::2] = 2 * mesh.elements
        self.dofs[:, 1::2] = 2 * mesh.elements + 1

    def strains(self, u, elements=slice(None)):
        """
        :return:
            A numpy array of shape (m, 3) of tensor strain components
        """

        eps = np.einsum('mij,mj->mi', self.B[elements], u[self.dofs[elements]])
        eps[:, 2] *= 0.5
        return eps

    def laplacians(self, elements):
        grad = self.gradients[elements]
        return self.areas[elements][:, None, None] * np.einsum('mik,mjk->mij', grad, grad)


def _linear_matrices(lam, mu):
    out = np.zeros((lam.shape[0], 3, 3))
    out[:, 0, 0] = out[:, 1, 1] = lam + 2.0 * mu
    out[:, 0, 1] = out[:, 1, 0] = lam
    out[:, 2, 2] = mu
    return out


def _voigt(tensor):
    out = tensor.copy()
    out[:, 2] *= 2.0
    return out


class _SectionKernel(object):
    """
    Element loops of the section: glass elements follow the formulation's
    split and scheme, interlayer elements stay linear and undegraded
    """

    def __init__(self, mesh, formulation, glass_constants, interlayer_constants):
        self.mesh = mesh
        self.formulation = formulation
        self.kin = _Kinematics(mesh)
        self.submesh = glass_submesh(mesh)
        self.glass = np.isin(mesh.layer_tags, [int(t) for t in GLASS_TAGS])
        self.glass_lame = plane_stress_lame(*glass_constants)
        self.lam = np.full(mesh.n_elements, self.glass_lame[0])
        self.mu = np.full(mesh.n_elements, self.glass_lame[1])
        interlayer = mesh.layer_tags == int(LayerTag.INTERLAYER)
        if np.any(interlayer):
            if interlayer_constants is None:
                raise ConfigurationError('the mesh has interlayer elements but no interlayer material was given')
            self.set_interlayer(*interlayer_constants)

    def set_interlayer(self, young_modulus, poisson_ratio):
        lam, mu = plane_stress_lame(young_modulus, poisson_ratio)
        interlayer = self.mesh.layer_tags == int(LayerTag.INTERLAYER)
        self.lam[interlayer] = lam
        self.mu[interlayer] = mu

    def parent_degradation(self, g_hat):
        out = np.ones(self.mesh.n_elements)
        out[self.submesh.element_map] = g_hat
        return out

    def _chunk(self, u, g_parent, scheme, tangent):
        lam_g, mu_g = self.glass_lame
        split = self.formulation.split

        def work(elements):
            eps = self.kin.strains(u, elements)
            eng = _voigt(eps)
            g = g_parent[elements]
            linear = _linear_matrices(self.lam[elements], self.mu[elements])
            stress = g[:, None] * np.einsum('mij,mj->mi', linear, eng)
            density = 0.5 * np.sum(stress * eng, axis=1)
            D = g[:, None, None] * linear if tangent else None

            if scheme is Scheme.ANISOTROPIC:
                glass = np.nonzero(self.glass[elements])[0]
                if glass.size:
                    e = eps[glass]
                    gg = g[glass]
                    psi_plus, psi_minus = split_energy(split, e, lam_g, mu_g)
                    s_plus, s_minus = split_stress(split, e, lam_g, mu_g)
                    density[glass] = gg * psi_plus + psi_minus
                    stress[glass] = gg[:, None] * s_plus + s_minus
                    if tangent:
                        d_plus, d_minus = split_tangent(split, e, lam_g, mu_g)
                        D[glass] = gg[:, None, None] * d_plus + d_minus

            areas = self.kin.areas[elements]
            B = self.kin.B[elements]
            energy = float(np.sum(areas * density))
            forces = areas[:, None] * np.einsum('mji,mj->mi', B, stress)
            local = None
            if tangent:
                local = areas[:, None, None] * np.einsum('mki,mkl,mlj->mij', B, D, B)
            return energy, forces, local

        return work

    def assemble(self, u, g_parent, scheme, tangent=True):
        """
        :return:
            A 3-element tuple of (energy, internal force, csr matrix or None)
        """

        parts = chunked_map(self._chunk(u, g_parent, scheme, tangent), self.mesh.n_elements)
        size = 2 * self.mesh.n_nodes
        energy = sum(p[0] for p in parts)
        forces = np.concatenate([p[1] for p in parts])
        force = assemble_vector(size, self.kin.dofs, forces)
        matrix = None
        if tangent:
            matrix = assemble_matrix(size, self.kin.dofs, np.concatenate([p[2] for p in parts]))
        return energy, force, matrix

    def glass_strains(self, u):
        return self.kin.strains(u, self.submesh.element_map)

    def stresses(self, u, g_parent, scheme):
        """
        :return:
            A numpy array of shape (m, 3) of degraded stress tensor components
        """

        eps = self.kin.strains(u)
        linear = _linear_matrices(self.lam, self.mu)
        stress = g_parent[:, None] * np.einsum('mij,mj->mi', linear, _voigt(eps))
        if scheme is Scheme.ANISOTROPIC:
            glass = np.nonzero(self.glass)[0]
            s_plus, s_minus = split_stress(self.formulation.split, eps[glass], *self.glass_lame)
            stress[glass] = g_parent[glass][:, None] * s_plus + s_minus
        return stress

    def owner_of(self, dof):
        node = dof // 2
        return int(np.nonzero(np.any(self.mesh.elements == node, axis=1))[0][0])


def _check_mesh(mesh):
    if not isinstance(mesh, Mesh2D):
        raise TypeError(unwrap(
            '''
            mesh must be an instance of glassfrac.mesh.Mesh2D, not %s
            ''',
            type_name(mesh)
        ))


def _check_formulation(formulation):
    if not isinstance(formulation, PhaseFieldFormulation):
        raise TypeError(unwrap(
            '''
            formulation must be an instance of PhaseFieldFormulation, not %s
            ''',
            type_name(formulation)
        ))


def _material_constants(materials):
    glass = None
    interlayer = None
    for tag, constants in materials.items():
        if LayerTag(tag) == LayerTag.INTERLAYER:
            interlayer = constants
        elif glass is None:
            glass = constants
        elif tuple(glass) != tuple(constants):
            raise ConfigurationError('all glass layers must share one material')
    if glass is None:
        raise ConfigurationError('no glass material given')
    return glass, interlayer


def _element_degradation(submesh, formulation, d):
    d_bar = np.mean(d[submesh.elements], axis=1)
    g, _ = degradation(d_bar, formulation.residual_stiffness)
    return g


def assemble_displacement(mesh, materials, formulation, d, u):
    """
    Assembles the displacement system at the current state

    :param mesh:
        A Mesh2D object

    :param materials:
        A dict of LayerTag -> (young_modulus, poisson_ratio)

    :param formulation:
        A PhaseFieldFormulation object

    :param d:
        A numpy array of nodal damage on the glass submesh, or None for zero

    :param u:
        A numpy array of nodal displacements (x, y interleaved)

    :return:
        A DisplacementSystem object; for the anisotropic scheme the matrix is
        the consistent tangent at u, for the hybrid scheme the linear
        degraded stiffness
    """

    _check_mesh(mesh)
    _check_formulation(formulation)
    kernel = _SectionKernel(mesh, formulation, *_material_constants(materials))
    if d is None:
        d = np.zeros(kernel.submesh.n_nodes)
    d = check_unit_interval('d', d)
    g_parent = kernel.parent_degradation(_element_degradation(kernel.submesh, formulation, d))
    energy, force, matrix = kernel.assemble(np.asarray(u, dtype=np.float64), g_parent, formulation.scheme)
    return DisplacementSystem(matrix, np.zeros_like(force), force, energy)


def _scales_and_strengths(submesh, material, formulation, strength_field):
    centroids = submesh.parent.centroids[submesh.element_map]
    strengths = None
    scales = np.full(submesh.n_elements, material.fracture_energy / material.length_scale)
    if strength_field is not None:
        strengths = strength_field.strengths(centroids)
        if formulation.kind is not Kind.PF_M:
            scales = scales * (strengths / material.tensile_strength) ** 2
    return scales, strengths


def _driving_forces(kernel, material, strengths, u):
    eps = kernel.glass_strains(u)
    lam, mu = kernel.glass_lame
    psi_plus, _ = split_energy(kernel.formulation.split, eps, lam, mu)
    principal = None
    if kernel.formulation.kind is Kind.PF_M:
        effective = eps.copy()
        effective[:, :2] = np.column_stack([
            (lam + 2.0 * mu) * eps[:, 0] + lam * eps[:, 1],
            lam * eps[:, 0] + (lam + 2.0 * mu) * eps[:, 1],
        ])
        effective[:, 2] = 2.0 * mu * eps[:, 2]
        s1, s2, _ = principal_values(effective)
        principal = np.column_stack([s1, s2])
    return driving_force(kernel.formulation.kind, psi_plus, principal, material, strengths)


def assemble_damage(mesh, formulation, material, u, d_prev, strength_field=None):
    """
    Assembles the bound-constrained damage system on the glass submesh

    :param mesh:
        A Mesh2D object

    :param formulation:
        A PhaseFieldFormulation object

    :param material:
        A MaterialGlass object carrying (l_c, G_f)

    :param u:
        A numpy array of nodal displacements

    :param d_prev:
        A numpy array of the previous nodal damage, the lower bound

    :param strength_field:
        None or a StrengthField object

    :return:
        A DamageSystem object
    """

    _check_mesh(mesh)
    _check_formulation(formulation)
    if not isinstance(material, MaterialGlass):
        raise TypeError(unwrap(
            '''
            material must be an instance of MaterialGlass, not %s
            ''',
            type_name(material)
        ))
    kernel = _SectionKernel(
        mesh,
        formulation,
        (material.young_modulus, material.poisson_ratio),
        (material.young_modulus, material.poisson_ratio)
    )
    sub = kernel.submesh
    scales, strengths = _scales_and_strengths(sub, material, formulation, strength_field)
    forces = _driving_forces(kernel, material, strengths, np.asarray(u, dtype=np.float64))
    matrix, rhs = damage_operator(
        formulation.kind,
        material.length_scale,
        sub.n_nodes,
        sub.elements,
        kernel.kin.areas[sub.element_map] / 3.0,
        kernel.kin.laplacians(sub.element_map),
        scales,
        forces
    )
    return DamageSystem(matrix, rhs, check_unit_interval('d_prev', np.asarray(d_prev, dtype=np.float64)))


def fourpoint_constraints(mesh, plan):
    """
    Supports on the bottom face, loading lines on the top face, the
    symmetry plane (half models) or a horizontal anchor (full models)

    :param mesh:
        A Mesh2D object

    :param plan:
        A BoundaryPlan object

    :raises:
        ConfigurationError - when a support or load position is not a node

    :return:
        A Constraints object, prescribed values per unit deflection
    """

    lower, upper = mesh.bounds()
    tol = 1e-9 * plan.length
    problems = []
    support_nodes = []
    load_nodes = []
    for x in plan.supports():
        nodes = mesh.nodes_on_line(x=x, y=lower[1], tol=tol)
        if nodes.size == 0:
            problems.append('support position %r is not a mesh node' % x)
        support_nodes.extend(nodes.tolist())
    for x in plan.loads():
        nodes = mesh.nodes_on_line(x=x, y=upper[1], tol=tol)
        if nodes.size == 0:
            problems.append('load position %r is not a mesh node' % x)
        load_nodes.extend(nodes.tolist())
    if problems:
        raise ConfigurationError(problems)

    support_dofs = [2 * n + 1 for n in support_nodes]
    load_dofs = [2 * n + 1 for n in load_nodes]
    if plan.symmetry == 'half':
        anchor = [2 * n for n in mesh.nodes_on_line(x=plan.midspan, tol=tol)]
    else:
        anchor = [2 * support_nodes[0]]
    dofs = support_dofs + load_dofs + anchor
    values = [0.0] * len(support_dofs) + [-1.0] * len(load_dofs) + [0.0] * len(anchor)
    return Constraints(dofs, values, load_dofs, support_dofs)


def apply_fourpoint_bcs(system, mesh, plan, prescribed_w):
    """
    :param system:
        A DisplacementSystem object

    :param mesh:
        The Mesh2D the system was assembled on

    :param plan:
        A BoundaryPlan object

    :param prescribed_w:
        The downward deflection of the loading lines in m

    :return:
        A copy of the system carrying the constraint set
    """

    constraints = fourpoint_constraints(mesh, plan)
    return replace(system, fixed_dofs=constraints.dofs, fixed_values=constraints.values(prescribed_w))


def reaction_force(internal_force, constraints, plan, width=None):
    """
    Total load applied through the loading lines of the whole specimen

    :param internal_force:
        The internal force vector of the solved state

    :param constraints:
        A Constraints object

    :param plan:
        A BoundaryPlan object

    :param width:
        The out-of-plane width in m, None for plan.width, 1.0 when the forces
        are already per section

    :return:
        The reaction in N, positive for downward loading
    """

    if width is None:
        width = plan.width
    return -float(np.sum(internal_force[constraints.load_dofs])) * width * plan.symmetry_factor


def _boundary_elements(mesh, y):
    on_face = np.abs(mesh.nodes[mesh.elements][:, :, 1] - y) <= 1e-12 * max(1.0, abs(y))
    return np.nonzero(on_face.sum(axis=1) >= 2)[0]


def probe_stress(mesh, stresses, point, component, fiber=None):
    """
    Element-constant stress at a point

    :param mesh:
        A Mesh2D object

    :param stresses:
        A numpy array of shape (m, 3) of element stress tensor components

    :param point:
        An (x, y) pair; y is ignored for fiber probes

    :param component:
        "xx", "yy" or "xy"

    :param fiber:
        None, "bottom" or "top" to use the element adjacent to that face at x

    :raises:
        QueryError - when the point is outside of the mesh

    :return:
        The stress in Pa
    """

    if component not in _COMPONENTS:
        raise ValueError('component must be one of xx, yy, xy, not %r' % (component,))
    index = _COMPONENTS[component]
    x, y = float(point[0]), float(point[1])
    lower, upper = mesh.bounds()
    p = mesh.nodes[mesh.elements]
    tol = 1e-12 * float(np.max(upper - lower))

    if fiber is not None:
        if fiber not in ('bottom', 'top'):
            raise ValueError('fiber must be "bottom" or "top", not %r' % (fiber,))
        candidates = _boundary_elements(mesh, lower[1] if fiber == 'bottom' else upper[1])
        xs = p[candidates, :, 0]
        inside = (xs.min(axis=1) - tol <= x) & (x <= xs.max(axis=1) + tol)
        candidates = candidates[inside]
        if candidates.size == 0:
            raise QueryError('x = %r is outside of the mesh' % x)
        centroids = p[candidates, :, 0].mean(axis=1)
        element = candidates[np.argmin(np.abs(centroids - x))]
        return float(stresses[element, index])

    v0 = p[:, 1] - p[:, 0]
    v1 = p[:, 2] - p[:, 0]
    w = np.array([x, y]) - p[:, 0]
    det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    s = (w[:, 0] * v1[:, 1] - w[:, 1] * v1[:, 0]) / det
    t = (v0[:, 0] * w[:, 1] - v0[:, 1] * w[:, 0]) / det
    eps = 1e-10
    inside = np.nonzero((s >= -eps) & (t >= -eps) & (s + t <= 1.0 + eps))[0]
    if inside.size == 0:
        raise QueryError('point (%r, %r) is outside of the mesh' % (x, y))
    return float(stresses[inside[0], index])


class SectionProblem(PhaseFieldProblem):
    """
    Plane-stress model of the longitudinal section of a monolithic or
    laminated strip. Damage lives on the glass submesh only.
    """

    def __init__(self, mesh, material, formulation, plan, interlayer=None, strength_field=None):
        """
        :param mesh:
            A Mesh2D object

        :param material:
            A MaterialGlass object carrying the calibrated (l_c, G_f)

        :param formulation:
            A PhaseFieldFormulation object

        :param plan:
            A BoundaryPlan object matching the mesh

        :param interlayer:
            None or a (young_modulus, poisson_ratio) tuple, required for
            meshes with interlayer elements

        :param strength_field:
            None or a StrengthField object
        """

        _check_mesh(mesh)
        _check_formulation(formulation)
        self.mesh = mesh
        self.material = material
        self.formulation = formulation
        self.plan = plan
        self.strength_field = strength_field
        self.kernel = _SectionKernel(
            mesh,
            formulation,
            (material.young_modulus, material.poisson_ratio),
            interlayer
        )
        self.submesh = self.kernel.submesh
        self.n_dofs = 2 * mesh.n_nodes
        self.energy_scale = plan.width * plan.symmetry_factor

        sub = self.submesh
        scales, self.strengths = _scales_and_strengths(sub, material, formulation, strength_field)
        self._set_damage_elements(
            sub.n_nodes,
            sub.elements,
            self.kernel.kin.areas[sub.element_map],
            self.kernel.kin.laplacians(sub.element_map),
            scales
        )
        self._constraints = fourpoint_constraints(mesh, plan)
        logger.debug(
            'Section problem: %d displacement dofs, %d damage nodes, %d constrained dofs',
            self.n_dofs,
            self.n_damage,
            self._constraints.dofs.shape[0]
        )

    def set_interlayer(self, young_modulus, poisson_ratio):
        self.kernel.set_interlayer(young_modulus, poisson_ratio)

    def constraints(self):
        return self._constraints

    def _g_parent(self, d):
        return self.kernel.parent_degradation(self.element_degradation(d))

    def internal(self, u, d):
        return self.kernel.assemble(u, self._g_parent(d), Scheme.ANISOTROPIC)

    def linear_stiffness(self, d):
        u = np.zeros(self.n_dofs)
        return self.kernel.assemble(u, self._g_parent(d), Scheme.HYBRID)[2]

    def locate(self, error):
        """
        Attaches the owning element to an AssemblyError raised for a degree
        of freedom

        :return:
            The AssemblyError
        """

        dof = getattr(error, 'dof', None)
        if error.element is None and dof is not None:
            error.element = self.kernel.owner_of(dof)
            error.args = ('%s (element %d)' % (error.args[0], error.element),)
        return error

    def driving_forces(self, u):
        return _driving_forces(self.kernel, self.material, self.strengths, u)

    def reaction(self, internal_force):
        return reaction_force(internal_force, self._constraints, self.plan)

    def regime(self, u, d):
        eps = self.kernel.glass_strains(u)
        if self.formulation.split is Split.VOLUMETRIC_DEVIATORIC:
            return (eps[:, 0] + eps[:, 1] > 0.0).astype(np.int8)
        e1, e2, _ = principal_values(eps)
        if np.any((e1 > 0.0) & (e2 < 0.0)):
            return None
        return (e1 > 0.0).astype(np.int8) + 2 * (e2 > 0.0).astype(np.int8)

    def stresses(self, u, d):
        return self.kernel.stresses(u, self._g_parent(d), self.formulation.scheme)

    def probe(self, u, d, x, fiber, component='xx'):
        y = self.mesh.bounds()[0 if fiber == 'bottom' else 1][1]
        return probe_stress(self.mesh, self.stresses(u, d), (x, y), component, fiber=fiber)

    def midspan_deflection(self, u):
        lower, _ = self.mesh.bounds()
        x = self.plan.midspan
        node = self.mesh.nearest_node((x, lower[1]))
        return -float(u[2 * node + 1])

    def field_data(self, u, d):
        """
        :return:
            A 2-element tuple of (point data dict, cell data dict) for VTK
        """

        stresses = self.stresses(u, d)
        psi_plus = np.zeros(self.mesh.n_elements)
        eps = self.kernel.glass_strains(u)
        psi_plus[self.submesh.element_map] = split_energy(self.formulation.split, eps, *self.kernel.glass_lame)[0]
        point = {
            'u': u.reshape(-1, 2),
            'd': self.submesh.to_parent(d),
        }
        cell = {
            'sigma_xx': stresses[:, 0],
            'psi_plus': psi_plus,
        }
        return point, cell

    def damage_nodes(self, tag, x_min, x_max):
        """
        :return:
            An int array of damage nodes of the layer with x in [x_min, x_max]
        """

        nodes = self.submesh.layer_nodes(tag)
        xs = self.submesh.nodes[nodes, 0]
        return nodes[(xs >= x_min) & (xs <= x_max)]
