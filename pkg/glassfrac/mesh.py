# coding: utf-8

"""
Structured, graded meshes of layered glass strips and half beams. Exports the
following items:

 - LayerTag
 - GLASS_TAGS
 - RefinementSpec()
 - Mesh2D()
 - Mesh1D()
 - GlassSubmesh()
 - graded_axis()
 - build_section_mesh()
 - build_beam_mesh()
 - glass_submesh()
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import unwrap, ConfigurationError, AssemblyError
from ._types import type_name, check_real


__all__ = [
    'build_beam_mesh',
    'build_section_mesh',
    'GLASS_TAGS',
    'glass_submesh',
    'GlassSubmesh',
    'graded_axis',
    'LayerTag',
    'Mesh1D',
    'Mesh2D',
    'RefinementSpec',
]


logger = logging.getLogger(__name__)


class LayerTag(enum.IntEnum):
    GLASS_BOTTOM = 0
    INTERLAYER = 1
    GLASS_TOP = 2
    GLASS_MONO = 3


GLASS_TAGS = frozenset([LayerTag.GLASS_BOTTOM, LayerTag.GLASS_TOP, LayerTag.GLASS_MONO])

# Largest allowed aspect ratio of the right triangles, keeps every angle
# above 21.8 degrees
_MAX_ASPECT = 2.5

_MIN_ROWS = {
    LayerTag.GLASS_BOTTOM: 4,
    LayerTag.GLASS_TOP: 4,
    LayerTag.GLASS_MONO: 4,
    LayerTag.INTERLAYER: 2,
}

_SNAP = 1e-12


@dataclass(frozen=True)
class RefinementSpec(object):
    """
    Target element sizes along the length. bands holds (x_min, x_max, size)
    triples in model coordinates; sizes grow geometrically away from a band
    by at most grading_ratio per element.
    """

    default_size: float
    bands: tuple = field(default_factory=tuple)
    grading_ratio: float = 1.3

    def __post_init__(self):
        check_real('default_size', self.default_size, 0.0, inclusive=(False, True))
        check_real('grading_ratio', self.grading_ratio, 1.0)
        bands = tuple((float(a), float(b), float(s)) for a, b, s in self.bands)
        problems = []
        for x_min, x_max, size in bands:
            if not x_min < x_max:
                problems.append('refinement band (%r, %r) is empty' % (x_min, x_max))
            if not 0.0 < size <= self.default_size:
                problems.append(unwrap(
                    '''
                    refinement band size %r must be positive and not larger
                    than the default size %r
                    ''',
                    size,
                    self.default_size
                ))
        if problems:
            raise ConfigurationError(problems)
        object.__setattr__(self, 'bands', bands)

    @classmethod
    def uniform(cls, size):
        return cls(size)

    @property
    def smallest_size(self):
        return min([self.default_size] + [s for _, _, s in self.bands])


class Mesh2D(object):
    """
    Conforming mesh of counterclockwise 3-node triangles

    .nodes is a float64 array of shape (n, 2), .elements an int array of
    shape (m, 3) and .layer_tags an int8 array of LayerTag values, shape (m,)
    """

    def __init__(self, nodes, elements, layer_tags, x_axis=None, y_axis=None):
        self.nodes = np.ascontiguousarray(nodes, dtype=np.float64)
        self.elements = np.ascontiguousarray(elements, dtype=np.int64)
        self.layer_tags = np.ascontiguousarray(layer_tags, dtype=np.int8)
        self.x_axis = x_axis
        self.y_axis = y_axis
        for arr in (self.nodes, self.elements, self.layer_tags):
            arr.flags.writeable = False

        if self.elements.shape[0] != self.layer_tags.shape[0]:
            raise ValueError('every element must carry exactly one layer tag')
        areas = self.areas
        bad = np.nonzero(areas <= 0.0)[0]
        if bad.size:
            raise AssemblyError(
                'element %d is not counterclockwise or is degenerate' % bad[0],
                element=int(bad[0])
            )

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def areas(self):
        p = self.nodes[self.elements]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    @property
    def centroids(self):
        return self.nodes[self.elements].mean(axis=1)

    def min_angles(self):
        """
        :return:
            A numpy array of shape (m,) of the smallest interior angle of
            every element, in degrees
        """

        p = self.nodes[self.elements]
        angles = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cos = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            angles.append(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))
        return np.min(np.column_stack(angles), axis=1)

    def bounds(self):
        return self.nodes.min(axis=0), self.nodes.max(axis=0)

    def nearest_node(self, point, candidates=None):
        """
        :param point:
            An (x, y) pair

        :param candidates:
            None or an int array of node indices to search

        :return:
            The index of the closest node
        """

        ids = np.arange(self.n_nodes) if candidates is None else np.asarray(candidates)
        dist = np.hypot(self.nodes[ids, 0] - point[0], self.nodes[ids, 1] - point[1])
        return int(ids[np.argmin(dist)])

    def nodes_on_line(self, x=None, y=None, tol=1e-9):
        """
        :return:
            An int array of the nodes with the given x and/or y coordinate
        """

        mask = np.ones(self.n_nodes, dtype=bool)
        if x is not None:
            mask &= np.abs(self.nodes[:, 0] - x) <= tol
        if y is not None:
            mask &= np.abs(self.nodes[:, 1] - y) <= tol
        return np.nonzero(mask)[0]

    def __repr__(self):
        return '<Mesh2D %d nodes, %d triangles>' % (self.n_nodes, self.n_elements)


class Mesh1D(object):
    """
    Strictly increasing nodes on [x0, x1] with consecutive 2-node elements
    """

    def __init__(self, nodes):
        nodes = np.ascontiguousarray(nodes, dtype=np.float64)
        if nodes.ndim != 1 or nodes.shape[0] < 2:
            raise ValueError('a 1D mesh needs at least two nodes')
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError('1D mesh nodes must be strictly increasing')
        self.nodes = nodes
        self.nodes.flags.writeable = False
        n = nodes.shape[0]
        self.elements = np.column_stack([np.arange(n - 1), np.arange(1, n)])
        self.elements.flags.writeable = False

    @property
    def sizes(self):
        return np.diff(self.nodes)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.nodes.shape[0] - 1

    @property
    def centroids(self):
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def nearest_node(self, x):
        return int(np.argmin(np.abs(self.nodes - x)))

    def element_at(self, x):
        """
        :return:
            The index of the element containing x, the left one on a node
        """

        i = int(np.searchsorted(self.nodes, x, side='left')) - 1
        return min(max(i, 0), self.n_elements - 1)

    def __repr__(self):
        return '<Mesh1D %d nodes on [%g, %g]>' % (self.n_nodes, self.nodes[0], self.nodes[-1])


class GlassSubmesh(object):
    """
    The glass-only part of a Mesh2D on which damage degrees of freedom live

    .node_map maps submesh node -> parent node, .parent_to_sub maps parent
    node -> submesh node (-1 when absent), .element_map maps submesh element
    -> parent element and .elements is the renumbered connectivity
    """

    def __init__(self, parent, element_map):
        self.parent = parent
        self.element_map = np.asarray(element_map, dtype=np.int64)
        self.node_map = np.unique(parent.elements[self.element_map])
        self.parent_to_sub = np.full(parent.n_nodes, -1, dtype=np.int64)
        self.parent_to_sub[self.node_map] = np.arange(self.node_map.shape[0])
        self.elements = self.parent_to_sub[parent.elements[self.element_map]]
        self.layer_tags = parent.layer_tags[self.element_map]

    @property
    def n_nodes(self):
        return self.node_map.shape[0]

    @property
    def n_elements(self):
        return self.element_map.shape[0]

    @property
    def nodes(self):
        return self.parent.nodes[self.node_map]

    def to_parent(self, values, fill=0.0):
        """
        Expands a nodal submesh field to the parent mesh
        """

        out = np.full(self.parent.n_nodes, fill, dtype=np.float64)
        out[self.node_map] = values
        return out

    def layer_nodes(self, tag):
        """
        :return:
            An int array of submesh nodes supporting elements of the tag
        """

        return np.unique(self.elements[self.layer_tags == int(tag)])


def _grade_segment(x0, x1, sizing, resolution):
    samples = max(64, int(math.ceil((x1 - x0) / resolution)) + 1)
    xs = np.linspace(x0, x1, samples)
    inv = 1.0 / sizing(xs)
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(xs))])
    total = cumulative[-1]
    count = max(1, int(math.ceil(total - 1e-9)))
    targets = np.linspace(0.0, total, count + 1)
    points = np.interp(targets, cumulative, xs)
    points[0] = x0
    points[-1] = x1
    return points


def _balance(points, ratio):
    # Split the larger of two neighbours until every ratio is within limits
    limit = ratio * (1.0 + 1e-12)
    while True:
        sizes = np.diff(points)
        left, right = sizes[:-1], sizes[1:]
        split = np.zeros(sizes.shape[0], dtype=bool)
        split[:-1] |= left > limit * right
        split[1:] |= right > limit * left
        if not np.any(split):
            return points
        mids = 0.5 * (points[:-1] + points[1:])[split]
        points = np.sort(np.concatenate([points, mids]))


def graded_axis(x0, x1, refinement, fixed_points=(), size_cap=None):
    """
    Places nodes on [x0, x1] following a RefinementSpec. Element sizes follow
    the band sizes inside bands and grow geometrically away from them; every
    fixed point becomes a node and adjacent sizes never differ by more than
    the grading ratio.

    :param x0:
        The start of the axis

    :param x1:
        The end of the axis

    :param refinement:
        A RefinementSpec object

    :param fixed_points:
        An iterable of coordinates that must be nodes

    :param size_cap:
        None or an upper limit applied to every target size

    :return:
        A float64 numpy array of strictly increasing coordinates
    """

    cap = refinement.default_size if size_cap is None else min(size_cap, refinement.default_size)
    growth = math.log(refinement.grading_ratio)
    bands = [(max(a, x0), min(b, x1), min(s, cap)) for a, b, s in refinement.bands if b > x0 and a < x1]

    def sizing(xs):
        h = np.full(xs.shape, cap)
        for a, b, s in bands:
            dist = np.maximum(np.maximum(a - xs, xs - b), 0.0)
            h = np.minimum(h, s + growth * dist)
        return h

    breaks = [x0, x1]
    breaks.extend(p for p in fixed_points if x0 < p < x1)
    for a, b, _ in bands:
        breaks.extend(p for p in (a, b) if x0 < p < x1)
    breaks = sorted(set(breaks))
    merged = [breaks[0]]
    for p in breaks[1:]:
        if p - merged[-1] > _SNAP:
            merged.append(p)
    merged[-1] = x1

    resolution = min([cap] + [s for _, _, s in bands]) / 8.0
    pieces = []
    for a, b in zip(merged[:-1], merged[1:]):
        seg = _grade_segment(a, b, sizing, resolution)
        pieces.append(seg if not pieces else seg[1:])
    points = np.concatenate(pieces)
    return _balance(points, refinement.grading_ratio)


def _default_tags(count):
    if count == 1:
        return [LayerTag.GLASS_MONO]
    if count == 3:
        return [LayerTag.GLASS_BOTTOM, LayerTag.INTERLAYER, LayerTag.GLASS_TOP]
    raise ConfigurationError(unwrap(
        '''
        layer tags can only be inferred for 1 or 3 layers, got %d layers
        ''',
        count
    ))


def _domain_bands(refinement, length, symmetry):
    problems = []
    for x_min, x_max, _ in refinement.bands:
        if x_min < -_SNAP or x_max > length + _SNAP:
            problems.append(unwrap(
                '''
                refinement band (%r, %r) lies outside of the domain [0, %r]
                ''',
                x_min,
                x_max,
                length
            ))
    if problems:
        raise ConfigurationError(problems)
    if symmetry == 'full':
        return refinement.bands
    # Mirror the right half onto the modelled left half
    half = length / 2.0
    out = []
    for x_min, x_max, size in refinement.bands:
        if x_min < half:
            out.append((x_min, min(x_max, half), size))
        if x_max > half:
            out.append((length - x_max, length - max(x_min, half), size))
    return tuple(out)


def _check_symmetry(symmetry):
    if symmetry not in ('half', 'full'):
        raise ConfigurationError('symmetry must be "half" or "full", not %r' % (symmetry,))


def build_section_mesh(length, layer_thicknesses, refinement, symmetry='half', fixed_points=(),
                       layer_tags=None):
    """
    Triangulates a stack of layers over the length (half or full) as a
    structured grid whose quads are split along alternating diagonals. Node
    rows coincide with every material interface.

    :param length:
        The full length of the strip in m

    :param layer_thicknesses:
        A list of layer thicknesses in m, bottom to top

    :param refinement:
        A RefinementSpec object with bands in full-length coordinates

    :param symmetry:
        "half" for x in [0, L/2], "full" for x in [0, L]

    :param fixed_points:
        x coordinates that must be node columns (supports, loads)

    :param layer_tags:
        None to infer the tags for 1 or 3 layers, else a list of LayerTag

    :raises:
        ConfigurationError - for invalid layers or bands outside the domain

    :return:
        A Mesh2D object
    """

    length = check_real('length', length, 0.0, inclusive=(False, True))
    _check_symmetry(symmetry)
    if not isinstance(refinement, RefinementSpec):
        raise TypeError(unwrap(
            '''
            refinement must be an instance of RefinementSpec, not %s
            ''',
            type_name(refinement)
        ))
    thicknesses = [float(h) for h in layer_thicknesses]
    problems = []
    if not thicknesses:
        problems.append('at least one layer is required')
    problems.extend('layer %d thickness must be positive, got %r' % (i, h) for i, h in enumerate(thicknesses) if h <= 0)
    if problems:
        raise ConfigurationError(problems)
    tags = list(layer_tags) if layer_tags is not None else _default_tags(len(thicknesses))
    if len(tags) != len(thicknesses):
        raise ConfigurationError('one layer tag is required per layer')

    bands = _domain_bands(refinement, length, symmetry)
    local = RefinementSpec(refinement.default_size, bands, refinement.grading_ratio)
    x1 = length if symmetry == 'full' else length / 2.0

    # Rows and columns are tied by the aspect limit, iterate to consistency
    row_size = min(refinement.default_size, _MAX_ASPECT * local.smallest_size)
    for _ in range(8):
        rows = [
            max(_MIN_ROWS[tag], int(math.ceil(h / row_size - 1e-9)))
            for h, tag in zip(thicknesses, tags)
        ]
        dy_min = min(h / r for h, r in zip(thicknesses, rows))
        dy_max = max(h / r for h, r in zip(thicknesses, rows))
        xs = graded_axis(0.0, x1, local, fixed_points, size_cap=_MAX_ASPECT * dy_min)
        dx_min = float(np.min(np.diff(xs)))
        if dy_max <= _MAX_ASPECT * dx_min * (1.0 + 1e-9):
            break
        row_size = _MAX_ASPECT * dx_min

    ys = [0.0]
    row_tags = []
    for h, r, tag in zip(thicknesses, rows, tags):
        base = ys[-1]
        ys.extend(base + h * np.arange(1, r + 1) / r)
        row_tags.extend([int(tag)] * r)
    # Interfaces land exactly on the cumulative sums
    boundaries = np.concatenate([[0.0], np.cumsum(thicknesses)])
    ys = np.asarray(ys)
    ys[np.cumsum([0] + rows)] = boundaries

    nx, ny = xs.shape[0], ys.shape[0]
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1))
    i, j = i.ravel(), j.ravel()
    n00 = j * nx + i
    n10 = n00 + 1
    n01 = n00 + nx
    n11 = n01 + 1
    flip = (i + j) % 2 == 1
    first = np.where(flip[:, None], np.column_stack([n00, n10, n01]), np.column_stack([n00, n10, n11]))
    second = np.where(flip[:, None], np.column_stack([n10, n11, n01]), np.column_stack([n00, n11, n01]))
    elements = np.empty((2 * n00.shape[0], 3), dtype=np.int64)
    elements[0::2] = first
    elements[1::2] = second
    tags_per_quad = np.asarray(row_tags)[j]
    element_tags = np.repeat(tags_per_quad, 2)

    mesh = Mesh2D(nodes, elements, element_tags, x_axis=xs, y_axis=ys)
    logger.info(
        'Section mesh: %d nodes, %d triangles, element sizes %.3g-%.3g m along x, %s rows',
        mesh.n_nodes,
        mesh.n_elements,
        dx_min,
        float(np.max(np.diff(xs))),
        '/'.join(str(r) for r in rows)
    )
    return mesh


def glass_submesh(mesh):
    """
    Extracts the glass-tagged elements on which the damage field lives

    :param mesh:
        A Mesh2D object

    :raises:
        ConfigurationError - when the mesh has no glass elements

    :return:
        A GlassSubmesh object
    """

    if not isinstance(mesh, Mesh2D):
        raise TypeError(unwrap(
            '''
            mesh must be an instance of Mesh2D, not %s
            ''',
            type_name(mesh)
        ))
    glass = np.isin(mesh.layer_tags, [int(t) for t in GLASS_TAGS])
    if not np.any(glass):
        raise ConfigurationError('the mesh contains no glass elements')
    return GlassSubmesh(mesh, np.nonzero(glass)[0])


def build_beam_mesh(length, refinement, symmetry='half', fixed_points=()):
    """
    Graded 1D mesh of the half (or full) beam

    :param length:
        The full beam length in m

    :param refinement:
        A RefinementSpec object with bands in full-length coordinates

    :param symmetry:
        "half" for [0, L/2] or "full" for [0, L]

    :param fixed_points:
        x coordinates that must be nodes

    :return:
        A Mesh1D object
    """

    length = check_real('length', length, 0.0, inclusive=(False, True))
    _check_symmetry(symmetry)
    bands = _domain_bands(refinement, length, symmetry)
    local = RefinementSpec(refinement.default_size, bands, refinement.grading_ratio)
    x1 = length if symmetry == 'full' else length / 2.0
    mesh = Mesh1D(graded_axis(0.0, x1, local, fixed_points))
    logger.info(
        'Beam mesh: %d elements, sizes %.3g-%.3g m',
        mesh.n_elements,
        float(mesh.sizes.min()),
        float(mesh.sizes.max())
    )
    return mesh
