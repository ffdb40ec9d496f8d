"""Coordinates of transformed meshes, cell measures and vertex normals."""
from __future__ import annotations

import math
import warnings

import numpy as np

from . import polytope as pt
from .plex import cell_vertices, star
from .polytope import Polytope

P = Polytope


class GeometryError(ValueError):
    pass


def _coords(mesh, verts, dim=None) -> np.ndarray:
    x = np.array([mesh.vertex_coordinate(v) for v in verts], dtype=float)
    if x.ndim == 1:
        x = x.reshape(len(verts), -1)
    if dim is not None and x.shape[1] < dim:
        x = np.hstack([x, np.zeros((x.shape[0], dim - x.shape[1]))])
    return x


def polygon_vertices(mesh, p) -> list[int]:
    verts = cell_vertices(mesh, p)
    return [verts[k] for k in pt.polygon_order(mesh.shape(p))]


def _newell(x: np.ndarray) -> np.ndarray:
    n = np.zeros(3)
    for i in range(len(x)):
        a, b = x[i], x[(i + 1) % len(x)]
        n += np.cross(a, b)
    return n


def cell_centroid(mesh, p) -> np.ndarray:
    return _coords(mesh, cell_vertices(mesh, p)).mean(axis=0)


def cell_measure(mesh, p) -> float:
    """Length, area or volume of point ``p`` (0 for vertices).

    Polygons use the Newell area of their boundary cycle.  Volumes sum
    tetrahedra fanned from the cell centroid over every boundary polygon,
    which is exact for the convex and star-shaped cells produced here.
    """
    shape = mesh.shape(p)
    d = shape.dim
    if d == 0:
        return 0.0
    if d == 1:
        x = _coords(mesh, cell_vertices(mesh, p))
        m = float(np.linalg.norm(x[1] - x[0]))
    elif d == 2:
        x = _coords(mesh, polygon_vertices(mesh, p), 3)
        m = 0.5 * float(np.linalg.norm(_newell(x)))
    else:
        c = cell_centroid(mesh, p)
        m = 0.0
        for f in mesh.cone(p):
            x = _coords(mesh, polygon_vertices(mesh, f))
            for i in range(1, len(x) - 1):
                m += abs(float(np.linalg.det(np.array([x[0] - c, x[i] - c, x[i + 1] - c])))) / 6.0
    if m == 0.0:
        warnings.warn(f"degenerate cell {p} ({shape.name}) has zero measure", RuntimeWarning, stacklevel=2)
    return m


def total_measure(mesh, depth=None) -> float:
    depth = mesh.dim if depth is None else depth
    return math.fsum(cell_measure(mesh, p) for p in mesh.stratum(depth))


def layer_offsets(layers: int, thickness: float, symmetric: bool = False) -> list[float]:
    if layers < 1:
        raise GeometryError(f"need at least one layer, got {layers}")
    if not thickness > 0:
        raise GeometryError(f"thickness must be positive, got {thickness}")
    shift = thickness / 2 if symmetric else 0.0
    return [k * thickness / layers - shift for k in range(layers + 1)]


def cell_normal(mesh, p, dim: int) -> np.ndarray:
    """Unit normal of a codimension-one cell embedded in ``dim`` space."""
    d = mesh.shape(p).dim
    if d == 1 and dim == 2:
        x = _coords(mesh, cell_vertices(mesh, p), 2)
        t = x[1] - x[0]
        n = np.array([t[1], -t[0]])
    elif d == 2 and dim == 3:
        n = _newell(_coords(mesh, polygon_vertices(mesh, p), 3))
    elif d == 0 and dim == 1:
        n = np.array([1.0])
    else:
        raise GeometryError(f"no normal for a {d}-cell in {dim}-space")
    length = np.linalg.norm(n)
    if length == 0:
        raise GeometryError(f"cell {p} is degenerate; its normal is undefined")
    return n / length


def _outward(mesh, p, n, dim):
    """Flip ``n`` away from a higher-dimensional cell containing ``p``."""
    for s in mesh.support(p):
        if mesh.shape(s).dim == mesh.shape(p).dim + 1:
            c = _coords(mesh, cell_vertices(mesh, s), dim).mean(axis=0)
            f = _coords(mesh, cell_vertices(mesh, p), dim).mean(axis=0)
            return -n if float(np.dot(n, f - c)) < 0 else n
    return n


def compute_normals(mesh, cells=None, dim=None, outward=False):
    """Averaged unit vertex normals of a codimension-one point set.

    ``cells`` restricts which cells contribute (default: the top stratum).
    Contributions are unweighted unit cell normals, summed in point order.
    Returns ``(normals, problems)``; ``problems`` lists vertices whose
    contributions cancel.
    """
    if cells is None:
        cells = list(mesh.stratum(mesh.dim))
    cells = sorted(set(cells))
    if not cells:
        return {}, []
    cdim = mesh.shape(cells[0]).dim
    dim = cdim + 1 if dim is None else dim
    cell_n = {}
    for c in cells:
        n = cell_normal(mesh, c, dim)
        cell_n[c] = _outward(mesh, c, n, dim) if outward else n
    sums: dict[int, np.ndarray] = {}
    for c in cells:
        for v in cell_vertices(mesh, c):
            sums[v] = sums.get(v, np.zeros(dim)) + cell_n[c]
    normals, problems = {}, []
    for v in sorted(sums):
        length = np.linalg.norm(sums[v])
        if length < 1e-12:
            problems.append(v)
        else:
            normals[v] = sums[v] / length
    return normals, problems


def vertex_normal(mesh, v, cells, dim, outward=False) -> np.ndarray:
    """Normal at vertex ``v`` from the allowed cells of its star."""
    allowed = set(cells)
    acc = np.zeros(dim)
    for c in sorted(star(mesh, v)):
        if c in allowed:
            n = cell_normal(mesh, c, dim)
            acc += _outward(mesh, c, n, dim) if outward else n
    length = np.linalg.norm(acc)
    if length < 1e-12:
        raise GeometryError(f"normals cancel at vertex {v}; use a global normal")
    return acc / length


class BarycentricRule:
    """A new vertex is the mean of the parent vertices named by its node."""

    def output_dim(self, mesh) -> int:
        return mesh.coordinate_dim

    def vertex(self, mesh, p, ttype, node):
        labels, _ = node
        verts = cell_vertices(mesh, p)
        x = _coords(mesh, [verts[k] for k in labels])
        return tuple(float(v) for v in x.mean(axis=0))


class ExtrusionRule:
    """Vertex ``k`` above base vertex ``x`` sits at ``x + offset[k] * n(x)``.

    The normal is a fixed global vector, the default axis direction for
    flat meshes, or the averaged normal of the active cells around ``x``.
    """

    def __init__(self, offsets, mode="default", normal=None, active=None):
        self.offsets = list(offsets)
        self.mode = mode
        self.normal = None if normal is None else np.asarray(normal, dtype=float)
        self.active = active
        self._cache = {}

    def _setup(self, mesh):
        key = id(mesh)
        if key in self._cache:
            return self._cache[key]
        active = set(range(mesh.num_points)) if self.active is None else set(self.active)
        top = max((mesh.shape(p).dim for p in active), default=0)
        cdim = mesh.coordinate_dim
        cells = [p for p in active if mesh.shape(p).dim == top]
        if self.mode == "global":
            if self.normal is None:
                raise GeometryError("global normal mode needs a normal vector")
            dim = max(cdim, len(self.normal), top + 1)
        else:
            dim = max(cdim, top + 1)
        flat = cdim == top
        info = (dim, cells, flat, top)
        self._cache[key] = info
        return info

    def output_dim(self, mesh) -> int:
        return self._setup(mesh)[0]

    def direction(self, mesh, p) -> np.ndarray:
        dim, cells, flat, top = self._setup(mesh)
        if self.mode == "global":
            n = np.zeros(dim)
            n[:len(self.normal)] = self.normal
            length = np.linalg.norm(n)
            if length == 0:
                raise GeometryError("global normal is zero")
            return n / length
        if self.mode == "default" and flat:
            n = np.zeros(dim)
            n[top] = 1.0
            return n
        outward = top < mesh.dim
        return vertex_normal(mesh, p, cells, dim, outward=outward)

    def vertex(self, mesh, p, ttype, node):
        dim = self.output_dim(mesh)
        x = _coords(mesh, [p], dim)[0]
        labels, tag = node
        if ttype.variant == "identity":
            return tuple(float(v) for v in x)
        return tuple(float(v) for v in x + self.offsets[tag] * self.direction(mesh, p))


def transformed_coordinates(base, spec, index):
    """Coordinates of the transformed chart without materializing its topology."""
    from .plex import Coordinates

    rule = spec.coordinate_rule
    out = Coordinates(rule.output_dim(base), {})
    for q in index.stratum(0):
        p, shape, r = index.parent_of(q)
        child = spec.production(index.types[p]).child(shape, r)
        out.values[q] = rule.vertex(base, p, index.types[p], child.nodes[0])
    return out
