"""Mesh generators: interpolation from cell-vertex lists, boxes, reference cells."""
from __future__ import annotations

import itertools

import numpy as np

from . import polytope as pt
from .plex import Coordinates, Plex
from .polytope import Polytope

P = Polytope


def interpolate(cells, num_vertices: int, coordinates=None, labels=None) -> Plex:
    """Build a full Hasse diagram from cells given as (shape, vertex tuple).

    Vertex tuples index ``range(num_vertices)`` and list vertices in the
    canonical order of the shape.  Each intermediate face is created the
    first time it is met, in that order, and takes the vertex order of that
    first occurrence; later occurrences get the matching orientation.  Points
    are numbered cells, vertices, then faces of decreasing dimension.

    ``labels`` maps a name to ``{frozenset(vertex ids): value}``; the point
    with that vertex set receives the value.
    """
    cells = [(shape, tuple(v)) for shape, v in cells]
    if cells:
        top = cells[0][0].dim
        if any(s.dim != top for s, _ in cells):
            raise ValueError("all cells must have the same dimension")
    else:
        top = 0
    levels = {top: cells} if top > 0 else {}
    links = {top: []} if top > 0 else {}
    for d in range(top, 1, -1):
        found: dict = {}
        order = []
        entity_links = []
        for shape, verts in levels[d]:
            row = []
            for fshape, tup in zip(pt.cone_types(shape), pt.face_vertices(shape)):
                fverts = tuple(verts[k] for k in tup)
                key = (fshape, frozenset(fverts))
                if key not in found:
                    found[key] = len(order)
                    order.append((fshape, fverts))
                idx = found[key]
                o = pt.orientation_between(fshape, order[idx][1], fverts)
                if o is None:
                    raise ValueError(f"face {fverts} of {shape.name} {verts} matches no orientation")
                row.append((idx, o))
            entity_links.append(row)
        links[d] = entity_links
        levels[d - 1] = order
        links.setdefault(d - 1, [])
    start = {}
    nxt = 0
    if top > 0:
        start[top] = 0
        nxt = len(cells)
    start[0] = nxt
    nxt += num_vertices
    for d in range(top - 1, 0, -1):
        start[d] = nxt
        nxt += len(levels[d])
    shapes = [None] * nxt
    cones = [None] * nxt
    ornts = [None] * nxt
    for v in range(num_vertices):
        shapes[start[0] + v] = P.POINT
        cones[start[0] + v] = ()
        ornts[start[0] + v] = ()
    for d in range(top, 0, -1):
        for i, (shape, verts) in enumerate(levels[d]):
            p = start[d] + i
            shapes[p] = shape
            if d == 1:
                cones[p] = tuple(start[0] + v for v in verts)
                ornts[p] = (0, 0)
            else:
                cones[p] = tuple(start[d - 1] + j for j, _ in links[d][i])
                ornts[p] = tuple(o for _, o in links[d][i])
    coords = None
    if coordinates is not None:
        coordinates = np.asarray(coordinates, dtype=float)
        coords = Coordinates(coordinates.shape[1], {
            start[0] + v: tuple(float(x) for x in coordinates[v]) for v in range(num_vertices)})
    mesh = Plex(shapes, cones, ornts, coordinates=coords)
    if labels:
        by_set = {}
        for d in range(top, 0, -1):
            for i, (_, verts) in enumerate(levels[d]):
                by_set[frozenset(verts)] = start[d] + i
        for v in range(num_vertices):
            by_set.setdefault(frozenset((v,)), start[0] + v)
        for name, values in labels.items():
            mesh.create_label(name)
            for vset, value in values.items():
                mesh.set_label(name, by_set[frozenset(vset)], value)
    return mesh


def reference_mesh(shape: Polytope) -> Plex:
    """Closure mesh of a single reference cell with reference coordinates."""
    nv = pt.num_vertices(shape)
    coords = pt.reference_coordinates(shape)
    if shape is P.POINT:
        return Plex([P.POINT], [()], coordinates=Coordinates(0, {0: ()}))
    return interpolate([(shape, tuple(range(nv)))], nv, coords)


def _grid_index(faces):
    shape = [n + 1 for n in faces]

    def vid(*ijk):
        idx, stride = 0, 1
        for i, n in zip(ijk, shape):
            idx += i * stride
            stride *= n
        return idx
    return vid


def box_mesh(dim: int, faces, simplex: bool = False, separate_marker: bool = False) -> Plex:
    """Structured box mesh of the unit domain.

    Boundary faces carry a ``marker`` label: 1 everywhere, or with
    ``separate_marker`` one value per side (2-D: bottom 1, right 2, top 3,
    left 4; 3-D: bottom z 1, top z 2, front y 3, back y 4, right x 5, left x 6).
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"box dimension must be 1, 2 or 3, got {dim}")
    faces = tuple(int(n) for n in faces)
    if len(faces) != dim or any(n < 1 for n in faces):
        raise ValueError(f"need {dim} positive face counts, got {faces}")
    if simplex and dim == 3:
        raise NotImplementedError("3-D simplex boxes are not supported")
    vid = _grid_index(faces)
    axes = [np.linspace(0.0, 1.0, n + 1) for n in faces]
    coords = [tuple(axes[a][i] for a, i in enumerate(ijk[::-1]))
              for ijk in itertools.product(*[range(n + 1) for n in faces[::-1]])]
    nv = len(coords)
    cells = []
    markers = {}
    if dim == 1:
        (nx,) = faces
        cells = [(P.SEGMENT, (i, i + 1)) for i in range(nx)]
        markers = {(0,): 1, (nx,): 1 if not separate_marker else 2}
    elif dim == 2:
        nx, ny = faces
        for j in range(ny):
            for i in range(nx):
                a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
                if simplex:
                    cells.append((P.TRIANGLE, (d, a, b)))
                    cells.append((P.TRIANGLE, (b, c, d)))
                else:
                    cells.append((P.QUADRILATERAL, (a, b, c, d)))
        for i in range(nx):
            markers[(vid(i, 0), vid(i + 1, 0))] = 1
            markers[(vid(i, ny), vid(i + 1, ny))] = 3
        for j in range(ny):
            markers[(vid(nx, j), vid(nx, j + 1))] = 2
            markers[(vid(0, j), vid(0, j + 1))] = 4
    else:
        nx, ny, nz = faces
        for k in range(nz):
            for j in range(ny):
                for i in range(nx):
                    b = (vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k))
                    t = tuple(v + vid(0, 0, 1) for v in b)
                    cells.append((P.HEXAHEDRON, b + t))

        def quad(fix_axis, fix, u_axis, v_axis, nu, nv_):
            for u in range(nu):
                for v in range(nv_):
                    pts = []
                    for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        ijk = [0, 0, 0]
                        ijk[fix_axis] = fix
                        ijk[u_axis] = u + du
                        ijk[v_axis] = v + dv
                        pts.append(vid(*ijk))
                    yield tuple(pts)
        for q in quad(2, 0, 0, 1, nx, ny):
            markers[q] = 1
        for q in quad(2, nz, 0, 1, nx, ny):
            markers[q] = 2
        for q in quad(1, 0, 0, 2, nx, nz):
            markers[q] = 3
        for q in quad(1, ny, 0, 2, nx, nz):
            markers[q] = 4
        for q in quad(0, nx, 1, 2, ny, nz):
            markers[q] = 5
        for q in quad(0, 0, 1, 2, ny, nz):
            markers[q] = 6
    if not separate_marker:
        markers = {k: 1 for k in markers}
    return interpolate(cells, nv, coords, labels={"marker": {frozenset(k): v for k, v in markers.items()}})


def doublet() -> Plex:
    """Two triangles sharing a diagonal: the 1x1 simplex box."""
    return box_mesh(2, (1, 1), simplex=True)


def box_boundary_mesh(faces) -> Plex:
    """Quadrilateral surface of the unit cube, faces oriented outward."""
    nx, ny, nz = (int(n) for n in faces)
    vid = _grid_index((nx, ny, nz))
    lattice = {}
    for k in range(nz + 1):
        for j in range(ny + 1):
            for i in range(nx + 1):
                lattice[vid(i, j, k)] = (i / nx, j / ny, k / nz)
    cells = []
    counts = (nx, ny, nz)
    for axis in range(3):
        u_axis, v_axis = [a for a in range(3) if a != axis]
        for fix, outward in ((0, -1.0), (counts[axis], 1.0)):
            for u in range(counts[u_axis]):
                for v in range(counts[v_axis]):
                    pts = []
                    for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        ijk = [0, 0, 0]
                        ijk[axis] = fix
                        ijk[u_axis] = u + du
                        ijk[v_axis] = v + dv
                        pts.append(vid(*ijk))
                    x = np.array([lattice[p] for p in pts])
                    n = np.cross(x[1] - x[0], x[3] - x[0])
                    if n[axis] * outward < 0:
                        pts = [pts[0], pts[3], pts[2], pts[1]]
                    cells.append((P.QUADRILATERAL, tuple(pts)))
    used = sorted({v for _, vs in cells for v in vs})
    remap = {v: i for i, v in enumerate(used)}
    cells = [(s, tuple(remap[v] for v in vs)) for s, vs in cells]
    coords = [lattice[v] for v in used]
    return interpolate(cells, len(used), coords)
