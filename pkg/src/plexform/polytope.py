"""Cell shapes, their reference cones, and their orientation groups.

Every shape is described by a vertex count, reference coordinates, and for
each cone position the shape of the face and the tuple of cell-vertex
indices that face covers, listed in the face's own canonical order.  All
cone arrangements, compositions and inverses are derived from these tuples
and the vertex-permutation tables below.

An orientation ``o`` of a shape names the permutation ``perm`` for which the
arranged vertex ``k`` is the canonical vertex ``perm[k]``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache


class OrientationError(ValueError):
    pass


class Polytope(enum.Enum):
    POINT = 0
    SEGMENT = 1
    POINT_PRISM_TENSOR = 2
    TRIANGLE = 3
    QUADRILATERAL = 4
    SEG_PRISM_TENSOR = 5
    TETRAHEDRON = 6
    HEXAHEDRON = 7
    TRI_PRISM = 8
    TRI_PRISM_TENSOR = 9
    QUAD_PRISM_TENSOR = 10

    def __repr__(self):
        return self.name

    @property
    def dim(self) -> int:
        return _SHAPES[self].dim

    @property
    def is_tensor(self) -> bool:
        return self in _TENSOR


P = Polytope
_TENSOR = frozenset({P.POINT_PRISM_TENSOR, P.SEG_PRISM_TENSOR, P.TRI_PRISM_TENSOR, P.QUAD_PRISM_TENSOR})


@dataclass(frozen=True)
class _ShapeData:
    dim: int
    nverts: int
    faces: tuple  # ((face shape, vertex tuple), ...)
    coords: tuple
    arrangements: dict  # orientation -> vertex permutation


def _ring(n, o):
    return tuple((i + o) % n for i in range(n))


_SHAPES = {
    P.POINT: _ShapeData(0, 1, (), ((),), {0: (0,)}),
    P.SEGMENT: _ShapeData(
        1, 2, ((P.POINT, (0,)), (P.POINT, (1,))), ((-1.0,), (1.0,)),
        {0: (0, 1), -1: (1, 0)}),
    P.POINT_PRISM_TENSOR: _ShapeData(
        1, 2, ((P.POINT, (0,)), (P.POINT, (1,))), ((-1.0,), (1.0,)),
        {0: (0, 1), -1: (1, 0)}),
    P.TRIANGLE: _ShapeData(
        2, 3, tuple((P.SEGMENT, (i, (i + 1) % 3)) for i in range(3)),
        ((-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)),
        {0: _ring(3, 0), 1: _ring(3, 1), 2: _ring(3, 2),
         -1: (2, 1, 0), -2: (0, 2, 1), -3: (1, 0, 2)}),
    P.QUADRILATERAL: _ShapeData(
        2, 4, tuple((P.SEGMENT, (i, (i + 1) % 4)) for i in range(4)),
        ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)),
        {0: _ring(4, 0), 1: _ring(4, 1), 2: _ring(4, 2), 3: _ring(4, 3),
         -1: (3, 2, 1, 0), -2: (0, 3, 2, 1), -3: (1, 0, 3, 2), -4: (2, 1, 0, 3)}),
    # vertices (b0, b1, t0, t1); cone: bottom, top, side over b0, side over b1
    P.SEG_PRISM_TENSOR: _ShapeData(
        2, 4,
        ((P.SEGMENT, (0, 1)), (P.SEGMENT, (2, 3)),
         (P.POINT_PRISM_TENSOR, (0, 2)), (P.POINT_PRISM_TENSOR, (1, 3))),
        ((-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)),
        {0: (0, 1, 2, 3), 1: (3, 2, 1, 0), -1: (1, 0, 3, 2), -2: (2, 3, 0, 1)}),
    P.TETRAHEDRON: _ShapeData(
        3, 4,
        ((P.TRIANGLE, (0, 1, 2)), (P.TRIANGLE, (0, 3, 1)),
         (P.TRIANGLE, (0, 2, 3)), (P.TRIANGLE, (2, 1, 3))),
        ((-1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (1.0, -1.0, -1.0), (-1.0, -1.0, 1.0)),
        {0: (0, 1, 2, 3)}),
    P.HEXAHEDRON: _ShapeData(
        3, 8,
        ((P.QUADRILATERAL, (0, 3, 2, 1)), (P.QUADRILATERAL, (4, 5, 6, 7)))
        + tuple((P.QUADRILATERAL, (j, (j + 1) % 4, 4 + (j + 1) % 4, 4 + j)) for j in range(4)),
        ((-1.0, -1.0, -1.0), (1.0, -1.0, -1.0), (1.0, 1.0, -1.0), (-1.0, 1.0, -1.0),
         (-1.0, -1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 1.0), (-1.0, 1.0, 1.0)),
        {0: tuple(range(8))}),
    P.TRI_PRISM: _ShapeData(
        3, 6,
        ((P.TRIANGLE, (0, 2, 1)), (P.TRIANGLE, (3, 4, 5)))
        + tuple((P.QUADRILATERAL, (j, (j + 1) % 3, 3 + (j + 1) % 3, 3 + j)) for j in range(3)),
        ((-1.0, -1.0, -1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0),
         (-1.0, -1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, 1.0)),
        {0: tuple(range(6))}),
    P.TRI_PRISM_TENSOR: _ShapeData(
        3, 6,
        ((P.TRIANGLE, (0, 1, 2)), (P.TRIANGLE, (3, 4, 5)))
        + tuple((P.SEG_PRISM_TENSOR, (j, (j + 1) % 3, 3 + j, 3 + (j + 1) % 3)) for j in range(3)),
        ((-1.0, -1.0, -1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0),
         (-1.0, -1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, 1.0)),
        {0: tuple(range(6))}),
    P.QUAD_PRISM_TENSOR: _ShapeData(
        3, 8,
        ((P.QUADRILATERAL, (0, 1, 2, 3)), (P.QUADRILATERAL, (4, 5, 6, 7)))
        + tuple((P.SEG_PRISM_TENSOR, (j, (j + 1) % 4, 4 + j, 4 + (j + 1) % 4)) for j in range(4)),
        ((-1.0, -1.0, -1.0), (1.0, -1.0, -1.0), (1.0, 1.0, -1.0), (-1.0, 1.0, -1.0),
         (-1.0, -1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 1.0), (-1.0, 1.0, 1.0)),
        {0: tuple(range(8))}),
}

# Cyclic boundary order of the vertices of each 2-D shape.
_POLYGON_ORDER = {
    P.TRIANGLE: (0, 1, 2),
    P.QUADRILATERAL: (0, 1, 2, 3),
    P.SEG_PRISM_TENSOR: (0, 1, 3, 2),
}


@dataclass(frozen=True)
class Arrangement:
    """Realization of an orientation on vertices and cone points.

    Arranged cone position ``i`` is canonical cone position ``cone_perm[i]``,
    seen through the face orientation ``cone_flips[i]``.
    """
    vertex_perm: tuple
    cone_perm: tuple
    cone_flips: tuple


def dim(shape: Polytope) -> int:
    return _SHAPES[shape].dim


def num_vertices(shape: Polytope) -> int:
    return _SHAPES[shape].nverts


def cone_size(shape: Polytope) -> int:
    return len(_SHAPES[shape].faces)


def cone_types(shape: Polytope) -> list[Polytope]:
    return [f for f, _ in _SHAPES[shape].faces]


def face_vertices(shape: Polytope) -> tuple:
    """Cell-vertex tuple covered by each cone position, in face order."""
    return tuple(t for _, t in _SHAPES[shape].faces)


def polygon_order(shape: Polytope) -> tuple:
    return _POLYGON_ORDER[shape]


def reference_coordinates(shape: Polytope) -> list[tuple]:
    return list(_SHAPES[shape].coords)


def orientation_range(shape: Polytope) -> tuple[int, int]:
    keys = _SHAPES[shape].arrangements
    return min(keys), max(keys) + 1


def orientations(shape: Polytope) -> list[int]:
    lo, hi = orientation_range(shape)
    return list(range(lo, hi))


def check_orientation(shape: Polytope, o: int) -> None:
    if o not in _SHAPES[shape].arrangements:
        lo, hi = orientation_range(shape)
        raise OrientationError(f"orientation {o} outside [{lo}, {hi}) for {shape.name}")


def vertex_arrangement(shape: Polytope, o: int) -> tuple:
    check_orientation(shape, o)
    return _SHAPES[shape].arrangements[o]


def arrange(items, shape: Polytope, o: int) -> tuple:
    """Reorder ``items`` (listed in canonical vertex order) by orientation ``o``."""
    perm = vertex_arrangement(shape, o)
    return tuple(items[k] for k in perm)


def orientation_between(shape: Polytope, canonical, target) -> int | None:
    """The orientation ``o`` with ``arrange(canonical, o) == target``, or None."""
    target = tuple(target)
    for o, perm in _SHAPES[shape].arrangements.items():
        if tuple(canonical[k] for k in perm) == target:
            return o
    return None


@lru_cache(maxsize=None)
def compose(shape: Polytope, o1: int, o2: int) -> int:
    p1 = vertex_arrangement(shape, o1)
    p2 = vertex_arrangement(shape, o2)
    o = orientation_between(shape, range(len(p1)), tuple(p1[k] for k in p2))
    if o is None:
        raise OrientationError(f"{shape.name} arrangements are not closed")  # pragma: no cover
    return o


@lru_cache(maxsize=None)
def invert(shape: Polytope, o: int) -> int:
    for x in orientations(shape):
        if compose(shape, o, x) == 0:
            return x
    raise OrientationError(f"{shape.name} orientation {o} has no inverse")  # pragma: no cover


@lru_cache(maxsize=None)
def cone_arrangement(shape: Polytope, o: int) -> Arrangement:
    perm = vertex_arrangement(shape, o)
    faces = _SHAPES[shape].faces
    cone_perm, flips = [], []
    for _, tup in faces:
        target = tuple(perm[k] for k in tup)
        for j, (fshape, ftup) in enumerate(faces):
            if set(ftup) == set(target):
                f = orientation_between(fshape, ftup, target)
                if f is not None:
                    cone_perm.append(j)
                    flips.append(f)
                    break
        else:
            raise OrientationError(f"{shape.name} orientation {o} does not map the cone to itself")
    return Arrangement(perm, tuple(cone_perm), tuple(flips))


@lru_cache(maxsize=None)
def vertex_source(shape: Polytope) -> tuple:
    """For each vertex, the first (cone position, position in face) covering it."""
    out = []
    for k in range(num_vertices(shape)):
        for j, tup in enumerate(face_vertices(shape)):
            if k in tup:
                out.append((j, tup.index(k)))
                break
    return tuple(out)


def from_name(name: str) -> Polytope:
    try:
        return Polytope[name.upper()]
    except KeyError:
        raise ValueError(f"unknown polytope {name!r}") from None
