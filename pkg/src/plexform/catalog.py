"""Ready-made transforms: regular refinement, conversion to boxes, extrusion."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import polytope as pt
from .geometry import BarycentricRule, ExtrusionRule, layer_offsets
from .plex import closure
from .polytope import Polytope
from .transform import (Child, ConePath, Production, TransformError, TransformSpec, TType,
                        derive_action_table, derive_production, identity_productions, vertex_nodes)

P = Polytope

# Replica/orientation action of regular triangle refinement on its four
# triangle children: entries (o_p + 3) * 8 + 2 * r and the next one hold
# (r_c, o_c).  Tests check the derived table against this listing.
TRIANGLE_CHILD_ACTION = (
    1, -3, 0, -3, 2, -3, 3, -2,
    0, -2, 2, -2, 1, -2, 3, -1,
    2, -1, 1, -1, 0, -1, 3, -3,
    0, 0, 1, 0, 2, 0, 3, 0,
    1, 1, 2, 1, 0, 1, 3, 1,
    2, 2, 0, 2, 1, 2, 3, 2,
)


def _node(*verts, tag=0):
    return (tuple(sorted(verts)), tag)


def _signed_volume(shape, nodes):
    ref = np.array(pt.reference_coordinates(shape))
    x = np.array([ref[list(v)].mean(axis=0) for v, _ in nodes])
    return float(np.linalg.det(x[1:4] - x[0]))


def _lattice_children(shape):
    """Children of a box shape: the cell scaled by 1/2 towards each vertex."""
    ref = np.array(pt.reference_coordinates(shape))

    def node_at(x):
        on = [k for k in range(len(ref))
              if all(ref[k][a] == x[a] for a in range(len(x)) if x[a] != 0)]
        return _node(*on)

    return [(shape, tuple(node_at((ref[r] + ref[k]) / 2) for k in range(len(ref))))
            for r in range(len(ref))]


def _tet_children():
    m = _node
    ref_sign = _signed_volume(P.TETRAHEDRON, vertex_nodes(P.TETRAHEDRON))
    kids = [tuple(m(c) if k == c else m(c, k) for k in range(4)) for c in range(4)]
    ring = [m(0, 2), m(0, 3), m(1, 3), m(1, 2)]
    # four tets around the m01-m23 diagonal of the inner octahedron
    octa = []
    for i in range(4):
        a, b = ring[i], ring[(i + 1) % 4]
        nodes = (a, m(0, 1), m(2, 3), b)
        if _signed_volume(P.TETRAHEDRON, nodes) * ref_sign < 0:
            nodes = (b, m(0, 1), m(2, 3), a)
        octa.append(nodes)
    first = next(i for i, t in enumerate(octa) if t[0] == m(0, 2))
    octa = octa[first:] + octa[:first]
    out = []
    for nodes in kids:
        if _signed_volume(P.TETRAHEDRON, nodes) * ref_sign < 0:
            nodes = nodes[:2] + (nodes[3], nodes[2])
        out.append((P.TETRAHEDRON, nodes))
    out += [(P.TETRAHEDRON, nodes) for nodes in octa]
    return out


@lru_cache(maxsize=None)
def regular_productions() -> dict[Polytope, Production]:
    """Regular (1:2^d) refinement of points, segments, triangles, quads, tets and hexes."""
    m = _node
    prods: dict[Polytope, Production] = {}
    prods[P.POINT] = Production([Child(P.POINT, nodes=(m(0),))])
    prods[P.SEGMENT] = derive_production(
        P.SEGMENT, [(P.SEGMENT, (m(0), m(0, 1))), (P.SEGMENT, (m(0, 1), m(1)))], prods)
    tri = [
        (P.TRIANGLE, (m(0), m(0, 1), m(0, 2))),
        (P.TRIANGLE, (m(0, 1), m(1), m(1, 2))),
        (P.TRIANGLE, (m(0, 2), m(1, 2), m(2))),
        (P.TRIANGLE, (m(0, 1), m(1, 2), m(0, 2))),
    ]
    tri_segments = [
        (P.SEGMENT, (m(0, 1), m(1, 2))),
        (P.SEGMENT, (m(1, 2), m(0, 2))),
        (P.SEGMENT, (m(0, 2), m(0, 1))),
    ]
    prods[P.TRIANGLE] = derive_production(P.TRIANGLE, tri, prods, tri_segments)
    prods[P.QUADRILATERAL] = derive_production(P.QUADRILATERAL, _lattice_children(P.QUADRILATERAL), prods)
    prods[P.TETRAHEDRON] = derive_production(P.TETRAHEDRON, _tet_children(), prods)
    prods[P.HEXAHEDRON] = derive_production(P.HEXAHEDRON, _lattice_children(P.HEXAHEDRON), prods)
    return prods


def _spec_from(name, prods, **kw) -> TransformSpec:
    return TransformSpec(
        name,
        {TType(s): p for s, p in prods.items()},
        {TType(s): derive_action_table(s, p) for s, p in prods.items()},
        **kw)


def regular_refine_spec() -> TransformSpec:
    return _spec_from("regular", regular_productions(), coordinate_rule=BarycentricRule())


@lru_cache(maxsize=None)
def tobox_productions() -> dict[Polytope, Production]:
    """Split simplices into boxes; points, segments and quads refine regularly."""
    m = _node
    reg = regular_productions()
    prods = {s: reg[s] for s in (P.POINT, P.SEGMENT, P.QUADRILATERAL)}
    quads = [(P.QUADRILATERAL, (m(c), m(c, (c + 1) % 3), m(0, 1, 2), m((c + 2) % 3, c)))
             for c in range(3)]
    prods[P.TRIANGLE] = derive_production(P.TRIANGLE, quads, prods)
    return prods


def tobox_spec() -> TransformSpec:
    return _spec_from("tobox", tobox_productions(), coordinate_rule=BarycentricRule())


# ---------------------------------------------------------------------------
# extrusion


@dataclass
class ExtrudeOptions:
    layers: int = 1
    tensor: bool = False
    thickness: float = 1.0
    symmetric: bool = False
    normal: tuple | None = None
    normal_mode: str = "default"  # default | computed | global
    active_label: str | None = None
    active_values: tuple = ()
    layer_label: str = "layer"

    def __post_init__(self):
        if int(self.layers) != self.layers or self.layers < 1:
            raise ValueError(f"layers must be a positive integer, got {self.layers}")
        if not self.thickness > 0:
            raise ValueError(f"thickness must be positive, got {self.thickness}")
        if self.normal is not None:
            self.normal_mode = "global"
        if self.normal_mode not in ("default", "computed", "global"):
            raise ValueError(f"unknown normal mode {self.normal_mode!r}")
        if self.normal_mode == "global" and self.normal is None:
            raise ValueError("global normal mode needs a normal vector")
        self.active_values = tuple(self.active_values)


@dataclass
class RefineOptions:
    kind: str = "regular"  # regular | tobox
    sweeps: int = 1
    extra: dict = field(default_factory=dict)


EXTRUDABLE = (P.POINT, P.SEGMENT, P.TRIANGLE, P.QUADRILATERAL)


def _prism_of(shape, tensor):
    return {
        P.POINT: P.POINT_PRISM_TENSOR if tensor else P.SEGMENT,
        P.SEGMENT: P.SEG_PRISM_TENSOR if tensor else P.QUADRILATERAL,
        P.TRIANGLE: P.TRI_PRISM_TENSOR if tensor else P.TRI_PRISM,
        P.QUADRILATERAL: P.QUAD_PRISM_TENSOR if tensor else P.HEXAHEDRON,
    }[shape]


@lru_cache(maxsize=None)
def extrusion_production(shape: Polytope, layers: int, tensor: bool) -> Production:
    """Layer copies of ``shape`` plus one prism per layer, listed explicitly."""
    L = layers
    kids = []
    nv = pt.num_vertices(shape)
    for k in range(L + 1):
        nodes = vertex_nodes(shape, k)
        if shape is P.POINT:
            cone, ornt = (), ()
        elif shape is P.SEGMENT:
            cone = (ConePath(P.POINT, (0,), k), ConePath(P.POINT, (1,), k))
            ornt = (0, 0)
        else:
            cone = tuple(ConePath(P.SEGMENT, (j,), k) for j in range(nv))
            ornt = (0,) * nv
        kids.append(Child(shape, cone, ornt, nodes))
    prism = _prism_of(shape, tensor)
    for i in range(L):
        lo, hi = vertex_nodes(shape, i), vertex_nodes(shape, i + 1)
        if shape is P.POINT:
            cone = (ConePath(P.POINT, (), i), ConePath(P.POINT, (), i + 1))
            ornt = (0, 0)
            nodes = lo + hi
        elif shape is P.SEGMENT and not tensor:
            cone = (ConePath(P.SEGMENT, (), i), ConePath(P.SEGMENT, (1,), i),
                    ConePath(P.SEGMENT, (), i + 1), ConePath(P.SEGMENT, (0,), i))
            ornt = (0, 0, -1, -1)
            nodes = (lo[0], lo[1], hi[1], hi[0])
        elif shape is P.SEGMENT:
            cone = (ConePath(P.SEGMENT, (), i), ConePath(P.SEGMENT, (), i + 1),
                    ConePath(P.POINT_PRISM_TENSOR, (0,), i), ConePath(P.POINT_PRISM_TENSOR, (1,), i))
            ornt = (0, 0, 0, 0)
            nodes = lo + hi
        else:
            side = P.SEG_PRISM_TENSOR if tensor else P.QUADRILATERAL
            cone = (ConePath(shape, (), i), ConePath(shape, (), i + 1)) + tuple(
                ConePath(side, (j,), i) for j in range(nv))
            ornt = (0 if tensor else -2, 0) + (0,) * nv
            nodes = lo + hi
        kids.append(Child(prism, cone, ornt, nodes))
    return Production(kids)


def derived_extrusion_production(shape: Polytope, layers: int, tensor: bool) -> Production:
    """The same production with cones located from node geometry alone."""
    faces = {s: extrusion_production(s, layers, tensor) for s in EXTRUDABLE if s.dim < shape.dim}
    explicit = extrusion_production(shape, layers, tensor)
    return derive_production(shape, [(c.shape, c.nodes) for c in explicit.children], faces)


def active_restriction(mesh, label: str, values) -> set[int]:
    """Closure of the points whose ``label`` value is among ``values``."""
    if label not in mesh.label_names():
        raise KeyError(f"unknown label {label!r}")
    seeds = sorted({p for v in set(values) for p in mesh.label_stratum(label, v)})
    active = set()
    for p in seeds:
        active.update(q for q, _ in closure(mesh, p))
    return active


def extrude_spec(base, options: ExtrudeOptions) -> TransformSpec:
    """Extrusion of ``base`` (all of it, or the active closure only)."""
    L, tensor = int(options.layers), options.tensor
    active = None
    if options.active_label is not None:
        active = active_restriction(base, options.active_label, options.active_values)
    pts = range(base.num_points) if active is None else sorted(active)
    for p in pts:
        if base.shape(p) not in EXTRUDABLE:
            raise TransformError(f"point {p}: cannot extrude a {base.shape(p).name}")
    prods = {TType(s): extrusion_production(s, L, tensor) for s in EXTRUDABLE}
    actions = {t: derive_action_table(t.shape, p, partial=True) for t, p in prods.items()}
    type_map = None
    if active is not None:
        ident = identity_productions()
        for s, pr in ident.items():
            t = TType(s, "identity")
            prods[t] = pr
            actions[t] = derive_action_table(s, pr)
        type_map = {p: TType(base.shape(p), "" if p in active else "identity")
                    for p in range(base.num_points)}
    rule = None
    if base.coordinate_dim is not None:
        rule = ExtrusionRule(layer_offsets(L, options.thickness, options.symmetric),
                             options.normal_mode, options.normal, active)
    return TransformSpec(
        "extrude", prods, actions, type_map=type_map, coordinate_rule=rule,
        inherit_labels=False, layer_label=options.layer_label,
        layered_types=[TType(s) for s in EXTRUDABLE])

