import pytest

from conftest import REFINABLE, base
from oracles import PUBLISHED_TRIANGLE_ARRAY, cell_coordinate_sets, extruded_counts, geometric_children
from plexform import generators as gen
from plexform.catalog import (EXTRUDABLE, TRIANGLE_CHILD_ACTION, ExtrudeOptions, active_restriction,
                              derived_extrusion_production, extrude_spec, extrusion_production,
                              regular_productions, regular_refine_spec, tobox_spec)
from plexform.plex import cell_vertices
from plexform.polytope import Polytope
from plexform.transform import TType, apply_concrete, derive_action_table

P = Polytope


def _interior(shape):
    prod = regular_productions()[shape]
    return {s: n for s, n in zip(prod.targets, prod.sizes)}


def test_production_sizes():
    assert _interior(P.SEGMENT) == {P.POINT: 1, P.SEGMENT: 2}
    assert _interior(P.TRIANGLE) == {P.SEGMENT: 3, P.TRIANGLE: 4}
    assert _interior(P.TETRAHEDRON) == {P.SEGMENT: 1, P.TRIANGLE: 8, P.TETRAHEDRON: 8}
    assert _interior(P.QUADRILATERAL) == {P.POINT: 1, P.SEGMENT: 4, P.QUADRILATERAL: 4}
    assert _interior(P.HEXAHEDRON) == {P.POINT: 1, P.SEGMENT: 6, P.QUADRILATERAL: 12, P.HEXAHEDRON: 8}


def test_shipped_triangle_table_matches_published_array():
    assert list(TRIANGLE_CHILD_ACTION) == PUBLISHED_TRIANGLE_ARRAY
    table = derive_action_table(P.TRIANGLE, regular_productions()[P.TRIANGLE])
    derived = []
    for o in range(-3, 3):
        for rc, oc in table[(o, P.TRIANGLE)]:
            derived += [rc, oc]
    assert derived == PUBLISHED_TRIANGLE_ARRAY


@pytest.mark.parametrize("shape,strata", [
    (P.SEGMENT, {0: 3, 1: 2}),
    (P.TRIANGLE, {0: 6, 1: 9, 2: 4}),
    (P.QUADRILATERAL, {0: 9, 1: 12, 2: 4}),
    (P.TETRAHEDRON, {0: 10, 1: 25, 2: 24, 3: 8}),
    (P.HEXAHEDRON, {0: 27, 1: 54, 2: 36, 3: 8}),
], ids=lambda x: getattr(x, "name", ""))
def test_refined_reference_cells(shape, strata):
    out, _ = apply_concrete(gen.reference_mesh(shape), regular_refine_spec())
    assert out.strata_sizes() == strata
    assert out.euler_characteristic() == 1
    assert out.validate() == []


@pytest.mark.parametrize("name", ["doublet", "box3x3", "tribox2x2", "cube2", "line3"]
                         + [f"ref:{s.name}" for s in REFINABLE])
def test_refinement_matches_geometric_split(name):
    mesh = base(name)
    out, _ = apply_concrete(mesh, regular_refine_spec())
    cells = [(mesh.shape(c).name, [mesh.vertex_coordinate(v) for v in cell_vertices(mesh, c)])
             for c in mesh.stratum(mesh.dim)]
    assert cell_coordinate_sets(out, out.dim) == geometric_children(cells)


def test_two_refinements_of_a_triangle():
    mesh = gen.reference_mesh(P.TRIANGLE)
    for _ in range(2):
        mesh, _ = apply_concrete(mesh, regular_refine_spec())
    assert mesh.strata_sizes() == {0: 15, 1: 30, 2: 16}
    assert mesh.validate() == []


def test_refinement_inherits_labels():
    cube = base("cube2")
    out, _ = apply_concrete(cube, regular_refine_spec())
    labeled = out.label_stratum("marker", 1)
    by_shape = {s: sum(out.shape(q) is s for q in labeled) for s in (P.QUADRILATERAL, P.SEGMENT, P.POINT)}
    assert by_shape == {P.QUADRILATERAL: 16, P.SEGMENT: 16, P.POINT: 4}


def test_tobox_triangle():
    out, _ = apply_concrete(gen.reference_mesh(P.TRIANGLE), tobox_spec())
    assert out.strata_sizes() == {0: 7, 1: 9, 2: 3}
    assert out.euler_characteristic() == 1
    assert all(out.shape(c) is P.QUADRILATERAL for c in out.stratum(2))


def test_tobox_on_mixed_and_quad_meshes():
    tri = base("tribox2x2")
    out, _ = apply_concrete(tri, tobox_spec())
    assert all(out.shape(c) is P.QUADRILATERAL for c in out.stratum(2))
    assert len(out.stratum(2)) == 3 * len(tri.stratum(2))
    quads = base("box3x3")
    assert apply_concrete(quads, tobox_spec())[0] == apply_concrete(quads, regular_refine_spec())[0]


def test_point_extrusion_listing():
    prod = extrusion_production(P.POINT, 3, False)
    assert prod.count(P.POINT) == 4
    assert prod.count(P.SEGMENT) == 3
    for i in range(3):
        seg = prod.child(P.SEGMENT, i)
        assert [c.replica for c in seg.cone] == [i, i + 1]


def test_prism_orientations():
    prism = extrusion_production(P.TRIANGLE, 2, False).child(P.TRI_PRISM, 0)
    assert prism.ornt == (-2, 0, 0, 0, 0)
    for shape in EXTRUDABLE:
        prod = extrusion_production(shape, 2, True)
        for c in prod.children:
            if c.shape.is_tensor:
                assert set(c.ornt) == {0}


@pytest.mark.parametrize("shape", EXTRUDABLE, ids=lambda s: s.name)
@pytest.mark.parametrize("tensor", [False, True])
def test_extrusion_listing_matches_node_search(shape, tensor):
    explicit = extrusion_production(shape, 3, tensor)
    derived = derived_extrusion_production(shape, 3, tensor)
    assert [(c.shape, c.cone, c.ornt) for c in explicit.children] == \
           [(c.shape, c.cone, c.ornt) for c in derived.children]


@pytest.mark.parametrize("tensor", [False, True])
@pytest.mark.parametrize("name,layers", [("box3x3", 4), ("doublet", 2), ("line3", 3), ("ref:POINT", 5)])
def test_extruded_counts(name, layers, tensor):
    mesh = base(name)
    out, _ = apply_concrete(mesh, extrude_spec(mesh, ExtrudeOptions(layers=layers, tensor=tensor)))
    assert out.strata_sizes() == extruded_counts(mesh.strata_sizes(), layers)
    assert out.euler_characteristic() == 1
    assert out.validate() == []


def test_brick_counts():
    mesh = base("box3x3")
    for tensor in (False, True):
        out, _ = apply_concrete(mesh, extrude_spec(mesh, ExtrudeOptions(layers=4, tensor=tensor)))
        assert out.strata_sizes() == {0: 80, 1: 184, 2: 141, 3: 36}


def test_layer_label():
    mesh = base("box3x3")
    out, _ = apply_concrete(mesh, extrude_spec(mesh, ExtrudeOptions(layers=4)))
    for k in range(5):
        verts = [v for v in out.label_stratum("layer", k) if out.shape(v) is P.POINT]
        assert len(verts) == 16
        assert all(out.vertex_coordinate(v)[2] == pytest.approx(k / 4) for v in verts)


def test_active_restriction():
    cube = base("cube2")
    active = active_restriction(cube, "marker", (1, 2))
    faces = {p for p in active if cube.shape(p) is P.QUADRILATERAL}
    assert faces == set(cube.label_stratum("marker", 1)) | set(cube.label_stratum("marker", 2))
    assert len([p for p in active if cube.shape(p) is P.POINT]) == 18
    assert active_restriction(cube, "marker", ()) == set()
    with pytest.raises(KeyError):
        active_restriction(cube, "nope", (1,))


def test_surface_extrusion():
    cube = base("cube2")
    spec = extrude_spec(cube, ExtrudeOptions(layers=3, thickness=0.25, active_label="marker",
                                             active_values=(1, 2)))
    out, _ = apply_concrete(cube, spec)
    kinds = [spec.type_of(cube, p).variant for p in cube.stratum(3)]
    assert set(kinds) == {"identity"}
    assert len(out.stratum(3)) == 8 + 24
    assert out.validate() == []


def test_empty_active_set_is_identity():
    cube = base("cube2")
    spec = extrude_spec(cube, ExtrudeOptions(layers=3, active_label="marker", active_values=()))
    out, _ = apply_concrete(cube, spec)
    assert out.strata_sizes() == cube.strata_sizes()
    assert all(spec.type_of(cube, p).variant == "identity" for p in cube.chart)


def test_fully_active_equals_unrestricted():
    mesh = gen.box_mesh(2, (2, 2))
    mesh.create_label("all")
    for c in mesh.stratum(2):
        mesh.set_label("all", c, 7)
    full = extrude_spec(mesh, ExtrudeOptions(layers=2))
    restricted = extrude_spec(mesh, ExtrudeOptions(layers=2, active_label="all", active_values=(7,)))
    assert all(restricted.type_of(mesh, p) == TType(mesh.shape(p)) for p in mesh.chart)
    assert apply_concrete(mesh, full)[0] == apply_concrete(mesh, restricted)[0]


def test_extruding_a_volume_is_rejected():
    with pytest.raises(ValueError):
        extrude_spec(base("cube2"), ExtrudeOptions(layers=1))


def test_extrude_options_checked():
    with pytest.raises(ValueError):
        ExtrudeOptions(layers=0)
    with pytest.raises(ValueError):
        ExtrudeOptions(thickness=-1.0)
    with pytest.raises(ValueError):
        ExtrudeOptions(normal_mode="global")
    assert ExtrudeOptions(normal=(0, 0, 1)).normal_mode == "global"
