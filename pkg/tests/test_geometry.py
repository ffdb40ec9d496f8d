import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REFINABLE
from oracles import newell_free_normal, shoelace, tet_volume
from plexform import generators as gen
from plexform.catalog import ExtrudeOptions, extrude_spec, regular_refine_spec, tobox_spec
from plexform.geometry import (GeometryError, cell_measure, cell_normal, compute_normals, layer_offsets,
                               polygon_vertices, total_measure)
from plexform.plex import cell_vertices
from plexform.polytope import Polytope
from plexform.transform import apply_concrete

P = Polytope


def _refined(shape):
    return apply_concrete(gen.reference_mesh(shape), regular_refine_spec())[0]


def test_midpoints():
    out = _refined(P.TETRAHEDRON)
    coords = {out.vertex_coordinate(v) for v in out.stratum(0)}
    assert (0.0, -1.0, -1.0) in coords
    assert (-1.0, 0.0, -1.0) in coords
    quad = _refined(P.QUADRILATERAL)
    assert (0.0, 0.0) in {quad.vertex_coordinate(v) for v in quad.stratum(0)}


def test_reference_measures():
    tri = gen.reference_mesh(P.TRIANGLE)
    assert cell_measure(tri, 0) == pytest.approx(2.0)
    assert cell_measure(gen.reference_mesh(P.HEXAHEDRON), 0) == pytest.approx(8.0)
    assert cell_measure(gen.reference_mesh(P.TETRAHEDRON), 0) == pytest.approx(4 / 3)
    assert cell_measure(gen.reference_mesh(P.TRI_PRISM), 0) == pytest.approx(4.0)
    for c in _refined(P.TRIANGLE).stratum(2):
        assert cell_measure(_refined(P.TRIANGLE), c) == pytest.approx(0.5)


def test_measure_against_oracles():
    out = _refined(P.TRIANGLE)
    for c in out.stratum(2):
        x = [out.vertex_coordinate(v) for v in cell_vertices(out, c)]
        assert cell_measure(out, c) == pytest.approx(shoelace(x), abs=1e-15)
    tet = _refined(P.TETRAHEDRON)
    for c in tet.stratum(3):
        x = [tet.vertex_coordinate(v) for v in cell_vertices(tet, c)]
        assert cell_measure(tet, c) == pytest.approx(tet_volume(*x), rel=1e-13)


@pytest.mark.parametrize("shape", REFINABLE, ids=lambda s: s.name)
def test_refinement_conserves_measure(shape):
    ref = gen.reference_mesh(shape)
    want = cell_measure(ref, 0)
    out = _refined(shape)
    assert abs(total_measure(out) - want) <= 1e-12 * want


def test_tobox_conserves_area():
    out = apply_concrete(gen.reference_mesh(P.TRIANGLE), tobox_spec())[0]
    assert abs(total_measure(out) - 2.0) <= 2e-12


def test_degenerate_cell_warns():
    m = gen.interpolate([(P.TRIANGLE, (0, 1, 2))], 3, [(0, 0), (1, 1), (2, 2)])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert cell_measure(m, 0) == 0.0
    assert w


def test_layer_offsets():
    offs = layer_offsets(3, 0.25)
    for got, want in zip(offs, [0.0, 1 / 12, 1 / 6, 1 / 4]):
        assert abs(got - want) <= 1e-15
    sym = layer_offsets(2, 0.2, symmetric=True)
    assert sym[0] == pytest.approx(-0.1) and sym[-1] == pytest.approx(0.1) and sym[1] == pytest.approx(0.0)
    with pytest.raises(GeometryError):
        layer_offsets(0, 1.0)


def test_flat_square_normals():
    m = gen.box_mesh(2, (2, 2))
    normals, problems = compute_normals(m, dim=3)
    assert not problems
    for n in normals.values():
        assert tuple(n) == (0.0, 0.0, 1.0)


def test_cube_surface_corner_normals():
    m = gen.box_boundary_mesh((1, 1, 1))
    normals, problems = compute_normals(m)
    assert not problems and len(normals) == 8
    for v, n in normals.items():
        x = np.array(m.vertex_coordinate(v))
        want = (2 * x - 1) / math.sqrt(3)
        assert np.max(np.abs(n - want)) <= 1e-12


def test_cell_normals_against_oracle():
    m = gen.box_boundary_mesh((2, 1, 3))
    for c in m.stratum(2):
        pts = [m.vertex_coordinate(v) for v in polygon_vertices(m, c)]
        assert np.allclose(cell_normal(m, c, 3), newell_free_normal(pts), atol=1e-14)


def test_cancelling_normals_reported():
    line = gen.interpolate([(P.SEGMENT, (0, 1)), (P.SEGMENT, (2, 1))], 3, [(0, 0), (1, 0), (2, 0)])
    _, problems = compute_normals(line)
    shared = set(line.cone(0)) & set(line.cone(1))
    assert problems == sorted(shared)


def test_unit_segment_to_unit_square():
    seg = gen.box_mesh(1, (1,))
    out, _ = apply_concrete(seg, extrude_spec(seg, ExtrudeOptions(layers=1)))
    coords = sorted(out.vertex_coordinate(v) for v in out.stratum(0))
    assert coords == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
    assert total_measure(out) == pytest.approx(1.0)


def test_global_normal_overrides():
    sq = gen.box_mesh(2, (1, 1))
    spec = extrude_spec(sq, ExtrudeOptions(layers=2, thickness=2.0, normal=(1.0, 0.0, 1.0)))
    out, _ = apply_concrete(sq, spec)
    top = [v for v in out.label_stratum("layer", 2) if out.shape(v) is P.POINT]
    s = math.sqrt(2)
    got = sorted(out.vertex_coordinate(v) for v in top)
    want = sorted((x + s, y, s) for x in (0.0, 1.0) for y in (0.0, 1.0))
    assert np.allclose(got, want, atol=1e-14)


def test_symmetric_extrusion_centers_layers():
    sq = gen.box_mesh(2, (1, 1))
    out, _ = apply_concrete(sq, extrude_spec(sq, ExtrudeOptions(layers=2, thickness=0.2, symmetric=True)))
    zs = sorted({out.vertex_coordinate(v)[2] for v in out.stratum(0)})
    assert zs == pytest.approx([-0.1, 0.0, 0.1])


def test_surface_extrusion_goes_outward():
    cube = gen.box_mesh(3, (2, 2, 2), separate_marker=True)
    spec = extrude_spec(cube, ExtrudeOptions(layers=3, thickness=0.25, active_label="marker",
                                             active_values=(1, 2)))
    out, _ = apply_concrete(cube, spec)
    zs = [out.vertex_coordinate(v)[2] for v in out.stratum(0)]
    assert min(zs) == pytest.approx(-0.25) and max(zs) == pytest.approx(1.25)
    assert total_measure(out) == pytest.approx(1.5)


def test_curved_surface_computed_normals():
    cyl_pts = [(math.cos(a), math.sin(a)) for a in np.linspace(0, 2 * math.pi, 13)[:-1]]
    ring = gen.interpolate([(P.SEGMENT, (i, (i + 1) % 12)) for i in range(12)], 12, cyl_pts)
    out, _ = apply_concrete(ring, extrude_spec(ring, ExtrudeOptions(layers=1, thickness=0.5)))
    radii = sorted(round(float(np.hypot(*out.vertex_coordinate(v))), 12) for v in out.stratum(0))
    assert set(radii) in ({1.0, 1.5}, {1.0, 0.5})


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)), min_size=4, max_size=4))
def test_conservation_on_perturbed_quads(jitter):
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    x = [(a + dx, b + dy) for (a, b), (dx, dy) in zip(corners, jitter)]
    m = gen.interpolate([(P.QUADRILATERAL, (0, 1, 2, 3))], 4, x)
    want = shoelace(x)
    out, _ = apply_concrete(m, regular_refine_spec())
    assert total_measure(out) == pytest.approx(want, rel=1e-12)

