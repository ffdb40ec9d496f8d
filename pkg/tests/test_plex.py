import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import transitive_closure, transitive_star
from plexform import generators as gen
from plexform import polytope as pt
from plexform.plex import Plex, PlexError, cell_vertices, filter_mesh
from plexform.polytope import Polytope

P = Polytope


@pytest.fixture
def doublet():
    return gen.doublet()


def test_doublet_matches_figure(doublet):
    assert doublet.strata_sizes() == {0: 4, 1: 5, 2: 2}
    assert list(doublet.stratum(2)) == [0, 1]
    assert list(doublet.stratum(0)) == [2, 3, 4, 5]
    assert list(doublet.stratum(1)) == [6, 7, 8, 9, 10]
    assert set(doublet.cone(0)) == {6, 7, 8}
    assert set(doublet.support(8)) == {0, 1}
    assert set(doublet.cone(6)) == {2, 4}


def test_doublet_closure_and_star(doublet):
    assert {q for q, _ in doublet.closure(0)} == {0, 6, 7, 8, 2, 3, 4}
    assert set(doublet.star(8)) == {8, 0, 1}
    assert doublet.closure(3) == [(3, 0)]
    cones = {p: doublet.cone(p) for p in doublet.chart}
    for p in doublet.chart:
        assert {q for q, _ in doublet.closure(p)} == transitive_closure(cones, p)
        assert set(doublet.star(p)) == transitive_star(cones, p)


def test_single_segment_builds():
    m = Plex([P.SEGMENT, P.POINT, P.POINT], [(1, 2), (), ()])
    assert m.strata_sizes() == {0: 2, 1: 1}
    assert m.validate() == []


def test_grading_error():
    with pytest.raises(PlexError):
        Plex([P.TRIANGLE, P.POINT, P.SEGMENT, P.SEGMENT], [(1, 2, 3), (), (1, 1), (1, 1)])


def test_cone_size_and_orientation_errors():
    with pytest.raises(PlexError):
        Plex([P.SEGMENT, P.POINT], [(1,), ()])
    with pytest.raises(PlexError):
        Plex([P.SEGMENT, P.POINT, P.POINT], [(1, 2), (), ()], [(0, 3), (), ()])
    with pytest.raises(PlexError):
        Plex([P.SEGMENT, P.POINT], [(1, 5), ()])


def test_euler_characteristic():
    assert gen.doublet().euler_characteristic() == 1
    assert gen.reference_mesh(P.TETRAHEDRON).euler_characteristic() == 1
    assert Plex([], []).euler_characteristic() == 0


def test_validate_reference_tet_edges_cancel():
    tet = gen.reference_mesh(P.TETRAHEDRON)
    assert tet.validate() == []
    directed = []
    for f, o in zip(tet.cone(0), tet.orientation(0)):
        ring = pt.arrange(cell_vertices(tet, f), P.TRIANGLE, o)
        directed += [(ring[i], ring[(i + 1) % 3]) for i in range(3)]
    assert len(set(directed)) == 12
    for a, b in directed:
        assert (b, a) in directed


def test_validate_flags_unflipped_triangle_edge():
    tri = Plex([P.TRIANGLE, P.POINT, P.POINT, P.POINT, P.SEGMENT, P.SEGMENT, P.SEGMENT],
               [(4, 5, 6), (), (), (), (1, 2), (2, 3), (1, 3)])
    assert tri.validate()
    fixed = Plex([P.TRIANGLE, P.POINT, P.POINT, P.POINT, P.SEGMENT, P.SEGMENT, P.SEGMENT],
                 [(4, 5, 6), (), (), (), (1, 2), (2, 3), (1, 3)], [(0, 0, -1), (), (), (), (0, 0), (0, 0), (0, 0)])
    assert fixed.validate() == []


def test_duality_violation_reported():
    m = gen.doublet()
    broken = Plex([m.shape(p) for p in m.chart], [m.cone(p) for p in m.chart],
                  [m.orientation(p) for p in m.chart])
    broken._supports = broken._supports[:8] + ((0,),) + broken._supports[9:]
    assert any("support" in line or "dual" in line for line in broken.validate())


def test_labels():
    m = gen.doublet()
    m.create_label("marker")
    m.set_label("marker", 8, 1)
    assert 8 in m.label_stratum("marker", 1)
    assert m.get_label("marker", 0) is None
    with pytest.raises(KeyError):
        m.label_stratum("nope", 1)


def test_filter():
    m = gen.doublet()
    one, mapping = filter_mesh(m, [0])
    assert one.strata_sizes() == {0: 3, 1: 3, 2: 1}
    assert one.euler_characteristic() == 1
    assert one.validate() == []
    assert mapping[0] == 0
    both, _ = m.filter([0, 1])
    assert both.strata_sizes() == m.strata_sizes()
    assert both == m
    empty, _ = m.filter([])
    assert empty.num_points == 0


def test_filter_rejects_non_cells():
    with pytest.raises(PlexError):
        filter_mesh(gen.doublet(), [6])


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(0, 17), min_size=1))
def test_filter_closure_property(cells):
    m = gen.box_mesh(2, (3, 3), simplex=True)
    sub, mapping = m.filter(sorted(cells))
    keep = set()
    for c in cells:
        keep |= {q for q, _ in m.closure(c)}
    assert set(mapping) == keep
    assert sub.validate() == []
    assert sorted(mapping.values()) == list(range(sub.num_points))
