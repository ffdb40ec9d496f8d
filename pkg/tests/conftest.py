import os
import sys
from functools import lru_cache

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from plexform import generators as gen  # noqa: E402
from plexform.catalog import ExtrudeOptions, extrude_spec, regular_refine_spec, tobox_spec  # noqa: E402
from plexform.polytope import Polytope  # noqa: E402

P = Polytope

REFINABLE = (P.SEGMENT, P.TRIANGLE, P.QUADRILATERAL, P.TETRAHEDRON, P.HEXAHEDRON)


@lru_cache(maxsize=None)
def base(name):
    if name == "doublet":
        return gen.doublet()
    if name == "box3x3":
        return gen.box_mesh(2, (3, 3))
    if name == "tribox2x2":
        return gen.box_mesh(2, (2, 2), simplex=True)
    if name == "line3":
        return gen.box_mesh(1, (3,))
    if name == "cube2":
        return gen.box_mesh(3, (2, 2, 2), separate_marker=True)
    if name == "cubesurf":
        return gen.box_boundary_mesh((1, 1, 1))
    if name.startswith("ref:"):
        return gen.reference_mesh(P[name[4:]])
    raise KeyError(name)


def spec(name, mesh):
    if name == "refine":
        return regular_refine_spec()
    if name == "tobox":
        return tobox_spec()
    if name == "extrude2":
        return extrude_spec(mesh, ExtrudeOptions(layers=2))
    if name == "extrude2t":
        return extrude_spec(mesh, ExtrudeOptions(layers=2, tensor=True))
    if name == "surface3":
        return extrude_spec(mesh, ExtrudeOptions(layers=3, thickness=0.25, active_label="marker",
                                                 active_values=(1, 2)))
    if name == "surface3t":
        return extrude_spec(mesh, ExtrudeOptions(layers=3, thickness=0.25, tensor=True,
                                                 active_label="marker", active_values=(1, 2)))
    raise KeyError(name)


MATRIX = (
    [("refine", b) for b in ["doublet", "box3x3", "tribox2x2", "line3", "cubesurf"]
     + [f"ref:{s.name}" for s in REFINABLE]]
    + [("tobox", b) for b in ["doublet", "box3x3", "tribox2x2", "ref:TRIANGLE", "ref:SEGMENT"]]
    + [(t, b) for t in ("extrude2", "extrude2t")
       for b in ["doublet", "box3x3", "line3", "ref:POINT", "ref:TRIANGLE", "cubesurf"]]
    + [("surface3", "cube2"), ("surface3t", "cube2")]
)

MATRIX_IDS = [f"{t}-{b}" for t, b in MATRIX]


@pytest.fixture(params=MATRIX, ids=MATRIX_IDS)
def case(request):
    t, b = request.param
    mesh = base(b)
    return mesh, spec(t, mesh)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
