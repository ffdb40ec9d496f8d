"""Stratified DAG meshes.

A :class:`Plex` stores, for every point of a contiguous chart, its shape and
its ordered, oriented cone.  Supports, strata and labels are derived.  The
free functions in this module (``oriented_cone``, ``closure``, ``star``,
``cell_vertices``) only use the read interface shared with
:class:`plexform.ephemeral.EphemeralMesh`, so they work on either.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from . import polytope as pt
from .polytope import Polytope


class PlexError(ValueError):
    pass


class Label:
    """Point -> integer map with a value -> points index."""

    def __init__(self, name: str):
        self.name = name
        self._values: dict[int, int] = {}
        self._strata: dict[int, set[int]] = {}

    def set(self, p: int, value: int) -> None:
        old = self._values.get(p)
        if old is not None:
            self._strata[old].discard(p)
            if not self._strata[old]:
                del self._strata[old]
        self._values[p] = int(value)
        self._strata.setdefault(int(value), set()).add(p)

    def clear(self, p: int) -> None:
        old = self._values.pop(p, None)
        if old is not None:
            self._strata[old].discard(p)
            if not self._strata[old]:
                del self._strata[old]

    def get(self, p: int) -> int | None:
        return self._values.get(p)

    def stratum(self, value: int) -> list[int]:
        return sorted(self._strata.get(value, ()))

    def values(self) -> list[int]:
        return sorted(self._strata)

    def items(self):
        return sorted(self._values.items())

    def __len__(self):
        return len(self._values)

    def __eq__(self, other):
        return isinstance(other, Label) and self.name == other.name and self._values == other._values


@dataclass
class Coordinates:
    """Embedding dimension plus one coordinate tuple per vertex point."""
    dim: int
    values: dict = field(default_factory=dict)

    def __getitem__(self, p):
        return self.values[p]

    def __contains__(self, p):
        return p in self.values


class Plex:
    """An immutable, validated Hasse diagram of a mesh.

    Parameters
    ----------
    shapes : sequence of Polytope
        Shape of every point; the chart is ``range(len(shapes))``.
    cones : sequence of sequences of int
        Ordered cone of every point.
    orientations : sequence of sequences of int, optional
        Orientation of each cone entry, parallel to ``cones``; all zero if omitted.
    """

    def __init__(self, shapes, cones, orientations=None, labels=None, coordinates=None):
        n = len(shapes)
        if len(cones) != n:
            raise PlexError(f"{n} shapes but {len(cones)} cones")
        if orientations is None:
            orientations = [(0,) * len(c) for c in cones]
        self._shapes = tuple(shapes)
        self._cones = tuple(tuple(int(x) for x in c) for c in cones)
        self._ornts = tuple(tuple(int(x) for x in o) for o in orientations)
        for p in range(n):
            self._check_point(p)
        supports = [[] for _ in range(n)]
        for p, cone in enumerate(self._cones):
            for q in cone:
                supports[q].append(p)
        self._supports = tuple(tuple(sorted(set(s))) for s in supports)
        strata: dict[int, list[int]] = {}
        for p, s in enumerate(self._shapes):
            strata.setdefault(s.dim, []).append(p)
        self._strata = strata
        self.labels: dict[str, Label] = {}
        for name, label in (labels or {}).items():
            new = self.create_label(name)
            for p, v in label.items() if isinstance(label, Label) else label.items():
                new.set(p, v)
        self.coordinates: Coordinates | None = coordinates

    def _check_point(self, p):
        shape = self._shapes[p]
        cone, ornt = self._cones[p], self._ornts[p]
        expected = pt.cone_types(shape)
        if len(cone) != len(expected):
            raise PlexError(f"point {p}: {shape.name} needs {len(expected)} cone points, got {len(cone)}")
        if len(ornt) != len(cone):
            raise PlexError(f"point {p}: {len(ornt)} orientations for {len(cone)} cone points")
        n = len(self._shapes)
        for i, (q, o) in enumerate(zip(cone, ornt)):
            if not 0 <= q < n:
                raise PlexError(f"point {p}: cone point {q} outside chart [0, {n})")
            qs = self._shapes[q]
            if qs.dim != shape.dim - 1:
                raise PlexError(f"point {p}: grading violation, {shape.name} cone holds {qs.name} {q}")
            if qs is not expected[i]:
                raise PlexError(f"point {p}: cone position {i} must be {expected[i].name}, got {qs.name}")
            try:
                pt.check_orientation(qs, o)
            except pt.OrientationError as exc:
                raise PlexError(f"point {p}: {exc}") from None

    # read interface -------------------------------------------------------
    @property
    def num_points(self) -> int:
        return len(self._shapes)

    @property
    def chart(self) -> range:
        return range(len(self._shapes))

    @property
    def dim(self) -> int:
        return max(self._strata) if self._strata else -1

    def _check(self, p):
        if not 0 <= p < len(self._shapes):
            raise IndexError(f"point {p} outside chart [0, {len(self._shapes)})")

    def shape(self, p: int) -> Polytope:
        self._check(p)
        return self._shapes[p]

    def cone(self, p: int) -> tuple:
        self._check(p)
        return self._cones[p]

    def orientation(self, p: int) -> tuple:
        self._check(p)
        return self._ornts[p]

    def support(self, p: int) -> tuple:
        self._check(p)
        return self._supports[p]

    def closure(self, p: int, orientation: int = 0) -> list[tuple[int, int]]:
        self._check(p)
        return closure(self, p, orientation)

    def star(self, p: int) -> list[int]:
        self._check(p)
        return star(self, p)

    def stratum(self, depth: int) -> list[int]:
        return list(self._strata.get(depth, ()))

    def strata_sizes(self) -> dict[int, int]:
        return {d: len(v) for d, v in sorted(self._strata.items())}

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(v) for d, v in self._strata.items())

    def validate(self) -> list[str]:
        return validate(self)

    # labels -------------------------------------------------------------
    def create_label(self, name: str) -> Label:
        if name not in self.labels:
            self.labels[name] = Label(name)
        return self.labels[name]

    def _label(self, name):
        try:
            return self.labels[name]
        except KeyError:
            raise KeyError(f"unknown label {name!r}") from None

    def set_label(self, name: str, p: int, value: int) -> None:
        self._check(p)
        self._label(name).set(p, value)

    def get_label(self, name: str, p: int) -> int | None:
        return self._label(name).get(p)

    def label_stratum(self, name: str, value: int) -> list[int]:
        return self._label(name).stratum(value)

    def label_names(self) -> list[str]:
        return sorted(self.labels)

    def label_values(self, name: str) -> list[int]:
        return self._label(name).values()

    # coordinates --------------------------------------------------------
    @property
    def coordinate_dim(self) -> int | None:
        return None if self.coordinates is None else self.coordinates.dim

    def vertex_coordinate(self, p: int):
        if self.coordinates is None:
            return None
        return self.coordinates.values.get(p)

    # misc -----------------------------------------------------------------
    def filter(self, cells) -> tuple["Plex", dict[int, int]]:
        """Submesh made of the closures of ``cells``, renumbered in chart order."""
        return filter_mesh(self, cells)

    def __eq__(self, other):
        if not isinstance(other, Plex):
            return NotImplemented
        return (self._shapes == other._shapes and self._cones == other._cones
                and self._ornts == other._ornts and self.labels == other.labels
                and self.coordinates == other.coordinates)

    def __repr__(self):
        sizes = ", ".join(f"{d}:{n}" for d, n in self.strata_sizes().items())
        return f"Plex({self.num_points} points; strata {sizes})"


# ---------------------------------------------------------------------------
# queries over any mesh implementing the read interface


def oriented_cone(mesh, p: int, o: int = 0) -> list[tuple[int, int]]:
    """Cone of ``p`` in the order and orientation induced by viewing ``p`` through ``o``."""
    shape = mesh.shape(p)
    cone, ornt = mesh.cone(p), mesh.orientation(p)
    if o == 0:
        return list(zip(cone, ornt))
    arr = pt.cone_arrangement(shape, o)
    out = []
    for j, flip in zip(arr.cone_perm, arr.cone_flips):
        q = cone[j]
        out.append((q, pt.compose(mesh.shape(q), ornt[j], flip)))
    return out


def closure(mesh, p: int, orientation: int = 0) -> list[tuple[int, int]]:
    """Breadth-first oriented transitive closure; first occurrence wins."""
    seen = {p}
    out = [(p, orientation)]
    queue = deque(out)
    while queue:
        q, o = queue.popleft()
        for c, co in oriented_cone(mesh, q, o):
            if c not in seen:
                seen.add(c)
                out.append((c, co))
                queue.append((c, co))
    return out


def star(mesh, p: int) -> list[int]:
    seen = {p}
    out = [p]
    queue = deque(out)
    while queue:
        q = queue.popleft()
        for s in mesh.support(q):
            if s not in seen:
                seen.add(s)
                out.append(s)
                queue.append(s)
    return out


def cell_vertices(mesh, p: int) -> tuple:
    """Vertices of ``p`` in the canonical vertex order of its shape."""
    shape = mesh.shape(p)
    if shape is Polytope.POINT:
        return (p,)
    if shape.dim == 1:
        return tuple(mesh.cone(p))
    cone, ornt = mesh.cone(p), mesh.orientation(p)
    faces = {}
    out = []
    for j, pos in pt.vertex_source(shape):
        if j not in faces:
            q = cone[j]
            faces[j] = pt.arrange(cell_vertices(mesh, q), mesh.shape(q), ornt[j])
        out.append(faces[j][pos])
    return tuple(out)


def validate(mesh) -> list[str]:
    """Consistency checks; returns violations instead of raising.

    Checks grading, cone/support duality, that every face's arranged
    vertices agree with the vertices its cell derives, and oriented boundary
    cancellation: every point two levels below a point of dim >= 2 appears
    exactly twice, with opposite induced direction for non-tensor cells.
    """
    problems = []
    n = mesh.num_points
    for p in range(n):
        shape = mesh.shape(p)
        for q in mesh.cone(p):
            if mesh.shape(q).dim != shape.dim - 1:
                problems.append(f"point {p}: grading violation at cone point {q}")
            if p not in mesh.support(q):
                problems.append(f"point {p}: missing from support of {q}")
        for s in mesh.support(p):
            if p not in mesh.cone(s):
                problems.append(f"point {p}: support {s} does not have it in its cone")
    if problems:
        return problems
    for p in range(n):
        shape = mesh.shape(p)
        if shape.dim < 1:
            continue
        verts = cell_vertices(mesh, p)
        if len(set(verts)) != len(verts):
            problems.append(f"point {p}: repeated vertices {verts}")
            continue
        for j, (q, o) in enumerate(zip(mesh.cone(p), mesh.orientation(p))):
            seen = pt.arrange(cell_vertices(mesh, q), mesh.shape(q), o)
            want = tuple(verts[k] for k in pt.face_vertices(shape)[j])
            if seen != want:
                problems.append(f"point {p}: cone position {j} ({q}, ornt {o}) gives "
                                f"vertices {seen}, cell expects {want}")
        if shape.dim < 2:
            continue
        count: Counter = Counter()
        sign: Counter = Counter()
        for q, o in oriented_cone(mesh, p, 0):
            sub = oriented_cone(mesh, q, o)
            for pos, (r, ro) in enumerate(sub):
                count[r] += 1
                if mesh.shape(q).dim == 1:
                    sign[r] += -1 if pos == 0 else 1
                else:
                    sign[r] += 1 if ro == 0 else -1
        for r in sorted(count):
            if count[r] != 2:
                problems.append(f"point {p}: sub-face {r} appears {count[r]} times")
            elif not shape.is_tensor and sign[r] != 0:
                problems.append(f"point {p}: induced directions on {r} do not cancel")
    return problems


def filter_mesh(mesh, cells) -> tuple[Plex, dict[int, int]]:
    cells = sorted(set(cells))
    top = mesh.dim
    keep = set()
    for c in cells:
        if mesh.shape(c).dim != top:
            raise PlexError(f"point {c} is not a top-dimensional cell")
        keep.update(q for q, _ in closure(mesh, c))
    old = sorted(keep)
    new = {p: i for i, p in enumerate(old)}
    shapes = [mesh.shape(p) for p in old]
    cones = [[new[q] for q in mesh.cone(p)] for p in old]
    ornts = [mesh.orientation(p) for p in old]
    labels = {}
    for name in mesh.label_names():
        labels[name] = {new[p]: v for p in old if (v := mesh.get_label(name, p)) is not None}
    coords = None
    if getattr(mesh, "coordinate_dim", None) is not None:
        coords = Coordinates(mesh.coordinate_dim, {
            new[p]: mesh.vertex_coordinate(p) for p in old if mesh.shape(p) is Polytope.POINT})
    return Plex(shapes, cones, ornts, labels=labels, coordinates=coords), new
