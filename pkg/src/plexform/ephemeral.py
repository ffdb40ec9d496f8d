"""Lazily evaluated transformed meshes.

An :class:`EphemeralMesh` answers the same read queries as a
:class:`~plexform.plex.Plex` without storing the transformed topology.
Every query is computed from the source mesh and the production tables;
only the offset index (a single scan of the source) is kept.
"""
from __future__ import annotations

from collections import OrderedDict

from .geometry import transformed_coordinates
from .plex import Coordinates, Plex
from .plex import closure as _closure
from .plex import star as _star
from .plex import validate as _validate
from .transform import OffsetIndex, TransformSpec, apply_concrete, child_cone


class _CountingMesh:
    """Read proxy recording which source points a query touched."""

    def __init__(self, mesh):
        self._mesh = mesh
        self.visited: set[int] = set()

    def _touch(self, p):
        self.visited.add(p)
        return p

    def shape(self, p):
        return self._mesh.shape(self._touch(p))

    def cone(self, p):
        return self._mesh.cone(self._touch(p))

    def orientation(self, p):
        return self._mesh.orientation(self._touch(p))

    def support(self, p):
        return self._mesh.support(self._touch(p))

    def vertex_coordinate(self, p):
        return self._mesh.vertex_coordinate(self._touch(p))

    def __getattr__(self, name):
        return getattr(self._mesh, name)


class EphemeralMesh:
    """Transformed mesh evaluated on demand.

    Parameters
    ----------
    base : mesh
        Source mesh (a Plex or another EphemeralMesh).
    spec : TransformSpec
    cache_size : int
        Number of cone/support results kept in an LRU cache; 0 disables it.
    """

    def __init__(self, base, spec: TransformSpec, cache_size: int = 0):
        self.base = base
        self.spec = spec
        self.index = OffsetIndex(base, spec)
        self.cache_size = int(cache_size)
        self._cache: OrderedDict = OrderedDict()
        self._proxy: _CountingMesh | None = None
        self.last_query_cost = 0
        self._label_names = spec.output_label_names(base)
        self._coords = None

    # instrumentation ----------------------------------------------------
    def _source(self):
        return self._proxy if self._proxy is not None else self.base

    def _query(self, fn, *args):
        outer = self._proxy is None
        if outer:
            self._proxy = _CountingMesh(self.base)
        try:
            return fn(*args)
        finally:
            if outer:
                self.last_query_cost = len(self._proxy.visited)
                self._proxy = None

    def query_cost(self, name: str, *args) -> int:
        """Distinct source points read while answering one query."""
        saved, self.cache_size = self.cache_size, 0
        try:
            getattr(self, name)(*args)
        finally:
            self.cache_size = saved
        return self.last_query_cost

    def _cached(self, key, compute):
        if self.cache_size <= 0:
            return self._query(compute)
        if key in self._cache:
            self._cache.move_to_end(key)
            self.last_query_cost = 0
            return self._cache[key]
        value = self._query(compute)
        self._cache[key] = value
        if len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return value

    # mesh read interface ------------------------------------------------
    @property
    def num_points(self) -> int:
        return self.index.size

    @property
    def chart(self) -> range:
        return range(self.index.size)

    @property
    def dim(self) -> int:
        return self.index.dim

    def shape(self, q: int):
        return self.index.shape_of(q)

    def _cone_pair(self, q):
        p, shape, r = self.index.parent_of(q)
        child = self.spec.production(self.index.types[p]).child(shape, r)
        return child_cone(self._source(), self.spec, self.index, p, child)

    def cone(self, q: int) -> tuple:
        return self._cached(("cone", q), lambda: self._cone_pair(q))[0]

    def orientation(self, q: int) -> tuple:
        return self._cached(("cone", q), lambda: self._cone_pair(q))[1]

    def _support(self, q):
        p, _, _ = self.index.parent_of(q)
        src = self._source()
        out = set()
        candidates = _star(src, p)
        for s in candidates:
            for shape, r, child in self.spec.production(self.index.types[s]).replicas():
                if shape.dim != self.index.shape_of(q).dim + 1:
                    continue
                cone, _ = child_cone(src, self.spec, self.index, s, child)
                if q in cone:
                    out.add(self.index.child_number(s, shape, r))
        return tuple(sorted(out))

    def support(self, q: int) -> tuple:
        return self._cached(("support", q), lambda: self._support(q))

    def closure(self, q: int, orientation: int = 0):
        return self._query(lambda: _closure(self, q, orientation))

    def star(self, q: int):
        return self._query(lambda: _star(self, q))

    def stratum(self, depth: int) -> list[int]:
        return list(self.index.stratum(depth))

    def strata_sizes(self) -> dict[int, int]:
        return self.index.strata_sizes()

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in self.strata_sizes().items())

    def validate(self) -> list[str]:
        return _validate(self)

    # labels and coordinates ----------------------------------------------
    def label_names(self) -> list[str]:
        return list(self._label_names)

    def get_label(self, name: str, q: int):
        if name not in self._label_names:
            raise KeyError(f"unknown label {name!r}")
        p, shape, r = self.index.parent_of(q)
        return self.spec.child_labels(self.base, p, self.index.types[p], shape, r).get(name)

    def label_stratum(self, name: str, value: int) -> list[int]:
        return [q for q in self.chart if self.get_label(name, q) == value]

    def label_values(self, name: str) -> list[int]:
        return sorted({v for q in self.chart if (v := self.get_label(name, q)) is not None})

    @property
    def coordinate_dim(self):
        if self.spec.coordinate_rule is None or self.base.coordinate_dim is None:
            return None
        return self.spec.coordinate_rule.output_dim(self.base)

    def vertex_coordinate(self, q: int):
        if self.coordinate_dim is None:
            return None
        p, shape, r = self.index.parent_of(q)
        if shape.dim != 0:
            return None
        t = self.index.types[p]
        node = self.spec.production(t).child(shape, r).nodes[0]
        return self.spec.coordinate_rule.vertex(self.base, p, t, node)

    @property
    def coordinates(self):
        if self.coordinate_dim is None:
            return None
        if self._coords is None:
            self._coords = transformed_coordinates(self.base, self.spec, self.index)
        return self._coords

    # conversion ----------------------------------------------------------
    def materialize(self) -> Plex:
        """Concrete copy of this mesh, equal to running the transform eagerly."""
        n = self.num_points
        shapes = [self.shape(q) for q in range(n)]
        pairs = [self._cone_pair(q) for q in range(n)]
        labels = {name: {} for name in self._label_names}
        for q in range(n):
            p, shape, r = self.index.parent_of(q)
            for name, v in self.spec.child_labels(self.base, p, self.index.types[p], shape, r).items():
                labels[name][q] = v
        coords = None
        if self.coordinate_dim is not None:
            c = self.coordinates
            coords = Coordinates(c.dim, dict(sorted(c.values.items())))
        return Plex(shapes, [c for c, _ in pairs], [o for _, o in pairs], labels=labels,
                    coordinates=coords)

    def __repr__(self):
        return f"EphemeralMesh({self.spec.name} of {self.base!r}; {self.num_points} points)"


def apply_ephemeral(base, spec: TransformSpec, cache_size: int = 0) -> EphemeralMesh:
    return EphemeralMesh(base, spec, cache_size)


__all__ = ["EphemeralMesh", "apply_ephemeral", "apply_concrete"]
