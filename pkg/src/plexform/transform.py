"""Table-driven mesh transformation engine.

A transform assigns every source point a transformation type and, per type,
a :class:`Production`: the children it creates, and for each child a cone
described by :class:`ConePath` entries.  A cone path walks a number of cone
steps down from the parent, always in the parent's reference frame, and
then picks a replica of the requested shape produced by the point reached.

Children are numbered by :class:`OffsetIndex`, one contiguous block per
(parent type, child shape)::

    q = offset(t_p, t_q) + reduced(p) * N_r(t_p, t_q) + r
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass

from . import polytope as pt
from .plex import Coordinates, Plex, closure
from .polytope import Polytope

# A node is a point of the reference cell: the parent vertices it averages
# (sorted labels, repeated for weights) and an integer tag (the layer).
Node = tuple


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class TType:
    """Transformation type: a shape, optionally refined by a variant name."""
    shape: Polytope
    variant: str = ""

    @property
    def sort_key(self):
        return (self.shape.dim, self.shape.value, self.variant)

    def __str__(self):
        return self.shape.name + (f":{self.variant}" if self.variant else "")


@dataclass(frozen=True)
class ConePath:
    shape: Polytope
    indices: tuple
    replica: int

    @property
    def depth(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Child:
    shape: Polytope
    cone: tuple = ()
    ornt: tuple = ()
    nodes: tuple | None = None


class Production:
    """Ordered children of one transformation type."""

    def __init__(self, children):
        self.children = list(children)
        self._by_shape: dict[Polytope, list[Child]] = {}
        for c in self.children:
            self._by_shape.setdefault(c.shape, []).append(c)

    @property
    def targets(self) -> list[Polytope]:
        return sorted(self._by_shape, key=lambda s: (s.dim, s.value))

    @property
    def sizes(self) -> list[int]:
        return [len(self._by_shape[s]) for s in self.targets]

    def count(self, shape: Polytope) -> int:
        return len(self._by_shape.get(shape, ()))

    def child(self, shape: Polytope, r: int) -> Child:
        kids = self._by_shape.get(shape, ())
        if not 0 <= r < len(kids):
            raise TransformError(f"replica {r} of {shape.name} not produced (have {len(kids)})")
        return kids[r]

    def replicas(self):
        """Yield (shape, replica, child) grouped by target shape."""
        for s in self.targets:
            for r, c in enumerate(self._by_shape[s]):
                yield s, r, c

    def __eq__(self, other):
        return isinstance(other, Production) and self.children == other.children


class TransformSpec:
    """Productions and orientation actions per transformation type.

    ``actions[ttype][(o_p, child_shape)]`` lists, per replica ``r``, the pair
    ``(r_c, o_c)``: under parent orientation ``o_p`` replica ``r`` is
    realized by replica ``r_c`` seen through orientation ``o_c``.
    """

    def __init__(self, name, productions, actions=None, type_map=None, coordinate_rule=None,
                 inherit_labels=True, layer_label=None, layered_types=()):
        self.name = name
        self.productions: dict[TType, Production] = dict(productions)
        self.actions: dict[TType, dict] = dict(actions or {})
        self.type_map = type_map
        self.coordinate_rule = coordinate_rule
        self.inherit_labels = inherit_labels
        self.layer_label = layer_label
        self.layered_types = frozenset(layered_types)

    def type_of(self, mesh, p: int) -> TType:
        if self.type_map is not None:
            t = self.type_map.get(p)
            if t is not None:
                return t
        return TType(mesh.shape(p))

    def production(self, ttype: TType) -> Production:
        try:
            return self.productions[ttype]
        except KeyError:
            raise TransformError(f"{self.name}: no production for type {ttype}") from None

    def output_label_names(self, mesh) -> list[str]:
        names = list(mesh.label_names()) if self.inherit_labels else []
        if self.layer_label and self.layer_label not in names:
            names.append(self.layer_label)
        return sorted(names)

    def child_labels(self, mesh, p, ttype, shape, r) -> dict[str, int]:
        out = {}
        if self.inherit_labels:
            for name in mesh.label_names():
                v = mesh.get_label(name, p)
                if v is not None:
                    out[name] = v
        if self.layer_label and ttype in self.layered_types:
            out[self.layer_label] = r
        return out

    def __repr__(self):
        return f"TransformSpec({self.name!r}, types={[str(t) for t in self.productions]})"


def apply_action(spec: TransformSpec, ttype: TType, o_p: int, shape: Polytope, r: int, o: int = 0):
    """Replica and composed orientation of replica ``r`` under parent orientation ``o_p``."""
    if o_p == 0:
        return r, o
    try:
        rc, oc = spec.actions[ttype][(o_p, shape)][r]
    except KeyError:
        raise TransformError(f"{spec.name}: no action row for {ttype} orientation {o_p} "
                             f"producing {shape.name}") from None
    return rc, pt.compose(shape, oc, o)


@dataclass
class _Block:
    offset: int
    ttype: TType
    shape: Polytope
    replicas: int
    parents: int

    @property
    def end(self):
        return self.offset + self.replicas * self.parents


class OffsetIndex:
    """Numbering of the transformed chart, built by one scan of the source mesh."""

    def __init__(self, mesh, spec: TransformSpec):
        n = mesh.num_points
        self.types: list[TType] = [spec.type_of(mesh, p) for p in range(n)]
        self.reduced: list[int] = [0] * n
        self.members: dict[TType, list[int]] = {}
        for p, t in enumerate(self.types):
            group = self.members.setdefault(t, [])
            self.reduced[p] = len(group)
            group.append(p)
        prods = {t: spec.production(t) for t in self.members}
        shapes = {s for pr in prods.values() for s in pr.targets}
        top = max((s.dim for s in shapes), default=-1)
        self.dim = top
        # cells first, then vertices, then the remaining strata downward
        dims = [top, 0] + list(range(top - 1, 0, -1)) if top > 0 else ([0] if top == 0 else [])
        self.blocks: list[_Block] = []
        self.offsets: dict[tuple[TType, Polytope], int] = {}
        off = 0
        ordered_types = sorted(self.members, key=lambda t: t.sort_key)
        for d in dims:
            for shape in sorted((s for s in shapes if s.dim == d), key=lambda s: s.value):
                for t in ordered_types:
                    nr = prods[t].count(shape)
                    if nr:
                        b = _Block(off, t, shape, nr, len(self.members[t]))
                        self.blocks.append(b)
                        self.offsets[(t, shape)] = off
                        off = b.end
        self.size = off
        self._starts = [b.offset for b in self.blocks]
        self._nr = {(b.ttype, b.shape): b.replicas for b in self.blocks}

    def offset(self, ttype: TType, shape: Polytope) -> int:
        return self.offsets[(ttype, shape)]

    def child_number(self, p: int, shape: Polytope, r: int) -> int:
        t = self.types[p]
        nr = self._nr.get((t, shape), 0)
        if nr == 0:
            raise TransformError(f"point {p} of type {t} produces no {shape.name}")
        if not 0 <= r < nr:
            raise TransformError(f"replica {r} out of range [0, {nr}) for {shape.name} from {p}")
        return self.offsets[(t, shape)] + self.reduced[p] * nr + r

    def _block(self, q: int) -> _Block:
        if not 0 <= q < self.size:
            raise IndexError(f"point {q} outside transformed chart [0, {self.size})")
        return self.blocks[bisect.bisect_right(self._starts, q) - 1]

    def parent_of(self, q: int) -> tuple[int, Polytope, int]:
        b = self._block(q)
        rp, r = divmod(q - b.offset, b.replicas)
        return self.members[b.ttype][rp], b.shape, r

    def shape_of(self, q: int) -> Polytope:
        return self._block(q).shape

    def stratum(self, depth: int) -> range:
        blocks = [b for b in self.blocks if b.shape.dim == depth]
        if not blocks:
            return range(0)
        return range(blocks[0].offset, blocks[-1].end)

    def strata_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for b in self.blocks:
            sizes[b.shape.dim] = sizes.get(b.shape.dim, 0) + b.end - b.offset
        return dict(sorted(sizes.items()))


def build_index(mesh, spec: TransformSpec) -> OffsetIndex:
    return OffsetIndex(mesh, spec)


def child_number(index: OffsetIndex, p: int, shape: Polytope, r: int) -> int:
    return index.child_number(p, shape, r)


def parent_of(index: OffsetIndex, q: int):
    return index.parent_of(q)


def walk_cone_path(mesh, p: int, indices) -> tuple[int, int]:
    """Follow reference cone positions from ``p``; returns (point, effective orientation)."""
    cur, o = p, 0
    for i in indices:
        shape = mesh.shape(cur)
        cone, ornt = mesh.cone(cur), mesh.orientation(cur)
        if o == 0:
            j, flip = i, 0
        else:
            arr = pt.cone_arrangement(shape, o)
            j, flip = arr.cone_perm[i], arr.cone_flips[i]
        nxt = cone[j]
        o = pt.compose(mesh.shape(nxt), ornt[j], flip)
        cur = nxt
    return cur, o


def resolve_cone_path(mesh, spec: TransformSpec, index: OffsetIndex, p: int, path: ConePath,
                      orientation: int = 0) -> tuple[int, int]:
    src, o = walk_cone_path(mesh, p, path.indices)
    rc, oc = apply_action(spec, index.types[src], o, path.shape, path.replica, orientation)
    return index.child_number(src, path.shape, rc), oc


def child_cone(mesh, spec, index, p: int, child: Child) -> tuple[tuple, tuple]:
    pts, ors = [], []
    for path, o in zip(child.cone, child.ornt):
        q, qo = resolve_cone_path(mesh, spec, index, p, path, o)
        pts.append(q)
        ors.append(qo)
    return tuple(pts), tuple(ors)


def apply_concrete(mesh, spec: TransformSpec) -> tuple[Plex, OffsetIndex]:
    """Materialize the transformed mesh by running every production once."""
    index = OffsetIndex(mesh, spec)
    n = index.size
    shapes = [None] * n
    cones = [None] * n
    ornts = [None] * n
    label_names = spec.output_label_names(mesh)
    labels = {name: {} for name in label_names}
    rule = spec.coordinate_rule
    coords = None
    if rule is not None and mesh.coordinate_dim is not None:
        coords = Coordinates(rule.output_dim(mesh), {})
    for p in range(mesh.num_points):
        t = index.types[p]
        for shape, r, child in spec.production(t).replicas():
            q = index.child_number(p, shape, r)
            shapes[q] = shape
            try:
                cones[q], ornts[q] = child_cone(mesh, spec, index, p, child)
            except (TransformError, IndexError) as exc:
                raise TransformError(f"point {p} ({t}), child {shape.name} {r}: {exc}") from exc
            for name, v in spec.child_labels(mesh, p, t, shape, r).items():
                labels[name][q] = v
            if coords is not None and shape is Polytope.POINT:
                coords.values[q] = rule.vertex(mesh, p, t, child.nodes[0])
    out = Plex(shapes, cones, ornts, labels=labels, coordinates=coords)
    return out, index


# ---------------------------------------------------------------------------
# validation


def validate_spec(mesh, spec: TransformSpec) -> list[str]:
    """Check that every production resolves on ``mesh``; returns violations."""
    problems = []
    seen_types = set()
    for p in range(mesh.num_points):
        t = spec.type_of(mesh, p)
        if t not in spec.productions:
            problems.append(f"point {p}: no production for type {t}")
            continue
        seen_types.add(t)
        pshape = mesh.shape(p)
        for shape, r, child in spec.production(t).replicas():
            where = f"point {p} ({t}) child {shape.name} {r}"
            want = pt.cone_types(shape)
            if len(child.cone) != len(want) or len(child.ornt) != len(child.cone):
                problems.append(f"{where}: cone has {len(child.cone)} entries, "
                                f"{len(child.ornt)} orientations, shape needs {len(want)}")
                continue
            for k, (path, o) in enumerate(zip(child.cone, child.ornt)):
                if path.shape is not want[k]:
                    problems.append(f"{where}: cone entry {k} is {path.shape.name}, expected {want[k].name}")
                if path.depth > pshape.dim:
                    problems.append(f"{where}: cone path depth {path.depth} exceeds parent "
                                    f"dimension {pshape.dim} (not in the closure)")
                    continue
                try:
                    pt.check_orientation(path.shape, o)
                except pt.OrientationError as exc:
                    problems.append(f"{where}: {exc}")
                cur, ok = p, True
                for step, i in enumerate(path.indices):
                    if not 0 <= i < pt.cone_size(mesh.shape(cur)):
                        problems.append(f"{where}: cone index {i} at step {step} out of range")
                        ok = False
                        break
                    cur, _ = walk_cone_path(mesh, cur, (i,))
                if not ok:
                    continue
                src, so = walk_cone_path(mesh, p, path.indices)
                st = spec.type_of(mesh, src)
                if st not in spec.productions:
                    continue
                nr = spec.productions[st].count(path.shape)
                if not 0 <= path.replica < nr:
                    problems.append(f"{where}: replica {path.replica} of {path.shape.name} "
                                    f"not produced by {src} ({st})")
                elif so != 0 and (so, path.shape) not in spec.actions.get(st, {}):
                    problems.append(f"{where}: no action table row for {st} orientation {so}")
    for t in sorted(seen_types, key=lambda t: t.sort_key):
        problems += check_action_table(t.shape, spec.production(t), spec.actions.get(t, {}), str(t))
    return problems


def check_action_table(shape, production, table, name="") -> list[str]:
    problems = []
    for (o, cshape), row in sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        n = production.count(cshape)
        if len(row) != n or sorted(rc for rc, _ in row) != list(range(n)):
            problems.append(f"{name}: action row ({o}, {cshape.name}) is not a replica permutation")
            continue
        for rc, oc in row:
            try:
                pt.check_orientation(cshape, oc)
            except pt.OrientationError as exc:
                problems.append(f"{name}: action row ({o}, {cshape.name}): {exc}")
        if o == 0 and any(rc != r or oc != 0 for r, (rc, oc) in enumerate(row)):
            problems.append(f"{name}: identity orientation row ({cshape.name}) is not the identity")
    return problems


# ---------------------------------------------------------------------------
# derivation of tables from reference-cell geometry


def map_nodes(nodes, labels) -> tuple:
    """Relabel node vertex labels through ``labels`` (local label -> parent label)."""
    return tuple((tuple(sorted(labels[x] for x in verts)), tag) for verts, tag in nodes)


def derive_action_table(shape: Polytope, production: Production, partial: bool = False) -> dict:
    """Replica/orientation action of every orientation of ``shape`` on its children.

    Each child of the parent arranged by ``o_p`` is matched, by node set,
    against the canonical children; the alignment of node order gives ``o_c``.
    With ``partial``, rows whose children lack the needed symmetry (prisms
    over a reflected base) are left out instead of raising.
    """
    table = {}
    for o in pt.orientations(shape):
        perm = pt.vertex_arrangement(shape, o)
        for cshape in production.targets:
            kids = [production.child(cshape, r) for r in range(production.count(cshape))]
            if any(k.nodes is None for k in kids):
                raise TransformError(f"{cshape.name} children of {shape.name} carry no nodes")
            keys = [frozenset(k.nodes) for k in kids]
            if len(set(keys)) != len(keys):
                raise TransformError(f"ambiguous {cshape.name} children of {shape.name}")
            row = []
            try:
                for k in kids:
                    mapped = map_nodes(k.nodes, perm)
                    rc = keys.index(frozenset(mapped)) if frozenset(mapped) in keys else None
                    if rc is None:
                        raise TransformError(f"{shape.name} orientation {o} maps a {cshape.name} "
                                             f"child outside the production")
                    oc = pt.orientation_between(cshape, kids[rc].nodes, mapped)
                    if oc is None:
                        raise TransformError(f"no {cshape.name} orientation aligns child {rc}")
                    row.append((rc, oc))
            except TransformError:
                if partial:
                    continue
                raise
            table[(o, cshape)] = tuple(row)
    return table


def _reference_paths(shape: Polytope):
    """(indices, vertex labels, shape) for every cone walk, shortest first."""
    level = [((), tuple(range(pt.num_vertices(shape))), shape)]
    while level:
        yield from level
        nxt = []
        for idx, labels, s in level:
            for i, (fs, tup) in enumerate(zip(pt.cone_types(s), pt.face_vertices(s))):
                nxt.append((idx + (i,), tuple(labels[k] for k in tup), fs))
        level = nxt


def _find_source(shape, fshape, fnodes, own, face_productions):
    target = frozenset(fnodes)
    for idx, labels, s in _reference_paths(shape):
        kids = own.get(fshape, []) if not idx else (
            [c for c in face_productions[s].children if c.shape is fshape] if s in face_productions else [])
        for r, kid in enumerate(kids):
            mapped = map_nodes(kid.nodes, labels)
            if frozenset(mapped) == target:
                o = pt.orientation_between(fshape, mapped, fnodes)
                if o is not None:
                    return ConePath(fshape, idx, r), o
    return None


def derive_production(shape: Polytope, cells, face_productions, interior=()) -> Production:
    """Production of ``shape`` from children given only by their nodes.

    ``cells`` and ``interior`` are (child shape, nodes) pairs.  Faces of
    children not produced by a point of the boundary closure, nor listed in
    ``interior``, become new interior children in order of discovery.  Every
    cone entry is then located by the shortest cone path (lowest indices
    first) whose produced child has the same node set, with the orientation
    aligning the node order.
    """
    own: dict[Polytope, list[Child]] = {}
    order: list[Child] = []

    def add(cshape, nodes):
        c = Child(cshape, nodes=tuple(nodes))
        own.setdefault(cshape, []).append(c)
        order.append(c)

    for cshape, nodes in list(cells) + list(interior):
        add(cshape, nodes)
    for d in range(shape.dim, 0, -1):
        for kid in [c for c in order if c.shape.dim == d]:
            for fshape, tup in zip(pt.cone_types(kid.shape), pt.face_vertices(kid.shape)):
                fnodes = tuple(kid.nodes[k] for k in tup)
                if _find_source(shape, fshape, fnodes, own, face_productions) is None:
                    add(fshape, fnodes)
    done = []
    for kid in order:
        cone, ornt = [], []
        for fshape, tup in zip(pt.cone_types(kid.shape), pt.face_vertices(kid.shape)):
            fnodes = tuple(kid.nodes[k] for k in tup)
            found = _find_source(shape, fshape, fnodes, own, face_productions)
            if found is None:  # pragma: no cover - discovery guarantees a source
                raise TransformError(f"cannot locate face {fnodes} of {kid.shape.name}")
            cone.append(found[0])
            ornt.append(found[1])
        done.append(Child(kid.shape, tuple(cone), tuple(ornt), kid.nodes))
    return Production(done)


def vertex_nodes(shape: Polytope, tag: int = 0) -> tuple:
    return tuple(((k,), tag) for k in range(pt.num_vertices(shape)))


def identity_productions(shapes=None) -> dict[Polytope, Production]:
    """One copy of every point, wired to the replica-0 copies of its cone."""
    shapes = list(Polytope) if shapes is None else list(shapes)
    out: dict[Polytope, Production] = {}
    for s in sorted(shapes, key=lambda s: s.dim):
        faces = {f: out[f] for f in pt.cone_types(s) if f in out}
        out[s] = derive_production(s, [(s, vertex_nodes(s))], faces)
    return out


def identity_spec() -> TransformSpec:
    from .geometry import BarycentricRule

    prods = identity_productions()
    return TransformSpec(
        "identity",
        {TType(s): p for s, p in prods.items()},
        {TType(s): derive_action_table(s, p) for s, p in prods.items()},
        coordinate_rule=BarycentricRule())


def closure_types(mesh, points) -> set[int]:
    out = set()
    for p in points:
        out.update(q for q, _ in closure(mesh, p))
    return out


def all_paths(shape: Polytope, max_depth: int):
    """Every cone-index tuple of length <= ``max_depth`` from ``shape``."""
    for idx, _, _ in _reference_paths(shape):
        if len(idx) > max_depth:
            return
        yield idx

