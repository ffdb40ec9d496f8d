"""Readers and writers: native text meshes, legacy VTK, TikZ, and JSON transform specs.

Native format (UTF-8, one record per line)::

    plexform-mesh 1
    dim <d>
    points <n>
    <p> <SHAPE> <cone ...> | <orientations ...>
    labels <count>
    label <name> <entries>
    <p> <value>
    coordinates <dim> <entries>
    <p> <x> [<y> [<z>]]
    end

``coordinates`` is ``coordinates none`` for meshes without an embedding.
Floats are written with ``repr`` so the round trip is exact.
"""
from __future__ import annotations

import json
import warnings

from .plex import Coordinates, Plex, cell_vertices
from .polytope import Polytope
from .transform import (Child, ConePath, Production, TransformError, TransformSpec, TType,
                        derive_action_table, derive_production)

P = Polytope
FORMAT_VERSION = 1
MAGIC = "plexform-mesh"


class FormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# native


def dumps_native(mesh) -> str:
    out = [f"{MAGIC} {FORMAT_VERSION}", f"dim {mesh.dim}", f"points {mesh.num_points}"]
    for p in range(mesh.num_points):
        cone = " ".join(str(q) for q in mesh.cone(p))
        ornt = " ".join(str(o) for o in mesh.orientation(p))
        out.append(" ".join(x for x in (str(p), mesh.shape(p).name, cone, "|", ornt) if x))
    names = mesh.label_names()
    out.append(f"labels {len(names)}")
    for name in names:
        if not name or any(c.isspace() for c in name):
            raise FormatError(f"label name {name!r} cannot be written")
        entries = sorted((p, v) for p in range(mesh.num_points)
                         if (v := mesh.get_label(name, p)) is not None)
        out.append(f"label {name} {len(entries)}")
        out += [f"{p} {v}" for p, v in entries]
    coords = mesh.coordinates
    if coords is None:
        out.append("coordinates none")
    else:
        items = sorted(coords.values.items())
        out.append(f"coordinates {coords.dim} {len(items)}")
        out += [" ".join([str(p)] + [repr(float(x)) for x in x_]) for p, x_ in items]
    out.append("end")
    return "\n".join(out) + "\n"


def write_native(mesh, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_native(mesh))


class _Lines:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.lines):
            raise FormatError(f"unexpected end of file, expected {what}", self.pos + 1)
        self.pos += 1
        return self.lines[self.pos - 1].split(), self.pos

    def keyword(self, word, nargs):
        toks, ln = self.next(f"'{word}'")
        if not toks or toks[0] != word or len(toks) != nargs + 1:
            raise FormatError(f"expected '{word}' with {nargs} field(s), got {' '.join(toks)!r}", ln)
        return toks[1:], ln


def _int(tok, ln):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", ln) from None


def loads_native(text: str) -> Plex:
    src = _Lines(text)
    toks, ln = src.next("header")
    if len(toks) != 2 or toks[0] != MAGIC:
        raise FormatError("not a native mesh file", ln)
    if _int(toks[1], ln) != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {toks[1]} (reader is {FORMAT_VERSION})", ln)
    (dim,), ln = src.keyword("dim", 1)
    dim = _int(dim, ln)
    (n,), ln = src.keyword("points", 1)
    n = _int(n, ln)
    shapes, cones, ornts = [], [], []
    for p in range(n):
        toks, ln = src.next(f"point record {p}")
        if len(toks) < 3 or "|" not in toks:
            raise FormatError("malformed point record", ln)
        if _int(toks[0], ln) != p:
            raise FormatError(f"expected point {p}, got {toks[0]}", ln)
        try:
            shape = P[toks[1]]
        except KeyError:
            raise FormatError(f"unknown shape {toks[1]!r}", ln) from None
        bar = toks.index("|")
        cones.append(tuple(_int(t, ln) for t in toks[2:bar]))
        ornts.append(tuple(_int(t, ln) for t in toks[bar + 1:]))
        shapes.append(shape)
    (count,), ln = src.keyword("labels", 1)
    labels = {}
    for _ in range(_int(count, ln)):
        (name, entries), ln = src.keyword("label", 2)
        values = {}
        for _ in range(_int(entries, ln)):
            toks, ln = src.next(f"entry of label {name}")
            if len(toks) != 2:
                raise FormatError("malformed label entry", ln)
            values[_int(toks[0], ln)] = _int(toks[1], ln)
        labels[name] = values
    toks, ln = src.next("'coordinates'")
    coords = None
    if toks == ["coordinates", "none"]:
        pass
    elif len(toks) == 3 and toks[0] == "coordinates":
        cdim, entries = _int(toks[1], ln), _int(toks[2], ln)
        values = {}
        for _ in range(entries):
            row, ln = src.next("coordinate entry")
            if len(row) != cdim + 1:
                raise FormatError(f"expected {cdim} coordinates", ln)
            try:
                values[_int(row[0], ln)] = tuple(float(x) for x in row[1:])
            except ValueError:
                raise FormatError("malformed coordinate", ln) from None
        coords = Coordinates(cdim, values)
    else:
        raise FormatError("malformed coordinates header", ln)
    toks, ln = src.next("'end'")
    if toks != ["end"]:
        raise FormatError("expected 'end'", ln)
    try:
        mesh = Plex(shapes, cones, ornts, labels=labels, coordinates=coords)
    except ValueError as exc:
        raise FormatError(f"invalid mesh: {exc}") from exc
    if n and mesh.dim != dim:
        raise FormatError(f"header dimension {dim} does not match mesh dimension {mesh.dim}")
    return mesh


def read_native(path) -> Plex:
    with open(path, encoding="utf-8") as fh:
        return loads_native(fh.read())


# ---------------------------------------------------------------------------
# legacy VTK

VTK_IDS = {
    P.POINT: 1, P.SEGMENT: 3, P.TRIANGLE: 5, P.QUADRILATERAL: 9,
    P.TETRAHEDRON: 10, P.HEXAHEDRON: 12, P.TRI_PRISM: 13,
}
# tensor cells are written as their standard counterparts
VTK_TENSOR = {
    P.POINT_PRISM_TENSOR: P.SEGMENT, P.SEG_PRISM_TENSOR: P.QUADRILATERAL,
    P.TRI_PRISM_TENSOR: P.TRI_PRISM, P.QUAD_PRISM_TENSOR: P.HEXAHEDRON,
}
# canonical vertex order -> VTK vertex order
_VTK_ORDER = {
    P.TETRAHEDRON: (0, 2, 1, 3),
    P.SEG_PRISM_TENSOR: (0, 1, 3, 2),
    P.TRI_PRISM: (0, 2, 1, 3, 5, 4),
    P.TRI_PRISM_TENSOR: (0, 2, 1, 3, 5, 4),
}


def dumps_vtk(mesh, title="plexform mesh") -> str:
    if mesh.coordinates is None:
        raise FormatError("VTK output needs coordinates")
    verts = list(mesh.stratum(0))
    vid = {v: i for i, v in enumerate(verts)}
    cdim = mesh.coordinate_dim
    out = ["# vtk DataFile Version 2.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID",
           f"POINTS {len(verts)} double"]
    for v in verts:
        x = list(mesh.vertex_coordinate(v)) + [0.0] * (3 - cdim)
        out.append(" ".join(repr(float(c)) for c in x[:3]))
    cells = list(mesh.stratum(mesh.dim))
    rows, types, mapped = [], [], set()
    for c in cells:
        shape = mesh.shape(c)
        kind = VTK_TENSOR.get(shape, shape)
        if kind not in VTK_IDS:
            raise FormatError(f"no VTK cell type for {shape.name}")
        if shape in VTK_TENSOR:
            mapped.add(shape.name)
        cv = cell_vertices(mesh, c)
        order = _VTK_ORDER.get(shape, range(len(cv)))
        rows.append([len(cv)] + [vid[cv[k]] for k in order])
        types.append(VTK_IDS[kind])
    if mapped:
        warnings.warn(f"tensor cells written as standard VTK cells: {', '.join(sorted(mapped))}",
                      RuntimeWarning, stacklevel=2)
    out.append(f"CELLS {len(rows)} {sum(len(r) for r in rows)}")
    out += [" ".join(str(x) for x in r) for r in rows]
    out.append(f"CELL_TYPES {len(types)}")
    out += [str(t) for t in types]
    return "\n".join(out) + "\n"


def write_vtk(mesh, path) -> None:
    text = dumps_vtk(mesh)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# TikZ


def dumps_tikz(mesh, mode="mesh") -> str:
    """TikZ picture: a 2-D mesh drawing or a Hasse diagram with one row per stratum."""
    lines = [r"\begin{tikzpicture}"]
    if mode == "hasse":
        for d in range(mesh.dim + 1):
            row = list(mesh.stratum(d))
            for i, p in enumerate(row):
                x = i - (len(row) - 1) / 2
                lines.append(rf"\node[draw,circle] (p{p}) at ({x:g},{2 * d}) {{{p}}};")
        for p in range(mesh.num_points):
            for q in mesh.cone(p):
                lines.append(rf"\draw[->] (p{p}) -- (p{q});")
    elif mode == "mesh":
        if mesh.coordinates is None:
            raise FormatError("mesh drawing needs coordinates")
        if mesh.dim > 2 or mesh.coordinate_dim > 2:
            raise FormatError("mesh drawing supports 1-D and 2-D meshes only")

        def at(v):
            x = list(mesh.vertex_coordinate(v)) + [0.0]
            return f"({x[0]!r},{x[1]!r})"
        for e in mesh.stratum(1):
            a, b = cell_vertices(mesh, e)
            lines.append(rf"\draw {at(a)} -- {at(b)};")
        for v in mesh.stratum(0):
            lines.append(rf"\node[circle,fill,inner sep=1pt,label=above:{v}] at {at(v)} {{}};")
    else:
        raise ValueError(f"unknown TikZ mode {mode!r}")
    lines.append(r"\end{tikzpicture}")
    return "\n".join(lines) + "\n"


def write_tikz(mesh, path, mode="mesh") -> None:
    text = dumps_tikz(mesh, mode)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# transform specs as JSON


def _nodes_from_json(raw):
    return tuple((tuple(sorted(int(x) for x in verts)), int(tag)) for verts, tag in raw)


def spec_from_dict(data: dict) -> TransformSpec:
    """Build a spec from its declarative form.

    ``{"name": str, "coordinates": "barycentric" | null, "productions": [
    {"shape": "TRIANGLE", "variant": "", "children": [{"shape": ..., "nodes":
    [[[0, 1], 0], ...], "cone": [{"shape": ..., "path": [...], "replica": r}],
    "ornt": [...]}]}]}``.  Children without a ``cone`` have their cones
    located from the nodes; action tables are always derived from the nodes.
    """
    from .geometry import BarycentricRule

    try:
        name = data.get("name", "custom")
        entries = sorted(data["productions"], key=lambda e: P[e["shape"]].dim)
        by_shape: dict[Polytope, Production] = {}
        prods, actions = {}, {}
        for entry in entries:
            shape = P[entry["shape"]]
            ttype = TType(shape, entry.get("variant", ""))
            kids = entry["children"]
            if all("cone" in k for k in kids):
                prod = Production([
                    Child(P[k["shape"]],
                          tuple(ConePath(P[c["shape"]], tuple(c["path"]), int(c["replica"])) for c in k["cone"]),
                          tuple(int(o) for o in k["ornt"]),
                          _nodes_from_json(k["nodes"]) if "nodes" in k else None)
                    for k in kids])
            else:
                prod = derive_production(
                    shape, [(P[k["shape"]], _nodes_from_json(k["nodes"])) for k in kids], by_shape)
            if not ttype.variant:
                by_shape[shape] = prod
            prods[ttype] = prod
            if all(c.nodes is not None for c in prod.children):
                actions[ttype] = derive_action_table(shape, prod, partial=True)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TransformError):
            raise
        raise FormatError(f"malformed transform spec: {exc!r}") from exc
    rule = BarycentricRule() if data.get("coordinates", "barycentric") == "barycentric" else None
    return TransformSpec(name, prods, actions, coordinate_rule=rule,
                         inherit_labels=bool(data.get("inherit_labels", True)))


def spec_to_dict(spec: TransformSpec) -> dict:
    prods = []
    for t in sorted(spec.productions, key=lambda t: t.sort_key):
        kids = []
        for c in spec.productions[t].children:
            k = {"shape": c.shape.name,
                 "cone": [{"shape": cp.shape.name, "path": list(cp.indices), "replica": cp.replica}
                          for cp in c.cone],
                 "ornt": list(c.ornt)}
            if c.nodes is not None:
                k["nodes"] = [[list(v), tag] for v, tag in c.nodes]
            kids.append(k)
        prods.append({"shape": t.shape.name, "variant": t.variant, "children": kids})
    return {"name": spec.name,
            "coordinates": "barycentric" if spec.coordinate_rule is not None else None,
            "inherit_labels": spec.inherit_labels,
            "productions": prods}


def load_spec(path) -> TransformSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    return spec_from_dict(data)


def save_spec(spec: TransformSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=1)
        fh.write("\n")

