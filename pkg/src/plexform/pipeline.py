"""Generate a mesh, run a chain of transforms over it, and report on the result."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import generators, io
from .catalog import EXTRUDABLE, ExtrudeOptions, extrude_spec, regular_refine_spec, tobox_spec
from .ephemeral import EphemeralMesh
from .geometry import total_measure
from .plex import Plex, filter_mesh
from .polytope import Polytope
from .transform import TransformError, apply_concrete


class PipelineError(ValueError):
    pass


@dataclass
class Stage:
    kind: str  # refine | tobox | extrude | filter | spec
    count: int = 1
    extrude: ExtrudeOptions | None = None
    label: str | None = None
    values: tuple = ()
    spec_path: str | None = None


@dataclass
class PipelineConfig:
    generator: str = "box"  # box | reference | file
    dim: int = 2
    faces: tuple = (1, 1)
    simplex: bool = False
    separate_marker: bool = False
    shape: str | None = None
    path: str | None = None
    stages: list = field(default_factory=list)
    ephemeral: bool = False
    out_native: str | None = None
    out_vtk: str | None = None
    out_tikz: str | None = None
    tikz_mode: str = "mesh"
    validate: bool = True


def generate(config: PipelineConfig) -> Plex:
    if config.generator == "box":
        return generators.box_mesh(config.dim, config.faces, config.simplex, config.separate_marker)
    if config.generator == "reference":
        return generators.reference_mesh(Polytope[config.shape.upper()])
    if config.generator == "file":
        return io.read_native(config.path)
    raise PipelineError(f"unknown generator {config.generator!r}")


def _check_stage(stage: Stage, dim: int, shapes: set) -> int:
    """Dimension after ``stage``; raises if the stage cannot apply."""
    if stage.kind == "refine":
        return dim
    if stage.kind == "tobox":
        bad = {s for s in shapes if s.dim == 3}
        if bad:
            raise PipelineError(f"box conversion of {', '.join(sorted(s.name for s in bad))} is not supported")
        return dim
    if stage.kind == "extrude":
        if stage.extrude.active_label is None:
            bad = {s for s in shapes if s not in EXTRUDABLE}
            if bad:
                raise PipelineError(f"cannot extrude {', '.join(sorted(s.name for s in bad))} cells")
            return dim + 1
        return dim  # restricted: the active closure is checked when the transform is built
    if stage.kind in ("filter", "spec"):
        return dim
    raise PipelineError(f"unknown stage {stage.kind!r}")


def check_stages(mesh, stages) -> None:
    dim = mesh.dim
    shapes = {mesh.shape(p) for p in range(mesh.num_points)}
    for stage in stages:
        new = _check_stage(stage, dim, shapes)
        if stage.kind != "refine" and stage.kind != "filter":
            shapes = set(Polytope)
        dim = new
        if dim > 3:
            raise PipelineError("stages would produce a mesh of dimension above 3")


def _spec_for(mesh, stage: Stage):
    if stage.kind == "refine":
        return regular_refine_spec()
    if stage.kind == "tobox":
        return tobox_spec()
    if stage.kind == "extrude":
        return extrude_spec(mesh, stage.extrude)
    if stage.kind == "spec":
        return io.load_spec(stage.spec_path)
    raise PipelineError(f"stage {stage.kind!r} is not a transform")  # pragma: no cover


def _filter(mesh, stage: Stage):
    if stage.label not in mesh.label_names():
        raise PipelineError(f"unknown label {stage.label!r}")
    cells = sorted({p for v in stage.values for p in mesh.label_stratum(stage.label, v)
                    if mesh.shape(p).dim == mesh.dim})
    if not cells:
        raise PipelineError(f"no cells carry {stage.label} in {list(stage.values)}")
    if not isinstance(mesh, Plex):
        mesh = mesh.materialize()
    return filter_mesh(mesh, cells)[0]


def run_stages(mesh, stages, ephemeral=False):
    check_stages(mesh, stages)
    for stage in stages:
        if stage.kind == "filter":
            mesh = _filter(mesh, stage)
            continue
        for _ in range(stage.count if stage.kind == "refine" else 1):
            spec = _spec_for(mesh, stage)
            try:
                mesh = EphemeralMesh(mesh, spec) if ephemeral else apply_concrete(mesh, spec)[0]
            except TransformError as exc:
                raise PipelineError(str(exc)) from exc
    return mesh


def statistics(mesh) -> dict:
    sizes = mesh.strata_sizes()
    shapes = Counter(mesh.shape(p).name for p in range(mesh.num_points))
    stats = {
        "points": mesh.num_points,
        "dim": mesh.dim,
        "strata": {str(d): n for d, n in sizes.items()},
        "euler": mesh.euler_characteristic(),
        "shapes": dict(sorted(shapes.items())),
    }
    if mesh.coordinate_dim is not None and mesh.dim >= 1:
        stats["measure"] = total_measure(mesh)
    return stats


def format_statistics(stats: dict) -> str:
    lines = [f"points {stats['points']}", f"dimension {stats['dim']}"]
    lines += [f"stratum {d}: {n}" for d, n in stats["strata"].items()]
    lines.append(f"euler characteristic {stats['euler']}")
    lines += [f"{name}: {n}" for name, n in stats["shapes"].items()]
    if "measure" in stats:
        lines.append(f"total measure {stats['measure']!r}")
    return "\n".join(lines)


@dataclass
class PipelineResult:
    mesh: object
    stats: dict
    problems: list


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    mesh = run_stages(generate(config), config.stages, config.ephemeral)
    problems = mesh.validate() if config.validate else []
    if config.out_native:
        io.write_native(mesh, config.out_native)
    if config.out_vtk:
        io.write_vtk(mesh, config.out_vtk)
    if config.out_tikz:
        io.write_tikz(mesh, config.out_tikz, config.tikz_mode)
    return PipelineResult(mesh, statistics(mesh), problems)
