"""Command line front end.

Stage flags run in the order given::

    plexform --dim 2 --faces 3,3 --extrude-layers 4 --refine 1 --stats

Exit codes: 0 success, 1 validation failure, 2 I/O error, 3 bad arguments.
"""
from __future__ import annotations

import argparse
import json
import sys

from .catalog import ExtrudeOptions
from .io import FormatError
from .pipeline import PipelineConfig, PipelineError, Stage, format_statistics, run_pipeline

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_ARGS = 0, 1, 2, 3


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _int_list(text):
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _filter_arg(text):
    name, sep, values = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected LABEL=V1,V2, got {text!r}")
    return name, _int_list(values)


class _StageAction(argparse.Action):
    """Append a stage to ``namespace.stages`` in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        stages = getattr(namespace, "stages", None) or []
        stages.append((self.dest, values))
        namespace.stages = stages


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plexform", description="Generate, transform, check and write meshes.")
    g = p.add_argument_group("input mesh")
    g.add_argument("--dim", type=int, default=2, help="box dimension (1, 2 or 3)")
    g.add_argument("--faces", type=_int_list, help="box faces per direction, e.g. 3,3")
    g.add_argument("--simplex", action="store_true", help="triangles instead of quads (2-D boxes)")
    g.add_argument("--separate-marker", action="store_true", help="one marker value per box side")
    g.add_argument("--reference", metavar="SHAPE", help="single reference cell, e.g. TETRAHEDRON")
    g.add_argument("--input", metavar="PATH", help="native mesh file")

    s = p.add_argument_group("stages (applied in command-line order)")
    s.set_defaults(stages=[])
    s.add_argument("--refine", type=_positive, action=_StageAction, metavar="N", help="N regular refinements")
    s.add_argument("--tobox", nargs=0, action=_StageAction, help="split simplices into boxes")
    s.add_argument("--extrude-layers", type=_positive, action=_StageAction, metavar="N",
                   dest="extrude", help="extrude with N layers")
    s.add_argument("--filter", type=_filter_arg, action=_StageAction, metavar="LABEL=V,...",
                   help="keep cells whose label value is listed")
    s.add_argument("--spec", action=_StageAction, metavar="PATH", help="apply a JSON transform spec")

    e = p.add_argument_group("extrusion options (apply to every extrusion stage)")
    e.add_argument("--thickness", type=float, default=1.0)
    e.add_argument("--tensor", action="store_true", help="tensor prism cells")
    e.add_argument("--symmetric", action="store_true", help="center the layers on the base")
    e.add_argument("--normal", type=_float_list, help="fixed extrusion direction, e.g. 0,0,1")
    e.add_argument("--computed-normals", action="store_true", help="average cell normals even on flat meshes")
    e.add_argument("--active-label", help="extrude only the closure of points with this label")
    e.add_argument("--active-values", type=_int_list, default=(), help="label values marking active points")

    o = p.add_argument_group("output")
    o.add_argument("--ephemeral", action="store_true", help="evaluate transforms lazily")
    o.add_argument("--out-native", metavar="PATH")
    o.add_argument("--out-vtk", metavar="PATH")
    o.add_argument("--out-tikz", metavar="PATH")
    o.add_argument("--tikz-mode", choices=("mesh", "hasse"), default="mesh")
    o.add_argument("--stats", action="store_true", help="print statistics")
    o.add_argument("--stats-json", action="store_true", help="print statistics as JSON")
    o.add_argument("--no-validate", action="store_true", help="skip the final validation")
    return p


def config_from_args(args) -> PipelineConfig:
    sources = [x for x in (args.reference, args.input, args.faces) if x is not None]
    if len(sources) > 1:
        raise PipelineError("give only one of --faces, --reference, --input")
    ext = None
    if any(kind == "extrude" for kind, _ in args.stages):
        if args.active_label is not None and not args.active_values:
            raise PipelineError("--active-label needs --active-values")
        ext = dict(thickness=args.thickness, tensor=args.tensor, symmetric=args.symmetric,
                   normal=args.normal, normal_mode="computed" if args.computed_normals else "default",
                   active_label=args.active_label, active_values=args.active_values)
    stages = []
    for kind, value in args.stages:
        if kind == "refine":
            stages.append(Stage("refine", count=value))
        elif kind == "tobox":
            stages.append(Stage("tobox"))
        elif kind == "extrude":
            stages.append(Stage("extrude", extrude=ExtrudeOptions(layers=value, **ext)))
        elif kind == "filter":
            stages.append(Stage("filter", label=value[0], values=value[1]))
        else:
            stages.append(Stage("spec", spec_path=value))
    if args.reference is not None:
        gen = dict(generator="reference", shape=args.reference)
    elif args.input is not None:
        gen = dict(generator="file", path=args.input)
    else:
        faces = args.faces or (1,) * args.dim
        if len(faces) != args.dim:
            raise PipelineError(f"--faces needs {args.dim} values for --dim {args.dim}")
        gen = dict(generator="box", dim=args.dim, faces=faces, simplex=args.simplex,
                   separate_marker=args.separate_marker)
    return PipelineConfig(**gen, stages=stages, ephemeral=args.ephemeral, out_native=args.out_native,
                          out_vtk=args.out_vtk, out_tikz=args.out_tikz, tikz_mode=args.tikz_mode,
                          validate=not args.no_validate)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except _ArgumentError as exc:
        print(f"plexform: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (PipelineError, ValueError) as exc:
        print(f"plexform: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    try:
        result = run_pipeline(config)
    except (OSError, FormatError) as exc:
        print(f"plexform: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PipelineError, NotImplementedError, ValueError, KeyError) as exc:
        print(f"plexform: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    if args.stats:
        print(format_statistics(result.stats))
    if args.stats_json:
        print(json.dumps(result.stats, sort_keys=True))
    if result.problems:
        for line in result.problems[:20]:
            print(f"plexform: invalid: {line}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
