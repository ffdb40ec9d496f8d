"""Table-driven transformations of unstructured meshes stored as Hasse diagrams."""
from .catalog import ExtrudeOptions, extrude_spec, regular_refine_spec, tobox_spec
from .ephemeral import EphemeralMesh
from .generators import box_boundary_mesh, box_mesh, doublet, interpolate, reference_mesh
from .plex import Plex, PlexError
from .polytope import Polytope
from .transform import OffsetIndex, TransformError, TransformSpec, TType, apply_concrete

__all__ = [
    "EphemeralMesh", "ExtrudeOptions", "OffsetIndex", "Plex", "PlexError", "Polytope",
    "TType", "TransformError", "TransformSpec", "apply_concrete", "box_boundary_mesh",
    "box_mesh", "doublet", "extrude_spec", "interpolate", "reference_mesh",
    "regular_refine_spec", "tobox_spec",
]
__version__ = "0.1.0"
