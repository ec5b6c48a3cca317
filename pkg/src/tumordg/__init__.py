"""Structure-preserving upwind DG discretization of a bounded phase-field tumor-growth model."""
from .mesh import Mesh, check_admissibility, generate_crisscross, read_mesh, write_mesh
from .model import MobilitySplit, ModelParams
from .newton import NewtonDiverged, NewtonSettings

__all__ = ["Mesh", "generate_crisscross", "check_admissibility", "read_mesh", "write_mesh",
           "ModelParams", "MobilitySplit", "NewtonSettings", "NewtonDiverged"]
__version__ = "0.1.0"
