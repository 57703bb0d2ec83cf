"""Moving-domain viscous shallow-water simulator.

The fluid footprint is a deforming triangulation whose boundary is the
zero-thickness contact line; mass conservation is stepped in logarithmic
(renormalized) form so the layer thickness stays positive, and the mesh
follows a harmonic extension of the boundary velocity.
"""

from .errors import (
    BoundaryCollision,
    ConfigError,
    FixedPointDiverged,
    MeshTangled,
    SimulationError,
    SolverError,
)
from .fields import NodalField
from .mesh import MeshQualityReport, TriMesh, build_disk_mesh, move_nodes, quality
from .scenarios import (
    ScenarioSpec,
    build_test1,
    build_test2,
    kinetic_energy,
    potential_energy,
    probe_boundary,
    total_mass,
)
from .stepper import SimState, StepReport, advance

__all__ = [
    "BoundaryCollision",
    "ConfigError",
    "FixedPointDiverged",
    "MeshQualityReport",
    "MeshTangled",
    "NodalField",
    "ScenarioSpec",
    "SimState",
    "SimulationError",
    "SolverError",
    "StepReport",
    "TriMesh",
    "advance",
    "build_disk_mesh",
    "build_test1",
    "build_test2",
    "kinetic_energy",
    "move_nodes",
    "potential_energy",
    "probe_boundary",
    "quality",
    "total_mass",
]

__version__ = "0.1.0"
