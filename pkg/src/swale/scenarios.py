"""The two axisymmetric experiments and the scalar run diagnostics.

Both scenarios start from a lake at rest: the initial thickness equals the
rest depth profile sampled at the nodes, so the discrete pressure load is
identically zero and the constructed states are exact equilibria of the
stepper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fem
from .fields import NodalField
from .mesh import TriMesh, build_disk_mesh_variant
from .stepper import SimState, StepReport

TEST1_RADIUS = 130.0

# Second test: cubic rest-depth profile depth(r) = a r^3 + b r^2 + c r + d.
# The four coefficients follow from: unit depth at the center, zero depth at
# the initial rim, and a prescribed ridge (local depth minimum) just outside
# the rim. Beyond the ridge the depth turns positive again: the crown the
# fluid can invade.
TEST2_RIM_RADIUS = 130.0
TEST2_RIDGE_RADIUS = 160.0
TEST2_RIDGE_DEPTH = -0.1


@dataclass
class ScenarioSpec:
    """Everything needed to reproduce a run: geometry, physics, controls."""

    name: str
    topography: Callable[[np.ndarray], np.ndarray]  # radius -> rest depth (m)
    domain_radius: float
    mesh_variant: str | int = "M1"
    initial_surface_level: float = 0.0
    g: float = 1.0
    nu: float = 0.01
    cd: float = 0.01
    forcing_direction: tuple[float, float] = (1.0, 0.0)
    forcing_duration: float = 20.0
    dt: float = 0.05
    t_end: float = 200.0
    output_every: int = 10
    h_min: float = 1e-6
    fp_tol: float = 1e-8
    fp_max: int = 50
    relaxation: float = 1.0
    contact_line_kappa: float = 1.0
    contact_line_enabled: bool = True
    crown_radius: float | None = None  # outer zero crossing of the test-2 profile
    extras: dict = field(default_factory=dict)

    def sample_topography(self, points: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(np.asarray(points, dtype=np.float64), axis=1)
        return self.topography(r)


@dataclass
class DiagnosticsRow:
    t: float
    kinetic: float
    potential: float
    mass: float
    probe_radius: float
    probe_ground_level: float
    fp_iters: int
    min_area: float


def _rest_state(mesh: TriMesh, spec: ScenarioSpec) -> SimState:
    topo = spec.sample_topography(mesh.vertices)
    h = topo.copy()
    h[mesh.boundary_loop] = 0.0  # stored exact zero, kept for the whole run
    interior = mesh.interior_nodes
    h[interior] = np.maximum(h[interior], spec.h_min)
    probe = int(mesh.boundary_loop[np.argmax(mesh.vertices[mesh.boundary_loop, 0])])
    return SimState(
        mesh=mesh,
        u=NodalField(mesh, np.zeros((mesh.num_vertices, 2))),
        h=NodalField(mesh, h),
        topo=NodalField(mesh, topo),
        t=0.0,
        step=0,
        probe_node=probe,
    )


def build_test1(mesh_variant: str | int = "M1") -> tuple[ScenarioSpec, SimState]:
    """Parabolic bowl: depth 1 m at the center, zero at the 130 m rim.

    Constants: g = 1, nu = 0.01, and the step forcing of unit magnitude for
    the first 20 s along +x.
    """
    radius = TEST1_RADIUS

    def depth(r: np.ndarray) -> np.ndarray:
        return 1.0 - (r / radius) ** 2

    spec = ScenarioSpec(
        name="test1",
        topography=depth,
        domain_radius=radius,
        mesh_variant=mesh_variant,
    )
    mesh = build_disk_mesh_variant(radius, mesh_variant)
    return spec, _rest_state(mesh, spec)


def _test2_coefficients() -> np.ndarray:
    """Solve the cubic's linear constraint system; returns (a, b, c, d)."""
    r1, r2, hr = TEST2_RIM_RADIUS, TEST2_RIDGE_RADIUS, TEST2_RIDGE_DEPTH
    A = np.array(
        [
            [r1**3, r1**2, r1],  # depth 0 at the rim
            [r2**3, r2**2, r2],  # prescribed ridge depth
            [3 * r2**2, 2 * r2, 1.0],  # ridge is a depth extremum
        ]
    )
    b = np.array([-1.0, hr - 1.0, 0.0])
    a, bb, c = np.linalg.solve(A, b)
    return np.array([a, bb, c, 1.0])


def build_test2(mesh_target: str | int = "M1") -> tuple[ScenarioSpec, SimState]:
    """Cubic bowl with a ridge at the rim and an invadable outer crown."""
    coeff = _test2_coefficients()
    if not np.isfinite(coeff).all():
        raise ValueError("cubic topography constraints are inconsistent")

    def depth(r: np.ndarray) -> np.ndarray:
        return np.polyval(coeff, r)

    # Outer zero crossing (start of the crown) by bisection past the ridge.
    lo, hi = TEST2_RIDGE_RADIUS, 6.0 * TEST2_RIM_RADIUS
    if not (depth(np.array([lo]))[0] < 0.0 < depth(np.array([hi]))[0]):
        raise ValueError("cubic topography has no crown beyond the ridge")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if depth(np.array([mid]))[0] < 0.0:
            lo = mid
        else:
            hi = mid
    crown = 0.5 * (lo + hi)

    spec = ScenarioSpec(
        name="test2",
        topography=depth,
        domain_radius=TEST2_RIM_RADIUS,
        mesh_variant=mesh_target,
        crown_radius=crown,
    )
    mesh = build_disk_mesh_variant(TEST2_RIM_RADIUS, mesh_target)
    return spec, _rest_state(mesh, spec)


def kinetic_energy(state: SimState) -> float:
    """Lumped quadrature of h |u|^2 / 2 over the current domain."""
    w = fem.lumped_areas(state.mesh)
    speed2 = (state.u.values**2).sum(axis=1)
    return float(0.5 * np.sum(w * state.h.values * speed2))


def potential_energy(state: SimState, g: float = 1.0) -> float:
    """Lumped quadrature of g eta^2 / 2, zero at the rest state."""
    w = fem.lumped_areas(state.mesh)
    eta = state.h.values - state.topo.values
    return float(0.5 * g * np.sum(w * eta * eta))


def total_mass(state: SimState) -> float:
    """Lumped quadrature of the thickness over the current (moved) mesh."""
    w = fem.lumped_areas(state.mesh)
    return float(np.sum(w * state.h.values))


def probe_boundary(state: SimState, node_id: int) -> tuple[float, float]:
    """Current radius of a boundary node and the ground depth under it."""
    if node_id not in set(int(i) for i in state.mesh.boundary_loop):
        raise ValueError(f"node {node_id} is not on the boundary loop")
    pos = state.mesh.vertices[node_id]
    return float(np.hypot(pos[0], pos[1])), float(state.topo.values[node_id])


def diagnostics_row(state: SimState, report: StepReport | None, g: float) -> DiagnosticsRow:
    probe = state.probe_node
    radius, ground = probe_boundary(state, probe)
    if report is None:
        iters = 0
        min_area = float(state.mesh.signed_areas.min())
    else:
        iters = report.fixed_point_iterations
        min_area = report.mesh_quality.min_signed_area
    return DiagnosticsRow(
        t=state.t,
        kinetic=kinetic_energy(state),
        potential=potential_energy(state, g),
        mass=total_mass(state),
        probe_radius=radius,
        probe_ground_level=ground,
        fp_iters=iters,
        min_area=min_area,
    )
