"""One full ALE time step of the moving-domain shallow-water scheme.

Each step works on the current mesh: the mesh velocity is the harmonic
extension of the fluid velocity trace, characteristic feet are traced with
the relative velocity and pulled back, then a fixed-point loop couples the
renormalized (logarithmic) continuity update with the implicit momentum
solve. Only after the coupled solve converges is the mesh moved and the
topography re-sampled at the new node positions.

Thickness is pinned to exactly zero on the boundary for the whole run and
floored at h_min in the interior; the exponential continuity update cannot
produce a negative thickness at any time step size.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from . import fem
from .contact import BoundaryOperator, boundary_system_terms, build_boundary_operator
from .errors import BoundaryCollision, FixedPointDiverged, MeshTangled
from .fields import NodalField
from .mesh import MeshQualityReport, TriMesh, boundary_self_intersects, move_nodes, quality
from .transport import locate_feet, pullback

if TYPE_CHECKING:
    from .scenarios import ScenarioSpec


@dataclass
class SimState:
    """The single evolving object: mesh, fields, clock, and probe."""

    mesh: TriMesh
    u: NodalField  # depth-averaged velocity, (V, 2)
    h: NodalField  # layer thickness, exactly 0 on the boundary
    topo: NodalField  # rest depth H sampled at current node positions
    t: float
    step: int
    probe_node: int = -1

    def check_invariants(self, h_min: float) -> None:
        b = self.mesh.boundary_loop
        hb = self.h.values[b]
        if np.any(hb != 0.0):
            raise AssertionError("boundary thickness must be stored as exact zero")
        hi = self.h.values[self.mesh.interior_nodes]
        if hi.size and hi.min() < h_min:
            raise AssertionError(f"interior thickness {hi.min():.3e} below floor {h_min:.3e}")


@dataclass
class StepReport:
    fixed_point_iterations: int
    momentum_residual: float
    continuity_update_max: float
    mesh_quality: MeshQualityReport


def forcing(t: float, spec: "ScenarioSpec") -> np.ndarray:
    """Body force at time t: the forcing direction while 0 < t < duration."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if 0.0 < t < spec.forcing_duration:
        return np.asarray(spec.forcing_direction, dtype=np.float64)
    return np.zeros(2)


def continuity_update(
    h_tilde: NodalField, u_iter: NodalField, dt: float, h_min: float = 1e-6
) -> NodalField:
    """Renormalized mass update: h = h_tilde * exp(-dt div u), floored at h_min.

    Boundary nodes stay exactly zero; the logarithmic form never sees them.
    """
    mesh = h_tilde.mesh
    div = fem.project_divergence(mesh, u_iter).values
    if not np.isfinite(div).all():
        raise ValueError("divergence of the velocity iterate is not finite")
    h_new = h_tilde.values * np.exp(-dt * div)
    interior = mesh.interior_nodes
    h_out = np.zeros(mesh.num_vertices)
    h_out[interior] = np.maximum(h_new[interior], h_min)
    return NodalField(mesh, h_out)


def _scatter_boundary_block(mesh: TriMesh, block: np.ndarray):
    """Lift a (B, B) boundary-node block to a (V, V) sparse operator."""
    import scipy.sparse as sp

    loop = mesh.boundary_loop
    b = loop.shape[0]
    rows = np.repeat(loop, b)
    cols = np.tile(loop, b)
    n = mesh.num_vertices
    return sp.coo_matrix((block.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def momentum_solve(
    mesh: TriMesh,
    u_tilde: NodalField,
    h_new: NodalField,
    topo: NodalField,
    speed_prev: NodalField,
    force: np.ndarray,
    dt: float,
    g: float,
    nu: float,
    cd: float,
    kappa: float = 0.0,
    boundary_op: BoundaryOperator | None = None,
    tol: float = fem.DEFAULT_SOLVE_TOL,
) -> NodalField:
    """Single implicit momentum solve on the current mesh.

    Assembles (M + dt nu K + dt cd D + kappa/dt G) U = M (u_tilde + dt f)
    - dt g P(eta) + kappa/dt G u_tilde, with eta = h_new - topo and the same
    scalar operator applied to both velocity components.
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    lhs, rhs = _momentum_system(
        mesh, u_tilde, speed_prev, force, dt, nu, cd, kappa, boundary_op
    )
    eta = NodalField(mesh, h_new.values - topo.values)
    rhs = rhs - dt * g * fem.assemble_grad_pressure(mesh, eta)
    sol = fem.SpdFactor(lhs).solve(rhs, tol, context="momentum")
    return NodalField(mesh, sol)


def _momentum_system(mesh, u_tilde, speed_prev, force, dt, nu, cd, kappa, boundary_op):
    """Matrix and the eta-independent part of the right-hand side."""
    M = fem.assemble_mass(mesh)
    lhs = M.copy()
    if dt > 0 and nu > 0:
        lhs = lhs + (dt * nu) * fem.assemble_stiffness(mesh)
    if dt > 0 and cd > 0:
        lhs = lhs + (dt * cd) * fem.assemble_drag(mesh, speed_prev)
    rhs = M @ (u_tilde.values + dt * force[None, :])
    if kappa > 0 and dt > 0 and boundary_op is not None:
        loop = mesh.boundary_loop
        lhs_block, rhs_block = boundary_system_terms(
            boundary_op, u_tilde.values[loop], dt
        )
        lhs = lhs + kappa * _scatter_boundary_block(mesh, lhs_block)
        rhs = rhs.copy()
        rhs[loop] += kappa * rhs_block
    return lhs.tocsr(), rhs


def _ale_fields(state: SimState, spec: "ScenarioSpec"):
    """Mesh velocity and the pulled-back velocity/thickness on the current mesh."""
    mesh = state.mesh
    trace = state.u.values[mesh.boundary_loop]
    c = fem.solve_laplace_dirichlet(mesh, trace)
    rel = state.u.values - c.values
    feet_pts = mesh.vertices - spec.dt * rel
    feet = locate_feet(mesh, feet_pts, mesh.vertex_incident_triangle)
    u_tilde = pullback(mesh, state.u, feet)
    h_tilde_raw = pullback(mesh, state.h, feet)
    h_vals = np.zeros(mesh.num_vertices)
    interior = mesh.interior_nodes
    h_vals[interior] = np.maximum(h_tilde_raw.values[interior], spec.h_min)
    h_tilde = NodalField(mesh, h_vals)
    return c, u_tilde, h_tilde


def _lumped_norm(weights: np.ndarray, values: np.ndarray) -> float:
    return float(np.sqrt((weights[:, None] * values * values).sum()))


def _fixed_point(
    mesh: TriMesh,
    u_tilde: NodalField,
    h_tilde: NodalField,
    topo: NodalField,
    t_next: float,
    spec: "ScenarioSpec",
    boundary_op: BoundaryOperator | None,
):
    """Picard coupling of the continuity update and the momentum solve."""
    dt = spec.dt
    speed_prev = NodalField(mesh, np.linalg.norm(u_tilde.values, axis=1))
    force = forcing(t_next, spec)
    kappa = spec.contact_line_kappa if spec.contact_line_enabled else 0.0
    lhs, rhs_fixed = _momentum_system(
        mesh, u_tilde, speed_prev, force, dt, spec.nu, spec.cd, kappa, boundary_op
    )
    factor = fem.SpdFactor(lhs)
    weights = fem.lumped_areas(mesh)

    u_k = u_tilde.values
    h_k = h_tilde
    cont_max = 0.0
    for it in range(1, spec.fp_max + 1):
        h_k = continuity_update(h_tilde, NodalField(mesh, u_k), dt, spec.h_min)
        eta = NodalField(mesh, h_k.values - topo.values)
        rhs = rhs_fixed - dt * spec.g * fem.assemble_grad_pressure(mesh, eta)
        u_next = factor.solve(rhs, context="momentum")
        if spec.relaxation != 1.0:
            u_next = (1.0 - spec.relaxation) * u_k + spec.relaxation * u_next
        change = _lumped_norm(weights, u_next - u_k)
        scale = max(_lumped_norm(weights, u_k), 1e-14)
        u_k = u_next
        if change / scale < spec.fp_tol:
            div = fem.project_divergence(mesh, NodalField(mesh, u_k)).values
            cont_max = float(np.abs(dt * div[mesh.interior_nodes]).max()) if mesh.interior_nodes.size else 0.0
            resid = float(
                np.linalg.norm(lhs @ u_k - rhs) / max(np.linalg.norm(rhs), 1e-300)
            )
            return NodalField(mesh, u_k), h_k, it, resid, cont_max
    raise FixedPointDiverged(spec.fp_max, change / scale)


def fixed_point_step(state: SimState, spec: "ScenarioSpec"):
    """Converged new velocity and thickness, still on the pre-move mesh."""
    op = _boundary_operator_for(state.mesh, spec)
    _, u_tilde, h_tilde = _ale_fields(state, spec)
    u_new, h_new, iters, resid, cont_max = _fixed_point(
        state.mesh, u_tilde, h_tilde, state.topo, state.t + spec.dt, spec, op
    )
    mid = replace(state, u=u_new, h=h_new)
    report = StepReport(iters, resid, cont_max, quality(state.mesh))
    return mid, report


def _boundary_operator_for(mesh: TriMesh, spec: "ScenarioSpec") -> BoundaryOperator | None:
    if not spec.contact_line_enabled or spec.contact_line_kappa <= 0:
        return None
    return build_boundary_operator(mesh.ref_boundary_coords)


def advance(state: SimState, spec: "ScenarioSpec") -> tuple[SimState, StepReport]:
    """Advance the state by one time step of length spec.dt.

    Raises MeshTangled, FixedPointDiverged or BoundaryCollision without
    modifying the input state; the caller owns abort handling.
    """
    mesh = state.mesh
    op = _boundary_operator_for(mesh, spec)
    c, u_tilde, h_tilde = _ale_fields(state, spec)
    u_new, h_new, iters, resid, cont_max = _fixed_point(
        mesh, u_tilde, h_tilde, state.topo, state.t + spec.dt, spec, op
    )

    new_boundary = (mesh.vertices + spec.dt * c.values)[mesh.boundary_loop]
    hit = boundary_self_intersects(new_boundary)
    if hit is not None:
        raise BoundaryCollision(hit[0], hit[1], step=state.step + 1)
    try:
        new_mesh = move_nodes(mesh, c, spec.dt)
    except MeshTangled as err:
        raise MeshTangled(err.triangle, err.area, step=state.step + 1) from None

    topo_new = NodalField(
        new_mesh, spec.sample_topography(new_mesh.vertices)
    )
    new_state = SimState(
        mesh=new_mesh,
        u=NodalField(new_mesh, u_new.values),
        h=NodalField(new_mesh, h_new.values),
        topo=topo_new,
        t=state.t + spec.dt,
        step=state.step + 1,
        probe_node=state.probe_node,
    )
    report = StepReport(iters, resid, cont_max, quality(new_mesh))
    return new_state, report


def suggested_dt_bound(mesh: TriMesh, h_max: float, g: float) -> float:
    """Advective-gravity heuristic used only to warn about large steps."""
    edge = quality(mesh).min_edge_length
    wave = np.sqrt(max(g * h_max, 1e-300))
    return 0.25 * edge / wave
