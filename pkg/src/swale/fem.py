"""P1 finite-element assembly and linear solves on a triangulation.

All bilinear forms of the momentum system are assembled here, together
with the harmonic (Laplace-Dirichlet) solve that drives the mesh motion.
Operators are scipy CSR matrices; they are symmetric by construction
because symmetric element contributions are accumulated in matching
order.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError
from .fields import NodalField
from .mesh import TriMesh

DEFAULT_SOLVE_TOL = 1e-10

# Three-point Gauss rule on the reference triangle (exact through degree 2);
# rows are quadrature points, columns barycentric coordinates.
GAUSS3_BARY = np.array(
    [
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ]
)
GAUSS3_WEIGHTS = np.array([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])

_MASS_TABLE = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


def _scatter(mesh: TriMesh, element_matrices: np.ndarray) -> sp.csr_matrix:
    """Accumulate (T, 3, 3) element blocks into a global CSR operator."""
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    vals = element_matrices.reshape(-1)
    n = mesh.num_vertices
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def assemble_mass(mesh: TriMesh) -> sp.csr_matrix:
    """Consistent P1 mass matrix; SPD, entries sum to the mesh area."""
    elems = mesh.signed_areas[:, None, None] * _MASS_TABLE[None, :, :]
    return _scatter(mesh, elems)


def lumped_areas(mesh: TriMesh) -> np.ndarray:
    """Diagonal (lumped) mass: each node gets a third of its incident areas."""
    contrib = np.repeat(mesh.signed_areas / 3.0, 3)
    return np.bincount(mesh.triangles.ravel(), weights=contrib, minlength=mesh.num_vertices)


def assemble_stiffness(mesh: TriMesh) -> sp.csr_matrix:
    """P1 stiffness matrix for the full-gradient diffusion form."""
    g = mesh.barycentric_gradients
    elems = np.einsum("t,tid,tjd->tij", mesh.signed_areas, g, g)
    return _scatter(mesh, elems)


def assemble_drag(mesh: TriMesh, speed: NodalField) -> sp.csr_matrix:
    """Mass matrix weighted by a nonnegative P1 speed field.

    The weight is vertex-interpolated and the product integrated with the
    three-point Gauss rule, so entries agree with a quadrature oracle using
    the same rule.
    """
    w = speed.values
    if w.ndim != 1:
        raise ValueError("speed must be a scalar field")
    if w.min() < 0:
        raise ValueError(f"speed must be nonnegative, got min {w.min():.3e}")
    w_at_q = w[mesh.triangles] @ GAUSS3_BARY.T  # (T, 3 gauss points)
    pointwise = np.einsum("q,tq,qi,qj->tij", GAUSS3_WEIGHTS, w_at_q, GAUSS3_BARY, GAUSS3_BARY)
    elems = mesh.signed_areas[:, None, None] * pointwise
    return _scatter(mesh, elems)


def assemble_grad_pressure(mesh: TriMesh, eta: NodalField) -> np.ndarray:
    """(V, 2) load with entries integral of (grad eta) times each hat function.

    grad eta is piecewise constant, so the k-th entry collects A/3 times the
    element gradient over the triangles touching node k. Constant eta gives
    an exactly zero load, which keeps the lake at rest exact.
    """
    if eta.values.ndim != 1:
        raise ValueError("eta must be a scalar field")
    grad_e = np.einsum("tid,ti->td", mesh.barycentric_gradients, eta.values[mesh.triangles])
    contrib = (mesh.signed_areas / 3.0)[:, None] * grad_e  # (T, 2) per-vertex share
    load = np.zeros((mesh.num_vertices, 2))
    for d in range(2):
        load[:, d] = np.bincount(
            mesh.triangles.ravel(),
            weights=np.repeat(contrib[:, d], 3),
            minlength=mesh.num_vertices,
        )
    return load


def project_divergence(mesh: TriMesh, u: NodalField) -> NodalField:
    """Lumped-mass L2 projection of div(u) onto the P1 space."""
    if not u.is_vector:
        raise ValueError("u must be a vector field")
    vals = u.values[mesh.triangles]  # (T, 3, 2)
    div_e = np.einsum("tid,tid->t", mesh.barycentric_gradients, vals)
    contrib = np.repeat(mesh.signed_areas / 3.0 * div_e, 3)
    num = np.bincount(mesh.triangles.ravel(), weights=contrib, minlength=mesh.num_vertices)
    return NodalField(mesh, num / lumped_areas(mesh))


class SpdFactor:
    """LU factorization of an SPD operator, reusable across right-hand sides."""

    def __init__(self, matrix: sp.spmatrix):
        self.matrix = matrix.tocsr()
        self._lu = spla.splu(matrix.tocsc())

    def solve(self, rhs: np.ndarray, tol: float = DEFAULT_SOLVE_TOL, context: str = "") -> np.ndarray:
        x = self._lu.solve(rhs)
        rhs_norm = np.linalg.norm(rhs)
        if rhs_norm == 0.0:
            return np.zeros_like(rhs)
        residual = np.linalg.norm(self.matrix @ x - rhs) / rhs_norm
        if not np.isfinite(residual) or residual > tol:
            raise SolverError(float(residual), tol, context)
        return x


def solve_spd(A: sp.spmatrix, rhs: np.ndarray, tol: float = DEFAULT_SOLVE_TOL) -> np.ndarray:
    """Solve an SPD system to a relative residual of at most tol."""
    return SpdFactor(A).solve(np.asarray(rhs, dtype=np.float64), tol)


def solve_laplace_dirichlet(
    mesh: TriMesh, boundary_values: np.ndarray, tol: float = DEFAULT_SOLVE_TOL
) -> NodalField:
    """Discrete harmonic extension of boundary data, componentwise.

    boundary_values holds one scalar or 2-vector per node of the boundary
    loop, in loop order; the returned field carries those values exactly on
    the boundary.
    """
    bvals = np.asarray(boundary_values, dtype=np.float64)
    loop = mesh.boundary_loop
    if bvals.shape[0] != loop.shape[0]:
        raise ValueError("boundary values must cover every boundary node")
    squeeze = bvals.ndim == 1
    if squeeze:
        bvals = bvals[:, None]

    K = assemble_stiffness(mesh)
    interior = mesh.interior_nodes
    K_ii = K[interior][:, interior]
    K_ib = K[interior][:, loop]

    out = np.zeros((mesh.num_vertices, bvals.shape[1]))
    out[loop] = bvals
    if interior.size:
        rhs = -(K_ib @ bvals)
        factor = SpdFactor(K_ii)
        for d in range(bvals.shape[1]):
            out[interior, d] = factor.solve(rhs[:, d], tol, context="harmonic extension")
    return NodalField(mesh, out[:, 0] if squeeze else out)


def dump_operator(A: sp.spmatrix, path: str) -> None:
    """Write an operator as 'row col value' lines (debug aid)."""
    coo = A.tocoo()
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.17g}\n")
