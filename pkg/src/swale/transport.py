"""Semi-Lagrangian machinery: characteristic feet and P1 pullback.

Feet are traced with a single explicit Euler step of the relative
(fluid minus mesh) velocity and located by a neighbor-walk search with an
exhaustive fallback, so location terminates on any valid mesh. Feet that
leave the domain are projected onto the boundary polyline; this can only
happen near the boundary where the relative velocity vanishes to first
order, so the projection is a consistent perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import NodalField
from .mesh import TriMesh

BARY_TOL = 1e-12


@dataclass
class FootLocation:
    """Where one characteristic foot landed."""

    point: np.ndarray
    element: int | None  # containing triangle, or None when outside the mesh
    barycentric: np.ndarray

    @property
    def is_outside(self) -> bool:
        return self.element is None


class Feet:
    """Array-of-structs container for one foot per query point."""

    def __init__(self, points: np.ndarray, elements: np.ndarray, barycentric: np.ndarray):
        self.points = points
        self.elements = elements  # -1 marks feet outside the mesh
        self.barycentric = barycentric

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, k: int) -> FootLocation:
        el = int(self.elements[k])
        return FootLocation(
            point=self.points[k],
            element=None if el < 0 else el,
            barycentric=self.barycentric[k],
        )


def trace_foot(x: np.ndarray, relative_velocity: np.ndarray, dt: float) -> np.ndarray:
    """Upstream foot of the characteristic through x: x - dt * velocity."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v = np.asarray(relative_velocity, dtype=np.float64)
    if not np.isfinite(v).all():
        raise ValueError("relative velocity must be finite")
    return np.asarray(x, dtype=np.float64) - dt * v


def _barycentric(mesh: TriMesh, points: np.ndarray, elements: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of each point in its assigned triangle."""
    tri = mesh.triangles[elements]
    a = mesh.vertices[tri[:, 0]]
    b = mesh.vertices[tri[:, 1]]
    c = mesh.vertices[tri[:, 2]]
    d = points - c
    v0 = a - c
    v1 = b - c
    det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    l0 = (d[:, 0] * v1[:, 1] - d[:, 1] * v1[:, 0]) / det
    l1 = (v0[:, 0] * d[:, 1] - v0[:, 1] * d[:, 0]) / det
    return np.column_stack([l0, l1, 1.0 - l0 - l1])


def locate_points(mesh: TriMesh, points: np.ndarray, hints: np.ndarray | None = None):
    """Find the containing triangle of each point.

    Returns (elements, barycentric) with element -1 for points outside the
    mesh. The walk moves across the edge with the most negative barycentric
    weight; any point whose walk leaves the mesh or exceeds the step cap is
    re-checked by an exhaustive argmax scan before being declared outside.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if hints is None:
        current = np.zeros(n, dtype=np.int64)
    else:
        current = np.asarray(hints, dtype=np.int64).copy()
        current[(current < 0) | (current >= mesh.num_triangles)] = 0

    elements = np.full(n, -1, dtype=np.int64)
    bary = np.zeros((n, 3))
    active = np.arange(n)
    neighbors = mesh.tri_neighbors
    # Neighbor slot for the edge opposite to local vertex i is (i+1) % 3.
    opposite_slot = np.array([1, 2, 0])

    max_steps = 2 * mesh.num_triangles + 8
    for _ in range(max_steps):
        if active.size == 0:
            break
        lam = _barycentric(mesh, pts[active], current[active])
        worst = np.argmin(lam, axis=1)
        inside = lam[np.arange(active.size), worst] >= -BARY_TOL
        done = active[inside]
        elements[done] = current[done]
        bary[done] = lam[inside]

        moving = active[~inside]
        if moving.size == 0:
            active = moving
            break
        slots = opposite_slot[worst[~inside]]
        nxt = neighbors[current[moving], slots]
        escaped = nxt < 0
        # Walks that hit the boundary fall through to the exhaustive scan.
        still = moving[~escaped]
        current[still] = nxt[~escaped]
        stuck = moving[escaped]
        elements[stuck] = -2
        active = still

    unresolved = np.flatnonzero(elements == -2)
    if active.size:
        unresolved = np.concatenate([unresolved, active])
    for k in unresolved:
        lam_all = _barycentric(
            mesh,
            np.broadcast_to(pts[k], (mesh.num_triangles, 2)),
            np.arange(mesh.num_triangles),
        )
        best = int(np.argmax(lam_all.min(axis=1)))
        if lam_all[best].min() >= -BARY_TOL:
            elements[k] = best
            bary[k] = lam_all[best]
        else:
            elements[k] = -1
    return elements, bary


def locate(mesh: TriMesh, p: np.ndarray, hint: int = 0) -> FootLocation:
    """Locate a single point, walking from the hint triangle."""
    elements, bary = locate_points(mesh, np.asarray(p, dtype=np.float64)[None, :],
                                   np.array([hint]))
    el = int(elements[0])
    return FootLocation(
        point=np.asarray(p, dtype=np.float64),
        element=None if el < 0 else el,
        barycentric=bary[0],
    )


def locate_feet(mesh: TriMesh, points: np.ndarray, hints: np.ndarray | None = None) -> Feet:
    elements, bary = locate_points(mesh, points, hints)
    return Feet(np.asarray(points, dtype=np.float64), elements, bary)


def _project_to_boundary(mesh: TriMesh, points: np.ndarray):
    """Closest boundary segment and arclength parameter for each point."""
    loop = mesh.boundary_loop
    a = mesh.vertices[loop]
    b = mesh.vertices[np.roll(loop, -1)]
    ab = b - a  # (B, 2)
    seg_len2 = np.einsum("sd,sd->s", ab, ab)
    diff = points[:, None, :] - a[None, :, :]  # (N, B, 2)
    t = np.einsum("nsd,sd->ns", diff, ab) / seg_len2
    t = np.clip(t, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    dist2 = ((points[:, None, :] - closest) ** 2).sum(axis=2)
    seg = np.argmin(dist2, axis=1)
    rows = np.arange(points.shape[0])
    return seg, t[rows, seg]


def pullback(mesh: TriMesh, field: NodalField, feet: Feet) -> NodalField:
    """Interpolate the field at every foot.

    Inside feet use barycentric interpolation in their triangle, which keeps
    the result within the local nodal bounds; outside feet take the value at
    the nearest point of the boundary polyline.
    """
    if len(feet) != mesh.num_vertices:
        raise ValueError("need one foot per mesh node")
    vals = field.values
    inside = feet.elements >= 0
    if vals.ndim == 1:
        out = np.empty(mesh.num_vertices)
    else:
        out = np.empty((mesh.num_vertices, 2))

    tri = mesh.triangles[feet.elements[inside]]
    lam = feet.barycentric[inside]
    if vals.ndim == 1:
        out[inside] = np.einsum("nk,nk->n", lam, vals[tri])
    else:
        out[inside] = np.einsum("nk,nkd->nd", lam, vals[tri])

    outside = ~inside
    if outside.any():
        seg, t = _project_to_boundary(mesh, feet.points[outside])
        loop = mesh.boundary_loop
        va = vals[loop[seg]]
        vb = vals[np.roll(loop, -1)[seg]]
        if vals.ndim == 1:
            out[outside] = (1.0 - t) * va + t * vb
        else:
            out[outside] = (1.0 - t)[:, None] * va + t[:, None] * vb
    return NodalField(mesh, out)
