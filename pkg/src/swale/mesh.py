"""Deforming triangular meshes with persistent node identity.

The boundary node set is fixed for the lifetime of a mesh: nodes never
switch between boundary and interior, and the boundary coordinates at
construction time are frozen as the reference curve for the contact-line
operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MeshTangled
from .fields import NodalField

# Signed areas below this are treated as degenerate.
DEGENERATE_AREA = 1e-14

_MESH_VARIANT_TARGETS = {"M1": 420, "M2": 470, "M3": 1002}


def triangle_signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Signed area of each triangle; positive for counterclockwise order."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    ab = b - a
    ac = c - a
    return 0.5 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])


def polygon_area(coords: np.ndarray) -> float:
    """Shoelace area of a closed polygon given its vertices in order."""
    x = coords[:, 0]
    y = coords[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def boundary_self_intersects(coords: np.ndarray) -> tuple[int, int] | None:
    """Check a closed polyline for crossings between non-adjacent segments.

    Returns the first offending segment index pair, or None if the polyline
    is simple. Adjacent segments (sharing an endpoint) are skipped.
    """
    n = coords.shape[0]
    if n < 4:
        return None
    p = coords
    q = np.roll(coords, -1, axis=0)
    i_idx, j_idx = np.triu_indices(n, k=2)
    wrap = (i_idx == 0) & (j_idx == n - 1)
    i_idx = i_idx[~wrap]
    j_idx = j_idx[~wrap]

    a, b = p[i_idx], q[i_idx]
    c, d = p[j_idx], q[j_idx]

    def orient(u, v, w):
        return (v[:, 0] - u[:, 0]) * (w[:, 1] - u[:, 1]) - (v[:, 1] - u[:, 1]) * (
            w[:, 0] - u[:, 0]
        )

    d1 = orient(a, b, c)
    d2 = orient(a, b, d)
    d3 = orient(c, d, a)
    d4 = orient(c, d, b)
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
    if crossing.any():
        k = int(np.argmax(crossing))
        return int(i_idx[k]), int(j_idx[k])
    return None


@dataclass
class MeshQualityReport:
    """Exact minima over all triangles and edges of a mesh."""

    min_signed_area: float
    min_angle: float
    min_edge_length: float


@dataclass
class TriMesh:
    """Triangulation of a simply connected planar domain.

    Fields
    ------
    vertices : (V, 2) float array of node coordinates in meters.
    triangles : (T, 3) int array of vertex indices, counterclockwise.
    boundary_loop : (B,) int array, the closed boundary polyline in order.
    ref_boundary_coords : (B, 2) float array, boundary coordinates frozen
        at construction of the initial mesh (the reference curve).

    Instances are immutable: the arrays are marked read-only and node
    movement produces a new mesh sharing connectivity and reference data.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loop: np.ndarray
    ref_boundary_coords: np.ndarray = field(default=None)  # type: ignore[assignment]
    validate: bool = True

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        self.boundary_loop = np.ascontiguousarray(self.boundary_loop, dtype=np.int64)
        if self.ref_boundary_coords is None:
            self.ref_boundary_coords = self.vertices[self.boundary_loop].copy()
        self.ref_boundary_coords = np.ascontiguousarray(
            self.ref_boundary_coords, dtype=np.float64
        )
        if self.validate:
            self._check_structure()
        for arr in (self.vertices, self.triangles, self.boundary_loop, self.ref_boundary_coords):
            arr.flags.writeable = False

    def _check_structure(self):
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError("vertices must have shape (V, 2)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must have shape (T, 3)")
        if not np.isfinite(self.vertices).all():
            raise ValueError("vertex coordinates must be finite")
        nv = self.vertices.shape[0]
        if self.triangles.min() < 0 or self.triangles.max() >= nv:
            raise ValueError("triangle indices out of range")
        areas = triangle_signed_areas(self.vertices, self.triangles)
        worst = int(np.argmin(areas))
        if areas[worst] < DEGENERATE_AREA:
            raise ValueError(
                f"triangle {worst} has non-positive signed area {areas[worst]:.3e}"
            )
        if self.boundary_loop.ndim != 1 or self.boundary_loop.shape[0] < 3:
            raise ValueError("boundary loop must list at least 3 vertices")
        if len(np.unique(self.boundary_loop)) != self.boundary_loop.shape[0]:
            raise ValueError("boundary loop repeats a vertex")
        if self.ref_boundary_coords.shape != (self.boundary_loop.shape[0], 2):
            raise ValueError("reference boundary coords must match boundary loop length")
        # Each loop edge must be a boundary edge of the triangulation, and
        # the triangulation must have no other boundary edges.
        edge_count: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            for i in range(3):
                e = (int(tri[i]), int(tri[(i + 1) % 3]))
                key = (min(e), max(e))
                edge_count[key] = edge_count.get(key, 0) + 1
        exposed = {e for e, cnt in edge_count.items() if cnt == 1}
        if any(cnt > 2 for cnt in edge_count.values()):
            raise ValueError("an edge is shared by more than two triangles")
        loop = self.boundary_loop
        loop_edges = set()
        for i in range(loop.shape[0]):
            a = int(loop[i])
            b = int(loop[(i + 1) % loop.shape[0]])
            loop_edges.add((min(a, b), max(a, b)))
        if loop_edges != exposed:
            raise ValueError("boundary loop does not match the exposed triangulation edges")

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def signed_areas(self) -> np.ndarray:
        areas = triangle_signed_areas(self.vertices, self.triangles)
        areas.flags.writeable = False
        return areas

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_vertices, dtype=bool)
        mask[self.boundary_loop] = True
        mask.flags.writeable = False
        return mask

    @cached_property
    def interior_nodes(self) -> np.ndarray:
        idx = np.flatnonzero(~self.boundary_mask)
        idx.flags.writeable = False
        return idx

    @cached_property
    def tri_neighbors(self) -> np.ndarray:
        """(T, 3) neighbor triangle across edge (i, i+1), or -1 on the boundary."""
        owner: dict[tuple[int, int], tuple[int, int]] = {}
        neigh = np.full((self.num_triangles, 3), -1, dtype=np.int64)
        for t, tri in enumerate(self.triangles):
            for i in range(3):
                a = int(tri[i])
                b = int(tri[(i + 1) % 3])
                key = (min(a, b), max(a, b))
                if key in owner:
                    s, j = owner.pop(key)
                    neigh[t, i] = s
                    neigh[s, j] = t
                else:
                    owner[key] = (t, i)
        neigh.flags.writeable = False
        return neigh

    @cached_property
    def vertex_incident_triangle(self) -> np.ndarray:
        """One triangle containing each vertex, for point-location hints."""
        first = np.full(self.num_vertices, -1, dtype=np.int64)
        # Reverse iteration keeps the lowest triangle index per vertex.
        for t in range(self.num_triangles - 1, -1, -1):
            first[self.triangles[t]] = t
        first.flags.writeable = False
        return first

    @cached_property
    def barycentric_gradients(self) -> np.ndarray:
        """(T, 3, 2) gradients of the three barycentric (hat) functions."""
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        two_area = 2.0 * self.signed_areas
        grads = np.empty((self.num_triangles, 3, 2))
        # grad(lambda_i) is the inward normal of the opposite edge over 2A.
        grads[:, 0, 0] = b[:, 1] - c[:, 1]
        grads[:, 0, 1] = c[:, 0] - b[:, 0]
        grads[:, 1, 0] = c[:, 1] - a[:, 1]
        grads[:, 1, 1] = a[:, 0] - c[:, 0]
        grads[:, 2, 0] = a[:, 1] - b[:, 1]
        grads[:, 2, 1] = b[:, 0] - a[:, 0]
        grads /= two_area[:, None, None]
        grads.flags.writeable = False
        return grads

    def replace_vertices(self, new_vertices: np.ndarray, validate: bool = True) -> "TriMesh":
        """Same connectivity and reference boundary, new node positions."""
        return TriMesh(
            vertices=new_vertices,
            triangles=self.triangles,
            boundary_loop=self.boundary_loop,
            ref_boundary_coords=self.ref_boundary_coords,
            validate=validate,
        )


def _stitch_rings(inner: np.ndarray, outer: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate the annulus between two concentric node rings.

    Both rings are ordered counterclockwise starting at angle zero; the
    inner ring may be a single center node. Produces len(inner)+len(outer)
    triangles (or a fan when the inner ring is one node).
    """
    q = outer.shape[0]
    tris: list[tuple[int, int, int]] = []
    if inner.shape[0] == 1:
        center = int(inner[0])
        for j in range(q):
            tris.append((center, int(outer[j]), int(outer[(j + 1) % q])))
        return tris
    p = inner.shape[0]
    i = j = 0
    while i < p or j < q:
        adv_outer = j < q and (i == p or (j + 1) * p <= (i + 1) * q)
        if adv_outer:
            tris.append((int(outer[j]), int(outer[(j + 1) % q]), int(inner[i % p])))
            j += 1
        else:
            tris.append((int(inner[i]), int(outer[j % q]), int(inner[(i + 1) % p])))
            i += 1
    return tris


def _ring_layout(target: int) -> tuple[int, int]:
    """Pick (rings, nodes on first ring) so the triangle count tracks target.

    The hexagonal pattern (6 nodes on the first ring, 6k on ring k) gives
    6*m^2 triangles and near-equilateral elements; it is used whenever some
    m lands within 20% of the target. Otherwise the first-ring count is
    searched over a small range for the closest achievable count.
    """
    best_m = max(1, round(np.sqrt(target / 6.0)))
    candidates = [best_m - 1, best_m, best_m + 1]
    hex_counts = [(abs(6 * m * m - target), m) for m in candidates if m >= 1]
    err, m = min(hex_counts)
    if err <= 0.2 * target:
        return m, 6
    best: tuple[int, int, int] | None = None
    for n1 in range(4, 11):
        m = max(1, round(np.sqrt(target / n1)))
        for mm in (m - 1, m, m + 1):
            if mm < 1:
                continue
            count = n1 * mm * mm
            key = (abs(count - target), abs(n1 - 6), mm)
            if best is None or key < best:
                best = key
                pick = (mm, n1)
    return pick


def build_disk_mesh(radius: float, target_triangle_count: int) -> TriMesh:
    """Structured disk triangulation from concentric node rings.

    Ring k (k = 1..m) sits at radius k*R/m and carries n1*k nodes, all
    rings starting at angle zero; consecutive rings are stitched by an
    angular sweep. The construction is deterministic, so repeated builds
    are identical.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if target_triangle_count < 16:
        raise ValueError("target triangle count must be at least 16")
    m, n1 = _ring_layout(target_triangle_count)

    rings: list[np.ndarray] = []
    coords = [np.zeros((1, 2))]
    rings.append(np.array([0], dtype=np.int64))
    next_id = 1
    for k in range(1, m + 1):
        n = n1 * k
        ids = np.arange(next_id, next_id + n, dtype=np.int64)
        theta = 2.0 * np.pi * np.arange(n) / n
        r = radius * k / m
        coords.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
        rings.append(ids)
        next_id += n

    vertices = np.vstack(coords)
    tris: list[tuple[int, int, int]] = []
    for k in range(m):
        tris.extend(_stitch_rings(rings[k], rings[k + 1]))
    triangles = np.array(tris, dtype=np.int64)
    return TriMesh(vertices=vertices, triangles=triangles, boundary_loop=rings[-1])


def build_disk_mesh_variant(radius: float, variant: str | int) -> TriMesh:
    """Disk mesh for a named refinement level (M1/M2/M3) or an explicit count."""
    if isinstance(variant, str):
        try:
            target = _MESH_VARIANT_TARGETS[variant]
        except KeyError:
            raise ValueError(f"unknown mesh variant {variant!r}") from None
    else:
        target = int(variant)
    return build_disk_mesh(radius, target)


def move_nodes(mesh: TriMesh, velocity: NodalField, dt: float) -> TriMesh:
    """Displace every node by dt times its velocity.

    Connectivity, boundary loop and reference boundary coordinates are
    shared with the input mesh. Raises MeshTangled if any triangle of the
    displaced mesh has signed area below the degeneracy threshold.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    vals = velocity.values
    if not velocity.is_vector or vals.shape[0] != mesh.num_vertices:
        raise ValueError("velocity must be a vector field on every mesh node")
    new_vertices = mesh.vertices + dt * vals
    areas = triangle_signed_areas(new_vertices, mesh.triangles)
    worst = int(np.argmin(areas))
    if areas[worst] < DEGENERATE_AREA:
        raise MeshTangled(worst, float(areas[worst]))
    return mesh.replace_vertices(new_vertices, validate=False)


def quality(mesh: TriMesh) -> MeshQualityReport:
    """Minimum signed area, interior angle, and edge length of the mesh."""
    areas = mesh.signed_areas
    a = mesh.vertices[mesh.triangles[:, 0]]
    b = mesh.vertices[mesh.triangles[:, 1]]
    c = mesh.vertices[mesh.triangles[:, 2]]
    sides = np.stack([b - a, c - b, a - c])  # directed edges around each triangle
    lengths = np.linalg.norm(sides, axis=2)
    min_angle = np.inf
    for i in range(3):
        u = -sides[(i + 2) % 3]
        v = sides[i]
        cosang = np.einsum("td,td->t", u, v) / (lengths[(i + 2) % 3] * lengths[i])
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))
        min_angle = min(min_angle, float(ang.min()))
    return MeshQualityReport(
        min_signed_area=float(areas.min()),
        min_angle=min_angle,
        min_edge_length=float(lengths.min()),
    )
