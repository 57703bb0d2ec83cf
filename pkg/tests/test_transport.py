import numpy as np
import pytest

from swale.fields import NodalField
from swale.mesh import build_disk_mesh
from swale.transport import Feet, locate, locate_feet, pullback, trace_foot

from oracles import brute_locate


class TestTraceFoot:
    def test_direct_formula(self):
        foot = trace_foot(np.array([0.0, 0.0]), np.array([1.0, 0.0]), 0.1)
        assert np.allclose(foot, [-0.1, 0.0])

    def test_zero_velocity_stays(self):
        x = np.array([3.0, -2.0])
        assert np.array_equal(trace_foot(x, np.zeros(2), 0.5), x)

    def test_boundary_example(self):
        foot = trace_foot(np.array([130.0, 0.0]), np.array([2.0, -1.0]), 0.05)
        assert np.allclose(foot, [129.9, 0.05])

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            trace_foot(np.zeros(2), np.zeros(2), 0.0)


class TestLocate:
    def test_centroid_of_triangle_zero(self):
        mesh = build_disk_mesh(1.0, 64)
        centroid = mesh.vertices[mesh.triangles[0]].mean(axis=0)
        loc = locate(mesh, centroid, hint=5)
        assert loc.element == 0
        assert np.allclose(loc.barycentric, 1.0 / 3.0, atol=1e-12)

    def test_vertex_hits_incident_triangle(self):
        mesh = build_disk_mesh(1.0, 64)
        v = 7
        loc = locate(mesh, mesh.vertices[v])
        assert loc.element is not None
        k = np.flatnonzero(mesh.triangles[loc.element] == v)
        assert k.size == 1
        assert loc.barycentric[k[0]] == pytest.approx(1.0, abs=1e-12)

    def test_far_point_outside(self):
        mesh = build_disk_mesh(1.0, 64)
        assert locate(mesh, np.array([2.0, 0.0])).is_outside

    def test_matches_brute_force_scan(self):
        mesh = build_disk_mesh(1.0, 200)
        rng = np.random.default_rng(17)
        pts = rng.uniform(-1.1, 1.1, size=(300, 2))
        elements, bary = (locate_feet(mesh, pts).elements, locate_feet(mesh, pts).barycentric)
        for k, p in enumerate(pts):
            t_ref, lam_ref = brute_locate(mesh.vertices, mesh.triangles, p)
            if t_ref is None:
                assert elements[k] == -1
            else:
                assert elements[k] >= 0
                # Different triangles can claim a point on a shared edge;
                # the interpolated position must agree either way.
                tri = mesh.triangles[elements[k]]
                rec = bary[k] @ mesh.vertices[tri]
                assert np.abs(rec - p).max() < 1e-9


class TestPullback:
    def test_zero_velocity_identity(self):
        mesh = build_disk_mesh(1.0, 200)
        rng = np.random.default_rng(2)
        f = NodalField(mesh, rng.normal(size=mesh.num_vertices))
        feet = locate_feet(mesh, mesh.vertices, mesh.vertex_incident_triangle)
        g = pullback(mesh, f, feet)
        assert np.abs(g.values - f.values).max() < 1e-12

    def test_linear_field_uniform_shift(self):
        mesh = build_disk_mesh(1.0, 400)
        f = NodalField(mesh, mesh.vertices[:, 0])
        rel = np.tile([1.0, 0.0], (mesh.num_vertices, 1))
        pts = mesh.vertices - 0.1 * rel
        feet = locate_feet(mesh, pts, mesh.vertex_incident_triangle)
        g = pullback(mesh, f, feet)
        inside = feet.elements >= 0
        assert np.abs(g.values[inside] - (mesh.vertices[inside, 0] - 0.1)).max() < 1e-12

    def test_constant_field_exact(self):
        mesh = build_disk_mesh(1.0, 200)
        f = NodalField(mesh, np.full(mesh.num_vertices, 5.5))
        rng = np.random.default_rng(4)
        pts = mesh.vertices - 0.05 * rng.normal(size=(mesh.num_vertices, 2))
        g = pullback(mesh, f, locate_feet(mesh, pts))
        assert np.abs(g.values - 5.5).max() < 1e-12

    def test_bounds_preserved(self):
        mesh = build_disk_mesh(1.0, 300)
        rng = np.random.default_rng(8)
        f = NodalField(mesh, rng.normal(size=mesh.num_vertices))
        pts = mesh.vertices - 0.2 * rng.normal(size=(mesh.num_vertices, 2))
        g = pullback(mesh, f, locate_feet(mesh, pts))
        assert g.values.min() >= f.values.min() - 1e-12
        assert g.values.max() <= f.values.max() + 1e-12

    def test_outside_feet_projected_not_crashed(self):
        mesh = build_disk_mesh(1.0, 200)
        f = NodalField(mesh, mesh.vertices[:, 0])
        pts = mesh.vertices * 1.05  # every boundary foot pushed outside
        g = pullback(mesh, f, locate_feet(mesh, pts))
        assert np.isfinite(g.values).all()
        assert g.values.max() <= f.values.max() + 1e-12

    def test_boundary_feet_keep_boundary_values(self):
        mesh = build_disk_mesh(130.0, 420)
        rng = np.random.default_rng(12)
        vals = rng.normal(size=(mesh.num_vertices, 2))
        f = NodalField(mesh, vals)
        rel = rng.normal(size=(mesh.num_vertices, 2))
        rel[mesh.boundary_loop] = 0.0  # relative velocity vanishes on the boundary
        pts = mesh.vertices - 0.05 * rel
        g = pullback(mesh, f, locate_feet(mesh, pts, mesh.vertex_incident_triangle))
        b = mesh.boundary_loop
        assert np.abs(g.values[b] - vals[b]).max() < 1e-12


def rotation_advection_error(mesh, dt, t_final=1.0, omega=1.0, sigma=0.45):
    """Advect a Gaussian bump by rigid rotation; L2 error vs the exact rotation."""
    from swale.fem import lumped_areas

    center0 = np.array([0.35, 0.0])

    def gaussian(pts, center):
        d2 = ((pts - center) ** 2).sum(axis=1)
        return np.exp(-d2 / (2.0 * sigma**2))

    field = NodalField(mesh, gaussian(mesh.vertices, center0))
    velocity = np.column_stack([-mesh.vertices[:, 1], mesh.vertices[:, 0]]) * omega
    steps = int(round(t_final / dt))
    hints = mesh.vertex_incident_triangle
    for _ in range(steps):
        pts = mesh.vertices - dt * velocity
        field = pullback(mesh, field, locate_feet(mesh, pts, hints))
    angle = omega * t_final
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    exact = gaussian(mesh.vertices, rot @ center0)
    w = lumped_areas(mesh)
    return float(np.sqrt((w * (field.values - exact) ** 2).sum() / w.sum()))


class TestRotationConvergence:
    def test_first_order_in_dt(self):
        # Mesh fine enough that the interpolation floor stays below the
        # temporal error over this dt ladder.
        mesh = build_disk_mesh(1.0, 12000)
        dts = [0.25, 0.125, 0.0625]
        errs = [rotation_advection_error(mesh, dt) for dt in dts]
        rates = [np.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
        assert all(0.8 <= r <= 1.2 for r in rates), (errs, rates)
