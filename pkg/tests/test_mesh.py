import numpy as np
import pytest

from swale.errors import MeshTangled
from swale.fields import NodalField
from swale.mesh import (
    TriMesh,
    boundary_self_intersects,
    build_disk_mesh,
    move_nodes,
    polygon_area,
    quality,
)

from oracles import shoelace


def unit_right_triangle():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2]])
    return TriMesh(verts, tris, boundary_loop=np.array([0, 1, 2]))


def unit_square_mesh():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2], [0, 2, 3]])
    return TriMesh(verts, tris, boundary_loop=np.array([0, 1, 2, 3]))


class TestBuildDiskMesh:
    def test_m1_count_and_radius(self):
        mesh = build_disk_mesh(130.0, 420)
        assert abs(mesh.num_triangles - 420) <= 0.2 * 420
        r = np.linalg.norm(mesh.vertices[mesh.boundary_loop], axis=1)
        assert np.allclose(r, 130.0, rtol=1e-12)

    def test_coarse_disk_euler_characteristic(self):
        mesh = build_disk_mesh(1.0, 16)
        edges = set()
        for tri in mesh.triangles:
            for i in range(3):
                a, b = int(tri[i]), int(tri[(i + 1) % 3])
                edges.add((min(a, b), max(a, b)))
        chi = mesh.num_vertices - len(edges) + mesh.num_triangles
        assert chi == 1

    def test_m3_area_close_to_disk(self):
        mesh = build_disk_mesh(130.0, 1002)
        exact = np.pi * 130.0**2
        assert abs(mesh.signed_areas.sum() - exact) / exact < 0.005

    @pytest.mark.parametrize("target", [16, 40, 150, 420, 470, 1002, 3000])
    def test_count_within_twenty_percent(self, target):
        mesh = build_disk_mesh(10.0, target)
        assert abs(mesh.num_triangles - target) <= 0.2 * target

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            build_disk_mesh(-1.0, 100)
        with pytest.raises(ValueError):
            build_disk_mesh(1.0, 8)

    def test_deterministic(self):
        a = build_disk_mesh(130.0, 420)
        b = build_disk_mesh(130.0, 420)
        assert np.array_equal(a.vertices, b.vertices)
        assert np.array_equal(a.triangles, b.triangles)


class TestMoveNodes:
    def test_zero_velocity_identity(self):
        mesh = build_disk_mesh(1.0, 100)
        vel = NodalField(mesh, np.zeros((mesh.num_vertices, 2)))
        moved = move_nodes(mesh, vel, 0.05)
        assert np.array_equal(moved.vertices, mesh.vertices)

    def test_rigid_translation_preserves_areas(self):
        mesh = build_disk_mesh(1.0, 100)
        vel = NodalField(mesh, np.tile([1.0, 0.0], (mesh.num_vertices, 1)))
        moved = move_nodes(mesh, vel, 0.1)
        assert np.allclose(moved.vertices[:, 0], mesh.vertices[:, 0] + 0.1)
        assert np.allclose(moved.signed_areas, mesh.signed_areas)

    def test_contraction_past_axis_tangles(self):
        # x -> (1 - dt) x with dt > 1 reflects the x axis and flips every triangle
        mesh = build_disk_mesh(1.0, 100)
        vel = NodalField(mesh, np.column_stack([-mesh.vertices[:, 0],
                                                np.zeros(mesh.num_vertices)]))
        with pytest.raises(MeshTangled) as err:
            move_nodes(mesh, vel, 1.5)
        assert err.value.area <= 0

    def test_full_collapse_is_degenerate(self):
        mesh = build_disk_mesh(1.0, 100)
        vel = NodalField(mesh, -mesh.vertices)
        with pytest.raises(MeshTangled):
            move_nodes(mesh, vel, 1.0)

    def test_move_then_unmove_round_trips(self):
        mesh = build_disk_mesh(130.0, 420)
        rng = np.random.default_rng(7)
        vel = NodalField(mesh, rng.normal(size=(mesh.num_vertices, 2)))
        back = move_nodes(move_nodes(mesh, vel, 0.05), vel.with_values(-vel.values), 0.05)
        assert np.abs(back.vertices - mesh.vertices).max() < 1e-12

    def test_boundary_bookkeeping_is_invariant(self):
        mesh = build_disk_mesh(130.0, 420)
        rng = np.random.default_rng(3)
        current = mesh
        for _ in range(5):
            vel = NodalField(current, 0.1 * rng.normal(size=(mesh.num_vertices, 2)))
            current = move_nodes(current, vel, 0.05)
        assert np.array_equal(current.boundary_loop, mesh.boundary_loop)
        assert current.ref_boundary_coords is mesh.ref_boundary_coords


class TestQuality:
    def test_unit_right_triangle(self):
        q = quality(unit_right_triangle())
        assert q.min_angle == pytest.approx(np.pi / 4, abs=1e-12)
        assert q.min_signed_area == pytest.approx(0.5, abs=1e-15)
        assert q.min_edge_length == pytest.approx(1.0, abs=1e-15)

    def test_equilateral(self):
        verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        mesh = TriMesh(verts, np.array([[0, 1, 2]]), boundary_loop=np.array([0, 1, 2]))
        q = quality(mesh)
        assert q.min_angle == pytest.approx(np.pi / 3, abs=1e-12)
        assert q.min_signed_area == pytest.approx(np.sqrt(3) / 4, abs=1e-12)

    def test_disk_mesh_positive(self):
        q = quality(build_disk_mesh(130.0, 420))
        assert q.min_signed_area > 0


class TestInvariants:
    @pytest.mark.parametrize("target", [64, 420])
    def test_signed_areas_match_shoelace(self, target):
        mesh = build_disk_mesh(5.0, target)
        poly = shoelace(mesh.vertices[mesh.boundary_loop])
        total = mesh.signed_areas.sum()
        assert abs(total - poly) / poly < 1e-10

    def test_areas_match_shoelace_after_motion(self):
        mesh = build_disk_mesh(5.0, 200)
        rng = np.random.default_rng(11)
        vel = NodalField(mesh, 0.2 * rng.normal(size=(mesh.num_vertices, 2)))
        moved = move_nodes(mesh, vel, 0.1)
        poly = polygon_area(moved.vertices[moved.boundary_loop])
        assert abs(moved.signed_areas.sum() - poly) / poly < 1e-10

    def test_constructor_rejects_inverted_triangle(self):
        verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            TriMesh(verts, np.array([[0, 2, 1]]), boundary_loop=np.array([0, 1, 2]))

    def test_constructor_rejects_wrong_loop(self):
        mesh = unit_square_mesh()
        with pytest.raises(ValueError):
            TriMesh(mesh.vertices, mesh.triangles, boundary_loop=np.array([0, 1, 2]))


class TestBoundarySelfIntersection:
    def test_square_is_simple(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        assert boundary_self_intersects(square) is None

    def test_bowtie_crosses(self):
        bowtie = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        hit = boundary_self_intersects(bowtie)
        assert hit is not None

    def test_disk_boundary_simple(self):
        mesh = build_disk_mesh(130.0, 420)
        assert boundary_self_intersects(mesh.vertices[mesh.boundary_loop]) is None
