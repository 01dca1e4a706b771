"""
Tests for the meshes app
"""

import math
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from meshes.domain import BoundingBox, Mesh
from meshes.enums import MeshFormat
from meshes.exceptions import MeshParseError, NonManifoldError, OpenMeshError
from meshes.primitives import box, combine, icosphere, square_tube, unit_cube
from meshes.services import (
    build_mesh,
    centroid,
    export_mesh,
    fits_print_space,
    load_mesh,
    measure,
    surface_area,
    volume,
    weld_vertices,
)
from meshes.validators import validate_mesh_source, validate_print_space


class MetrologyTests(SimpleTestCase):
    def test_unit_cube_area_volume_centroid(self):
        cube = unit_cube()
        self.assertAlmostEqual(surface_area(cube), 6.0, places=12)
        self.assertAlmostEqual(volume(cube), 1.0, places=12)
        np.testing.assert_allclose(centroid(cube), [0.5, 0.5, 0.5], atol=1e-12)

    def test_icosphere_volume_close_to_analytic(self):
        sphere = icosphere(radius=10.0, subdivisions=3)
        analytic = 4.0 / 3.0 * math.pi * 1000.0
        self.assertEqual(sphere.face_count, 1280)
        self.assertLess(abs(volume(sphere) - analytic) / analytic, 0.01)

    def test_measure_reports_aabb_and_center_ratio(self):
        slab = box((0, 0, 0), (2, 4, 6))
        result = measure(slab)
        np.testing.assert_allclose(result.aabb.strokes, [2, 4, 6])
        np.testing.assert_allclose(result.center_ratio, [0.5, 0.5, 0.5], atol=1e-12)
        self.assertAlmostEqual(result.volume, 48.0, places=9)
        self.assertFalse(result.inverted)
        payload = result.to_dict()
        self.assertAlmostEqual(payload["aabb"]["diagonal"], math.sqrt(56.0))

    def test_square_tube_volume_excludes_hole(self):
        tube = square_tube(outer=2.0, inner=1.0, height=1.0)
        self.assertAlmostEqual(volume(tube), 3.0, places=12)

    def test_combined_meshes_keep_separate_components(self):
        pair = combine(box((0, 0, 0), (1, 1, 1)), box((3, 0, 0), (4, 1, 1)))
        self.assertEqual(len(np.unique(pair.components)), 2)
        self.assertAlmostEqual(volume(pair), 2.0, places=12)

    def test_scaling_multiplies_area_and_volume(self):
        sphere = icosphere(radius=2.0, subdivisions=2)
        for factor in (0.5, 3.0):
            scaled = sphere.with_vertices(sphere.vertices * factor)
            self.assertAlmostEqual(volume(scaled) / volume(sphere), factor**3, places=9)
            self.assertAlmostEqual(
                surface_area(scaled) / surface_area(sphere), factor**2, places=9
            )

    def test_rigid_motion_keeps_volume_and_mirror_flips_it(self):
        slab = box((0, 0, 0), (2, 4, 6))
        c, s = math.cos(0.7), math.sin(0.7)
        rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        moved = slab.with_vertices(slab.vertices @ rotation.T + [5.0, -3.0, 1.0])
        self.assertAlmostEqual(volume(moved), 48.0, places=9)
        mirrored = slab.with_vertices(slab.vertices * [-1.0, 1.0, 1.0])
        self.assertAlmostEqual(volume(mirrored), -48.0, places=9)
        self.assertAlmostEqual(surface_area(mirrored), surface_area(slab), places=9)

    def test_bounding_box_of_a_union(self):
        left = box((0, 0, 0), (1, 2, 3))
        right = box((4, -1, 1), (5, 1, 2))
        merged = combine(left, right)
        union = left.aabb.union(right.aabb)
        np.testing.assert_array_equal(union.minimum, [0.0, -1.0, 0.0])
        np.testing.assert_array_equal(union.maximum, [5.0, 2.0, 3.0])
        np.testing.assert_array_equal(merged.aabb.minimum, union.minimum)
        np.testing.assert_array_equal(merged.aabb.maximum, union.maximum)

    def test_fits_print_space(self):
        aabb = BoundingBox((0, 0, 0), (100, 50, 20))
        self.assertTrue(fits_print_space(aabb, (100, 100, 100)))
        self.assertFalse(fits_print_space(aabb, (99, 100, 100)))


class BuildMeshTests(SimpleTestCase):
    def setUp(self):
        self.cube = unit_cube()

    def test_triangle_soup_is_welded(self):
        soup = self.cube.triangles.reshape(-1, 3)
        faces = np.arange(len(soup)).reshape(-1, 3)
        mesh = build_mesh(soup, faces)
        self.assertEqual(mesh.vertex_count, 8)
        self.assertTrue(mesh.is_closed)

    def test_weld_keeps_first_occurrence_order(self):
        points = [[0, 0, 0], [1, 0, 0], [0, 0, 1e-9], [1, 0, 0]]
        unique, inverse = weld_vertices(points, 1e-6)
        np.testing.assert_allclose(unique, [[0, 0, 0], [1, 0, 0]])
        self.assertEqual(inverse.tolist(), [0, 1, 0, 1])

    def test_degenerate_faces_are_dropped_with_warning(self):
        faces = np.vstack([self.cube.faces, [[0, 0, 1]]])
        with self.assertLogs("meshes.services", "WARNING") as logs:
            mesh = build_mesh(self.cube.vertices, faces)
        self.assertEqual(mesh.face_count, 12)
        self.assertIn("degenerate", logs.output[0])

    def test_clockwise_mesh_is_flipped(self):
        with self.assertLogs("meshes.services", "WARNING"):
            mesh = build_mesh(self.cube.vertices, self.cube.faces[:, ::-1])
        self.assertAlmostEqual(mesh.signed_volume, 1.0, places=12)

    def test_open_mesh_is_rejected(self):
        with self.assertRaises(NonManifoldError) as caught:
            build_mesh(self.cube.vertices, self.cube.faces[1:])
        self.assertEqual(len(caught.exception.edges), 3)
        self.assertEqual(set(caught.exception.counts), {1})

    def test_open_mesh_allowed_when_not_required_closed(self):
        mesh = build_mesh(self.cube.vertices, self.cube.faces[1:], require_closed=False)
        self.assertFalse(mesh.is_closed)
        self.assertEqual(len(mesh.boundary_edges), 3)
        with self.assertRaises(OpenMeshError):
            volume(mesh)
        result = measure(mesh, require_closed=False)
        self.assertIsNone(result.volume)
        self.assertAlmostEqual(result.surface_area, 5.5, places=12)

    def test_edge_shared_by_three_faces_is_non_manifold(self):
        first = self.cube.faces[0]
        vertices = np.vstack([self.cube.vertices, [[2.0, 2.0, 2.0]]])
        faces = np.vstack([self.cube.faces, [[first[0], first[1], 8]]])
        with self.assertRaises(NonManifoldError) as caught:
            build_mesh(vertices, faces)
        self.assertIn(3, caught.exception.counts)

    def test_face_index_out_of_range(self):
        with self.assertRaises(ValueError):
            Mesh(np.zeros((3, 3)), [[0, 1, 3]])

    def test_mesh_arrays_are_read_only(self):
        with self.assertRaises(ValueError):
            self.cube.vertices[0, 0] = 5.0

    def test_with_vertices_keeps_connectivity(self):
        moved = self.cube.with_vertices(self.cube.vertices + 1.0, name="moved")
        np.testing.assert_array_equal(moved.faces, self.cube.faces)
        self.assertEqual(moved.name, "moved")
        self.assertAlmostEqual(volume(moved), 1.0, places=12)

    def test_adjacency_is_symmetric(self):
        for i, neighbours in enumerate(self.cube.adjacency):
            for j in neighbours:
                self.assertIn(i, self.cube.adjacency[j])
        self.assertEqual(int(self.cube.degrees.sum()), 2 * len(self.cube.edges))


class MeshFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_export_then_load_each_format(self):
        cube = unit_cube()
        for file_format, suffix in (
            (MeshFormat.STL_BINARY, "stl"),
            (MeshFormat.STL_ASCII, "stl"),
            (MeshFormat.OBJ, "obj"),
        ):
            with self.subTest(file_format=file_format):
                path = self.root / f"cube-{file_format}.{suffix}"
                export_mesh(cube, path, file_format)
                loaded = load_mesh(path)
                self.assertEqual(loaded.face_count, 12)
                self.assertAlmostEqual(volume(loaded), 1.0, places=9)

    def test_missing_file(self):
        with self.assertRaises(MeshParseError) as caught:
            load_mesh(self.root / "absent.stl")
        self.assertIn("does not exist", caught.exception.reason)

    def test_unparseable_file(self):
        path = self.root / "broken.obj"
        path.write_text("this is not a mesh\n")
        with self.assertRaises(MeshParseError):
            load_mesh(path)

    def test_format_from_path(self):
        self.assertEqual(MeshFormat.from_path("a/b.OBJ"), MeshFormat.OBJ)
        self.assertEqual(MeshFormat.from_path("a.stl"), MeshFormat.STL_BINARY)
        with self.assertRaises(ValueError):
            MeshFormat.from_path("model.ply")


class MeshValidatorTests(SimpleTestCase):
    def test_builtin_source_is_accepted(self):
        validate_mesh_source("builtin:cube")

    def test_missing_source_is_rejected(self):
        with self.assertRaises(ValidationError):
            validate_mesh_source("/nowhere/model.stl")

    def test_print_space(self):
        validate_print_space([200, 200, 200])
        with self.assertRaises(ValidationError):
            validate_print_space([200, 0, 200])
        with self.assertRaises(ValidationError):
            validate_print_space([200, 200])
