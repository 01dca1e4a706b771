"""
Tests for the grasp_space app
"""

import math

import numpy as np
from django.test import SimpleTestCase
from scipy.spatial.transform import Rotation

from grasp_space.domain import ObliqueEllipsoid
from grasp_space.exceptions import DegeneratePointsError, EllipsoidConvergenceError
from grasp_space.services import (
    build_grasp_space,
    decompose,
    euler_zyx,
    grasp_space_from_dict,
    mvee,
    rotation_zyx,
    union_metrics,
)
from meshes.primitives import box, combine, unit_cube

CUBE_CORNERS = np.array(
    [[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)]
)


class MveeTests(SimpleTestCase):
    def test_cube_corners_give_circumsphere(self):
        ellipsoid = mvee(CUBE_CORNERS)
        np.testing.assert_allclose(ellipsoid.center, [0.5, 0.5, 0.5], atol=1e-4)
        radius = math.sqrt(3) / 2
        np.testing.assert_allclose(ellipsoid.semi_axes, [radius] * 3, atol=1e-4)
        np.testing.assert_allclose(ellipsoid.angles, [0.0, 0.0, 0.0], atol=1e-8)

    def test_contains_every_point_and_cannot_shrink(self):
        rng = np.random.default_rng(3)
        points = rng.normal(size=(40, 3)) * [5.0, 2.0, 1.0]
        ellipsoid = mvee(points)
        forms = ellipsoid.quadratic_form(points)
        self.assertTrue(np.all(forms <= 1.0 + 1e-9))
        shrunk = ObliqueEllipsoid(ellipsoid.center, ellipsoid.shape * 1.001)
        self.assertFalse(np.all(shrunk.contains(points)))

    def test_rigid_motion_equivariance(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            points = rng.uniform(0.0, 10.0, size=(12, 3))
            rotation = Rotation.random(random_state=trial).as_matrix()
            shift = rng.uniform(-20.0, 20.0, size=3)
            moved = mvee(points @ rotation.T + shift)
            expected = mvee(points).transformed(rotation, shift)
            np.testing.assert_allclose(moved.center, expected.center, atol=1e-6)
            scale = np.abs(expected.shape).max()
            np.testing.assert_allclose(
                moved.shape / scale, expected.shape / scale, atol=1e-6
            )

    def test_coplanar_points_are_degenerate(self):
        square = CUBE_CORNERS[CUBE_CORNERS[:, 2] == 0.0]
        with self.assertRaises(DegeneratePointsError) as caught:
            mvee(np.vstack([square, square + [0.5, 0.5, 0.0]]))
        self.assertEqual(caught.exception.rank, 2)

    def test_too_few_points(self):
        with self.assertRaises(DegeneratePointsError) as caught:
            mvee(CUBE_CORNERS[:3])
        self.assertEqual(caught.exception.count, 3)

    def test_iteration_cap(self):
        rng = np.random.default_rng(5)
        with self.assertRaises(EllipsoidConvergenceError) as caught:
            mvee(rng.normal(size=(30, 3)), eps=1e-12, max_iter=2)
        self.assertEqual(caught.exception.iterations, 2)


class DecomposeTests(SimpleTestCase):
    def test_rotation_angles_round_trip(self):
        angles = np.array([0.3, -0.4, 1.1])
        np.testing.assert_allclose(euler_zyx(rotation_zyx(angles)), angles, atol=1e-12)

    def test_gimbal_case_fixes_theta_z(self):
        recovered = euler_zyx(rotation_zyx([0.2, math.pi / 2, 0.0]))
        self.assertAlmostEqual(recovered[1], math.pi / 2, places=9)
        self.assertEqual(recovered[2], 0.0)

    def test_parameters_are_recovered(self):
        ellipsoid = ObliqueEllipsoid.from_parameters(
            [1.0, 2.0, 3.0], [3.0, 2.0, 1.0], [0.1, 0.2, 0.3]
        )
        principal = decompose(ellipsoid)
        np.testing.assert_allclose(principal.semi_axes, [3.0, 2.0, 1.0], atol=1e-10)
        np.testing.assert_allclose(principal.angles, [0.1, 0.2, 0.3], atol=1e-10)
        np.testing.assert_allclose(principal.reconstruct(), ellipsoid.shape, atol=1e-12)

    def test_yawed_ellipsoid(self):
        R = rotation_zyx([0.0, 0.0, 0.3])
        shape = R.T @ np.diag([1.0, 1.0 / 4.0, 1.0 / 9.0]) @ R
        principal = decompose(shape)
        np.testing.assert_allclose(principal.semi_axes, [1.0, 2.0, 3.0], atol=1e-9)
        np.testing.assert_allclose(principal.angles, [0.0, 0.0, 0.3], atol=1e-6)
        np.testing.assert_allclose(principal.reconstruct(), shape, atol=1e-12)

    def test_sphere_has_zero_angles(self):
        principal = decompose(np.eye(3) / 4.0)
        np.testing.assert_allclose(principal.semi_axes, [2.0, 2.0, 2.0])
        np.testing.assert_allclose(principal.angles, [0.0, 0.0, 0.0], atol=1e-12)

    def test_not_positive_definite(self):
        with self.assertRaises(ValueError):
            decompose(np.diag([1.0, 1.0, -1.0]))

    def test_volume(self):
        ellipsoid = ObliqueEllipsoid.from_parameters([0, 0, 0], [1, 2, 3], [0, 0, 0])
        self.assertAlmostEqual(ellipsoid.volume, 8.0 * math.pi, places=9)


class GraspSpaceTests(SimpleTestCase):
    def test_single_ellipsoid_covers_cube(self):
        space = build_grasp_space(unit_cube(), max_ellipsoids=1, samples=20_000)
        self.assertEqual(len(space.ellipsoids), 1)
        self.assertTrue(space.is_complete)
        self.assertLess(space.envelope_error, 1e-3)
        radius = math.sqrt(3) / 2
        self.assertAlmostEqual(space.surface_area, 4 * math.pi * radius**2, places=6)
        analytic = 4.0 / 3.0 * math.pi * radius**3
        self.assertLess(abs(space.volume - analytic) / analytic, 0.03)
        np.testing.assert_allclose(space.centroid, [0.5, 0.5, 0.5], atol=0.03)

    def test_two_boxes_get_one_ellipsoid_each(self):
        pair = combine(box((0, 0, 0), (1, 1, 1)), box((10, 0, 0), (11, 1, 1)))
        space = build_grasp_space(pair, max_ellipsoids=2, samples=10_000)
        self.assertEqual(len(space.ellipsoids), 2)
        self.assertTrue(space.is_complete)
        owners = space.membership(pair.face_centroids)
        self.assertTrue(np.all(owners >= 0))
        self.assertEqual(len(set(space.facet_cover.tolist())), 2)

    def test_reach_points_are_enclosed(self):
        reach = np.array([[0.5, 0.5, 3.0]])
        space = build_grasp_space(
            unit_cube(), max_ellipsoids=1, reach_points=reach, samples=5_000
        )
        self.assertTrue(space.contains(reach)[0])
        self.assertLess(space.violation(reach), 1e-9)
        self.assertGreater(space.violation([[0.5, 0.5, 10.0]]), 0.0)

    def test_round_trip_through_dict(self):
        space = build_grasp_space(unit_cube(), max_ellipsoids=1, samples=5_000)
        rebuilt = grasp_space_from_dict(space.to_dict())
        np.testing.assert_allclose(
            rebuilt.ellipsoids[0].shape, space.ellipsoids[0].shape, atol=1e-12
        )
        self.assertEqual(rebuilt.volume, space.volume)

    def test_union_of_disjoint_spheres_adds_up(self):
        spheres = [
            ObliqueEllipsoid.from_parameters(center, [1, 1, 1], [0, 0, 0])
            for center in ([0, 0, 0], [5, 0, 0])
        ]
        volume, centroid, area = union_metrics(spheres, samples=50_000, seed=1)
        self.assertAlmostEqual(area, 8 * math.pi, places=6)
        self.assertLess(abs(volume - 8 * math.pi / 3) / (8 * math.pi / 3), 0.05)
        self.assertAlmostEqual(centroid[0], 2.5, delta=0.1)
