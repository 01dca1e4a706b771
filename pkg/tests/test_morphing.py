"""
Tests for the morphing app
"""

import numpy as np
from django.test import SimpleTestCase

from grasp_space.domain import GraspSpace, ObliqueEllipsoid
from meshes.domain import Mesh
from meshes.primitives import box, combine, icosphere, unit_cube
from morphing.enums import WeightMode
from morphing.exceptions import (
    ConstraintConflictError,
    GraspSpaceViolationError,
    IsolatedVertexError,
    SingularSystemError,
)
from morphing.services import (
    build_laplacian,
    morph_by_grasp,
    morph_energy,
    select_anchors,
    solve_morph,
)


def sphere_space(*centers, radius=2.0):
    ellipsoids = [
        ObliqueEllipsoid.from_parameters(center, [radius] * 3, [0, 0, 0])
        for center in centers
    ]
    return GraspSpace(
        ellipsoids=ellipsoids,
        facet_cover=np.zeros(0, dtype=np.int64),
        envelope_error=0.0,
        centroid=np.mean(centers, axis=0),
        surface_area=0.0,
        volume=0.0,
    )


class LaplacianTests(SimpleTestCase):
    def test_rows_annihilate_constants(self):
        for mode in WeightMode:
            with self.subTest(mode=mode):
                system = build_laplacian(icosphere(subdivisions=1), mode)
                ones = np.ones(system.vertex_count)
                np.testing.assert_allclose(system.laplacian @ ones, 0.0, atol=1e-12)
                np.testing.assert_allclose(system.weights.sum(axis=1), 1.0)

    def test_deltas_match_definition(self):
        cube = unit_cube()
        system = build_laplacian(cube)
        i = 0
        neighbours = cube.adjacency[i]
        expected = cube.vertices[i] - cube.vertices[list(neighbours)].mean(axis=0)
        np.testing.assert_allclose(system.deltas[i], expected, atol=1e-12)

    def test_regular_tetrahedron_weights(self):
        vertices = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]]
        vertices.append([-1.0, -1.0, 1.0])
        faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
        system = build_laplacian(Mesh(vertices, faces))
        expected = (np.ones((4, 4)) - np.eye(4)) / 3.0
        np.testing.assert_allclose(system.weights.toarray(), expected, atol=1e-15)

    def test_flat_grid_interior_has_no_detail(self):
        size = 5
        xs, ys = np.meshgrid(np.arange(size, dtype=float), np.arange(size))
        vertices = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(size**2)])
        faces = []
        for j in range(size - 1):
            for i in range(size - 1):
                a, b = j * size + i, j * size + i + 1
                c, d = b + size, a + size
                faces += [[a, b, c], [a, c, d]]
        system = build_laplacian(Mesh(vertices, faces))
        interior = [j * size + i for j in range(1, 4) for i in range(1, 4)]
        np.testing.assert_allclose(system.deltas[interior], 0.0, atol=1e-12)
        self.assertGreater(np.abs(system.deltas[0]).max(), 0.0)

    def test_isolated_vertex(self):
        cube = unit_cube()
        vertices = np.vstack([cube.vertices, [[5.0, 5.0, 5.0]]])
        with self.assertRaises(IsolatedVertexError) as caught:
            build_laplacian(Mesh(vertices, cube.faces))
        self.assertEqual(caught.exception.vertex, 8)

    def test_anchor_and_control_conflict(self):
        system = build_laplacian(unit_cube())
        with self.assertRaises(ConstraintConflictError) as caught:
            system.with_constraints(anchors=[0, 1], controls={1: [0.0, 0.0, 2.0]})
        self.assertEqual(caught.exception.vertices, [1])


class SolveMorphTests(SimpleTestCase):
    def setUp(self):
        self.mesh = icosphere(radius=5.0, subdivisions=2)
        self.system = build_laplacian(self.mesh)

    def test_rest_anchors_reproduce_the_mesh(self):
        system = self.system.with_constraints(anchors=[0, 7, 21])
        result = solve_morph(system)
        np.testing.assert_allclose(result.vertices, self.mesh.vertices, atol=1e-7)
        self.assertLess(result.energy, 1e-12)

    def test_translated_constraints_translate_the_mesh(self):
        shift = np.array([3.0, -1.0, 2.5])
        anchors = {i: self.mesh.vertices[i] + shift for i in (0, 7, 21)}
        result = solve_morph(self.system.with_constraints(anchors=anchors))
        np.testing.assert_allclose(
            result.vertices, self.mesh.vertices + shift, atol=1e-8
        )

    def test_pulled_vertex_bulges_the_sphere(self):
        z = self.mesh.vertices[:, 2]
        poles = [int(np.argmax(z)), int(np.argmin(z))]
        pulled = int(np.argmax(self.mesh.vertices[:, 0]))
        controls = {pulled: 1.1 * self.mesh.vertices[pulled]}
        system = self.system.with_constraints(anchors=poles, controls=controls)
        result = solve_morph(system)
        radii = np.linalg.norm(result.vertices, axis=1)
        self.assertGreater(radii.max(), 5.0 + 1e-6)
        self.assertGreater(result.energy, 0.0)
        self.assertLessEqual(result.residual, 1e-8)

    def test_more_anchors_hold_the_old_ones_closer(self):
        z = self.mesh.vertices[:, 2]
        poles = [int(np.argmax(z)), int(np.argmin(z))]
        pulled = int(np.argmax(self.mesh.vertices[:, 0]))
        controls = {pulled: self.mesh.vertices[pulled] + [2.0, 0.0, 0.0]}
        rings = sorted({n for pole in poles for n in self.mesh.adjacency[pole]})
        loose = solve_morph(
            self.system.with_constraints(anchors=poles, controls=controls)
        )
        held = solve_morph(
            self.system.with_constraints(anchors=poles + rings, controls=controls)
        )

        def drift(result, indices):
            offsets = result.vertices[indices] - self.mesh.vertices[indices]
            return np.linalg.norm(offsets, axis=1)

        self.assertTrue(np.all(drift(held, poles) <= drift(loose, poles) + 1e-12))
        self.assertLessEqual(
            np.sum(drift(held, rings) ** 2), np.sum(drift(loose, rings) ** 2) + 1e-12
        )

    def test_matches_dense_least_squares(self):
        controls = {3: self.mesh.vertices[3] + [0.0, 0.0, 1.5]}
        system = self.system.with_constraints(anchors=[40, 41, 60], controls=controls)
        result = solve_morph(system)
        dense, *_ = np.linalg.lstsq(
            system.stacked_matrix.toarray(), system.stacked_rhs, rcond=None
        )
        np.testing.assert_allclose(result.vertices, dense, atol=1e-8)

    def test_reported_energy_matches_recomputation(self):
        controls = {3: self.mesh.vertices[3] + [0.0, 0.0, 1.5]}
        system = self.system.with_constraints(anchors=[40], controls=controls)
        result = solve_morph(system)
        total, laplacian_term, constraint_term = morph_energy(system, result.vertices)
        self.assertAlmostEqual(result.energy, total, places=9)
        self.assertAlmostEqual(total, laplacian_term + constraint_term, places=12)
        self.assertGreater(result.energy, 0.0)

    def test_no_constraints_is_singular(self):
        with self.assertRaises(SingularSystemError):
            solve_morph(self.system)

    def test_component_without_constraint_is_singular(self):
        pair = combine(box((0, 0, 0), (1, 1, 1)), box((5, 0, 0), (6, 1, 1)))
        system = build_laplacian(pair).with_constraints(anchors=[0])
        with self.assertRaises(SingularSystemError) as caught:
            solve_morph(system, components=pair.components)
        self.assertIn("component", caught.exception.reason)


class MorphByGraspTests(SimpleTestCase):
    def setUp(self):
        self.pair = combine(box((0, 0, 0), (1, 1, 1)), box((10, 0, 0), (11, 1, 1)))
        self.space = sphere_space([0.5, 0.5, 0.5], [10.5, 0.5, 0.5])
        self.vertex = int(np.flatnonzero(self.pair.vertices[:, 0] < 5)[0])

    def test_far_component_is_anchored(self):
        target = self.pair.vertices[self.vertex] + [0.3, 0.0, 0.0]
        anchors = select_anchors(self.pair, self.space, {self.vertex: target})
        far = np.flatnonzero(self.pair.vertices[:, 0] > 5)
        np.testing.assert_array_equal(anchors, far)

    def test_control_moves_its_component_only(self):
        offset = np.array([0.3, 0.0, 0.0])
        target = self.pair.vertices[self.vertex] + offset
        result = morph_by_grasp(self.pair, self.space, {self.vertex: target})
        near = self.pair.vertices[:, 0] < 5
        np.testing.assert_allclose(
            result.vertices[near], self.pair.vertices[near] + offset, atol=1e-6
        )
        np.testing.assert_allclose(
            result.vertices[~near], self.pair.vertices[~near], atol=1e-6
        )

    def test_target_outside_space(self):
        target = self.pair.vertices[self.vertex] + [0.0, 0.0, 20.0]
        with self.assertRaises(GraspSpaceViolationError) as caught:
            morph_by_grasp(self.pair, self.space, {self.vertex: target})
        self.assertEqual(caught.exception.vertex, self.vertex)
        self.assertGreater(caught.exception.quadratic_form, 1.0)

    def test_no_controls_returns_rest_pose(self):
        result = morph_by_grasp(self.pair, self.space, {})
        np.testing.assert_array_equal(result.vertices, self.pair.vertices)
        self.assertEqual(result.energy, 0.0)

    def test_unknown_control_vertex(self):
        with self.assertRaises(ValueError):
            morph_by_grasp(self.pair, self.space, {999: [0.0, 0.0, 0.0]})
