"""
Multi-View Geometry Tests.
Testes de Geometria Multivista.
"""

import numpy as np
from django.test import SimpleTestCase
from scipy.spatial.transform import Rotation

from depthfusion.autodiff import Tensor
from depthfusion.exceptions import GeometryError, ShapeError
from depthfusion.geometry import (
    Intrinsics,
    Pose,
    build_hypotheses,
    inject_pose_noise,
    inter_frame_baseline,
    plane_homography,
    plane_homographies,
    reproject,
    rotation_angle,
    scale_intrinsics,
    warp_features,
    warp_volume,
)


def apply_homography(homography, u, v):
    mapped = homography @ np.array([u, v, 1.0])
    return mapped[0] / mapped[2], mapped[1] / mapped[2]


class CameraModelTest(SimpleTestCase):
    """
    Tests for Intrinsics and Pose.
    Testes para Intrinsics e Pose.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.k = Intrinsics(fx=16.0, fy=16.0, cx=7.5, cy=7.5)

    def test_inverse_matrix(self):
        np.testing.assert_allclose(self.k.matrix @ self.k.inverse_matrix, np.eye(3), atol=1e-15)

    def test_scale_intrinsics_is_linear(self):
        """Test all four values scale by the factor / Testa escala linear"""
        scaled = scale_intrinsics(self.k, 0.25)
        self.assertEqual(scaled, Intrinsics(fx=4.0, fy=4.0, cx=1.875, cy=1.875))
        self.assertEqual(self.k.scaled(0.25), scaled)

    def test_non_positive_focal(self):
        with self.assertRaises(GeometryError):
            Intrinsics(fx=0.0, fy=1.0, cx=0.0, cy=0.0)

    def test_non_positive_scale(self):
        with self.assertRaises(GeometryError):
            scale_intrinsics(self.k, 0.0)

    def test_rejects_non_orthonormal_rotation(self):
        """Test invalid rotations raise GeometryError / Testa rotações inválidas"""
        with self.assertRaises(GeometryError):
            Pose(np.diag([1.0, 1.0, 1.1]), np.zeros(3))
        with self.assertRaises(GeometryError):
            Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
        with self.assertRaises(GeometryError):
            Pose(np.eye(3), np.zeros(2))

    def test_matrix_round_trip(self):
        rotation = Rotation.from_rotvec([0.1, -0.2, 0.05]).as_matrix()
        pose = Pose(rotation, np.array([0.5, 0.0, -1.0]))
        self.assertTrue(Pose.from_matrix(pose.matrix).allclose(pose))

    def test_center_and_baseline(self):
        """Test mean distance of camera centres / Testa distância média dos centros"""
        poses = [Pose(np.eye(3), np.array([-0.5 * i, 0.0, 0.0])) for i in range(4)]
        np.testing.assert_allclose(poses[2].center, [1.0, 0.0, 0.0])
        self.assertAlmostEqual(inter_frame_baseline(poses), 0.5)

    def test_relative_to_self_is_identity(self):
        pose = Pose(Rotation.from_rotvec([0.0, 0.3, 0.0]).as_matrix(), np.ones(3))
        r_rel, t_rel = pose.relative_to(pose)
        np.testing.assert_allclose(r_rel, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(t_rel, np.zeros(3), atol=1e-15)


class HypothesisTest(SimpleTestCase):
    """
    Tests for inverse-depth hypothesis planes.
    Testes para planos de hipótese em profundidade inversa.
    """

    def test_endpoints_and_spacing(self):
        """Test exact endpoints and even inverse spacing / Testa extremos e espaçamento"""
        hypotheses = build_hypotheses(2.0, 50.0, 48)
        self.assertEqual(len(hypotheses), 48)
        self.assertEqual(hypotheses.values[0], 2.0)
        self.assertEqual(hypotheses.values[-1], 50.0)
        steps = np.diff(1.0 / hypotheses.values)
        np.testing.assert_allclose(steps, np.full(47, steps[0]), rtol=1e-9)
        self.assertTrue((np.diff(hypotheses.values) > 0).all())

    def test_invalid_ranges(self):
        for d_min, d_max, count in ((0.0, 1.0, 4), (5.0, 2.0, 4), (1.0, 2.0, 1)):
            with self.subTest(d_min=d_min, d_max=d_max, count=count):
                with self.assertRaises(GeometryError):
                    build_hypotheses(d_min, d_max, count)


class HomographyTest(SimpleTestCase):
    """
    Tests for plane-induced homographies and warping.
    Testes para homografias induzidas por planos e warping.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.k = Intrinsics(fx=16.0, fy=16.0, cx=7.5, cy=7.5)
        self.reference = Pose.identity()

    def test_identical_cameras_give_identity(self):
        homography = plane_homography(self.k, self.k, self.reference, self.reference, 5.0)
        np.testing.assert_allclose(homography, np.eye(3), rtol=0, atol=1e-12)

    def test_stereo_shift(self):
        """Test horizontal baseline shifts u by fx*b/d / Testa deslocamento estéreo"""
        baseline, depth = 0.5, 4.0
        source = Pose(np.eye(3), np.array([-baseline, 0.0, 0.0]))
        homography = plane_homography(self.k, self.k, self.reference, source, depth)
        for u, v in ((0.0, 0.0), (7.5, 3.0), (15.0, 15.0)):
            u_src, v_src = apply_homography(homography, u, v)
            self.assertAlmostEqual(u_src, u - 16.0 * baseline / depth, places=6)
            self.assertAlmostEqual(v_src, v, places=6)

    def test_far_plane_is_rotation_only(self):
        """Test d -> infinity leaves K R K^-1 / Testa plano no infinito"""
        rotation = Rotation.from_rotvec([0.0, 0.02, 0.0]).as_matrix()
        source = Pose(rotation, np.array([-0.5, 0.0, 0.0]))
        homography = plane_homography(self.k, self.k, self.reference, source, 1e9)
        expected = self.k.matrix @ rotation @ self.k.inverse_matrix
        np.testing.assert_allclose(homography, expected, rtol=0, atol=1e-6)

    def test_non_positive_depth(self):
        with self.assertRaises(GeometryError):
            plane_homography(self.k, self.k, self.reference, self.reference, 0.0)

    def test_homography_stack(self):
        source = Pose(np.eye(3), np.array([-0.5, 0.0, 0.0]))
        hypotheses = build_hypotheses(2.0, 10.0, 5)
        stack = plane_homographies(self.k, self.k, self.reference, source, hypotheses)
        self.assertEqual(stack.shape, (5, 3, 3))
        np.testing.assert_array_equal(
            stack[2], plane_homography(self.k, self.k, self.reference, source, hypotheses.values[2])
        )

    def test_reprojection_agrees_with_homography(self):
        """Test constant-depth reprojection equals the plane map / Testa reprojeção"""
        rotation = Rotation.from_rotvec([0.01, -0.03, 0.02]).as_matrix()
        source = Pose(rotation, np.array([-0.4, 0.05, 0.1]))
        depth = np.full((6, 7), 3.0)
        u_src, v_src, z = reproject(depth, self.k, self.reference, self.k, source)
        homography = plane_homography(self.k, self.k, self.reference, source, 3.0)
        for v in range(6):
            for u in range(7):
                expected_u, expected_v = apply_homography(homography, u, v)
                self.assertAlmostEqual(u_src[v, u], expected_u, places=9)
                self.assertAlmostEqual(v_src[v, u], expected_v, places=9)
        self.assertTrue((z > 0).all())


class WarpTest(SimpleTestCase):
    """
    Tests for differentiable feature warping.
    Testes para warping diferenciável de features.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.src = np.random.default_rng(21).normal(size=(2, 4, 6))

    def test_identity_warp(self):
        """Test identity homography returns the source / Testa homografia identidade"""
        warped, valid = warp_features(Tensor(self.src), np.eye(3))
        np.testing.assert_array_equal(warped.data, self.src)
        self.assertTrue(valid.all())

    def test_integer_translation(self):
        """Test a two-pixel shift and its invalid band / Testa deslocamento de dois pixels"""
        shift = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        warped, valid = warp_features(Tensor(self.src), shift)
        np.testing.assert_allclose(warped.data[:, :, :4], self.src[:, :, 2:], atol=1e-15)
        self.assertTrue(valid[:, :4].all())
        self.assertFalse(valid[:, 4:].any())
        np.testing.assert_array_equal(warped.data[:, :, 4:], 0.0)

    def test_volume_shapes(self):
        homographies = np.stack([np.eye(3)] * 3)
        warped, valid = warp_volume(Tensor(self.src), homographies)
        self.assertEqual(warped.shape, (3, 2, 4, 6))
        self.assertEqual(valid.shape, (3, 4, 6))

    def test_bad_homography_shape(self):
        with self.assertRaises(ShapeError):
            warp_features(Tensor(self.src), np.eye(2))


class PoseNoiseTest(SimpleTestCase):
    """
    Tests for Gaussian pose perturbation.
    Testes para perturbação gaussiana de pose.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.pose = Pose(np.eye(3), np.array([-0.5, 0.0, 0.0]))

    def test_zero_noise_returns_same_pose(self):
        """Test zero sigmas return the pose but consume draws / Testa ruído nulo"""
        rng = np.random.default_rng(0)
        self.assertIs(inject_pose_noise(self.pose, 0.0, 0.0, 0.5, rng), self.pose)
        reference = np.random.default_rng(0)
        reference.standard_normal(6)
        self.assertEqual(rng.standard_normal(), reference.standard_normal())

    def test_same_seed_same_noise(self):
        first = inject_pose_noise(self.pose, 1.0, 0.05, 0.5, np.random.default_rng(3))
        second = inject_pose_noise(self.pose, 1.0, 0.05, 0.5, np.random.default_rng(3))
        self.assertTrue(first.allclose(second))

    def test_noisy_pose_stays_valid(self):
        noisy = inject_pose_noise(self.pose, 5.0, 0.1, 0.5, np.random.default_rng(4))
        self.assertLess(np.abs(noisy.rotation.T @ noisy.rotation - np.eye(3)).max(), 1e-10)

    def test_noise_statistics(self):
        """Test angle and translation statistics over 10k draws / Testa estatísticas"""
        rng = np.random.default_rng(5)
        identity = Pose.identity()
        sigma_rot, sigma_trans, baseline = 1.0, 0.1, 0.5
        angles, offsets = [], []
        for _ in range(10_000):
            noisy = inject_pose_noise(identity, sigma_rot, sigma_trans, baseline, rng)
            angles.append(rotation_angle(noisy.rotation))
            offsets.append(noisy.translation)
        expected_angle = np.deg2rad(sigma_rot) * np.sqrt(8.0 / np.pi)
        self.assertLess(abs(np.mean(angles) / expected_angle - 1.0), 0.05)
        self.assertLess(abs(np.std(offsets) / (sigma_trans * baseline) - 1.0), 0.05)

    def test_negative_sigma(self):
        with self.assertRaises(GeometryError):
            inject_pose_noise(self.pose, -1.0, 0.0, 0.5, np.random.default_rng(0))
