"""
Depth Head Tests.
Testes da Cabeça de Profundidade.

Soft-argmin regression, the four-hypothesis confidence window and
nearest-neighbour upsampling.
"""

import numpy as np
from django.test import SimpleTestCase

from depthfusion.autodiff import GRAD_CHECK_TOLERANCE, Tensor, grad_check
from depthfusion.exceptions import ShapeError
from depthfusion.fusion import CostVolume, VolumeKind
from depthfusion.geometry import build_hypotheses
from depthfusion.head import (
    ConfidenceMap,
    DepthMap,
    RegressionNetwork,
    regress,
    upsample_nearest,
    window_starts,
)


class RegressionTest(SimpleTestCase):
    """
    Tests for soft-argmin depth and window confidence.
    Testes para profundidade soft-argmin e confiança em janela.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.hypotheses = build_hypotheses(2.0, 20.0, 8)

    def test_one_hot_scores(self):
        """Test a sharp peak gives its hypothesis / Testa pico agudo"""
        for k in (0, 3, 7):
            with self.subTest(k=k):
                scores = np.zeros((8, 2, 3))
                scores[k] = 60.0
                result = regress(Tensor(scores), self.hypotheses)
                np.testing.assert_allclose(
                    result.depth.array, self.hypotheses.values[k], rtol=1e-12
                )
                np.testing.assert_allclose(result.confidence.values, 1.0, atol=1e-12)

    def test_uniform_scores(self):
        """Test flat scores give mean depth and 4/D confidence / Testa pontuações planas"""
        result = regress(Tensor(np.zeros((8, 3, 3))), self.hypotheses)
        np.testing.assert_allclose(
            result.depth.array, np.mean(self.hypotheses.values), rtol=1e-12
        )
        np.testing.assert_allclose(result.confidence.values, 4 / 8, rtol=1e-12)

    def test_expectation_matches_loop(self):
        """Test depth equals sum p_i d_i per pixel / Testa soma p_i d_i por pixel"""
        scores = np.random.default_rng(41).normal(size=(8, 3, 4)) * 3
        result = regress(Tensor(scores), self.hypotheses)
        for y in range(3):
            for x in range(4):
                e = np.exp(scores[:, y, x] - scores[:, y, x].max())
                p = e / e.sum()
                expected = sum(p[i] * self.hypotheses.values[i] for i in range(8))
                self.assertAlmostEqual(result.depth.array[y, x], expected, delta=1e-12)
        np.testing.assert_allclose(result.probability.data.sum(axis=0), 1.0, atol=1e-12)

    def test_confidence_window_at_last_hypothesis(self):
        """Test the window shifts inside the volume / Testa janela deslocada no fim"""
        scores = np.zeros((8, 1, 1))
        scores[7] = 2.0
        scores[3] = 1.0
        result = regress(Tensor(scores), self.hypotheses)
        p = result.probability.data[:, 0, 0]
        self.assertAlmostEqual(result.confidence.values[0, 0], p[4:].sum(), delta=1e-12)

    def test_depth_within_hypothesis_range(self):
        scores = np.random.default_rng(42).normal(size=(8, 5, 5)) * 10
        depth = regress(Tensor(scores), self.hypotheses).depth.array
        self.assertTrue(((depth >= 2.0) & (depth <= 20.0)).all())

    def test_regression_gradients(self):
        scores = np.random.default_rng(43).normal(size=(8, 2, 2))
        error = grad_check(lambda s: regress(s, self.hypotheses).depth.values, [scores])
        self.assertLess(error, GRAD_CHECK_TOLERANCE)

    def test_score_depth_mismatch(self):
        with self.assertRaises(ShapeError):
            regress(Tensor(np.zeros((7, 2, 2))), self.hypotheses)

    def test_window_starts(self):
        """Test window placement edge cases / Testa casos de borda da janela"""
        argmax = np.array([0, 1, 5, 7])
        np.testing.assert_array_equal(window_starts(argmax, 8), [0, 0, 4, 4])
        np.testing.assert_array_equal(window_starts(np.array([2]), 3), [0])


class RegressionNetworkTest(SimpleTestCase):
    """
    Tests for the residual 3-D regularizer.
    Testes para o regularizador 3-D residual.
    """

    def test_scores_shape(self):
        hypotheses = build_hypotheses(1.0, 5.0, 4)
        volume = CostVolume(
            data=Tensor(np.random.default_rng(44).uniform(size=(4, 3, 2, 5))),
            hypotheses=hypotheses,
            kind=VolumeKind.FUSED,
        )
        network = RegressionNetwork(np.random.default_rng(0), channels=3, hidden=2, blocks=1)
        self.assertEqual(network(volume).shape, (4, 2, 5))


class DepthMapTest(SimpleTestCase):
    """
    Tests for DepthMap, ConfidenceMap and upsampling.
    Testes para DepthMap, ConfidenceMap e reamostragem.
    """

    def test_from_array_marks_positive_pixels(self):
        depth = DepthMap.from_array(np.array([[1.0, 0.0], [2.0, 3.0]]))
        np.testing.assert_array_equal(depth.valid, [[True, False], [True, True]])

    def test_non_positive_valid_pixel(self):
        """Test valid pixels must be positive / Testa pixels válidos positivos"""
        with self.assertRaises(ShapeError):
            DepthMap.from_array(np.array([[1.0, 0.0]]), valid=np.array([[True, True]]))

    def test_confidence_is_clipped(self):
        confidence = ConfidenceMap(np.array([[1.0 + 1e-16, -0.0, 0.5]]))
        self.assertTrue(((confidence.values >= 0) & (confidence.values <= 1)).all())

    def test_upsample_index_mapping(self):
        """Test output (i, j) copies (i // f, j // f) / Testa mapeamento de índices"""
        source = np.arange(12.0).reshape(3, 4)
        up = upsample_nearest(source, 4)
        self.assertEqual(up.shape, (12, 16))
        for i in range(12):
            for j in range(16):
                self.assertEqual(up[i, j], source[i // 4, j // 4])
        np.testing.assert_array_equal(up[::4, ::4], source)

    def test_upsample_tensor(self):
        up = upsample_nearest(Tensor(np.ones((2, 2))), 2)
        self.assertIsInstance(up, Tensor)
        self.assertEqual(up.shape, (4, 4))

    def test_upsample_rejects_volumes(self):
        with self.assertRaises(ShapeError):
            upsample_nearest(np.ones((2, 2, 2)), 2)
