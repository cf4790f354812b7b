"""
Loss and Metrics Tests.
Testes de Loss e Métricas.
"""

import json

import numpy as np
from django.test import SimpleTestCase

from depthfusion.autodiff import Tensor
from depthfusion.exceptions import EvaluationError
from depthfusion.head import DepthMap
from depthfusion.metrics import (
    MetricsAccumulator,
    MetricsReport,
    abs_rel,
    delta_metrics,
    evaluate_all,
    joint_mask,
    mae_loss,
    rmse,
    sq_rel,
)


class MetricValuesTest(SimpleTestCase):
    """
    Tests for the individual metric functions.
    Testes para as funções de métricas individuais.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.gt = np.array([2.0, 5.0])
        self.pred = np.array([1.0, 6.0])

    def test_perfect_prediction(self):
        """Test pred == gt gives (0, 0, 0, 1, 1, 1) / Testa predição perfeita"""
        gt = np.random.default_rng(51).uniform(1, 50, size=100)
        report = evaluate_all(gt.copy(), gt)
        self.assertEqual(report.as_tuple(), (0.0, 0.0, 0.0, 1.0, 1.0, 1.0))

    def test_worked_example(self):
        """Test hand-computed values for two pixels / Testa valores calculados à mão"""
        self.assertAlmostEqual(abs_rel(self.pred, self.gt), 0.35, places=12)
        self.assertAlmostEqual(sq_rel(self.pred, self.gt), 0.145, places=12)
        self.assertAlmostEqual(sq_rel(self.pred, self.gt, convention="kitti"), 0.35, places=12)
        self.assertAlmostEqual(rmse(self.pred, self.gt), 1.0, places=12)
        self.assertEqual(delta_metrics(self.pred, self.gt), (0.5, 0.5, 0.5))

    def test_uniform_ratio_thresholds(self):
        """Test pred = 1.9 gt falls between 1.25^2 and 1.25^3 / Testa razão 1.9"""
        gt = np.array([1.0, 4.0, 10.0])
        self.assertEqual(delta_metrics(1.9 * gt, gt), (0.0, 0.0, 1.0))
        self.assertEqual(delta_metrics(2.0 * gt, gt), (0.0, 0.0, 0.0))

    def test_deltas_are_nested(self):
        """Test delta1 <= delta2 <= delta3 on random inputs / Testa aninhamento"""
        rng = np.random.default_rng(52)
        for _ in range(1000):
            gt = rng.uniform(0.5, 50, size=20)
            pred = gt * np.exp(rng.normal(scale=0.5, size=20))
            d1, d2, d3 = delta_metrics(pred, gt)
            self.assertTrue(0 <= d1 <= d2 <= d3 <= 1)

    def test_max_depth_filter(self):
        gt = np.array([2.0, 5.0, 80.0])
        pred = np.array([1.0, 6.0, 1.0])
        self.assertAlmostEqual(abs_rel(pred, gt, max_depth=10.0), 0.35, places=12)

    def test_depth_maps_use_joint_mask(self):
        """Test invalid pixels of either map are skipped / Testa máscara conjunta"""
        gt = DepthMap.from_array(np.array([[2.0, 5.0, 0.0]]))
        pred = DepthMap.from_array(
            np.array([[1.0, 6.0, 3.0]]), valid=np.array([[True, True, True]])
        )
        np.testing.assert_array_equal(joint_mask(pred, gt), [[True, True, False]])
        self.assertAlmostEqual(abs_rel(pred, gt), 0.35, places=12)

    def test_empty_pixel_set(self):
        """Test no valid pixels raises EvaluationError / Testa conjunto vazio"""
        with self.assertRaises(EvaluationError):
            abs_rel(np.array([1.0]), np.array([50.0]), max_depth=10.0)

    def test_non_positive_ground_truth(self):
        with self.assertRaises(EvaluationError):
            rmse(np.array([1.0]), np.array([0.0]))

    def test_shape_mismatch(self):
        with self.assertRaises(EvaluationError):
            rmse(np.ones(3), np.ones(2))

    def test_unknown_convention(self):
        with self.assertRaises(EvaluationError):
            sq_rel(self.pred, self.gt, convention="log")


class AccumulatorTest(SimpleTestCase):
    """
    Tests for pixel-weighted aggregation and reports.
    Testes para agregação ponderada por pixels e relatórios.
    """

    def test_matches_concatenated_evaluation(self):
        """Test accumulation equals one evaluation over all pixels / Testa agregação"""
        rng = np.random.default_rng(53)
        gts = [rng.uniform(1, 20, size=n) for n in (5, 40, 13)]
        preds = [g * rng.uniform(0.7, 1.4, size=g.size) for g in gts]
        accumulator = MetricsAccumulator()
        for pred, gt in zip(preds, gts, strict=True):
            accumulator.update(pred, gt)
        self.assertEqual(accumulator.n_pixels, 58)
        combined = evaluate_all(np.concatenate(preds), np.concatenate(gts))
        self.assertEqual(accumulator.report().as_tuple(), combined.as_tuple())

    def test_pixel_weighting(self):
        """Test a large map outweighs a small one / Testa ponderação por pixels"""
        accumulator = MetricsAccumulator()
        accumulator.update(np.full(1, 2.0), np.full(1, 1.0))
        accumulator.update(np.full(3, 1.0), np.full(3, 1.0))
        self.assertAlmostEqual(accumulator.report().abs_rel, 0.25, places=12)

    def test_empty_report(self):
        with self.assertRaises(EvaluationError):
            MetricsAccumulator().report()

    def test_report_serialization(self):
        """Test JSON payload carries metadata / Testa serialização JSON"""
        report = evaluate_all(np.array([1.0, 6.0]), np.array([2.0, 5.0]), fusion="proposed")
        payload = json.loads(report.to_json())
        self.assertEqual(payload["metadata"], {"fusion": "proposed"})
        self.assertEqual(payload["n_pixels"], 2)
        self.assertEqual(MetricsReport.from_dict(payload).as_tuple(), report.as_tuple())

    def test_report_rejects_unnested_deltas(self):
        with self.assertRaises(EvaluationError):
            MetricsReport(0.1, 0.1, 0.1, 0.9, 0.5, 1.0, n_pixels=10)


class MaeLossTest(SimpleTestCase):
    """
    Tests for the masked MAE objective.
    Testes para o objetivo MAE mascarado.
    """

    def test_value_and_gradient(self):
        """Test loss value and sign/N gradient / Testa valor e gradiente sign/N"""
        values = Tensor(np.array([[1.0, 6.0, 3.0, 2.0]]), requires_grad=True)
        pred = DepthMap(values, np.ones((1, 4), dtype=bool))
        gt = DepthMap.from_array(np.array([[2.0, 5.0, 0.0, 4.0]]))
        loss = mae_loss(pred, gt)
        self.assertAlmostEqual(loss.item(), (1.0 + 1.0 + 2.0) / 3, places=12)
        loss.backward()
        np.testing.assert_allclose(values.grad, [[-1 / 3, 1 / 3, 0.0, -1 / 3]], atol=1e-15)

    def test_no_valid_pixels(self):
        pred = DepthMap.from_array(np.ones((2, 2)))
        gt = DepthMap.from_array(np.zeros((2, 2)))
        with self.assertRaises(EvaluationError):
            mae_loss(pred, gt)
