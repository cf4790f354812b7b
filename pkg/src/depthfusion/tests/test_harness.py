"""
Harness Tests.
Testes do Harness.

Training, evaluation under pose noise, the noise benchmark, ablations and
map export on tiny scenes and models.
"""

import csv
import json
import math
import shutil
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from PIL import Image

from depthfusion.checkpoint import load_checkpoint
from depthfusion.exceptions import ConfigurationError, GeometryError
from depthfusion.factories import ModelConfigFactory, RunConfigFactory, SceneConfigFactory
from depthfusion.harness.ablation import ablate, format_ablation_table, write_ablation_table
from depthfusion.harness.benchmark import (
    CSV_HEADER,
    bench_noise,
    degradation_ratio,
    write_noise_json,
    write_noise_table,
)
from depthfusion.harness.evaluation import evaluate, perturb_sample, predict
from depthfusion.harness.export import export_maps
from depthfusion.harness.training import epoch_order, step_budget, train
from depthfusion.model import build_model, forward_pipeline
from depthfusion.scenes.io import read_pfm
from depthfusion.scenes.synth import generate_scene


def tiny_samples(count, offset=0):
    config = SceneConfigFactory()
    return [generate_scene(config, seed=offset + i) for i in range(count)]


class TempDirMixin:
    def make_tmp(self):
        path = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, path, ignore_errors=True)
        return path


class TrainingTest(TempDirMixin, SimpleTestCase):
    """
    Tests for the training loop.
    Testes para o loop de treino.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.samples = tiny_samples(2)
        self.config = RunConfigFactory(max_steps=2, epochs=1)

    def test_two_step_smoke_run(self):
        """Test a short run writes its outputs / Testa execução curta"""
        out = self.make_tmp()
        result = train(self.config, out, samples=self.samples)
        self.assertEqual(result.steps, 2)
        self.assertTrue(all(math.isfinite(loss) for loss in result.losses))
        self.assertTrue(result.checkpoint.exists())
        self.assertEqual(len(result.epoch_checkpoints), 1)

        with result.loss_log.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["step", "epoch", "loss", "lr"])
        self.assertEqual([row[0] for row in rows[1:]], ["0", "1"])
        self.assertEqual(float(rows[1][2]), result.losses[0])

    def test_run_is_reproducible(self):
        """Test two runs with one seed match bit-exactly / Testa reprodutibilidade"""
        first = train(self.config, self.make_tmp(), samples=self.samples)
        second = train(self.config, self.make_tmp(), samples=self.samples)
        self.assertEqual(first.losses, second.losses)
        for name, array in first.model.state_dict().items():
            np.testing.assert_array_equal(second.model.state_dict()[name], array)

    def test_checkpoint_reloads_trained_weights(self):
        result = train(self.config, self.make_tmp(), samples=self.samples)
        model, info = load_checkpoint(result.checkpoint, expected=self.config.model_config())
        self.assertEqual(info.step, 2)
        for name, array in result.model.state_dict().items():
            np.testing.assert_array_equal(model.state_dict()[name], array)

    def test_step_budget(self):
        config = RunConfigFactory(epochs=3, max_steps=100, batch_size=2)
        self.assertEqual(step_budget(config, 5), 9)
        self.assertEqual(step_budget(config.replace(max_steps=4), 5), 4)

    def test_epoch_order(self):
        order = epoch_order(7, 0, 10)
        self.assertEqual(sorted(order.tolist()), list(range(10)))
        np.testing.assert_array_equal(order, epoch_order(7, 0, 10))
        self.assertFalse(np.array_equal(order, epoch_order(7, 1, 10)))


class EvaluationTest(SimpleTestCase):
    """
    Tests for evaluation under pose noise.
    Testes para avaliação sob ruído de pose.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.samples = tiny_samples(3, offset=10)
        self.model = build_model(ModelConfigFactory(), seed=0)
        self.sample = self.samples[0]
        self.ref = self.sample.reference_index

    def test_zero_noise_returns_sample(self):
        rng = np.random.default_rng(0)
        self.assertIs(perturb_sample(self.sample, 0.0, 0.0, rng), self.sample)

    def test_noise_moves_sources_only(self):
        """Test the reference pose stays fixed / Testa pose de referência fixa"""
        noisy = perturb_sample(self.sample, 1.0, 0.05, np.random.default_rng(1))
        np.testing.assert_array_equal(
            noisy.poses[self.ref].matrix, self.sample.poses[self.ref].matrix
        )
        for index in self.sample.source_indices:
            self.assertFalse(
                np.array_equal(noisy.poses[index].matrix, self.sample.poses[index].matrix)
            )
        # original sample is untouched
        self.assertIsNot(noisy, self.sample)
        self.assertIs(noisy.frames, self.sample.frames)

    def test_noise_all_poses(self):
        noisy = perturb_sample(self.sample, 1.0, 0.0, np.random.default_rng(1), all_poses=True)
        self.assertFalse(
            np.array_equal(noisy.poses[self.ref].matrix, self.sample.poses[self.ref].matrix)
        )

    def test_negative_sigma(self):
        with self.assertRaises(GeometryError):
            evaluate(self.model, self.samples, -1.0, 0.0)

    def test_predict_is_repeatable(self):
        first = predict(self.model, self.sample, 1.0, 0.02, noise_seed=3, scene_index=2)
        second = predict(self.model, self.sample, 1.0, 0.02, noise_seed=3, scene_index=2)
        np.testing.assert_array_equal(first.array, second.array)
        self.assertFalse(first.values.requires_grad)

    def test_workers_do_not_change_results(self):
        """Test thread pool gives identical metrics / Testa paralelismo determinístico"""
        serial = evaluate(self.model, self.samples, 1.0, 0.02, noise_seed=5)
        pooled = evaluate(self.model, self.samples, 1.0, 0.02, noise_seed=5, workers=2)
        self.assertEqual(serial.as_tuple(), pooled.as_tuple())
        self.assertEqual(serial.n_pixels, pooled.n_pixels)
        self.assertEqual(serial.metadata["n_scenes"], 3)
        self.assertEqual(serial.metadata["sigma_rot"], 1.0)


class BenchmarkTest(TempDirMixin, SimpleTestCase):
    """
    Tests for the pose-noise benchmark grid.
    Testes para a grade de ruído de pose.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.samples = tiny_samples(2, offset=20)
        self.model = build_model(ModelConfigFactory(), seed=0)
        self.config = RunConfigFactory(sigma_rot=(0.0, 1.0), sigma_trans=(0.0, 0.05))

    def test_degradation_ratio(self):
        self.assertEqual(degradation_ratio(3.0, 2.0), 1.5)
        self.assertEqual(degradation_ratio(0.0, 0.0), 1.0)
        self.assertEqual(degradation_ratio(1.0, 0.0), math.inf)

    def test_grid(self):
        """Test one cell per grid point, clean cell at ratio 1 / Testa a grade"""
        clean, cells = bench_noise(self.model, self.samples, self.config)
        self.assertEqual(
            [(c.sigma_rot, c.sigma_trans) for c in cells],
            [(0.0, 0.0), (0.0, 0.05), (1.0, 0.0), (1.0, 0.05)],
        )
        self.assertIs(cells[0].report, clean)
        self.assertEqual(cells[0].ratios, {"abs_rel": 1.0, "sq_rel": 1.0, "rmse": 1.0})
        for cell in cells[1:]:
            self.assertAlmostEqual(
                cell.ratios["abs_rel"], cell.report.abs_rel / clean.abs_rel, places=12
            )

    def test_tables(self):
        _, cells = bench_noise(self.model, self.samples, self.config)
        out = self.make_tmp()
        table = write_noise_table(out / "noise_table.csv", cells)
        with table.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], CSV_HEADER)
        self.assertEqual(len(rows), 5)
        payload = json.loads(write_noise_json(out / "noise.json", cells).read_text())
        self.assertEqual(len(payload), 4)
        self.assertEqual(payload[3]["report"]["metadata"]["sigma_trans"], 0.05)


class AblationTest(TempDirMixin, SimpleTestCase):
    """
    Tests for the ablation driver.
    Testes para o driver de ablação.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.train_samples = tiny_samples(2, offset=30)
        self.eval_samples = tiny_samples(1, offset=40)
        self.config = RunConfigFactory(seeds=(0,), max_steps=1)

    def test_fusion_axis(self):
        """Test every fusion variant is trained and scored / Testa eixo de fusão"""
        seen = []
        out = self.make_tmp()
        results = ablate(
            self.config,
            "fusion",
            out,
            train_samples=self.train_samples,
            eval_samples=self.eval_samples,
            on_report=lambda variant, seed, report: seen.append((variant, seed)),
        )
        self.assertEqual(
            [r.variant for r in results], ["concat", "cross_attention", "proposed"]
        )
        self.assertEqual(seen, [("concat", 0), ("cross_attention", 0), ("proposed", 0)])
        self.assertTrue((out / "proposed" / "seed_0" / "model.ckpt").exists())
        for result in results:
            self.assertEqual(list(result.reports), [0])
            self.assertEqual(result.median("abs_rel"), result.reports[0].abs_rel)

        table = write_ablation_table(out / "ablation_fusion.csv", results)
        self.assertEqual(len(table.read_text().splitlines()), 4)
        text = format_ablation_table(results)
        self.assertIn("cross_attention", text)
        self.assertIn("AbsRel", text)

    def test_unknown_axis(self):
        with self.assertRaises(ConfigurationError):
            ablate(self.config, "optimizer", self.make_tmp(), [], [])


class ExportTest(TempDirMixin, SimpleTestCase):
    """
    Tests for depth map export.
    Testes para exportação de mapas.
    """

    def test_three_files_per_scene(self):
        samples = tiny_samples(2, offset=50)
        model = build_model(ModelConfigFactory(), seed=0)
        out = self.make_tmp() / "maps"
        written = export_maps(model, samples, out)
        self.assertEqual(
            sorted(p.name for p in written),
            [
                "scene_00000_confidence.pfm",
                "scene_00000_depth.pfm",
                "scene_00000_depth.pgm",
                "scene_00001_confidence.pfm",
                "scene_00001_depth.pfm",
                "scene_00001_depth.pgm",
            ],
        )
        depth = read_pfm(out / "scene_00000_depth.pfm")
        expected = forward_pipeline(samples[0], model).depth.array
        np.testing.assert_array_equal(depth, expected.astype(np.float32))
        confidence = read_pfm(out / "scene_00000_confidence.pfm")
        self.assertTrue(((confidence >= 0) & (confidence <= 1)).all())
        with Image.open(out / "scene_00001_depth.pgm") as preview:
            self.assertEqual(preview.mode, "L")
            self.assertEqual(preview.size, (16, 16))
