"""
Synthetic Scene and Dataset Format Tests.
Testes de Cenas Sintéticas e do Formato do Dataset.

Generator determinism, the fronto-parallel oracle, bit-exact dataset
round-trips, error locations in malformed files and multi-view photometric
consistency of the renderer.
"""

import shutil
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from PIL import Image
from scipy import ndimage

from depthfusion.exceptions import ConfigurationError, DatasetFormatError
from depthfusion.factories import SceneConfigFactory
from depthfusion.geometry import Intrinsics, Pose, reproject
from depthfusion.scenes import generate_scene, load_dataset, make_dataset
from depthfusion.scenes.dataset import (
    list_scenes,
    load_sample,
    parse_literal,
    read_manifest,
    scene_dir,
)
from depthfusion.scenes.io import (
    depth_to_preview,
    read_camera,
    read_meta,
    read_pfm,
    write_camera,
    write_meta,
    write_pfm,
    write_pgm_preview,
)
from depthfusion.scenes.synth import (
    SceneConfig,
    SceneLayout,
    build_layout,
    default_intrinsics,
    derive_seed,
    render_view,
)


class TempDirMixin:
    """Per-test scratch directory / Diretório temporário por teste."""

    def setUp(self):
        super().setUp()
        self.tmp = Path(tempfile.mkdtemp(prefix="depthfusion-test-"))
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)


class SceneGeneratorTest(SimpleTestCase):
    """
    Tests for generate_scene.
    Testes para generate_scene.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.config = SceneConfigFactory()

    def test_same_seed_is_bit_identical(self):
        """Test determinism for a fixed seed / Testa determinismo"""
        first = generate_scene(self.config, 7)
        second = generate_scene(self.config, 7)
        self.assertTrue(first.identical_to(second))

    def test_different_seeds_differ(self):
        first = generate_scene(self.config, 7)
        second = generate_scene(self.config, 8)
        self.assertFalse(np.array_equal(first.frames[0], second.frames[0]))

    def test_sample_layout(self):
        """Test frame count, shapes and reference view / Testa quadros e referência"""
        sample = generate_scene(self.config, 3)
        self.assertEqual(sample.n_frames, 3)
        self.assertEqual(sample.reference_index, 1)
        self.assertEqual(sample.source_indices, [0, 2])
        for frame in sample.frames:
            self.assertEqual(frame.shape, (1, 16, 16))
            self.assertTrue(((frame >= 0) & (frame <= 1)).all())
        self.assertTrue(sample.poses[1].allclose(Pose.identity()))
        self.assertGreaterEqual(sample.gt_depth.valid.mean(), 0.5)

    def test_values_survive_float32(self):
        """Test samples are float32-representable / Testa representação float32"""
        sample = generate_scene(self.config, 4)
        for array in (*sample.frames, sample.gt_depth.array):
            np.testing.assert_array_equal(array.astype(np.float32).astype(np.float64), array)

    def test_camera_path(self):
        """Test camera centres lie on the lateral baseline / Testa trajetória da câmera"""
        sample = generate_scene(self.config, 5)
        for index, pose in enumerate(sample.poses):
            expected = np.array([(index - 1) * self.config.baseline, 0.0, 0.0])
            np.testing.assert_allclose(pose.center, expected, atol=1e-12)

    def test_fronto_parallel_depth(self):
        """Test a lone wall at 8 m gives constant depth / Testa parede a 8 m"""
        config = SceneConfigFactory(fronto_parallel_depth=8.0)
        sample = generate_scene(config, 0)
        self.assertTrue(sample.gt_depth.valid.all())
        np.testing.assert_allclose(sample.gt_depth.array, 8.0, rtol=1e-6)

    def test_dynamic_flag(self):
        config = SceneConfigFactory(dynamic_probability=1.0)
        self.assertTrue(generate_scene(config, 2).flags.has_dynamic_object)
        self.assertFalse(generate_scene(self.config, 2).flags.has_dynamic_object)

    def test_texture_level_flag(self):
        config = SceneConfigFactory(texture_level=0.0)
        self.assertEqual(generate_scene(config, 1).flags.texture_level, 0.0)

    def test_invalid_config_collects_problems(self):
        """Test every bad field is reported / Testa que todos os erros são reportados"""
        with self.assertRaises(ConfigurationError) as ctx:
            SceneConfig(height=10, n_frames=1, texture_level=2.0)
        self.assertEqual(
            set(ctx.exception.problems), {"height", "n_frames", "texture_level"}
        )

    def test_derive_seed(self):
        self.assertEqual(derive_seed(0, 1), derive_seed(0, 1))
        self.assertNotEqual(derive_seed(0, 1), derive_seed(0, 2))
        self.assertNotEqual(derive_seed(0, "a"), derive_seed(1, "a"))
        self.assertGreaterEqual(derive_seed(3, "attempt", 2), 0)


class DatasetTest(TempDirMixin, SimpleTestCase):
    """
    Tests for writing and loading datasets.
    Testes para escrita e leitura de datasets.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        super().setUp()
        self.config = SceneConfigFactory(seed=11)

    def test_round_trip_is_bit_exact(self):
        """Test loaded scenes equal regenerated ones / Testa ida e volta exata"""
        root = make_dataset(self.config, 2, self.tmp / "data")
        self.assertEqual(len(list_scenes(root)), 2)
        for index in range(2):
            loaded = load_sample(scene_dir(root, index))
            regenerated = generate_scene(self.config, derive_seed(self.config.seed, index))
            self.assertTrue(loaded.identical_to(regenerated))

    def test_parallel_generation_matches_serial(self):
        serial = make_dataset(self.config, 2, self.tmp / "serial")
        parallel = make_dataset(self.config, 2, self.tmp / "parallel", workers=2)
        for a, b in zip(load_dataset(serial), load_dataset(parallel), strict=True):
            self.assertTrue(a.identical_to(b))

    def test_manifest_round_trip(self):
        make_dataset(self.config, 1, self.tmp / "data")
        config, count = read_manifest(self.tmp / "data")
        self.assertEqual(config, self.config)
        self.assertEqual(count, 1)

    def test_empty_dataset(self):
        """Test n_scenes = 0 writes only a manifest / Testa dataset vazio"""
        root = make_dataset(self.config, 0, self.tmp / "empty")
        self.assertEqual(read_manifest(root)[1], 0)
        with self.assertRaises(DatasetFormatError):
            load_dataset(root)

    def test_missing_camera_file(self):
        """Test frame/camera mismatch names both counts / Testa quadro sem câmera"""
        root = make_dataset(self.config, 1, self.tmp / "data")
        (scene_dir(root, 0) / "frame_2.cam").unlink()
        with self.assertRaises(DatasetFormatError) as ctx:
            load_sample(scene_dir(root, 0))
        self.assertIn("3 images", str(ctx.exception))
        self.assertIn("2 cameras", str(ctx.exception))

    def test_missing_directory(self):
        with self.assertRaises(DatasetFormatError):
            load_dataset(self.tmp / "nowhere")

    def test_parse_literal(self):
        self.assertIsNone(parse_literal("None"))
        self.assertEqual(parse_literal(" 0.5 "), 0.5)
        self.assertEqual(parse_literal("16"), 16)
        with self.assertRaises(ValueError):
            parse_literal("open(")


class FileFormatTest(TempDirMixin, SimpleTestCase):
    """
    Tests for PFM, camera, metadata and preview files.
    Testes para arquivos PFM, câmera, metadados e pré-visualização.
    """

    def test_pfm_round_trip(self):
        """Test 1- and 3-channel PFM files / Testa PFM de 1 e 3 canais"""
        rng = np.random.default_rng(61)
        for shape in ((4, 5), (3, 4, 5)):
            with self.subTest(shape=shape):
                array = rng.uniform(size=shape).astype(np.float32).astype(np.float64)
                write_pfm(self.tmp / "x.pfm", array)
                np.testing.assert_array_equal(read_pfm(self.tmp / "x.pfm"), array)

    def test_truncated_pfm_reports_offset(self):
        """Test truncation error carries the byte offset / Testa offset do truncamento"""
        path = self.tmp / "x.pfm"
        write_pfm(path, np.ones((4, 4)))
        raw = path.read_bytes()[:-10]
        path.write_bytes(raw)
        with self.assertRaises(DatasetFormatError) as ctx:
            read_pfm(path)
        self.assertEqual(ctx.exception.offset, len(raw))
        self.assertIn(f"(byte {len(raw)})", str(ctx.exception))

    def test_bad_pfm_magic(self):
        path = self.tmp / "x.pfm"
        path.write_bytes(b"P6\n4 4\n255\n")
        with self.assertRaises(DatasetFormatError) as ctx:
            read_pfm(path)
        self.assertEqual(ctx.exception.offset, 0)

    def test_camera_round_trip(self):
        intrinsics = Intrinsics(fx=16.0, fy=16.0, cx=7.5, cy=7.5)
        pose = Pose(np.eye(3), np.array([-0.5, 0.0, 0.1]))
        write_camera(self.tmp / "c.cam", intrinsics, pose)
        loaded_k, loaded_pose = read_camera(self.tmp / "c.cam")
        self.assertEqual(loaded_k, intrinsics)
        np.testing.assert_array_equal(loaded_pose.matrix, pose.matrix)

    def test_camera_bad_line(self):
        """Test parse errors report the line number / Testa número da linha"""
        path = self.tmp / "c.cam"
        write_camera(path, Intrinsics(1.0, 1.0, 0.0, 0.0), Pose.identity())
        lines = path.read_text().splitlines()
        lines[1] = "0.0 1.0 oops"
        path.write_text("\n".join(lines) + "\n")
        with self.assertRaises(DatasetFormatError) as ctx:
            read_camera(path)
        self.assertEqual(ctx.exception.line, 2)
        self.assertIn("(line 2)", str(ctx.exception))

    def test_camera_wrong_row_count(self):
        path = self.tmp / "c.cam"
        path.write_text("1 0 0\n0 1 0\n0 0 1\n")
        with self.assertRaises(DatasetFormatError):
            read_camera(path)

    def test_meta_round_trip(self):
        write_meta(self.tmp / "meta.txt", {"seed": 5, "has_dynamic_object": False})
        self.assertEqual(
            read_meta(self.tmp / "meta.txt"), {"seed": "5", "has_dynamic_object": "False"}
        )

    def test_pgm_preview(self):
        """Test depth maps to 8-bit grey levels / Testa níveis de cinza de 8 bits"""
        depth = np.array([[2.0, 20.0, 11.0, 40.0]])
        np.testing.assert_array_equal(depth_to_preview(depth, 2.0, 20.0), [[0, 255, 128, 255]])
        write_pgm_preview(self.tmp / "d.pgm", depth, 2.0, 20.0)
        with Image.open(self.tmp / "d.pgm") as image:
            self.assertEqual(image.mode, "L")
            self.assertEqual(image.size, (4, 1))


def reprojection_error(layout, sample, src):
    """
    Photometric error of warping frame ``src`` onto the reference frame with
    the exact reference depth; also returns the pixels the source camera
    sees unoccluded and away from depth edges.
    """
    ref = sample.reference_index
    k_ref, k_src = sample.intrinsics[ref], sample.intrinsics[src]
    reference = render_view(layout, k_ref, sample.poses[ref])
    source = render_view(layout, k_src, sample.poses[src], src - ref)
    height, width = reference.depth.shape

    u, v, z = reproject(reference.depth, k_ref, sample.poses[ref], k_src, sample.poses[src])
    inside = (
        (reference.depth > 0)
        & np.isfinite(u)
        & (u >= 0)
        & (u <= width - 1)
        & (v >= 0)
        & (v <= height - 1)
    )
    rows = np.rint(np.where(inside, v, 0)).astype(int)
    cols = np.rint(np.where(inside, u, 0)).astype(int)
    seen = source.depth[rows, cols]
    spread = ndimage.maximum_filter(source.depth, size=3) - ndimage.minimum_filter(
        source.depth, size=3
    )
    visible = inside & (np.abs(seen - z) < 0.02 * z) & (spread[rows, cols] < 0.02 * z)

    coords = np.stack([np.where(inside, v, 0.0), np.where(inside, u, 0.0)])
    warped = ndimage.map_coordinates(source.image[0], coords, order=1)
    error = np.abs(warped - reference.image[0])
    return error, visible, inside, reference


class PhotometricConsistencyTest(SimpleTestCase):
    """
    Tests for multi-view consistency of rendered scenes.
    Testes para consistência multi-vista das cenas renderizadas.
    """

    def test_static_scene_reprojects(self):
        """Test warping with exact depth reproduces the reference / Testa reprojeção"""
        config = SceneConfig(height=64, width=64, n_frames=3)
        sample = generate_scene(config, seed=11)
        layout = build_layout(config, sample.seed)
        for src in sample.source_indices:
            error, visible, _, reference = reprojection_error(layout, sample, src)
            self.assertGreater(visible.mean(), 0.3)
            value_range = np.ptp(reference.image[0])
            self.assertLess(error[visible].mean(), 0.02 * value_range)

    def test_dynamic_object_breaks_consistency(self):
        """Test the moving object violates reprojection / Testa objeto dinâmico"""
        config = SceneConfig(height=64, width=64, n_frames=3, dynamic_probability=1.0)
        src = 0
        # first seed whose moving object shows up in the reference view
        for seed in range(12, 40):
            sample = generate_scene(config, seed=seed)
            layout = build_layout(config, sample.seed)
            moving_error, _, inside, reference = reprojection_error(layout, sample, src)
            moving = inside & (reference.primitive_ids == layout.dynamic_index)
            if moving.sum() >= 10:
                break
        self.assertTrue(sample.flags.has_dynamic_object)
        self.assertGreaterEqual(moving.sum(), 10)

        frozen = SceneLayout(
            layout.config,
            layout.seed,
            tuple(replace(p, velocity=None) for p in layout.primitives),
            layout.noise_table,
        )
        static_error, _, _, _ = reprojection_error(frozen, sample, src)
        self.assertGreater(moving_error[moving].mean(), static_error[moving].mean())

    def test_texture_free_planes_are_flat(self):
        """Test texture_level 0 gives constant planes / Testa planos sem textura"""
        config = SceneConfig(texture_level=0.0)
        sample = generate_scene(config, seed=13)
        layout = build_layout(config, sample.seed)
        view = render_view(layout, sample.intrinsics[1], sample.poses[1])
        for index, primitive in enumerate(layout.primitives):
            region = view.primitive_ids == index
            if primitive.kind == "plane" and region.any():
                self.assertLess(np.ptp(view.image[0][region]), 1e-12)

    def test_texture_variance_grows_with_level(self):
        variances = []
        flat = None
        for level in (0.0, 0.5, 1.0):
            config = SceneConfig(texture_level=level)
            layout = build_layout(config, 14)
            image = render_view(layout, default_intrinsics(config), Pose.identity()).image
            if flat is None:
                flat = image
            variances.append(np.var(image - flat))
        self.assertEqual(variances[0], 0.0)
        self.assertLess(variances[0], variances[1])
        self.assertLess(variances[1], variances[2])
