"""
Checkpoint Tests.
Testes de Checkpoint.
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from depthfusion.checkpoint import (
    CheckpointInfo,
    load_checkpoint,
    read_info,
    read_tensors,
    save_checkpoint,
    sidecar_path,
    write_tensors,
)
from depthfusion.exceptions import CheckpointError
from depthfusion.factories import ModelConfigFactory
from depthfusion.model import build_model


class CheckpointTest(SimpleTestCase):
    """
    Tests for the tensor container and model checkpoints.
    Testes para o contêiner de tensores e checkpoints de modelo.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.tmp = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)
        self.config = ModelConfigFactory()
        self.model = build_model(self.config, seed=4)
        self.path = self.tmp / "nested" / "model.ckpt"

    def test_save_and_load(self):
        """Test a saved model reloads with equal weights / Testa salvar e carregar"""
        info = CheckpointInfo(self.config, epoch=3, step=42, seed=4, extra={"best_loss": "0.5"})
        save_checkpoint(self.path, self.model, info)
        self.assertTrue(sidecar_path(self.path).exists())

        loaded, loaded_info = load_checkpoint(self.path, expected=self.config)
        self.assertEqual(loaded_info, info)
        original = self.model.state_dict()
        restored = loaded.state_dict()
        self.assertEqual(list(restored), list(original))
        for name, array in original.items():
            np.testing.assert_array_equal(restored[name], array)

    def test_sidecar_name(self):
        self.assertEqual(sidecar_path(Path("a/model.ckpt")), Path("a/model.ckpt.ini"))

    def test_config_mismatch(self):
        """Test a different architecture is refused / Testa configuração divergente"""
        save_checkpoint(self.path, self.model, CheckpointInfo(self.config))
        with self.assertRaises(CheckpointError) as ctx:
            load_checkpoint(self.path, expected=ModelConfigFactory(fusion="concat"))
        self.assertIn("fusion", str(ctx.exception))

    def test_weights_do_not_fit_config(self):
        save_checkpoint(self.path, self.model, CheckpointInfo(self.config))
        write_tensors(self.path, {"unrelated": np.zeros(3)})
        with self.assertRaises(CheckpointError):
            load_checkpoint(self.path)

    def test_missing_sidecar(self):
        write_tensors(self.path.with_name("bare.ckpt"), {"w": np.ones(2)})
        with self.assertRaises(CheckpointError):
            read_info(self.path.with_name("bare.ckpt"))

    def test_missing_file(self):
        with self.assertRaises(CheckpointError):
            read_tensors(self.tmp / "absent.ckpt")


class TensorContainerTest(SimpleTestCase):
    """
    Tests for the binary tensor container.
    Testes para o contêiner binário de tensores.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.tmp = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)
        self.path = self.tmp / "weights.ckpt"
        rng = np.random.default_rng(8)
        self.tensors = {
            "extractor.stem.weight": rng.normal(size=(4, 1, 3, 3)),
            "bias": rng.normal(size=4),
            "scalar": np.array(2.5),
        }

    def test_shapes_and_values_survive(self):
        write_tensors(self.path, self.tensors)
        loaded = read_tensors(self.path)
        self.assertEqual(list(loaded), list(self.tensors))
        for name, array in self.tensors.items():
            self.assertEqual(loaded[name].shape, array.shape)
            np.testing.assert_array_equal(loaded[name], array)

    def test_truncated_reports_field_offset(self):
        """Test truncation names where the read started / Testa offset do campo truncado"""
        write_tensors(self.path, self.tensors)
        raw = self.path.read_bytes()
        # the last tensor is a scalar: its 8 data bytes close the file
        cases = [
            (raw[:-5], len(raw) - 8, "needed 8 bytes, 3 left"),
            (raw[:10], 4, "needed 8 bytes, 6 left"),
        ]
        for truncated, offset, detail in cases:
            with self.subTest(offset=offset):
                self.path.write_bytes(truncated)
                with self.assertRaisesMessage(CheckpointError, f"(byte {offset})") as ctx:
                    read_tensors(self.path)
                self.assertIn(detail, str(ctx.exception))

    def test_bad_magic(self):
        self.path.write_bytes(b"NOPE" + b"\x00" * 8)
        with self.assertRaisesMessage(CheckpointError, "(byte 0)"):
            read_tensors(self.path)

    def test_unsupported_version(self):
        write_tensors(self.path, self.tensors)
        raw = bytearray(self.path.read_bytes())
        raw[4] = 9
        self.path.write_bytes(bytes(raw))
        with self.assertRaisesMessage(CheckpointError, "(byte 4)"):
            read_tensors(self.path)

    def test_trailing_data(self):
        write_tensors(self.path, self.tensors)
        size = self.path.stat().st_size
        self.path.write_bytes(self.path.read_bytes() + b"\x00")
        with self.assertRaisesMessage(CheckpointError, f"(byte {size})"):
            read_tensors(self.path)
