"""
Run Registry Model Tests.
Testes dos Modelos do Registro de Execuções.

This module contains tests for ExperimentRun and MetricsRecord.
Este módulo contém testes para ExperimentRun e MetricsRecord.
"""

from django.contrib.auth import get_user_model
from django.core.exceptions import ValidationError
from django.test import TestCase
from django.urls import reverse

from depthfusion.factories import ExperimentRunFactory, MetricsRecordFactory
from depthfusion.metrics import MetricsReport
from depthfusion.models import ExperimentRun, MetricsRecord


class ExperimentRunModelTest(TestCase):
    """
    Tests for ExperimentRun model.
    Testes para modelo ExperimentRun.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.run = ExperimentRunFactory(command="eval", seed=3)

    def test_run_creation(self):
        """Test run is created running / Testa criação da execução"""
        self.assertEqual(self.run.status, ExperimentRun.Status.RUNNING)
        self.assertFalse(self.run.is_finished)
        self.assertIsNone(self.run.finished_at)
        self.assertIsNone(self.run.duration_seconds)
        self.assertEqual(self.run.config["seeds"], "0, 1, 2")

    def test_run_str(self):
        """Test ExperimentRun __str__ method / Testa método __str__ do ExperimentRun"""
        self.assertEqual(str(self.run), f"eval #{self.run.pk} (running)")

    def test_complete(self):
        """Test complete() stamps the finish time / Testa complete()"""
        self.run.complete()
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, ExperimentRun.Status.COMPLETED)
        self.assertTrue(self.run.is_finished)
        self.assertIsNotNone(self.run.finished_at)
        self.assertGreaterEqual(self.run.duration_seconds, 0.0)

    def test_fail(self):
        """Test fail() stores the error category / Testa fail()"""
        self.run.fail("dataset", "scene_00000 missing")
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, ExperimentRun.Status.FAILED)
        self.assertEqual(self.run.error_category, "dataset")
        self.assertEqual(self.run.error_message, "scene_00000 missing")

    def test_negative_seed_fails_validation(self):
        run = ExperimentRunFactory.build(seed=-1)
        with self.assertRaises(ValidationError):
            run.full_clean()


class MetricsRecordModelTest(TestCase):
    """
    Tests for MetricsRecord model.
    Testes para modelo MetricsRecord.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        self.run = ExperimentRunFactory()
        self.report = MetricsReport(0.1, 0.02, 0.8, 0.7, 0.9, 0.95, n_pixels=256)

    def test_factory_record_is_valid(self):
        record = MetricsRecordFactory(run=self.run)
        record.full_clean()
        self.assertEqual(self.run.metrics.count(), 1)

    def test_from_report(self):
        """Test a record built from a report / Testa registro a partir de relatório"""
        record = MetricsRecord.from_report(self.run, self.report, label="proposed", sigma_rot=1.0)
        self.assertIsNone(record.pk)
        record.save()
        stored = MetricsRecord.objects.get(pk=record.pk)
        self.assertEqual(stored.label, "proposed")
        self.assertEqual(stored.sigma_rot, 1.0)
        self.assertEqual(stored.n_pixels, 256)
        self.assertAlmostEqual(stored.delta2, 0.9)

    def test_unnested_deltas(self):
        """Test clean() rejects delta1 > delta2 / Testa deltas não aninhados"""
        record = MetricsRecordFactory.build(run=self.run, delta1=0.9, delta2=0.5, delta3=0.95)
        with self.assertRaises(ValidationError) as ctx:
            record.clean()
        self.assertIn("delta2", ctx.exception.message_dict)

    def test_record_str(self):
        record = MetricsRecord.from_report(self.run, self.report, label="concat")
        self.assertEqual(str(record), "concat rot=0.0 trans=0.0: AbsRel 0.1000")

    def test_cascade_delete(self):
        """Test deleting a run deletes its metrics / Testa exclusão em cascata"""
        MetricsRecordFactory.create_batch(3, run=self.run)
        self.run.delete()
        self.assertEqual(MetricsRecord.objects.count(), 0)


class RegistryAdminTest(TestCase):
    """
    Tests for the run registry admin pages.
    Testes para as páginas admin do registro.
    """

    def setUp(self):
        """Set up test data / Configurar dados de teste"""
        user = get_user_model().objects.create_superuser("admin", "admin@example.com", "pw")
        self.client.force_login(user)
        self.run = ExperimentRunFactory()
        MetricsRecordFactory.create_batch(2, run=self.run)

    def test_run_pages(self):
        """Test list and change pages render / Testa páginas de execução"""
        response = self.client.get(reverse("admin:depthfusion_experimentrun_changelist"))
        self.assertEqual(response.status_code, 200)
        response = self.client.get(
            reverse("admin:depthfusion_experimentrun_change", args=[self.run.pk])
        )
        self.assertEqual(response.status_code, 200)

    def test_metrics_filter(self):
        response = self.client.get(
            reverse("admin:depthfusion_metricsrecord_changelist"), {"label": "proposed"}
        )
        self.assertEqual(response.status_code, 200)
