"""
Test Data Factories for Depth Fusion.
Fábricas de Dados de Teste para o Depth Fusion.

Factory Boy factories for the run registry models and for the small
configurations the numerical tests run on.

Fábricas Factory Boy para os modelos do registro de execuções e para as
configurações pequenas usadas nos testes numéricos.

Usage / Uso:
    from depthfusion.factories import ExperimentRunFactory, RunConfigFactory

    run = ExperimentRunFactory(command="eval")
    config = RunConfigFactory(dataset=str(tmp / "data"))
"""

import factory
from factory.django import DjangoModelFactory

from depthfusion.config import RunConfig
from depthfusion.model import ModelConfig
from depthfusion.models import ExperimentRun, MetricsRecord
from depthfusion.scenes.synth import SceneConfig


class ExperimentRunFactory(DjangoModelFactory):
    """
    Factory for ExperimentRun model.
    Fábrica para modelo ExperimentRun.
    """

    class Meta:
        model = ExperimentRun

    command = "train"
    status = ExperimentRun.Status.RUNNING
    seed = factory.Faker("pyint", min_value=0, max_value=10_000)
    config = factory.LazyFunction(lambda: RunConfig().to_settings())
    output_dir = factory.Sequence(lambda n: f"runs/run_{n:04d}")


class MetricsRecordFactory(DjangoModelFactory):
    """
    Factory for MetricsRecord model with nested delta accuracies.
    Fábrica para modelo MetricsRecord com acurácias delta aninhadas.
    """

    class Meta:
        model = MetricsRecord

    run = factory.SubFactory(ExperimentRunFactory)
    label = factory.Iterator(["concat", "cross_attention", "proposed"])
    seed = 0
    sigma_rot = 0.0
    sigma_trans = 0.0
    abs_rel = factory.Faker("pyfloat", min_value=0.01, max_value=0.5)
    sq_rel = factory.LazyAttribute(lambda obj: obj.abs_rel**2)
    rmse = factory.Faker("pyfloat", min_value=0.1, max_value=5.0)
    delta1 = factory.Faker("pyfloat", min_value=0.0, max_value=0.6)
    delta2 = factory.LazyAttribute(lambda obj: min(1.0, obj.delta1 + 0.2))
    delta3 = factory.LazyAttribute(lambda obj: min(1.0, obj.delta2 + 0.1))
    n_pixels = factory.Faker("pyint", min_value=1, max_value=4096)


# Configuration factories / Fábricas de configuração


class SceneConfigFactory(factory.Factory):
    """
    Small scenes for fast tests (16x16, 3 frames).
    Cenas pequenas para testes rápidos.
    """

    class Meta:
        model = SceneConfig

    height = 16
    width = 16
    n_frames = 3
    seed = factory.Sequence(lambda n: n)


class ModelConfigFactory(factory.Factory):
    """Tiny architecture whose forward pass takes well under a second."""

    class Meta:
        model = ModelConfig

    backbone = "depth_mamba"
    fusion = "proposed"
    channels = 4
    groups = 2
    state_dim = 2
    blocks_per_stage = 1
    attention_hidden = 2
    regression_hidden = 2
    regression_blocks = 1
    n_hypotheses = 4


class RunConfigFactory(factory.Factory):
    """
    RunConfig matching ModelConfigFactory and SceneConfigFactory sizes.
    RunConfig compatível com os tamanhos das outras fábricas.
    """

    class Meta:
        model = RunConfig

    dataset = "data/test"
    image_size = 16
    n_frames = 3
    n_hypotheses = 4
    channels = 4
    groups = 2
    state_dim = 2
    blocks_per_stage = 1
    hidden = 2
    lr_max = 1e-3
    epochs = 1
    max_steps = 2
    log_every = 1
    seeds = (0, 1)
    sigma_rot = (0.0, 1.0)
    sigma_trans = (0.0, 0.05)
    output_dir = "runs/test"
