# Multi-View Depth Model
# Modelo de Profundidade Multi-Vista

"""
The full depth network: feature pyramid backbone, plane-sweep cost volumes
at 1/4 scale, volume fusion, residual regression and x4 nearest upsampling.

A rede completa: backbone em pirâmide, volumes de custo a 1/4 da escala,
fusão de volumes, regressão residual e reamostragem x4.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields

import numpy as np

from depthfusion.autodiff import Module, Tensor
from depthfusion.backbone import BackboneConfig, FeatureExtractor, backbone_variant
from depthfusion.exceptions import ConfigurationError, ShapeError
from depthfusion.fusion import FUSION_MODES, VolumeFusion, gwc_volume, variance_volume
from depthfusion.geometry import (
    DepthHypothesisSet,
    build_hypotheses,
    plane_homographies,
    scale_intrinsics,
    warp_volume,
)
from depthfusion.head import (
    ConfidenceMap,
    DepthMap,
    RegressionNetwork,
    regress,
    regularize,
    upsample_nearest,
)
from depthfusion.scenes.synth import SceneSample

logger = logging.getLogger(__name__)

VOLUME_SCALE = 4


@dataclass(frozen=True)
class ModelConfig:
    """
    Architecture of a DepthFusionNet / Arquitetura de uma DepthFusionNet.
    """

    backbone: str = "depth_mamba"
    fusion: str = "proposed"
    in_channels: int = 1
    channels: int = 8
    groups: int = 4
    state_dim: int = 4
    blocks_per_stage: int = 2
    attention_hidden: int = 8
    regression_hidden: int = 8
    regression_blocks: int = 1
    n_hypotheses: int = 16
    d_min: float = 2.0
    d_max: float = 20.0

    def __post_init__(self) -> None:
        problems: dict[str, list[str]] = {}
        if self.fusion not in FUSION_MODES:
            problems["fusion"] = [f"unknown mode '{self.fusion}', expected {FUSION_MODES}"]
        if self.groups < 1 or self.channels % self.groups:
            problems["groups"] = [
                f"{self.channels} channels cannot be split into {self.groups} groups"
            ]
        if self.n_hypotheses < 2:
            problems["n_hypotheses"] = ["need at least 2 depth hypotheses"]
        if not 0 < self.d_min < self.d_max:
            problems["d_min"] = [f"need 0 < d_min < d_max, got {self.d_min}, {self.d_max}"]
        for name in ("attention_hidden", "regression_hidden"):
            if getattr(self, name) < 1:
                problems[name] = ["must be at least 1"]
        if self.regression_blocks < 0:
            problems["regression_blocks"] = ["must be non-negative"]
        if problems:
            raise ConfigurationError(problems)

    @property
    def backbone_config(self) -> BackboneConfig:
        return BackboneConfig(
            kind=self.backbone,
            in_channels=self.in_channels,
            channels=self.channels,
            state_dim=self.state_dim,
            blocks_per_stage=self.blocks_per_stage,
        )

    def hypotheses(self) -> DepthHypothesisSet:
        return build_hypotheses(self.d_min, self.d_max, self.n_hypotheses)

    def to_dict(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict[str, object]) -> ModelConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigurationError({key: ["unknown model field"] for key in unknown})
        return cls(**values)  # type: ignore[arg-type]


class DepthFusionNet(Module):
    """
    Backbone + volume fusion + regression network.
    Backbone + fusão de volumes + rede de regressão.

    Parameters are drawn from ``rng`` in construction order, so the same
    config and seed always yield the same weights.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        self.extractor: FeatureExtractor = backbone_variant(
            config.backbone, config.backbone_config, rng
        )
        self.fusion = VolumeFusion(
            rng, config.fusion, config.channels, config.groups, config.attention_hidden
        )
        self.regression = RegressionNetwork(
            rng, config.channels, config.regression_hidden, config.regression_blocks
        )

    def __repr__(self) -> str:
        return (
            f"<DepthFusionNet backbone={self.config.backbone} fusion={self.config.fusion} "
            f"params={self.parameter_count()}>"
        )

    def forward(self, sample: SceneSample) -> PipelineOutput:
        return forward_pipeline(sample, self)


@dataclass(frozen=True, eq=False)
class PipelineOutput:
    """
    Full-resolution depth and confidence plus the quarter-scale probability.
    Profundidade e confiança em resolução cheia.
    """

    depth: DepthMap
    confidence: ConfidenceMap
    probability: Tensor
    coverage: np.ndarray


def build_model(config: ModelConfig, seed: int) -> DepthFusionNet:
    model = DepthFusionNet(config, np.random.default_rng(seed))
    logger.debug(f"Built {model!r}")
    return model


def forward_pipeline(
    sample: SceneSample,
    model: DepthFusionNet,
    hypotheses: DepthHypothesisSet | None = None,
) -> PipelineOutput:
    """
    Predict the reference-frame depth of ``sample``.
    Prediz a profundidade do quadro de referência de ``sample``.

    Frames go through the shared backbone; the 1/4-scale source features
    are warped onto every hypothesis plane of the reference camera, turned
    into variance and GwC volumes, fused, regularized and regressed. Pixels
    that no source view covers at any hypothesis are marked invalid.
    """
    config = model.config
    if hypotheses is None:
        hypotheses = config.hypotheses()
    if sample.frames[0].shape[0] != config.in_channels:
        raise ShapeError(
            f"frames have {sample.frames[0].shape[0]} channels, "
            f"model expects {config.in_channels}"
        )
    ref = sample.reference_index
    quarter = [model.extractor(Tensor(frame)).quarter for frame in sample.frames]

    k_ref = scale_intrinsics(sample.intrinsics[ref], 1.0 / VOLUME_SCALE)
    warped = []
    for index in sample.source_indices:
        k_src = scale_intrinsics(sample.intrinsics[index], 1.0 / VOLUME_SCALE)
        homographies = plane_homographies(
            k_ref, k_src, sample.poses[ref], sample.poses[index], hypotheses
        )
        warped.append(warp_volume(quarter[index], homographies))

    reference = quarter[ref]
    var = variance_volume(reference, warped, hypotheses)
    gwc = gwc_volume(reference, warped, config.groups, hypotheses)
    fused = model.fusion(var, gwc, reference)
    regression = regress(regularize(fused, model.regression), hypotheses)

    coverage = np.asarray(var.coverage).any(axis=0)
    depth = DepthMap(
        upsample_nearest(regression.depth.values, VOLUME_SCALE),
        upsample_nearest(coverage, VOLUME_SCALE),
    )
    confidence = ConfidenceMap(upsample_nearest(regression.confidence.values, VOLUME_SCALE))
    return PipelineOutput(
        depth=depth,
        confidence=confidence,
        probability=regression.probability,
        coverage=coverage,
    )
