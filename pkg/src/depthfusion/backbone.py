# Feature Backbone - Depth-Mamba Multi-Scale Extractor
# Backbone de Features - Extrator Multiescala Depth-Mamba

"""
Feature extractors producing a two-level pyramid (1/2 and 1/4 of the input
resolution). Three interchangeable variants share one interface:

- ``conv_only``: residual 3x3 convolution blocks
- ``mamba_plain``: single-direction selective scan, no local feature block
- ``depth_mamba``: four-direction cross-scan plus local feature blocks

Três variantes intercambiáveis com a mesma interface de pirâmide.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from depthfusion.autodiff import Module, Tensor, silu
from depthfusion.autodiff.layers import Conv2d
from depthfusion.exceptions import ConfigurationError, ShapeError
from depthfusion.ssm import SsmBlockParams, cross_merge, cross_scan_2d, selective_scan

logger = logging.getLogger(__name__)

BACKBONE_KINDS = ("conv_only", "mamba_plain", "depth_mamba")
PYRAMID_SCALES = (2, 4)


@dataclass(frozen=True)
class BackboneConfig:
    """
    Backbone hyper-parameters / Hiperparâmetros do backbone.
    """

    kind: str = "depth_mamba"
    in_channels: int = 1
    channels: int = 8
    state_dim: int = 4
    blocks_per_stage: int = 2

    def __post_init__(self) -> None:
        problems: dict[str, list[str]] = {}
        if self.kind not in BACKBONE_KINDS:
            problems["backbone"] = [f"unknown kind '{self.kind}', expected {BACKBONE_KINDS}"]
        for name in ("in_channels", "channels", "state_dim", "blocks_per_stage"):
            if getattr(self, name) < 1:
                problems[name] = ["must be at least 1"]
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True, eq=False)
class FeaturePyramid:
    """
    Feature maps at strictly decreasing resolution.
    Mapas de features em resolução estritamente decrescente.
    """

    maps: tuple[Tensor, ...]
    scales: tuple[int, ...] = PYRAMID_SCALES

    def __post_init__(self) -> None:
        if len(self.maps) != len(self.scales):
            raise ShapeError(f"{len(self.maps)} maps for {len(self.scales)} scales")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:], strict=False)):
            raise ShapeError(f"pyramid scales must increase, got {self.scales}")

    @property
    def half(self) -> Tensor:
        return self.maps[0]

    @property
    def quarter(self) -> Tensor:
        return self.maps[-1]

    @property
    def shapes(self) -> list[tuple[int, ...]]:
        return [m.shape for m in self.maps]


# Blocks / Blocos


class LocalFeatureBlock(Module):
    """
    Residual depthwise-separable block: f + pointwise(silu(depthwise3x3(f))).
    Bloco residual separável em profundidade.
    """

    def __init__(self, rng: np.random.Generator, channels: int):
        self.depthwise = Conv2d(rng, channels, channels, kernel_size=3, groups=channels)
        self.pointwise = Conv2d(rng, channels, channels, kernel_size=1)

    def forward(self, feature: Tensor) -> Tensor:
        return feature + self.pointwise(silu(self.depthwise(feature)))


class DepthMambaBlock(Module):
    """
    Cross-scan -> selective scan per direction -> cross-merge, residual,
    optionally followed by a local feature block.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        channels: int,
        state_dim: int,
        directions: int = 4,
        local_block: bool = True,
    ):
        self.directions = directions
        self.scans = [SsmBlockParams(rng, channels, state_dim) for _ in range(directions)]
        self.local = LocalFeatureBlock(rng, channels) if local_block else None

    def forward(self, feature: Tensor) -> Tensor:
        _, height, width = feature.shape
        sequences = cross_scan_2d(feature, self.directions)
        outputs = [
            selective_scan(seq, params)
            for seq, params in zip(sequences, self.scans, strict=True)
        ]
        feature = feature + cross_merge(outputs, height, width)
        if self.local is not None:
            feature = self.local(feature)
        return feature


class ConvBlock(Module):
    """Residual 3x3 convolution block: f + conv(silu(conv(f)))."""

    def __init__(self, rng: np.random.Generator, channels: int):
        self.first = Conv2d(rng, channels, channels, kernel_size=3)
        self.second = Conv2d(rng, channels, channels, kernel_size=3)

    def forward(self, feature: Tensor) -> Tensor:
        return feature + self.second(silu(self.first(feature)))


# Extractor / Extrator


class FeatureExtractor(Module):
    """
    stem conv (stride 2) -> stage -> conv (stride 2) -> stage.
    Emits the 1/2 and 1/4 scale maps.
    """

    def __init__(self, config: BackboneConfig, rng: np.random.Generator):
        self.config = config
        c = config.channels
        self.stem = Conv2d(rng, config.in_channels, c, kernel_size=3, stride=2)
        self.stage1 = [self._block(rng) for _ in range(config.blocks_per_stage)]
        self.down = Conv2d(rng, c, c, kernel_size=3, stride=2)
        self.stage2 = [self._block(rng) for _ in range(config.blocks_per_stage)]

    def _block(self, rng: np.random.Generator) -> Module:
        c, s = self.config.channels, self.config.state_dim
        if self.config.kind == "conv_only":
            return ConvBlock(rng, c)
        if self.config.kind == "mamba_plain":
            return DepthMambaBlock(rng, c, s, directions=1, local_block=False)
        return DepthMambaBlock(rng, c, s, directions=4, local_block=True)

    def forward(self, image: Tensor) -> FeaturePyramid:
        return extract_pyramid(image, self)


def extract_pyramid(image: Tensor, extractor: FeatureExtractor) -> FeaturePyramid:
    """
    Run the extractor on one image [C_img, H, W].
    Executa o extrator em uma imagem [C_img, H, W].
    """
    if image.ndim != 3:
        raise ShapeError(f"image must be [C, H, W], got {image.shape}")
    channels, height, width = image.shape
    if channels != extractor.config.in_channels:
        raise ShapeError(
            f"image has {channels} channels, backbone expects {extractor.config.in_channels}"
        )
    if height % 4 or width % 4:
        raise ShapeError(f"image size {height}x{width} must be divisible by 4")
    half = silu(extractor.stem(image))
    for block in extractor.stage1:
        half = block(half)
    quarter = silu(extractor.down(half))
    for block in extractor.stage2:
        quarter = block(quarter)
    return FeaturePyramid(maps=(half, quarter))


def backbone_variant(
    kind: str, config: BackboneConfig, rng: np.random.Generator
) -> FeatureExtractor:
    """
    Build the feature extractor for ``kind``.
    Constrói o extrator de features para ``kind``.
    """
    if kind not in BACKBONE_KINDS:
        raise ConfigurationError(
            {"backbone": [f"unknown kind '{kind}', expected one of {BACKBONE_KINDS}"]}
        )
    if config.kind != kind:
        config = replace(config, kind=kind)
    extractor = FeatureExtractor(config, rng)
    logger.debug(f"Built {kind} backbone with {extractor.parameter_count()} parameters")
    return extractor
