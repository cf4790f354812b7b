# Cost Volumes and Volume Fusion
# Volumes de Custo e Fusão de Volumes

"""
Plane-sweep cost volumes and the ways of fusing them.

Two volumes are built from the reference features and the warped source
features:

- matching branch: per-voxel variance across views, [D, C, H, W]
- attention branch: group-wise correlation (GwC), [D, G, H, W]

The proposed fusion turns the GwC volume into per-voxel attention weights
(multi-scale attention module + 3-D hourglass + sigmoid) and multiplies
them into the variance volume. ``concat`` and ``cross_attention`` are the
ablation baselines; ``variance_only`` skips fusion entirely.

Volumes de custo por varredura de planos e os modos de fusão.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from depthfusion.autodiff import (
    Module,
    Tensor,
    broadcast_to,
    concat,
    order_invariant_sum,
    sigmoid,
    silu,
    softmax,
    upsample_to,
)
from depthfusion.autodiff.layers import Conv2d, Conv3d
from depthfusion.exceptions import ConfigurationError, ShapeError
from depthfusion.geometry import DepthHypothesisSet

logger = logging.getLogger(__name__)

FUSION_MODES = ("concat", "cross_attention", "proposed", "variance_only")

WarpedView = tuple[Tensor, np.ndarray]


class VolumeKind(StrEnum):
    VARIANCE = "variance"
    GWC = "gwc"
    ATTENTION = "attention"
    FUSED = "fused"


@dataclass(frozen=True, eq=False)
class CostVolume:
    """
    Cost volume [D, C, H, W] tied to its depth hypotheses.
    Volume de custo [D, C, H, W] ligado às hipóteses de profundidade.

    ``coverage`` [D, H, W] marks voxels seen by at least one valid source.
    """

    data: Tensor
    hypotheses: DepthHypothesisSet
    kind: VolumeKind
    coverage: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.data.ndim != 4:
            raise ShapeError(f"cost volume must be [D, C, H, W], got {self.data.shape}")
        if self.data.shape[0] != self.hypotheses.count:
            raise ShapeError(
                f"volume depth {self.data.shape[0]} != {self.hypotheses.count} hypotheses"
            )
        if self.kind is VolumeKind.VARIANCE and (self.data.data < 0).any():
            raise ShapeError("variance volume has negative entries")
        if self.coverage is not None:
            d, _, h, w = self.data.shape
            if self.coverage.shape != (d, h, w):
                raise ShapeError(
                    f"coverage shape {self.coverage.shape} != {(d, h, w)}"
                )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def channel_first(self) -> Tensor:
        """[C, D, H, W] view used by the 3-D convolutions."""
        return self.data.transpose(1, 0, 2, 3)


@dataclass(frozen=True, eq=False)
class AttentionWeights:
    """Per-voxel reliability weights [D, H, W] in the open range (0, 1)."""

    data: Tensor

    def __post_init__(self) -> None:
        if self.data.ndim != 3:
            raise ShapeError(f"attention weights must be [D, H, W], got {self.data.shape}")
        values = self.data.data
        if (values <= 0).any() or (values >= 1).any():
            raise ShapeError("attention weights left the open (0, 1) range")


def _check_views(ref_feat: Tensor, warped: Sequence[WarpedView]) -> tuple[int, ...]:
    if ref_feat.ndim != 3:
        raise ShapeError(f"reference features must be [C, H, W], got {ref_feat.shape}")
    if not warped:
        raise ShapeError("cost volumes need at least one warped source view")
    channels, height, width = ref_feat.shape
    depth = warped[0][0].shape[0]
    for features, valid in warped:
        if features.shape != (depth, channels, height, width):
            raise ShapeError(
                f"warped view {features.shape} does not match "
                f"{(depth, channels, height, width)}"
            )
        if valid.shape != (depth, height, width):
            raise ShapeError(f"validity mask {valid.shape} != {(depth, height, width)}")
    return depth, channels, height, width


def source_coverage(warped: Sequence[WarpedView]) -> np.ndarray:
    """Voxels [D, H, W] covered by at least one valid source view."""
    return np.logical_or.reduce([valid for _, valid in warped])


# Volume construction / Construção dos volumes


def variance_volume(
    ref_feat: Tensor, warped: Sequence[WarpedView], hypotheses: DepthHypothesisSet
) -> CostVolume:
    """
    Per-voxel variance over the reference and every valid warped source.
    Variância por voxel sobre a referência e as origens válidas.

    Voxels with no valid source fall back to the reference alone (variance 0)
    and are left out of the coverage mask. Sums run in sorted order so the
    result does not depend on the order of the source views.
    """
    depth, channels, height, width = _check_views(ref_feat, warped)
    shape = (depth, channels, height, width)
    reference = broadcast_to(ref_feat, shape)
    masks = [valid.astype(np.float64)[:, None] for _, valid in warped]
    count = 1.0 + np.sum(masks, axis=0)
    mean = order_invariant_sum(
        [reference] + [features * mask for (features, _), mask in zip(warped, masks, strict=True)]
    ) / count
    centred = [(reference - mean) ** 2] + [
        ((features - mean) ** 2) * mask
        for (features, _), mask in zip(warped, masks, strict=True)
    ]
    variance = order_invariant_sum(centred) / count
    return CostVolume(
        data=variance,
        hypotheses=hypotheses,
        kind=VolumeKind.VARIANCE,
        coverage=source_coverage(warped),
    )


def gwc_volume(
    ref_feat: Tensor,
    warped: Sequence[WarpedView],
    groups: int,
    hypotheses: DepthHypothesisSet,
) -> CostVolume:
    """
    Group-wise correlation averaged over valid sources, [D, G, H, W].
    Correlação por grupos, média sobre as origens válidas.

    Each group correlation is the channel mean of ref * src within the group.
    """
    depth, channels, height, width = _check_views(ref_feat, warped)
    if groups < 1 or channels % groups:
        raise ShapeError(f"{channels} channels cannot be split into {groups} groups")
    size = channels // groups
    ref_groups = ref_feat.reshape(1, groups, size, height, width)
    correlations = []
    masks = []
    for features, valid in warped:
        src_groups = features.reshape(depth, groups, size, height, width)
        mask = valid.astype(np.float64)[:, None]
        correlations.append((ref_groups * src_groups).mean(axis=2) * mask)
        masks.append(mask)
    count = np.maximum(np.sum(masks, axis=0), 1.0)
    volume = order_invariant_sum(correlations) / count
    return CostVolume(
        data=volume,
        hypotheses=hypotheses,
        kind=VolumeKind.GWC,
        coverage=source_coverage(warped),
    )


# Attention branch / Ramo de atenção


class AttentionWeightNet(Module):
    """
    Multi-scale attention module followed by a two-level 3-D hourglass.
    Módulo de atenção multiescala seguido de uma ampulheta 3-D de dois níveis.
    """

    def __init__(
        self, rng: np.random.Generator, groups: int, feature_channels: int, hidden: int
    ):
        # multi-scale attention: full-resolution squeeze + stride-2 coarse scale
        self.squeeze = Conv3d(rng, groups, hidden, kernel_size=3)
        self.coarse = Conv3d(rng, hidden, hidden, kernel_size=3, stride=2)
        self.context = Conv2d(rng, feature_channels, hidden, kernel_size=1)
        # hourglass
        self.encode1 = Conv3d(rng, hidden, hidden, kernel_size=3, stride=2)
        self.encode2 = Conv3d(rng, hidden, hidden, kernel_size=3, stride=2)
        self.decode2 = Conv3d(rng, hidden, hidden, kernel_size=3)
        self.decode1 = Conv3d(rng, hidden, hidden, kernel_size=3)
        self.output = Conv3d(rng, hidden, 1, kernel_size=3)

    def forward(self, gwc: CostVolume, reference: Tensor) -> AttentionWeights:
        return attention_weights(gwc, reference, self)


def attention_weights(
    gwc: CostVolume, reference: Tensor, net: AttentionWeightNet
) -> AttentionWeights:
    """
    Turn the GwC volume into sigmoid attention weights [D, H, W].
    Converte o volume GwC em pesos de atenção sigmoides [D, H, W].

    ``reference`` [C_f, H, W] supplies image context, added after the squeeze.
    """
    if gwc.kind is not VolumeKind.GWC:
        raise ShapeError(f"attention weights need a gwc volume, got {gwc.kind}")
    depth, _, height, width = gwc.shape
    if reference.ndim != 3 or reference.shape[1:] != (height, width):
        raise ShapeError(
            f"reference context {reference.shape} does not match volume {gwc.shape}"
        )
    x = gwc.channel_first()
    context = net.context(reference)
    context = context.reshape(context.shape[0], 1, height, width)
    fine = silu(net.squeeze(x) + context)
    coarse = silu(net.coarse(fine))
    scales = fine + upsample_to(coarse, fine.shape[1:])

    level1 = silu(net.encode1(scales))
    level2 = silu(net.encode2(level1))
    up1 = silu(net.decode2(upsample_to(level2, level1.shape[1:]) + level1))
    up0 = silu(net.decode1(upsample_to(up1, scales.shape[1:]) + scales))
    weights = sigmoid(net.output(up0)).reshape(depth, height, width)
    # sigmoid rounds to exactly 1.0 once the logit passes ~37
    eps = np.finfo(weights.data.dtype).eps
    np.clip(weights.data, eps, 1.0 - eps, out=weights.data)
    return AttentionWeights(weights)


def attention_volume(var: CostVolume, weights: AttentionWeights) -> CostVolume:
    """
    Multiply the variance volume by per-voxel weights, broadcast over channels.
    Multiplica o volume de variância pelos pesos por voxel.
    """
    if var.kind is not VolumeKind.VARIANCE:
        raise ShapeError(f"attention volume needs a variance volume, got {var.kind}")
    depth, _, height, width = var.shape
    if weights.data.shape != (depth, height, width):
        raise ShapeError(
            f"weights {weights.data.shape} do not match volume {(depth, height, width)}"
        )
    data = var.data * weights.data.reshape(depth, 1, height, width)
    return CostVolume(
        data=data,
        hypotheses=var.hypotheses,
        kind=VolumeKind.ATTENTION,
        coverage=var.coverage,
    )


# Fusion baselines / Fusões de referência


class ConcatFusion(Module):
    """Channel concatenation followed by a 1x1x1 projection back to C."""

    def __init__(self, rng: np.random.Generator, channels: int, groups: int):
        self.project = Conv3d(rng, channels + groups, channels, kernel_size=1)


class CrossAttentionFusion(Module):
    """
    Single-head attention over channel tokens: queries from the variance
    volume, keys and values from the GwC volume. The attended values replace
    the variance volume outright.
    """

    def __init__(self, rng: np.random.Generator, channels: int, groups: int):
        self.query = Conv3d(rng, channels, channels, kernel_size=1)
        self.key = Conv3d(rng, groups, channels, kernel_size=1)
        self.value = Conv3d(rng, groups, channels, kernel_size=1)


class VolumeFusion(Module):
    """
    Learnable parameters for one fusion mode.
    Parâmetros treináveis de um modo de fusão.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        mode: str,
        channels: int,
        groups: int,
        hidden: int,
    ):
        if mode not in FUSION_MODES:
            raise ConfigurationError(
                {"fusion": [f"unknown mode '{mode}', expected one of {FUSION_MODES}"]}
            )
        self.mode = mode
        self.concat = ConcatFusion(rng, channels, groups) if mode == "concat" else None
        self.cross_attention = (
            CrossAttentionFusion(rng, channels, groups)
            if mode == "cross_attention"
            else None
        )
        self.attention = (
            AttentionWeightNet(rng, groups, channels, hidden) if mode == "proposed" else None
        )

    def forward(self, var: CostVolume, gwc: CostVolume, reference: Tensor) -> CostVolume:
        return fuse(self.mode, var, gwc, FusionContext(params=self, reference=reference))


@dataclass(frozen=True, eq=False)
class FusionContext:
    """Learned fusion parameters plus the reference features they attend to."""

    params: VolumeFusion
    reference: Tensor


def _fused(data: Tensor, var: CostVolume) -> CostVolume:
    return CostVolume(
        data=data, hypotheses=var.hypotheses, kind=VolumeKind.FUSED, coverage=var.coverage
    )


def fuse(mode: str, var: CostVolume, gwc: CostVolume, context: FusionContext) -> CostVolume:
    """
    Combine the variance and GwC volumes into one [D, C, H, W] volume.
    Combina os volumes de variância e GwC em um volume [D, C, H, W].
    """
    if mode not in FUSION_MODES:
        raise ConfigurationError(
            {"fusion": [f"unknown mode '{mode}', expected one of {FUSION_MODES}"]}
        )
    if var.shape[0] != gwc.shape[0] or var.shape[2:] != gwc.shape[2:]:
        raise ShapeError(f"volumes are not aligned: {var.shape} vs {gwc.shape}")
    params = context.params

    if mode == "variance_only":
        return _fused(var.data, var)

    if mode == "proposed":
        if params.attention is None:
            raise ConfigurationError({"fusion": ["parameters were built for another mode"]})
        weights = attention_weights(gwc, context.reference, params.attention)
        return _fused(attention_volume(var, weights).data, var)

    if mode == "concat":
        if params.concat is None:
            raise ConfigurationError({"fusion": ["parameters were built for another mode"]})
        joined = concat([var.channel_first(), gwc.channel_first()], axis=0)
        return _fused(params.concat.project(joined).transpose(1, 0, 2, 3), var)

    attention = params.cross_attention
    if attention is None:
        raise ConfigurationError({"fusion": ["parameters were built for another mode"]})
    variance = var.channel_first()
    matching = gwc.channel_first()
    queries = attention.query(variance)
    keys = attention.key(matching)
    values = attention.value(matching)
    channels = queries.shape[0]
    spatial = queries.shape[1:]
    # logits[i, j] = q_i * k_j at every voxel; softmax over key channels j
    logits = queries.reshape((channels, 1) + spatial) * keys.reshape((1, channels) + spatial)
    scores = softmax(logits, axis=1)
    attended = (scores * values.reshape((1, channels) + spatial)).sum(axis=1)
    return _fused(attended.transpose(1, 0, 2, 3), var)
