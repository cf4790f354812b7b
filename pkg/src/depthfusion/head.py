# Depth Head - Regularization, Regression and Upsampling
# Cabeça de Profundidade - Regularização, Regressão e Reamostragem

"""
Residual 3-D regression network over the fused volume, soft-argmin depth
regression with a 4-hypothesis confidence window, and nearest-neighbour
upsampling back to input resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from depthfusion.autodiff import Module, Tensor, silu, softmax
from depthfusion.autodiff import upsample_nearest as upsample_axes
from depthfusion.autodiff.layers import Conv3d
from depthfusion.exceptions import ShapeError
from depthfusion.fusion import CostVolume
from depthfusion.geometry import DepthHypothesisSet

CONFIDENCE_WINDOW = 4


@dataclass(frozen=True, eq=False)
class DepthMap:
    """
    Depth in meters plus a validity mask.
    Profundidade em metros com máscara de validade.

    ``values`` is a Tensor so predicted maps stay connected to the graph.
    """

    values: Tensor
    valid: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ShapeError(f"depth map must be [H, W], got {self.values.shape}")
        valid = np.asarray(self.valid, dtype=bool)
        if valid.shape != self.values.shape:
            raise ShapeError(f"mask {valid.shape} != depth {self.values.shape}")
        if (self.values.data[valid] <= 0).any():
            raise ShapeError("depth must be positive on valid pixels")
        object.__setattr__(self, "valid", valid)

    @classmethod
    def from_array(cls, values: np.ndarray, valid: np.ndarray | None = None) -> DepthMap:
        values = np.asarray(values, dtype=np.float64)
        if valid is None:
            valid = values > 0
        return cls(Tensor(values), valid)

    @property
    def array(self) -> np.ndarray:
        return self.values.data

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class ConfidenceMap:
    """Per-pixel confidence in [0, 1] / Confiança por pixel em [0, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"confidence map must be [H, W], got {values.shape}")
        # float summation can overshoot 1 by an ulp
        values = np.clip(values, 0.0, 1.0)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class DepthRegression:
    depth: DepthMap
    confidence: ConfidenceMap
    probability: Tensor


# Regularization / Regularização


class ResidualBlock3d(Module):
    def __init__(self, rng: np.random.Generator, channels: int):
        self.first = Conv3d(rng, channels, channels, kernel_size=3)
        self.second = Conv3d(rng, channels, channels, kernel_size=3)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.second(silu(self.first(x)))


class RegressionNetwork(Module):
    """
    conv3d(C -> hidden) -> residual blocks -> conv3d(hidden -> 1).
    Rede de regressão residual que reduz C canais a 1 pontuação.
    """

    def __init__(
        self, rng: np.random.Generator, channels: int, hidden: int, blocks: int = 2
    ):
        self.stem = Conv3d(rng, channels, hidden, kernel_size=3)
        self.blocks = [ResidualBlock3d(rng, hidden) for _ in range(blocks)]
        self.project = Conv3d(rng, hidden, 1, kernel_size=3)

    def forward(self, volume: CostVolume) -> Tensor:
        return regularize(volume, self)


def regularize(volume: CostVolume, network: RegressionNetwork) -> Tensor:
    """
    Per-hypothesis matching scores [D, H, W] (higher = more likely).
    Pontuações por hipótese [D, H, W] (maior = mais provável).
    """
    depth, _, height, width = volume.shape
    x = silu(network.stem(volume.channel_first()))
    for block in network.blocks:
        x = block(x)
    return network.project(x).reshape(depth, height, width)


# Regression / Regressão


def window_starts(argmax: np.ndarray, count: int) -> np.ndarray:
    """
    First index of the 4-hypothesis window around each argmax.
    The window is shifted, not truncated, at the volume ends.
    """
    if count <= CONFIDENCE_WINDOW:
        return np.zeros_like(argmax)
    return np.clip(argmax - 1, 0, count - CONFIDENCE_WINDOW)


def regress(scores: Tensor, hypotheses: DepthHypothesisSet) -> DepthRegression:
    """
    Softmax over hypotheses, expected depth and window confidence.
    Softmax sobre hipóteses, profundidade esperada e confiança em janela.
    """
    if scores.ndim != 3 or scores.shape[0] != hypotheses.count:
        raise ShapeError(
            f"scores {scores.shape} do not match {hypotheses.count} hypotheses"
        )
    if hypotheses.count < 2:
        raise ShapeError("regression needs at least two hypotheses")
    count, height, width = scores.shape
    probability = softmax(scores, axis=0)
    values = Tensor(hypotheses.values.reshape(count, 1, 1))
    depth = (probability * values).sum(axis=0)

    prob = probability.data
    starts = window_starts(prob.argmax(axis=0), count)
    span = min(CONFIDENCE_WINDOW, count)
    rows, cols = np.indices((height, width))
    confidence = sum(prob[starts + k, rows, cols] for k in range(span))
    return DepthRegression(
        depth=DepthMap(depth, np.ones((height, width), dtype=bool)),
        confidence=ConfidenceMap(np.asarray(confidence)),
        probability=probability,
    )


def upsample_nearest(values: Tensor | np.ndarray, factor: int) -> Tensor | np.ndarray:
    """
    Nearest-neighbour upsampling of an [H, W] map; output pixel (i, j)
    copies source pixel (i // factor, j // factor).
    """
    if factor < 1:
        raise ShapeError(f"upsample factor must be >= 1, got {factor}")
    if isinstance(values, Tensor):
        if values.ndim != 2:
            raise ShapeError(f"map must be [H, W], got {values.shape}")
        return upsample_axes(values, factor, axes=(0, 1))
    values = np.asarray(values)
    if values.ndim != 2:
        raise ShapeError(f"map must be [H, W], got {values.shape}")
    return np.repeat(np.repeat(values, factor, axis=0), factor, axis=1)
