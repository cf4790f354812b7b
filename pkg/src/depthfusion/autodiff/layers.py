"""
Convolution and linear layers / Camadas de convolução e lineares.
"""

from __future__ import annotations

import numpy as np

from depthfusion.autodiff.functional import conv2d, conv3d
from depthfusion.autodiff.module import Module, uniform_init, zeros
from depthfusion.autodiff.tensor import Tensor, matmul


class Linear(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        in_features: int,
        out_features: int,
        bias: bool = True,
    ):
        self.weight = uniform_init(rng, (in_features, out_features), in_features)
        self.bias = zeros((out_features,)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = matmul(x, self.weight)
        return out + self.bias if self.bias is not None else out


class Conv2d(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        in_channels: int,
        out_channels: int,
        kernel_size: int = 3,
        stride: int = 1,
        groups: int = 1,
    ):
        fan_in = (in_channels // groups) * kernel_size**2
        self.weight = uniform_init(
            rng, (out_channels, in_channels // groups, kernel_size, kernel_size), fan_in
        )
        self.bias = zeros((out_channels,))
        self.stride = stride
        self.padding = kernel_size // 2
        self.groups = groups

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, self.stride, self.padding, self.groups)


class Conv3d(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        in_channels: int,
        out_channels: int,
        kernel_size: int = 3,
        stride: int = 1,
    ):
        fan_in = in_channels * kernel_size**3
        self.weight = uniform_init(
            rng, (out_channels, in_channels) + (kernel_size,) * 3, fan_in
        )
        self.bias = zeros((out_channels,))
        self.stride = stride
        self.padding = kernel_size // 2

    def forward(self, x: Tensor) -> Tensor:
        return conv3d(x, self.weight, self.bias, self.stride, self.padding)
