# Differentiable Operations
# Operações Diferenciáveis

"""
Neural-network operations built on Tensor: activations, softmax,
convolutions, resampling and gather/scatter. Each function computes its
forward result with numpy and registers a closure for the backward pass.

Operações de rede neural sobre Tensor. Cada função calcula o resultado com
numpy e registra um closure para a passagem reversa.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import numpy as np

from depthfusion.autodiff.tensor import Tensor, as_tensor, unbroadcast
from depthfusion.exceptions import ShapeError

ACTIVATIONS = ("relu", "silu", "sigmoid")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # split by sign so exp() never overflows
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    e = np.exp(x[~positive])
    out[~positive] = e / (1.0 + e)
    return out


def activation(x: Tensor, kind: str) -> Tensor:
    """
    Pointwise activation: relu, silu or sigmoid.
    Ativação ponto a ponto: relu, silu ou sigmoid.
    """
    data = x.data
    if kind == "relu":
        out = np.maximum(data, 0.0)

        def backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (g * (data > 0),)

    elif kind == "silu":
        s = _sigmoid(data)
        out = data * s

        def backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (g * s * (1.0 + data * (1.0 - s)),)

    elif kind == "sigmoid":
        out = _sigmoid(data)

        def backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (g * out * (1.0 - out),)

    else:
        raise ShapeError(f"unknown activation '{kind}', expected one of {ACTIVATIONS}")

    return Tensor._from_op(out, (x,), backward, kind)


def relu(x: Tensor) -> Tensor:
    return activation(x, "relu")


def silu(x: Tensor) -> Tensor:
    return activation(x, "silu")


def sigmoid(x: Tensor) -> Tensor:
    return activation(x, "sigmoid")


def softplus(x: Tensor) -> Tensor:
    data = x.data
    out = np.log1p(np.exp(-np.abs(data))) + np.maximum(data, 0.0)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * _sigmoid(data),)

    return Tensor._from_op(out, (x,), backward, "softplus")


def exp(x: Tensor) -> Tensor:
    with np.errstate(over="ignore"):
        out = np.exp(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * out,)

    return Tensor._from_op(out, (x,), backward, "exp")


def absolute(x: Tensor) -> Tensor:
    data = x.data

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * np.sign(data),)

    return Tensor._from_op(np.abs(data), (x,), backward, "abs")


def sqrt(x: Tensor) -> Tensor:
    with np.errstate(invalid="ignore"):
        out = np.sqrt(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return (g * 0.5 / out,)

    return Tensor._from_op(out, (x,), backward, "sqrt")


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """
    Numerically stable softmax along ``axis``.
    Softmax numericamente estável ao longo de ``axis``.
    """
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return Tensor._from_op(out, (x,), backward, "softmax")


# Shape manipulation / Manipulação de formas


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat needs at least one tensor")
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeError(f"cannot concatenate shapes {[t.shape for t in tensors]}") from exc
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: np.ndarray) -> list[np.ndarray]:
        return np.split(g, bounds, axis=axis)

    return Tensor._from_op(out, tensors, backward, "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    expanded = []
    for t in tensors:
        shape = list(t.shape)
        shape.insert(axis % (t.ndim + 1), 1)
        expanded.append(t.reshape(tuple(shape)))
    return concat(expanded, axis=axis)


def broadcast_to(x: Tensor, shape: Sequence[int]) -> Tensor:
    original = x.shape
    try:
        out = np.broadcast_to(x.data, tuple(shape)).copy()
    except ValueError as exc:
        raise ShapeError(f"cannot broadcast {original} to {tuple(shape)}") from exc

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (unbroadcast(g, original),)

    return Tensor._from_op(out, (x,), backward, "broadcast_to")


def take(x: Tensor, indices: np.ndarray, axis: int = 0) -> Tensor:
    """Gather along ``axis``; repeated indices accumulate in backward."""
    indices = np.asarray(indices, dtype=np.int64)
    axis = axis % x.ndim
    shape = x.shape
    if indices.size and (indices.min() < -shape[axis] or indices.max() >= shape[axis]):
        raise ShapeError(f"take indices out of range for axis {axis} of {shape}")

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(shape)
        moved = np.moveaxis(full, axis, 0)
        np.add.at(moved, indices, np.moveaxis(g, axis, 0))
        return (full,)

    return Tensor._from_op(np.take(x.data, indices, axis=axis), (x,), backward, "take")


def repeat(x: Tensor, repeats: int, axis: int) -> Tensor:
    """Repeat every element ``repeats`` times along ``axis``."""
    axis = axis % x.ndim
    size = x.shape[axis]

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        shape = g.shape[:axis] + (size, repeats) + g.shape[axis + 1 :]
        return (g.reshape(shape).sum(axis=axis + 1),)

    return Tensor._from_op(np.repeat(x.data, repeats, axis=axis), (x,), backward, "repeat")


def upsample_nearest(x: Tensor, factor: int, axes: Sequence[int]) -> Tensor:
    """
    Nearest-neighbour upsampling by an integer factor on the given axes.
    Reamostragem por vizinho mais próximo com fator inteiro.
    """
    if factor < 1:
        raise ShapeError(f"upsample factor must be >= 1, got {factor}")
    for axis in axes:
        x = repeat(x, factor, axis)
    return x


def upsample_to(x: Tensor, shape: Sequence[int]) -> Tensor:
    """
    Double the trailing spatial axes of ``x`` and crop them to ``shape``.
    Dobra os eixos espaciais finais de ``x`` e recorta para ``shape``.
    """
    spatial = len(shape)
    axes = range(x.ndim - spatial, x.ndim)
    up = upsample_nearest(x, 2, axes)
    crop = (slice(None),) * (x.ndim - spatial) + tuple(slice(0, s) for s in shape)
    if up.shape[x.ndim - spatial :] == tuple(shape):
        return up
    return up[crop]


def order_invariant_sum(tensors: Sequence[Tensor]) -> Tensor:
    """
    Sum same-shape tensors so the result is bit-identical for any input order.
    Soma tensores de modo que o resultado independe da ordem de entrada.

    Values are sorted across the stacked axis before reduction.
    """
    tensors = [as_tensor(t) for t in tensors]
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise ShapeError(f"order_invariant_sum needs equal shapes, got {shapes}")
    out = np.sort(np.stack([t.data for t in tensors]), axis=0).sum(axis=0)

    def backward(g: np.ndarray) -> list[np.ndarray]:
        return [g for _ in tensors]

    return Tensor._from_op(out, tensors, backward, "order_invariant_sum")


# Convolution / Convolução


def _conv(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None,
    stride: int,
    padding: int,
    groups: int,
    spatial: int,
    op: str,
) -> Tensor:
    if x.ndim != spatial + 1 or weight.ndim != spatial + 2:
        raise ShapeError(
            f"{op} expects input with {spatial + 1} dims and weight with "
            f"{spatial + 2}, got {x.shape} and {weight.shape}"
        )
    c_in = x.shape[0]
    c_out, c_in_group = weight.shape[:2]
    kernel = weight.shape[2:]
    if len(set(kernel)) != 1 or kernel[0] % 2 == 0:
        raise ShapeError(f"{op} kernel must be square and odd, got {kernel}")
    if groups < 1 or c_in % groups or c_out % groups or c_in // groups != c_in_group:
        raise ShapeError(
            f"{op} channel mismatch: input {c_in}, weight {weight.shape}, groups {groups}"
        )
    if bias is not None and bias.shape != (c_out,):
        raise ShapeError(f"{op} bias shape {bias.shape} != ({c_out},)")
    k = kernel[0]
    sizes_in = x.shape[1:]
    sizes_out = tuple((n + 2 * padding - k) // stride + 1 for n in sizes_in)
    if any(n < 1 for n in sizes_out):
        raise ShapeError(f"{op} output would be empty for input {x.shape}")

    pad = ((0, 0),) + ((padding, padding),) * spatial
    padded = np.pad(x.data, pad)
    xg = padded.reshape((groups, c_in_group) + padded.shape[1:])
    c_out_group = c_out // groups
    wg = weight.data.reshape((groups, c_out_group, c_in_group) + kernel)

    def window(offset: tuple[int, ...]) -> tuple[slice, ...]:
        return (slice(None), slice(None)) + tuple(
            slice(o, o + stride * (n - 1) + 1, stride)
            for o, n in zip(offset, sizes_out, strict=True)
        )

    offsets = list(itertools.product(range(k), repeat=spatial))
    out = np.zeros((groups, c_out_group) + sizes_out)
    for offset in offsets:
        tap = wg[(slice(None),) * 3 + offset]
        out += np.einsum("goc,gc...->go...", tap, xg[window(offset)])
    out = out.reshape((c_out,) + sizes_out)
    if bias is not None:
        out = out + bias.data.reshape((c_out,) + (1,) * spatial)

    def backward(g: np.ndarray) -> list[np.ndarray | None]:
        gg = g.reshape((groups, c_out_group) + sizes_out)
        d_xg = np.zeros_like(xg)
        d_wg = np.zeros_like(wg)
        for offset in offsets:
            tap = wg[(slice(None),) * 3 + offset]
            d_wg[(slice(None),) * 3 + offset] = np.einsum(
                "go...,gc...->goc", gg, xg[window(offset)]
            )
            d_xg[window(offset)] += np.einsum("goc,go...->gc...", tap, gg)
        d_x = d_xg.reshape(padded.shape)[
            (slice(None),) + tuple(slice(padding, padding + n) for n in sizes_in)
        ]
        grads: list[np.ndarray | None] = [d_x, d_wg.reshape(weight.shape)]
        if bias is not None:
            grads.append(g.sum(axis=tuple(range(1, spatial + 1))))
        return grads

    parents = (x, weight) if bias is None else (x, weight, bias)
    return Tensor._from_op(out, parents, backward, op)


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
    groups: int = 1,
) -> Tensor:
    """
    2-D convolution of ``x`` [C_in, H, W] with ``weight`` [C_out, C_in/groups, k, k].
    Convolução 2-D; ``groups == C_in`` gives a depthwise convolution.
    """
    return _conv(x, weight, bias, stride, padding, groups, 2, "conv2d")


def conv3d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """3-D convolution of ``x`` [C_in, D, H, W] with ``weight`` [C_out, C_in, k, k, k]."""
    return _conv(x, weight, bias, stride, padding, 1, 3, "conv3d")


# Resampling / Reamostragem


def bilinear_sample(
    x: Tensor, u: np.ndarray, v: np.ndarray
) -> tuple[Tensor, np.ndarray]:
    """
    Sample ``x`` [C, H, W] at continuous pixel coordinates (u, v).
    Amostra ``x`` [C, H, W] nas coordenadas contínuas (u, v).

    Returns values of shape [C, *u.shape] and a boolean validity mask. A
    coordinate is valid inside [0, W-1] x [0, H-1] inclusive; invalid
    positions produce zero and receive no gradient.
    """
    if x.ndim != 3:
        raise ShapeError(f"bilinear_sample expects [C, H, W], got {x.shape}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ShapeError(f"coordinate shapes differ: {u.shape} vs {v.shape}")
    channels, height, width = x.shape
    valid = (
        np.isfinite(u)
        & np.isfinite(v)
        & (u >= 0)
        & (u <= width - 1)
        & (v >= 0)
        & (v <= height - 1)
    )
    uc = np.where(valid, u, 0.0)
    vc = np.where(valid, v, 0.0)
    x0 = np.clip(np.floor(uc), 0, max(width - 2, 0)).astype(np.int64)
    y0 = np.clip(np.floor(vc), 0, max(height - 2, 0)).astype(np.int64)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = uc - x0
    fy = vc - y0
    mask = valid.astype(np.float64)
    corners = (
        (y0 * width + x0, (1 - fx) * (1 - fy) * mask),
        (y0 * width + x1, fx * (1 - fy) * mask),
        (y1 * width + x0, (1 - fx) * fy * mask),
        (y1 * width + x1, fx * fy * mask),
    )
    flat = x.data.reshape(channels, height * width)
    out = np.zeros((channels,) + u.shape)
    for index, weight in corners:
        out += flat[:, index] * weight

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        d_flat = np.zeros((channels, height * width))
        g2 = g.reshape(channels, -1)
        for index, weight in corners:
            np.add.at(d_flat, (slice(None), index.reshape(-1)), g2 * weight.reshape(-1))
        return (d_flat.reshape(x.shape),)

    return Tensor._from_op(out, (x,), backward, "bilinear_sample"), valid
