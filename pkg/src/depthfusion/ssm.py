# Selective State-Space Scan
# Varredura Seletiva de Espaço de Estados

"""
Selective-scan recurrence and the 2-D cross-scan traversal used by the
depth-mamba blocks.

For every channel c and state index s:

    h_t = exp(delta_t * A) * h_{t-1} + delta_t * B_t * x_t      (h_0 = 0)
    y_t = <C_t, h_t> + D * x_t

A is diagonal and negative (A = -exp(a_log)), delta = softplus(x W + b),
B = x W_B, C = x W_C. The scan runs as one fused operation whose backward
pass walks the adjoint recurrence in reverse, so the graph stays small for
long sequences.
"""

from __future__ import annotations

import functools
from collections.abc import Sequence

import numpy as np

from depthfusion.autodiff import (
    Module,
    Parameter,
    Tensor,
    exp,
    matmul,
    softplus,
    take,
)
from depthfusion.autodiff.module import uniform_init
from depthfusion.exceptions import NonFiniteError, ShapeError

SCAN_DIRECTIONS = ("row", "row_reversed", "column", "column_reversed")


class SsmBlockParams(Module):
    """
    Learnable parameters of one selective-scan path.
    Parâmetros treináveis de um caminho de varredura seletiva.
    """

    def __init__(self, rng: np.random.Generator, channels: int, state_dim: int):
        if channels < 1 or state_dim < 1:
            raise ShapeError(f"need channels, state_dim >= 1, got {channels}, {state_dim}")
        self.channels = channels
        self.state_dim = state_dim
        self.w_delta = uniform_init(rng, (channels, channels), channels)
        # softplus(-1) keeps initial steps small but clearly positive
        self.b_delta = Parameter(np.full(channels, -1.0))
        self.w_b = uniform_init(rng, (channels, state_dim), channels)
        self.w_c = uniform_init(rng, (channels, state_dim), channels)
        self.a_log = Parameter(np.log(np.arange(1, state_dim + 1, dtype=np.float64)))
        self.d = Parameter(np.ones(channels))

    @property
    def a(self) -> np.ndarray:
        return -np.exp(self.a_log.data)


def selective_scan_kernel(
    x: Tensor, delta: Tensor, b: Tensor, c: Tensor, a: Tensor, d: Tensor
) -> Tensor:
    """
    Fused scan over x [L, C] with delta [L, C], B and C [L, S], A [S], D [C].
    Varredura fundida com passagem reversa pela recorrência adjunta.
    """
    length, channels = x.shape
    state_dim = a.shape[0]
    if delta.shape != (length, channels) or d.shape != (channels,):
        raise ShapeError(f"delta {delta.shape} / D {d.shape} do not match x {x.shape}")
    if b.shape != (length, state_dim) or c.shape != (length, state_dim):
        raise ShapeError(f"B {b.shape} / C {c.shape} do not match L={length}, S={state_dim}")

    xs, dt, bs, cs, av, dv = x.data, delta.data, b.data, c.data, a.data, d.data
    decay = np.exp(dt[:, :, None] * av[None, None, :])
    drive = dt[:, :, None] * bs[:, None, :] * xs[:, :, None]
    states = np.empty((length, channels, state_dim))
    h = np.zeros((channels, state_dim))
    for t in range(length):
        h = decay[t] * h + drive[t]
        states[t] = h
    if not np.isfinite(states).all():
        raise NonFiniteError("selective_scan", "hidden state diverged")
    out = np.einsum("lcs,ls->lc", states, cs) + dv * xs

    def backward(g: np.ndarray) -> tuple[np.ndarray, ...]:
        d_c = np.einsum("lc,lcs->ls", g, states)
        d_d = (g * xs).sum(axis=0)
        d_x = g * dv
        direct = g[:, :, None] * cs[:, None, :]
        next_decay = np.concatenate([decay[1:], np.zeros((1, channels, state_dim))])
        adjoint = np.empty_like(states)
        lam = np.zeros((channels, state_dim))
        for t in range(length - 1, -1, -1):
            lam = direct[t] + next_decay[t] * lam
            adjoint[t] = lam
        previous = np.concatenate([np.zeros((1, channels, state_dim)), states[:-1]])
        d_exponent = adjoint * previous * decay
        d_a = (d_exponent * dt[:, :, None]).sum(axis=(0, 1))
        d_delta = (d_exponent * av).sum(axis=2) + (
            adjoint * bs[:, None, :] * xs[:, :, None]
        ).sum(axis=2)
        d_b = (adjoint * dt[:, :, None] * xs[:, :, None]).sum(axis=1)
        d_x = d_x + (adjoint * dt[:, :, None] * bs[:, None, :]).sum(axis=2)
        return d_x, d_delta, d_b, d_c, d_a, d_d

    return Tensor._from_op(out, (x, delta, b, c, a, d), backward, "selective_scan")


def selective_scan(x: Tensor, params: SsmBlockParams) -> Tensor:
    """
    Run the selective scan over a sequence x [L, C_f].
    Executa a varredura seletiva sobre uma sequência x [L, C_f].
    """
    if x.ndim != 2 or x.shape[1] != params.channels:
        raise ShapeError(f"scan input must be [L, {params.channels}], got {x.shape}")
    delta = softplus(matmul(x, params.w_delta) + params.b_delta)
    b = matmul(x, params.w_b)
    c = matmul(x, params.w_c)
    a = -exp(params.a_log)
    return selective_scan_kernel(x, delta, b, c, a, params.d)


def naive_selective_scan(
    x: np.ndarray,
    delta: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    a: np.ndarray,
    d: np.ndarray,
) -> np.ndarray:
    """Element-by-element reference recurrence, used to check the fused kernel."""
    length, channels = x.shape
    out = np.zeros((length, channels))
    for ch in range(channels):
        h = np.zeros(a.shape[0])
        for t in range(length):
            h = np.exp(delta[t, ch] * a) * h + delta[t, ch] * b[t] * x[t, ch]
            out[t, ch] = float(c[t] @ h) + d[ch] * x[t, ch]
    return out


# Cross-scan / Varredura cruzada


@functools.lru_cache(maxsize=64)
def scan_permutations(height: int, width: int) -> tuple[np.ndarray, ...]:
    """
    Flat pixel orders for the four traversals (row, row reversed, column,
    column reversed). Entry k of an order is the flat row-major index of the
    k-th visited pixel.
    """
    row = np.arange(height * width)
    column = row.reshape(height, width).T.reshape(-1)
    orders = (row, row[::-1].copy(), column, column[::-1].copy())
    for order in orders:
        order.setflags(write=False)
    return orders


def inverse_permutation(order: np.ndarray) -> np.ndarray:
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.shape[0])
    return inverse


def cross_scan_2d(feature: Tensor, directions: int = 4) -> list[Tensor]:
    """
    Unroll ``feature`` [C, H, W] into ``directions`` sequences of shape [H*W, C].
    Desenrola o mapa em sequências [H*W, C], uma por direção.
    """
    if feature.ndim != 3:
        raise ShapeError(f"cross_scan_2d expects [C, H, W], got {feature.shape}")
    if directions not in (1, 2, 4):
        raise ShapeError(f"directions must be 1, 2 or 4, got {directions}")
    channels, height, width = feature.shape
    flat = feature.reshape(channels, height * width)
    orders = scan_permutations(height, width)[:directions]
    return [take(flat, order, axis=1).transpose(1, 0) for order in orders]


def cross_merge(sequences: Sequence[Tensor], height: int, width: int) -> Tensor:
    """
    Un-permute each scanned sequence back to [C, H, W] and sum them.
    Desfaz a permutação de cada sequência e soma os mapas.
    """
    if not sequences or len(sequences) > len(SCAN_DIRECTIONS):
        raise ShapeError(f"cross_merge needs 1 to 4 sequences, got {len(sequences)}")
    length = height * width
    for seq in sequences:
        if seq.ndim != 2 or seq.shape[0] != length:
            raise ShapeError(
                f"sequence shape {seq.shape} does not match {height}x{width} map"
            )
    orders = scan_permutations(height, width)
    merged: Tensor | None = None
    for seq, order in zip(sequences, orders, strict=False):
        channels = seq.shape[1]
        spatial = take(seq.transpose(1, 0), inverse_permutation(order), axis=1)
        spatial = spatial.reshape(channels, height, width)
        merged = spatial if merged is None else merged + spatial
    assert merged is not None
    return merged


__all__ = [
    "SCAN_DIRECTIONS",
    "SsmBlockParams",
    "cross_merge",
    "cross_scan_2d",
    "inverse_permutation",
    "naive_selective_scan",
    "scan_permutations",
    "selective_scan",
    "selective_scan_kernel",
]
