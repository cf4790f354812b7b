"""
Finite-difference gradient checking.
Verificação de gradientes por diferenças finitas.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from depthfusion.autodiff.tensor import Tensor, no_grad

GRAD_CHECK_TOLERANCE = 1e-4


def grad_check(
    fn: Callable[..., Tensor],
    inputs: Sequence[np.ndarray],
    eps: float = 1e-5,
    seed: int = 0,
) -> float:
    """
    Largest relative error between analytic and central-difference gradients.
    Maior erro relativo entre gradientes analíticos e por diferenças centrais.

    The output of ``fn`` is projected onto fixed random weights so every
    output element contributes. Relative error is measured against the
    numeric gradient, floored at 1e-4 times its largest magnitude.
    """
    arrays = [np.array(a, dtype=np.float64) for a in inputs]
    probe = fn(*[Tensor(a) for a in arrays])
    weights = np.random.default_rng(seed).uniform(0.5, 1.5, size=probe.shape)

    def loss(values: list[np.ndarray]) -> float:
        with no_grad():
            return float((fn(*[Tensor(v) for v in values]).data * weights).sum())

    tracked = [Tensor(a, requires_grad=True) for a in arrays]
    out = fn(*tracked)
    (out * Tensor(weights)).sum().backward()
    analytic = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in tracked]

    worst = 0.0
    for index, array in enumerate(arrays):
        numeric = np.zeros_like(array)
        for position in np.ndindex(array.shape):
            plus = [a.copy() for a in arrays]
            minus = [a.copy() for a in arrays]
            plus[index][position] += eps
            minus[index][position] -= eps
            numeric[position] = (loss(plus) - loss(minus)) / (2 * eps)
        floor = 1e-4 * max(1.0, float(np.abs(numeric).max(initial=0.0)))
        error = np.abs(analytic[index] - numeric) / np.maximum(np.abs(numeric), floor)
        worst = max(worst, float(error.max(initial=0.0)))
    return worst
