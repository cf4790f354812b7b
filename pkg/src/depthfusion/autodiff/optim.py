# Optimizer and Learning-Rate Schedule
# Otimizador e Agenda de Taxa de Aprendizado

"""
AdamW with decoupled weight decay and a one-cycle learning-rate schedule
(cosine warm-up to the peak, cosine decay afterwards).

AdamW com decaimento de pesos desacoplado e agenda one-cycle.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from depthfusion.autodiff.module import Parameter
from depthfusion.exceptions import ConfigurationError, NonFiniteError

logger = logging.getLogger(__name__)


@dataclass
class OptimizerState:
    """
    First/second moment estimates and step counter.
    Estimativas de primeiro/segundo momento e contador de passos.
    """

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    step: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)


def adamw_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: OptimizerState,
    lr: float,
) -> dict[str, np.ndarray]:
    """
    One AdamW update; returns new parameter arrays and advances ``state``.
    Um passo AdamW; retorna novos arrays e avança ``state``.

    Decay is applied to the weights directly (p -= lr * wd * p) before the
    bias-corrected Adam step.
    """
    for name, grad in grads.items():
        if not np.isfinite(grad).all():
            raise NonFiniteError("adamw_step", f"gradient of '{name}'")
    state.step += 1
    t = state.step
    correction1 = 1.0 - state.beta1**t
    correction2 = 1.0 - state.beta2**t
    updated: dict[str, np.ndarray] = {}
    for name, value in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(value)
        m = state.first_moment.get(name, np.zeros_like(value))
        v = state.second_moment.get(name, np.zeros_like(value))
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.first_moment[name] = m
        state.second_moment[name] = v
        decayed = value - lr * state.weight_decay * value
        step = (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        updated[name] = decayed - lr * step
    return updated


class AdamW:
    """
    Stateful wrapper applying adamw_step to named Parameters in place.
    Wrapper com estado que aplica adamw_step aos parâmetros.
    """

    def __init__(
        self,
        named_parameters: Iterable[tuple[str, Parameter]],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.01,
    ):
        self.params = dict(named_parameters)
        self.lr = lr
        self.state = OptimizerState(
            beta1=betas[0], beta2=betas[1], eps=eps, weight_decay=weight_decay
        )

    def step(self, lr: float | None = None) -> None:
        grads = {n: p.grad for n, p in self.params.items() if p.grad is not None}
        values = {n: p.data for n, p in self.params.items()}
        updated = adamw_step(values, grads, self.state, self.lr if lr is None else lr)
        for name, value in updated.items():
            self.params[name].data = value

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()


@dataclass(frozen=True)
class LrSchedule:
    """One-cycle schedule parameters / Parâmetros da agenda one-cycle."""

    lr_max: float
    total_steps: int
    warmup_fraction: float = 0.3
    div_factor: float = 25.0
    final_div_factor: float = 1e4

    def __post_init__(self) -> None:
        problems: dict[str, list[str]] = {}
        if self.lr_max <= 0:
            problems["lr_max"] = ["must be positive"]
        if self.total_steps < 1:
            problems["total_steps"] = ["must be at least 1"]
        if not 0.0 < self.warmup_fraction < 1.0:
            problems["warmup_fraction"] = ["must lie in (0, 1)"]
        if self.div_factor <= 0 or self.final_div_factor <= 0:
            problems["div_factor"] = ["division factors must be positive"]
        if problems:
            raise ConfigurationError(problems)

    @property
    def peak_step(self) -> float:
        return self.warmup_fraction * self.total_steps


def _cosine(start: float, end: float, progress: float) -> float:
    return end + (start - end) * (1.0 + math.cos(math.pi * progress)) / 2.0


def one_cycle_lr(schedule: LrSchedule, step: int) -> float:
    """
    Learning rate at ``step`` (0-based).
    Taxa de aprendizado no passo ``step``.

    Ramps from lr_max/div_factor to lr_max at warmup_fraction * total_steps,
    then decays to lr_max/final_div_factor at the last step.
    Raises ConfigurationError for a step outside [0, total_steps).
    """
    initial = schedule.lr_max / schedule.div_factor
    final = schedule.lr_max / schedule.final_div_factor
    peak = schedule.peak_step
    last = schedule.total_steps - 1
    if step < 0 or step > last:
        raise ConfigurationError(
            {"step": [f"step {step} outside [0, {schedule.total_steps})"]}
        )
    if step <= peak:
        return _cosine(initial, schedule.lr_max, step / peak if peak > 0 else 1.0)
    span = last - peak
    return _cosine(schedule.lr_max, final, (step - peak) / span if span > 0 else 1.0)
