# Module and Parameter Containers
# Contêineres de Módulos e Parâmetros

"""
Minimal module system: a Module owns Parameters and child Modules as
attributes and exposes them under stable dotted names. The names are the
keys of the checkpoint format, so their order is the attribute insertion
order.

Sistema mínimo de módulos: nomes pontuados estáveis usados como chaves
do checkpoint.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from typing import Any

import numpy as np

from depthfusion.autodiff.tensor import Tensor
from depthfusion.exceptions import ShapeError


class Parameter(Tensor):
    """Trainable tensor / Tensor treinável."""

    __slots__ = ()

    def __init__(self, data: Any):
        super().__init__(data, requires_grad=True)


class Module:
    """
    Base class for every learnable component.
    Classe base para todo componente treinável.
    """

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Parameter):
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{full}.")
            elif isinstance(value, list | tuple):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{full}.{index}.")
                    elif isinstance(item, Parameter):
                        yield f"{full}.{index}", item

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Mapping[str, np.ndarray], strict: bool = True) -> None:
        """
        Copy arrays into the parameters with matching names.
        Copia arrays para os parâmetros com nomes correspondentes.
        """
        params = dict(self.named_parameters())
        if strict:
            missing = sorted(set(params) - set(state))
            unexpected = sorted(set(state) - set(params))
            if missing or unexpected:
                raise ShapeError(
                    f"state mismatch: missing={missing} unexpected={unexpected}"
                )
        for name, param in params.items():
            if name not in state:
                continue
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise ShapeError(
                    f"parameter '{name}' has shape {param.shape}, state has {value.shape}"
                )
            param.data = value.copy()
            param.grad = None


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> Parameter:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation."""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return Parameter(rng.uniform(-bound, bound, size=shape))


def zeros(shape: tuple[int, ...]) -> Parameter:
    return Parameter(np.zeros(shape))
