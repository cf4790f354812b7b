# Tensor - Reverse-Mode Automatic Differentiation
# Tensor - Diferenciação Automática em Modo Reverso

"""
Dense float64 tensor that records the operations applied to it and can
propagate gradients back to every tracked ancestor.

Tensor denso float64 que registra as operações aplicadas e propaga
gradientes para todos os ancestrais rastreados.

Broadcasting follows the trailing-dimension rule: shapes are aligned on
their last axes and a size-1 axis stretches to match the other operand.
Every operation checks its output for NaN/Inf and raises NonFiniteError.
"""

from __future__ import annotations

import contextlib
import threading
from collections.abc import Callable, Iterator, Sequence
from typing import Any

import numpy as np

from depthfusion.exceptions import NonFiniteError, ShapeError

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_grad_state = threading.local()


def is_grad_enabled() -> bool:
    """Return whether new operations record a graph in this thread."""
    return getattr(_grad_state, "enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """
    Disable graph recording inside the block (evaluation, export).
    Desabilita a gravação do grafo dentro do bloco (avaliação, exportação).
    """
    previous = is_grad_enabled()
    _grad_state.enabled = False
    try:
        yield
    finally:
        _grad_state.enabled = previous


class Tensor:
    """
    Float64 array plus the bookkeeping needed for backward().
    Array float64 com o necessário para o backward().
    """

    __slots__ = ("data", "grad", "requires_grad", "op", "_parents", "_backward")
    __array_priority__ = 1000

    def __init__(self, data: Any, requires_grad: bool = False):
        array = np.array(data, dtype=np.float64)
        if any(size <= 0 for size in array.shape):
            raise ShapeError(f"tensor dimensions must be positive, got {array.shape}")
        if not np.isfinite(array).all():
            raise NonFiniteError("tensor", "input data contains NaN or Inf")
        self.data: np.ndarray = array
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: BackwardFn | None = None

    # Construction helpers / Auxiliares de construção

    @classmethod
    def _from_op(
        cls,
        data: np.ndarray,
        parents: Sequence[Tensor],
        backward: BackwardFn,
        op: str,
    ) -> Tensor:
        data = np.asarray(data, dtype=np.float64)
        if not np.isfinite(data).all():
            raise NonFiniteError(op)
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.op = op
        track = is_grad_enabled() and any(p.requires_grad for p in parents)
        out.requires_grad = track
        out._parents = tuple(parents) if track else ()
        out._backward = backward if track else None
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, op={self.op}{flag})"

    # Backward pass / Passagem reversa

    def backward(self, grad: np.ndarray | None = None) -> None:
        """
        Accumulate d(self)/d(x) into ``x.grad`` for every tracked ancestor.
        Acumula d(self)/d(x) em ``x.grad`` para todo ancestral rastreado.

        Gradients add onto existing ``.grad`` values; call zero_grad() between
        independent passes.
        """
        if not self.requires_grad:
            raise ShapeError("backward() called on a tensor that does not require grad")
        if grad is None:
            if self.data.size != 1:
                raise ShapeError(
                    f"backward() without a seed needs a scalar, got shape {self.shape}"
                )
            grad = np.ones_like(self.data)
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != self.shape:
            raise ShapeError(f"seed gradient shape {grad.shape} != {self.shape}")

        order = _topological_order(self)
        pending: dict[int, np.ndarray] = {id(self): grad}
        for node in reversed(order):
            node_grad = pending.pop(id(node), None)
            if node_grad is None:
                continue
            if not np.isfinite(node_grad).all():
                raise NonFiniteError(f"{node.op}.backward")
            node.grad = node_grad.copy() if node.grad is None else node.grad + node_grad
            if node._backward is None:
                continue
            for parent, parent_grad in zip(
                node._parents, node._backward(node_grad), strict=True
            ):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + parent_grad
                else:
                    pending[key] = parent_grad

    # Operator sugar / Açúcar sintático de operadores

    def __add__(self, other: Any) -> Tensor:
        return ew_op(self, other, "add")

    def __radd__(self, other: Any) -> Tensor:
        return ew_op(other, self, "add")

    def __sub__(self, other: Any) -> Tensor:
        return ew_op(self, other, "sub")

    def __rsub__(self, other: Any) -> Tensor:
        return ew_op(other, self, "sub")

    def __mul__(self, other: Any) -> Tensor:
        return ew_op(self, other, "mul")

    def __rmul__(self, other: Any) -> Tensor:
        return ew_op(other, self, "mul")

    def __truediv__(self, other: Any) -> Tensor:
        return ew_op(self, other, "div")

    def __rtruediv__(self, other: Any) -> Tensor:
        return ew_op(other, self, "div")

    def __neg__(self) -> Tensor:
        return ew_op(self, -1.0, "mul")

    def __pow__(self, exponent: float) -> Tensor:
        return power(self, exponent)

    def __matmul__(self, other: Tensor) -> Tensor:
        return matmul(self, other)

    def __getitem__(self, index: Any) -> Tensor:
        return getitem(self, index)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        return tensor_mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> Tensor:
        if len(shape) == 1 and isinstance(shape[0], tuple | list):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        return transpose(self, axes or None)


def _topological_order(root: Tensor) -> list[Tensor]:
    # iterative DFS; graphs can be deeper than the recursion limit
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def as_tensor(value: Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


# Broadcasting / Broadcasting


def broadcast_shape(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Result shape of a trailing-dimension broadcast, or ShapeError."""
    ndim = max(len(a), len(b))
    padded_a = (1,) * (ndim - len(a)) + tuple(a)
    padded_b = (1,) * (ndim - len(b)) + tuple(b)
    out = []
    for size_a, size_b in zip(padded_a, padded_b, strict=True):
        if size_a != size_b and 1 not in (size_a, size_b):
            raise ShapeError(f"shapes {a} and {b} cannot be broadcast")
        out.append(max(size_a, size_b))
    return tuple(out)


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# Core operations / Operações básicas


def ew_op(a: Any, b: Any, kind: str) -> Tensor:
    """
    Elementwise add/sub/mul/div with broadcasting.
    Operação elemento a elemento com broadcasting.
    """
    a, b = as_tensor(a), as_tensor(b)
    broadcast_shape(a.shape, b.shape)
    x, y = a.data, b.data

    if kind == "add":
        out = x + y

        def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return unbroadcast(g, x.shape), unbroadcast(g, y.shape)

    elif kind == "sub":
        out = x - y

        def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return unbroadcast(g, x.shape), unbroadcast(-g, y.shape)

    elif kind == "mul":
        out = x * y

        def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return unbroadcast(g * y, x.shape), unbroadcast(g * x, y.shape)

    elif kind == "div":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x / y

        def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return unbroadcast(g / y, x.shape), unbroadcast(-g * x / (y * y), y.shape)

    else:
        raise ShapeError(f"unknown elementwise op '{kind}'")

    return Tensor._from_op(out, (a, b), backward, kind)


def power(a: Tensor, exponent: float) -> Tensor:
    x = a.data
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x**exponent

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return (g * exponent * x ** (exponent - 1),)

    return Tensor._from_op(out, (a,), backward, "pow")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """2-D matrix product; inner dimensions must agree."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
    x, y = a.data, b.data

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g @ y.T, x.T @ g

    return Tensor._from_op(x @ y, (a, b), backward, "matmul")


def _normalize_axes(axis: int | tuple[int, ...] | None, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return tuple(sorted(a % ndim for a in axes))


def tensor_sum(
    a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False
) -> Tensor:
    axes = _normalize_axes(axis, a.ndim)
    shape = a.shape

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, shape).copy(),)

    return Tensor._from_op(a.data.sum(axis=axes, keepdims=keepdims), (a,), backward, "sum")


def tensor_mean(
    a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False
) -> Tensor:
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
    return tensor_sum(a, axis=axes, keepdims=keepdims) / float(count)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    original = a.shape
    try:
        out = a.data.reshape(tuple(shape))
    except ValueError as exc:
        raise ShapeError(f"cannot reshape {original} into {tuple(shape)}") from exc

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g.reshape(original),)

    return Tensor._from_op(out, (a,), backward, "reshape")


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    axes = tuple(reversed(range(a.ndim))) if axes is None else tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g.transpose(inverse),)

    return Tensor._from_op(a.data.transpose(axes), (a,), backward, "transpose")


def getitem(a: Tensor, index: Any) -> Tensor:
    shape = a.shape
    out = a.data[index]
    if out.size == 0:
        raise ShapeError(f"indexing {shape} with {index!r} selects nothing")

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(shape)
        np.add.at(full, index, g)
        return (full,)

    return Tensor._from_op(np.array(out), (a,), backward, "getitem")
