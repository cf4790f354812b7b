"""
Reverse-mode autodiff engine over numpy float64 arrays.
Motor de diferenciação automática em modo reverso sobre arrays numpy.
"""

from depthfusion.autodiff.functional import (
    absolute,
    activation,
    bilinear_sample,
    broadcast_to,
    concat,
    conv2d,
    conv3d,
    exp,
    order_invariant_sum,
    relu,
    sigmoid,
    silu,
    softmax,
    softplus,
    sqrt,
    stack,
    take,
    upsample_nearest,
    upsample_to,
)
from depthfusion.autodiff.gradcheck import GRAD_CHECK_TOLERANCE, grad_check
from depthfusion.autodiff.module import Module, Parameter
from depthfusion.autodiff.optim import (
    AdamW,
    LrSchedule,
    OptimizerState,
    adamw_step,
    one_cycle_lr,
)
from depthfusion.autodiff.tensor import (
    Tensor,
    as_tensor,
    broadcast_shape,
    ew_op,
    getitem,
    is_grad_enabled,
    matmul,
    no_grad,
    reshape,
    tensor_mean,
    tensor_sum,
    transpose,
)

__all__ = [
    "GRAD_CHECK_TOLERANCE",
    "AdamW",
    "LrSchedule",
    "Module",
    "OptimizerState",
    "Parameter",
    "Tensor",
    "absolute",
    "activation",
    "adamw_step",
    "as_tensor",
    "bilinear_sample",
    "broadcast_shape",
    "broadcast_to",
    "concat",
    "conv2d",
    "conv3d",
    "ew_op",
    "exp",
    "getitem",
    "grad_check",
    "is_grad_enabled",
    "matmul",
    "no_grad",
    "one_cycle_lr",
    "order_invariant_sum",
    "relu",
    "reshape",
    "sigmoid",
    "silu",
    "softmax",
    "softplus",
    "sqrt",
    "stack",
    "take",
    "tensor_mean",
    "tensor_sum",
    "transpose",
    "upsample_nearest",
    "upsample_to",
]
