from .params import (
    DimensionError,
    Parameter,
    count_params,
    global_grad_norm,
    uniform_init,
    zero_grads,
)
from .layers import (
    affine_backward,
    affine_forward,
    conv_stack_backward,
    conv_stack_forward,
    flstm_backward,
    flstm_compose,
    flstm_compose_backward,
    flstm_forward,
    lstm_backward,
    lstm_forward,
    sigmoid,
    softmax,
)
from .gradcheck import GradCheckReport, grad_check

__all__ = [
    "DimensionError",
    "Parameter",
    "count_params",
    "global_grad_norm",
    "uniform_init",
    "zero_grads",
    "affine_forward",
    "affine_backward",
    "conv_stack_forward",
    "conv_stack_backward",
    "lstm_forward",
    "lstm_backward",
    "flstm_compose",
    "flstm_compose_backward",
    "flstm_forward",
    "flstm_backward",
    "softmax",
    "sigmoid",
    "grad_check",
    "GradCheckReport",
]
