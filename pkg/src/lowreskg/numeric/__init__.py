from .autodiff import (
    ComputationRecord,
    Tensor,
    add,
    clamp,
    concat,
    edge_message_sum,
    finite_difference,
    gradients,
    index_select,
    log,
    matmul,
    mean,
    mul,
    relu,
    scatter_sum,
    sigmoid,
    sub,
    tsum,
)
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "ComputationRecord",
    "Tensor",
    "add",
    "clamp",
    "concat",
    "edge_message_sum",
    "finite_difference",
    "gradients",
    "index_select",
    "log",
    "matmul",
    "mean",
    "mul",
    "relu",
    "scatter_sum",
    "sigmoid",
    "sub",
    "tsum",
    "load_checkpoint",
    "save_checkpoint",
]
