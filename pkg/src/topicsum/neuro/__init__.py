"""Differentiable numeric substrate: 2-D tensors, a gradient tape, the
primitive operations the summarization network needs, and a
finite-difference checking harness."""

from topicsum.neuro.gradcheck import grad_check
from topicsum.neuro.gru import GruCell, gru_step
from topicsum.neuro.tape import (
    Tape,
    Tensor,
    add,
    add_n,
    add_rowvec,
    affine,
    concat_cols,
    concat_rows,
    constant,
    cross_entropy,
    log,
    matmul,
    mul,
    parameter,
    pick,
    scalar_mul,
    sigmoid,
    softmax,
    sum_all,
    take_row,
    tanh,
    tensor,
    transpose,
    zero_grads,
)

__all__ = [
    "GruCell",
    "Tape",
    "Tensor",
    "add",
    "add_n",
    "add_rowvec",
    "affine",
    "concat_cols",
    "concat_rows",
    "constant",
    "cross_entropy",
    "grad_check",
    "gru_step",
    "log",
    "matmul",
    "mul",
    "parameter",
    "pick",
    "scalar_mul",
    "sigmoid",
    "softmax",
    "sum_all",
    "take_row",
    "tanh",
    "tensor",
    "transpose",
    "zero_grads",
]
