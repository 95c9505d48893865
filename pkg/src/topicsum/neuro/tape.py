"""Reverse-mode automatic differentiation over 2-D numpy arrays.

Operations run as plain numpy whenever no tape is open (the fast path
used for decoding). Inside a ``with Tape():`` block every operation
whose inputs require gradients appends a node with a backward closure;
``Tape.backward`` replays the nodes in reverse creation order, which is
a reverse topological order by construction.
"""

from typing import Sequence

import numpy as np
from scipy.special import expit

from topicsum.errors import ShapeError

CROSS_ENTROPY_EPS = 1e-12

_TAPES: list["Tape"] = []


class Tensor:
    """A 2-D array node; gradient and backward closure are tape-managed."""

    __slots__ = ("data", "grad", "requires_grad", "_backward")

    def __init__(self, data: np.ndarray, requires_grad: bool = False):
        self.data = data
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._backward = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


class Tape:
    """Ordered record of operations for one forward pass."""

    __slots__ = ("nodes",)

    def __init__(self):
        self.nodes: list[Tensor] = []

    def __enter__(self) -> "Tape":
        _TAPES.append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        _TAPES.pop()
        return False

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(node) into every reachable node's grad."""
        if loss.data.shape != (1, 1):
            raise ShapeError(f"loss must be a scalar, got shape {loss.data.shape}")
        for node in self.nodes:
            node.grad = None
        loss.grad = np.ones((1, 1), dtype=loss.data.dtype)
        for node in reversed(self.nodes):
            if node.grad is not None and node._backward is not None:
                node._backward(node.grad)


def tensor(values, dtype=np.float64) -> Tensor:
    """Wrap values as a constant 2-D tensor."""
    data = np.asarray(values, dtype=dtype)
    if data.ndim == 1:
        data = data[None, :]
    if data.ndim != 2:
        raise ShapeError(f"tensors are 2-D, got shape {data.shape}")
    return Tensor(data)


def constant(values, dtype=np.float64) -> Tensor:
    return tensor(values, dtype)


def parameter(values, dtype=np.float64) -> Tensor:
    out = tensor(values, dtype)
    out.requires_grad = True
    return out


def zero_grads(tensors) -> None:
    for t in tensors:
        t.grad = None


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.array(g)
    else:
        t.grad += g


def _emit(data: np.ndarray, requires: bool, backward) -> Tensor:
    if not _TAPES or not requires:
        return Tensor(data)
    out = Tensor(data, requires_grad=True)
    out._backward = backward
    _TAPES[-1].nodes.append(out)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul: {a.data.shape} @ {b.data.shape}")
    data = a.data @ b.data

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g @ b.data.T)
        if b.requires_grad:
            _accumulate(b, a.data.T @ g)

    return _emit(data, a.requires_grad or b.requires_grad, backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"add: {a.data.shape} vs {b.data.shape}")
    data = a.data + b.data

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g)
        if b.requires_grad:
            _accumulate(b, g)

    return _emit(data, a.requires_grad or b.requires_grad, backward)


def add_n(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeError("add_n needs at least one operand")
    shape = parts[0].data.shape
    for p in parts[1:]:
        if p.data.shape != shape:
            raise ShapeError(f"add_n: {p.data.shape} vs {shape}")
    data = parts[0].data.copy()
    for p in parts[1:]:
        data += p.data

    def backward(g):
        for p in parts:
            if p.requires_grad:
                _accumulate(p, g)

    return _emit(data, any(p.requires_grad for p in parts), backward)


def add_rowvec(m: Tensor, v: Tensor) -> Tensor:
    """Add a (1, c) row vector to every row of a (r, c) matrix."""
    if v.data.shape != (1, m.data.shape[1]):
        raise ShapeError(f"add_rowvec: {m.data.shape} + {v.data.shape}")
    data = m.data + v.data

    def backward(g):
        if m.requires_grad:
            _accumulate(m, g)
        if v.requires_grad:
            _accumulate(v, g.sum(axis=0, keepdims=True))

    return _emit(data, m.requires_grad or v.requires_grad, backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"mul: {a.data.shape} vs {b.data.shape}")
    data = a.data * b.data

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g * b.data)
        if b.requires_grad:
            _accumulate(b, g * a.data)

    return _emit(data, a.requires_grad or b.requires_grad, backward)


def affine(a: Tensor, scale: float, shift: float = 0.0) -> Tensor:
    data = a.data * scale + shift

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g * scale)

    return _emit(data, a.requires_grad, backward)


def scalar_mul(s: Tensor, m: Tensor) -> Tensor:
    """Multiply a matrix by a (1, 1) scalar tensor."""
    if s.data.shape != (1, 1):
        raise ShapeError(f"scalar_mul: scalar must be (1, 1), got {s.data.shape}")
    data = s.data[0, 0] * m.data

    def backward(g):
        if s.requires_grad:
            _accumulate(s, np.array([[float((g * m.data).sum())]], dtype=g.dtype))
        if m.requires_grad:
            _accumulate(m, g * s.data[0, 0])

    return _emit(data, s.requires_grad or m.requires_grad, backward)


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeError("concat_rows needs at least one operand")
    data = np.concatenate([p.data for p in parts], axis=0)

    def backward(g):
        row = 0
        for p in parts:
            rows = p.data.shape[0]
            if p.requires_grad:
                _accumulate(p, g[row : row + rows])
            row += rows

    return _emit(data, any(p.requires_grad for p in parts), backward)


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeError("concat_cols needs at least one operand")
    data = np.concatenate([p.data for p in parts], axis=1)

    def backward(g):
        col = 0
        for p in parts:
            cols = p.data.shape[1]
            if p.requires_grad:
                _accumulate(p, g[:, col : col + cols])
            col += cols

    return _emit(data, any(p.requires_grad for p in parts), backward)


def take_row(m: Tensor, index: int) -> Tensor:
    """Select one row as a (1, c) tensor (embedding lookup)."""
    if not 0 <= index < m.data.shape[0]:
        raise ShapeError(f"row {index} out of range for shape {m.data.shape}")
    data = m.data[index : index + 1].copy()

    def backward(g):
        if m.requires_grad:
            if m.grad is None:
                m.grad = np.zeros_like(m.data)
            m.grad[index] += g[0]

    return _emit(data, m.requires_grad, backward)


def transpose(a: Tensor) -> Tensor:
    data = a.data.T

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g.T)

    return _emit(data, a.requires_grad, backward)


def tanh(a: Tensor) -> Tensor:
    data = np.tanh(a.data)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g * (1.0 - data * data))

    return _emit(data, a.requires_grad, backward)


def sigmoid(a: Tensor) -> Tensor:
    data = expit(a.data)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g * data * (1.0 - data))

    return _emit(data, a.requires_grad, backward)


def softmax(a: Tensor, mask: np.ndarray | None = None) -> Tensor:
    """Masked, max-shifted softmax over a (1, n) row.

    Masked positions get probability exactly zero; at least one position
    must be unmasked.
    """
    if a.data.shape[0] != 1:
        raise ShapeError(f"softmax expects a (1, n) row, got {a.data.shape}")
    row = a.data[0]
    if mask is not None:
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.shape[0] != row.shape[0]:
            raise ShapeError(
                f"softmax mask length {mask.shape[0]} vs row length {row.shape[0]}"
            )
        if not mask.any():
            raise ShapeError("softmax: all positions are masked")
        row = np.where(mask, row, row.dtype.type(-np.inf))
    shifted = row - row.max()
    ex = np.exp(shifted)
    data = (ex / ex.sum())[None, :]

    def backward(g):
        if a.requires_grad:
            dot = (g * data).sum()
            _accumulate(a, data * (g - dot))

    return _emit(data, a.requires_grad, backward)


def sum_all(a: Tensor) -> Tensor:
    data = np.array([[a.data.sum()]], dtype=a.data.dtype)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, np.full_like(a.data, g[0, 0]))

    return _emit(data, a.requires_grad, backward)


def pick(a: Tensor, index: int) -> Tensor:
    """Select one entry of a (1, n) row as a (1, 1) tensor."""
    if a.data.shape[0] != 1:
        raise ShapeError(f"pick expects a (1, n) row, got {a.data.shape}")
    if not 0 <= index < a.data.shape[1]:
        raise ShapeError(f"index {index} out of range for shape {a.data.shape}")
    data = a.data[:, index : index + 1].copy()

    def backward(g):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[0, index] += g[0, 0]

    return _emit(data, a.requires_grad, backward)


def log(a: Tensor) -> Tensor:
    data = np.log(a.data)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g / a.data)

    return _emit(data, a.requires_grad, backward)


def cross_entropy(dist: Tensor, target: int) -> Tensor:
    """Negative log probability of the target index, epsilon-stabilized."""
    return affine(log(affine(pick(dist, target), 1.0, CROSS_ENTROPY_EPS)), -1.0)
