"""A gated recurrent cell built from tape primitives."""

from dataclasses import dataclass

import numpy as np

from topicsum.neuro.tape import Tensor, add, matmul, mul, affine, parameter, sigmoid, tanh


@dataclass
class GruCell:
    """Input/hidden weight matrices and biases for one recurrent layer."""

    w_z: Tensor
    u_z: Tensor
    b_z: Tensor
    w_r: Tensor
    u_r: Tensor
    b_r: Tensor
    w_h: Tensor
    u_h: Tensor
    b_h: Tensor

    @property
    def input_dim(self) -> int:
        return self.w_z.data.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.w_z.data.shape[1]

    def named(self, prefix: str) -> list[tuple[str, Tensor]]:
        return [
            (f"{prefix}.{name}", getattr(self, name))
            for name in ("w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h")
        ]

    @classmethod
    def create(
        cls,
        input_dim: int,
        hidden_dim: int,
        rng: np.random.Generator,
        dtype=np.float64,
        init_scale: float = 0.08,
    ) -> "GruCell":
        """Uniformly initialized weights, zero biases."""

        def weight(rows, cols):
            return parameter(
                rng.uniform(-init_scale, init_scale, size=(rows, cols)), dtype
            )

        def bias():
            return parameter(np.zeros((1, hidden_dim)), dtype)

        return cls(
            w_z=weight(input_dim, hidden_dim),
            u_z=weight(hidden_dim, hidden_dim),
            b_z=bias(),
            w_r=weight(input_dim, hidden_dim),
            u_r=weight(hidden_dim, hidden_dim),
            b_r=bias(),
            w_h=weight(input_dim, hidden_dim),
            u_h=weight(hidden_dim, hidden_dim),
            b_h=bias(),
        )


def gru_step(cell: GruCell, x: Tensor, h_prev: Tensor) -> Tensor:
    """One recurrence step: gates from x and h_prev, convex state update."""
    z = sigmoid(add(add(matmul(x, cell.w_z), matmul(h_prev, cell.u_z)), cell.b_z))
    r = sigmoid(add(add(matmul(x, cell.w_r), matmul(h_prev, cell.u_r)), cell.b_r))
    candidate = tanh(
        add(add(matmul(x, cell.w_h), matmul(mul(r, h_prev), cell.u_h)), cell.b_h)
    )
    return add(mul(affine(z, -1.0, 1.0), h_prev), mul(z, candidate))
