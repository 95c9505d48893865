"""Finite-difference verification of reverse-mode gradients."""

from typing import Callable, Sequence

import numpy as np

from topicsum.neuro.tape import Tape, Tensor, zero_grads


def grad_check(
    f: Callable[[], Tensor],
    params: Sequence[Tensor],
    epsilon: float = 1e-4,
    max_samples: int = 200,
    seed: int = 0,
) -> float:
    """Worst relative error between tape gradients and central differences.

    f must be a deterministic scalar function of the given parameters.
    Every parameter array is probed at up to max_samples coordinates
    (all of them when the array is small); each probe evaluates f twice
    with the coordinate shifted by +/- epsilon.
    """
    zero_grads(params)
    with Tape() as tape:
        loss = f()
    tape.backward(loss)
    analytic = [
        np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params
    ]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        grad_flat = grad.reshape(-1)
        if flat.size <= max_samples:
            coords = range(flat.size)
        else:
            coords = rng.choice(flat.size, size=max_samples, replace=False)
        for c in coords:
            original = flat[c]
            flat[c] = original + epsilon
            f_plus = float(f().data[0, 0])
            flat[c] = original - epsilon
            f_minus = float(f().data[0, 0])
            flat[c] = original
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            a = float(grad_flat[c])
            denom = max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, abs(a - numeric) / denom)
    return worst
