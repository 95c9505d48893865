"""Training loop: seeded shuffling, gradient accumulation over micro-batches,
global-norm clipping, and bias-corrected adaptive moment updates."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from topicsum.corpus.instances import TrainingInstance
from topicsum.errors import ConfigError, TrainingError
from topicsum.model import ModelConfig, ModelParams, forward_loss, init_params
from topicsum.neuro.tape import Tape, add_n, affine, zero_grads


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 16
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    clip_norm: float = 5.0
    seed: int = 0
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        # learning_rate 0 is legal: it makes training a deterministic no-op.
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        for name in ("adam_beta1", "adam_beta2"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {value}")
        if self.adam_eps <= 0 or self.clip_norm <= 0:
            raise ConfigError("adam_eps and clip_norm must be positive")
        if self.checkpoint_every < 0:
            raise ConfigError("checkpoint_every must be >= 0")


@dataclass
class AdamState:
    """First/second moment estimates per parameter plus the step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def create(cls, named_params) -> "AdamState":
        state = cls()
        for name, p in named_params:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        return state


def collect_gradients(params: ModelParams) -> dict[str, np.ndarray]:
    """Gradients keyed by parameter name; unreached parameters get zeros."""
    return {
        name: (np.zeros_like(p.data) if p.grad is None else p.grad)
        for name, p in params.named()
    }


def clip_by_global_norm(grads: dict[str, np.ndarray], clip_norm: float) -> float:
    """Scale all gradients in place so their joint norm is at most clip_norm."""
    total = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total > clip_norm > 0.0:
        scale = clip_norm / total
        for g in grads.values():
            g *= scale
    return total


def adam_step(named_params, grads, state: AdamState, config: TrainConfig) -> None:
    """One bias-corrected update, in place on the parameter arrays."""
    state.t += 1
    correction1 = 1.0 - config.adam_beta1 ** state.t
    correction2 = 1.0 - config.adam_beta2 ** state.t
    for name, p in named_params:
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= config.adam_beta1
        m += (1.0 - config.adam_beta1) * g
        v *= config.adam_beta2
        v += (1.0 - config.adam_beta2) * (g * g)
        p.data -= config.learning_rate * (m / correction1) / (
            np.sqrt(v / correction2) + config.adam_eps
        )


def train(
    model_config: ModelConfig,
    train_config: TrainConfig,
    instances: Sequence[TrainingInstance],
    checkpoint_dir: str | Path | None = None,
    dtype=np.float32,
) -> tuple[ModelParams, list[tuple[int, float]]]:
    """Train from a fresh initialization; returns params and the loss log.

    Shuffling is reseeded from train_config.seed, so (seed, data, config)
    fully determine the parameter trajectory. A non-finite loss aborts
    with the index of the offending instance. When checkpoint_dir is set,
    a checkpoint is written every checkpoint_every epochs (if nonzero)
    plus a final one at the end.
    """
    from topicsum.pipeline.checkpoint import save_checkpoint

    if not instances:
        raise TrainingError("cannot train on an empty instance list")
    params = init_params(model_config, seed=train_config.seed, dtype=dtype)
    tensors = params.tensors()
    state = AdamState.create(params.named())
    shuffle_rng = np.random.default_rng([train_config.seed, 1])
    n = len(instances)
    loss_log: list[tuple[int, float]] = []
    checkpoint_dir = Path(checkpoint_dir) if checkpoint_dir is not None else None

    for epoch in range(1, train_config.epochs + 1):
        order = shuffle_rng.permutation(n)
        epoch_total = 0.0
        for start in range(0, n, train_config.batch_size):
            batch = order[start : start + train_config.batch_size]
            zero_grads(tensors)
            with Tape() as tape:
                losses = []
                for idx in batch:
                    loss = forward_loss(params, model_config, instances[idx])
                    value = float(loss.data[0, 0])
                    if not math.isfinite(value):
                        raise TrainingError(
                            f"non-finite loss at instance {idx} in epoch {epoch}"
                        )
                    epoch_total += value
                    losses.append(loss)
                batch_loss = affine(add_n(losses), 1.0 / len(losses))
            tape.backward(batch_loss)
            grads = collect_gradients(params)
            clip_by_global_norm(grads, train_config.clip_norm)
            adam_step(params.named(), grads, state, train_config)
        loss_log.append((epoch, epoch_total / n))
        if (
            checkpoint_dir is not None
            and train_config.checkpoint_every > 0
            and epoch % train_config.checkpoint_every == 0
        ):
            save_checkpoint(checkpoint_dir / f"epoch_{epoch:04d}", params, model_config)
    if checkpoint_dir is not None:
        save_checkpoint(checkpoint_dir, params, model_config)
    return params, loss_log


def write_loss_log(path: str | Path, loss_log: Sequence[tuple[int, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss"])
        for epoch, mean_loss in loss_log:
            writer.writerow([epoch, repr(mean_loss)])
