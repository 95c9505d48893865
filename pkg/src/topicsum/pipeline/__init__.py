"""Training, checkpointing, and decoding around the network."""

from topicsum.pipeline.checkpoint import load_checkpoint, save_checkpoint
from topicsum.pipeline.decoding import (
    BeamHypothesis,
    beam_search,
    detokenize,
    greedy_decode,
    search_steps,
)
from topicsum.pipeline.training import (
    AdamState,
    TrainConfig,
    adam_step,
    clip_by_global_norm,
    collect_gradients,
    train,
    write_loss_log,
)

__all__ = [
    "AdamState",
    "BeamHypothesis",
    "TrainConfig",
    "adam_step",
    "beam_search",
    "clip_by_global_norm",
    "collect_gradients",
    "detokenize",
    "greedy_decode",
    "load_checkpoint",
    "save_checkpoint",
    "search_steps",
    "train",
    "write_loss_log",
]
