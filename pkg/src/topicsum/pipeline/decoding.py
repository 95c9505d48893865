"""Greedy and beam-search decoding with copy-back to surface tokens.

Both decoders run the network without a gradient tape. Beam search ranks
hypotheses by length-normalized log probability (log prob divided by the
number of generated tokens); finished hypotheses are frozen and compete
with ongoing ones under the same score, and exact ties break on the
lexicographically smaller token-ID sequence.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from topicsum.corpus.instances import TrainingInstance
from topicsum.corpus.vocab import BOS_ID, EOS_ID, PAD_ID, Vocabulary
from topicsum.errors import ConfigError, DecodeError
from topicsum.model import (
    ModelConfig,
    ModelParams,
    build_scatter,
    decode_step,
    encode,
)
from topicsum.neuro.tape import Tensor

StepFn = Callable[[int, object], tuple[np.ndarray, object]]


@dataclass
class BeamHypothesis:
    """One partial decode: IDs so far (starting at BOS) and its score state."""

    token_ids: list[int]
    log_prob: float
    state: object
    finished: bool

    @property
    def generated(self) -> int:
        return len(self.token_ids) - 1

    def score(self) -> float:
        return self.log_prob / max(self.generated, 1)


def _model_step_fn(
    params: ModelParams, config: ModelConfig, instance: TrainingInstance
) -> tuple[StepFn, Tensor]:
    enc = encode(params, config, instance.code_ids, instance.topic_ids)
    scatter = build_scatter(
        instance.copy_slots, config.sum_vocab_size, instance.n_oov, params.dtype
    )

    def step(y_prev: int, state: Tensor) -> tuple[np.ndarray, Tensor]:
        out = decode_step(params, config, y_prev, state, enc, scatter, instance.n_oov)
        return out.final_dist.data[0], out.state

    return step, enc.code_final


def greedy_decode(
    params: ModelParams,
    config: ModelConfig,
    instance: TrainingInstance,
    max_len: int | None = None,
) -> list[int]:
    """Argmax decoding from BOS; stops at EOS or after max_len tokens.

    Ties pick the lowest ID. The returned sequence includes the leading
    BOS and the final EOS when one was produced.
    """
    max_len = config.max_sum_len if max_len is None else max_len
    step, state = _model_step_fn(params, config, instance)
    ids = [BOS_ID]
    for _ in range(max_len):
        dist, state = step(ids[-1], state)
        nxt = int(np.argmax(dist))
        ids.append(nxt)
        if nxt == EOS_ID:
            break
    return ids


def search_steps(
    step_fn: StepFn,
    initial_state,
    beam: int,
    max_len: int,
    bos_id: int = BOS_ID,
    eos_id: int = EOS_ID,
) -> list[int]:
    """Generic beam search over an arbitrary step function.

    step_fn(prev_token, state) must return (probability vector over the
    next token, new state). The best hypothesis under the normalized
    score is returned, whether or not it reached EOS within max_len.
    """
    if beam < 1:
        raise ConfigError(f"beam width must be >= 1, got {beam}")
    hyps = [BeamHypothesis([bos_id], 0.0, initial_state, False)]
    for _ in range(max_len):
        if all(h.finished for h in hyps):
            break
        candidates = [h for h in hyps if h.finished]
        for h in hyps:
            if h.finished:
                continue
            dist, new_state = step_fn(h.token_ids[-1], h.state)
            with np.errstate(divide="ignore"):
                log_dist = np.log(dist)
            order = np.argsort(-log_dist, kind="stable")[:beam]
            for token in order:
                token = int(token)
                candidates.append(
                    BeamHypothesis(
                        token_ids=h.token_ids + [token],
                        log_prob=h.log_prob + float(log_dist[token]),
                        state=new_state,
                        finished=token == eos_id,
                    )
                )
        candidates.sort(key=lambda h: (-h.score(), h.token_ids))
        hyps = candidates[:beam]
    hyps.sort(key=lambda h: (-h.score(), h.token_ids))
    return hyps[0].token_ids


def beam_search(
    params: ModelParams,
    config: ModelConfig,
    instance: TrainingInstance,
    beam: int,
    max_len: int | None = None,
) -> list[int]:
    """Beam-search decode of one instance; beam=1 coincides with greedy."""
    max_len = config.max_sum_len if max_len is None else max_len
    step, state = _model_step_fn(params, config, instance)
    return search_steps(step, state, beam, max_len)


def detokenize(
    ids: Sequence[int], sum_vocab: Vocabulary, oov_map: dict[str, int]
) -> str:
    """Map an extended-ID sequence back to a summary string.

    Vocabulary IDs become vocabulary tokens, extended IDs become the
    source surface tokens that produced them; BOS/PAD are dropped and EOS
    terminates the output.
    """
    inverse = {ext_id: token for token, ext_id in oov_map.items()}
    words = []
    for i in ids:
        if i in (BOS_ID, PAD_ID):
            continue
        if i == EOS_ID:
            break
        if 0 <= i < len(sum_vocab):
            words.append(sum_vocab.token(i))
        elif i in inverse:
            words.append(inverse[i])
        else:
            raise DecodeError(f"unknown extended ID {i}")
    return " ".join(words)
