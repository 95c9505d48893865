"""The dual-encoder attentional pointer-generator network.

A topic encoder reads the class's top topics as an embedded sequence;
its final state seeds the code encoder, so class context flows into the
code representation. The decoder attends over code positions, mixes a
generation distribution over the summary vocabulary with copy mass
scattered onto per-instance extended slots, and balances the two with a
learned switch probability.
"""

from dataclasses import asdict, dataclass

import numpy as np

from topicsum.corpus.instances import TrainingInstance
from topicsum.corpus.vocab import UNK_ID
from topicsum.errors import ConfigError, DecodeError, ShapeError
from topicsum.neuro.gru import GruCell, gru_step
from topicsum.neuro.tape import (
    Tensor,
    add,
    add_n,
    add_rowvec,
    affine,
    concat_cols,
    concat_rows,
    cross_entropy,
    matmul,
    parameter,
    scalar_mul,
    sigmoid,
    softmax,
    take_row,
    tanh,
    transpose,
)

INIT_SCALE = 0.08


@dataclass
class ModelConfig:
    """Static dimensions of the network."""

    code_vocab_size: int
    sum_vocab_size: int
    topic_count: int
    n_topics: int = 10
    embed_dim: int = 64
    topic_embed_dim: int = 32
    hidden_dim: int = 128
    max_code_len: int = 200
    max_sum_len: int = 30
    use_topics: bool = True

    def __post_init__(self):
        for name in (
            "code_vocab_size",
            "sum_vocab_size",
            "topic_count",
            "n_topics",
            "embed_dim",
            "topic_embed_dim",
            "hidden_dim",
            "max_code_len",
            "max_sum_len",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_topics > self.topic_count:
            raise ConfigError(
                f"n_topics ({self.n_topics}) exceeds topic_count ({self.topic_count})"
            )

    @property
    def null_topic_id(self) -> int:
        """Padding topic index; its embedding row is the last one."""
        return self.topic_count

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ModelParams:
    """All trainable tensors, grouped by role."""

    code_embed: Tensor
    sum_embed: Tensor
    topic_embed: Tensor
    topic_encoder: GruCell
    code_encoder: GruCell
    decoder: GruCell
    attn_query: Tensor
    attn_keys: Tensor
    attn_score: Tensor
    out_proj: Tensor
    out_bias: Tensor
    gen_context: Tensor
    gen_state: Tensor
    gen_input: Tensor
    gen_bias: Tensor

    def named(self) -> list[tuple[str, Tensor]]:
        """Deterministically ordered (name, tensor) pairs."""
        pairs = [
            ("code_embed", self.code_embed),
            ("sum_embed", self.sum_embed),
            ("topic_embed", self.topic_embed),
        ]
        pairs += self.topic_encoder.named("topic_encoder")
        pairs += self.code_encoder.named("code_encoder")
        pairs += self.decoder.named("decoder")
        pairs += [
            ("attn_query", self.attn_query),
            ("attn_keys", self.attn_keys),
            ("attn_score", self.attn_score),
            ("out_proj", self.out_proj),
            ("out_bias", self.out_bias),
            ("gen_context", self.gen_context),
            ("gen_state", self.gen_state),
            ("gen_input", self.gen_input),
            ("gen_bias", self.gen_bias),
        ]
        return pairs

    def tensors(self) -> list[Tensor]:
        return [t for _, t in self.named()]

    @property
    def dtype(self):
        return self.code_embed.data.dtype


def _gru_shapes(prefix: str, input_dim: int, hidden_dim: int):
    shapes = []
    for gate in ("z", "r", "h"):
        shapes.append((f"{prefix}.w_{gate}", (input_dim, hidden_dim)))
        shapes.append((f"{prefix}.u_{gate}", (hidden_dim, hidden_dim)))
        shapes.append((f"{prefix}.b_{gate}", (1, hidden_dim)))
    return shapes


def param_shapes(config: ModelConfig) -> list[tuple[str, tuple[int, int]]]:
    """Expected shape of every parameter, in named() order."""
    h = config.hidden_dim
    shapes = [
        ("code_embed", (config.code_vocab_size, config.embed_dim)),
        ("sum_embed", (config.sum_vocab_size, config.embed_dim)),
        ("topic_embed", (config.topic_count + 1, config.topic_embed_dim)),
    ]
    for prefix, in_dim in (
        ("topic_encoder", config.topic_embed_dim),
        ("code_encoder", config.embed_dim),
        ("decoder", config.embed_dim + h),
    ):
        shapes += _gru_shapes(prefix, in_dim, h)
    shapes += [
        ("attn_query", (h, h)),
        ("attn_keys", (h, h)),
        ("attn_score", (h, 1)),
        ("out_proj", (2 * h, config.sum_vocab_size)),
        ("out_bias", (1, config.sum_vocab_size)),
        ("gen_context", (h, 1)),
        ("gen_state", (h, 1)),
        ("gen_input", (config.embed_dim, 1)),
        ("gen_bias", (1, 1)),
    ]
    return shapes


def init_params(config: ModelConfig, seed: int = 0, dtype=np.float64) -> ModelParams:
    """Seeded uniform initialization; biases start at zero."""
    rng = np.random.default_rng(seed)
    tensors: dict[str, Tensor] = {}
    for name, shape in param_shapes(config):
        if ".b_" in name or name.endswith("_bias"):
            tensors[name] = parameter(np.zeros(shape), dtype)
        else:
            tensors[name] = parameter(
                rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape), dtype
            )

    return params_from_dict(tensors)


def params_from_dict(tensors: dict[str, Tensor]) -> ModelParams:
    """Assemble ModelParams from a flat {name: tensor} mapping."""

    def cell(prefix: str) -> GruCell:
        return GruCell(
            **{
                key: tensors[f"{prefix}.{key}"]
                for key in ("w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h")
            }
        )

    return ModelParams(
        code_embed=tensors["code_embed"],
        sum_embed=tensors["sum_embed"],
        topic_embed=tensors["topic_embed"],
        topic_encoder=cell("topic_encoder"),
        code_encoder=cell("code_encoder"),
        decoder=cell("decoder"),
        attn_query=tensors["attn_query"],
        attn_keys=tensors["attn_keys"],
        attn_score=tensors["attn_score"],
        out_proj=tensors["out_proj"],
        out_bias=tensors["out_bias"],
        gen_context=tensors["gen_context"],
        gen_state=tensors["gen_state"],
        gen_input=tensors["gen_input"],
        gen_bias=tensors["gen_bias"],
    )


@dataclass
class EncoderOutputs:
    """Both encoders' per-position states plus attention precomputation."""

    topic_states: Tensor | None
    topic_final: Tensor | None
    code_states: Tensor
    code_final: Tensor
    code_mask: np.ndarray
    code_proj: Tensor


@dataclass
class DecoderStepOutput:
    """Everything one decoder step produces."""

    state: Tensor
    attention: Tensor
    context: Tensor
    p_gen: Tensor
    p_vocab: Tensor
    final_dist: Tensor


def _zero_state(params: ModelParams) -> Tensor:
    return Tensor(np.zeros((1, params.decoder.hidden_dim), dtype=params.dtype))


def encode_topics(
    params: ModelParams, config: ModelConfig, topic_ids: list[int]
) -> tuple[Tensor, Tensor]:
    """Run the topic encoder over embedded topic IDs from a zero state."""
    if len(topic_ids) != config.n_topics:
        raise ShapeError(
            f"expected {config.n_topics} topic IDs, got {len(topic_ids)}"
        )
    for t in topic_ids:
        if not 0 <= t <= config.null_topic_id:
            raise DecodeError(f"topic ID {t} out of range")
    state = _zero_state(params)
    states = []
    for t in topic_ids:
        state = gru_step(params.topic_encoder, take_row(params.topic_embed, t), state)
        states.append(state)
    return concat_rows(states), state


def encode_code(
    params: ModelParams,
    config: ModelConfig,
    code_ids: list[int],
    initial_state: Tensor | None = None,
) -> tuple[Tensor, Tensor, np.ndarray]:
    """Run the code encoder, seeded by the topic encoder's final state."""
    if not code_ids:
        raise ShapeError("cannot encode an empty code sequence")
    if len(code_ids) > config.max_code_len:
        raise ShapeError(
            f"code length {len(code_ids)} exceeds max_code_len {config.max_code_len}"
        )
    state = initial_state if initial_state is not None else _zero_state(params)
    states = []
    for c in code_ids:
        if not 0 <= c < config.code_vocab_size:
            raise DecodeError(f"code token ID {c} out of range")
        state = gru_step(params.code_encoder, take_row(params.code_embed, c), state)
        states.append(state)
    mask = np.ones(len(code_ids), dtype=bool)
    return concat_rows(states), state, mask


def encode(
    params: ModelParams,
    config: ModelConfig,
    code_ids: list[int],
    topic_ids: list[int],
) -> EncoderOutputs:
    """Chain both encoders (or skip topics entirely when disabled)."""
    if config.use_topics:
        topic_states, topic_final = encode_topics(params, config, topic_ids)
    else:
        topic_states, topic_final = None, None
    code_states, code_final, mask = encode_code(params, config, code_ids, topic_final)
    return EncoderOutputs(
        topic_states=topic_states,
        topic_final=topic_final,
        code_states=code_states,
        code_final=code_final,
        code_mask=mask,
        code_proj=matmul(code_states, params.attn_keys),
    )


def attention(
    params: ModelParams,
    s_prev: Tensor,
    code_states: Tensor,
    code_mask: np.ndarray,
    code_proj: Tensor | None = None,
) -> tuple[Tensor, Tensor]:
    """Additive attention: weights over code positions and their context."""
    if code_proj is None:
        code_proj = matmul(code_states, params.attn_keys)
    query = matmul(s_prev, params.attn_query)
    scores = matmul(tanh(add_rowvec(code_proj, query)), params.attn_score)
    alpha = softmax(transpose(scores), mask=code_mask)
    context = matmul(alpha, code_states)
    return alpha, context


def build_scatter(
    copy_slots: list[int], sum_vocab_size: int, n_oov: int, dtype=np.float64
) -> Tensor:
    """0/1 matrix routing each source position's copy mass to its slot."""
    ext_size = sum_vocab_size + n_oov
    matrix = np.zeros((len(copy_slots), ext_size), dtype=dtype)
    for j, slot in enumerate(copy_slots):
        if not 0 <= slot < ext_size:
            raise DecodeError(f"copy slot {slot} outside extended vocabulary")
        matrix[j, slot] = 1.0
    return Tensor(matrix)


def final_distribution(
    p_gen: Tensor, p_vocab: Tensor, alpha: Tensor, scatter: Tensor, n_oov: int
) -> Tensor:
    """Mix generation and copy mass over the extended vocabulary."""
    if n_oov > 0:
        pad = Tensor(np.zeros((1, n_oov), dtype=p_vocab.data.dtype))
        gen_part = concat_cols([p_vocab, pad])
    else:
        gen_part = p_vocab
    copy_part = matmul(alpha, scatter)
    return add(
        scalar_mul(p_gen, gen_part),
        scalar_mul(affine(p_gen, -1.0, 1.0), copy_part),
    )


def decode_step(
    params: ModelParams,
    config: ModelConfig,
    y_prev_id: int,
    s_prev: Tensor,
    enc: EncoderOutputs,
    scatter: Tensor,
    n_oov: int,
) -> DecoderStepOutput:
    """One decoder step from the previous output token.

    Extended IDs have no embedding row and are looked up as UNK. The
    returned distribution covers the summary vocabulary plus the
    instance's n_oov extended slots.
    """
    ext_size = config.sum_vocab_size + n_oov
    if not 0 <= y_prev_id < ext_size:
        raise DecodeError(
            f"previous token ID {y_prev_id} outside extended vocabulary of {ext_size}"
        )
    embed_id = y_prev_id if y_prev_id < config.sum_vocab_size else UNK_ID
    y_embed = take_row(params.sum_embed, embed_id)
    alpha, context = attention(
        params, s_prev, enc.code_states, enc.code_mask, enc.code_proj
    )
    state = gru_step(params.decoder, concat_cols([y_embed, context]), s_prev)
    p_vocab = softmax(
        add(matmul(concat_cols([state, context]), params.out_proj), params.out_bias)
    )
    p_gen = sigmoid(
        add(
            add(
                add(
                    matmul(context, params.gen_context),
                    matmul(state, params.gen_state),
                ),
                matmul(y_embed, params.gen_input),
            ),
            params.gen_bias,
        )
    )
    final = final_distribution(p_gen, p_vocab, alpha, scatter, n_oov)
    return DecoderStepOutput(
        state=state,
        attention=alpha,
        context=context,
        p_gen=p_gen,
        p_vocab=p_vocab,
        final_dist=final,
    )


def forward_loss(
    params: ModelParams, config: ModelConfig, instance: TrainingInstance
) -> Tensor:
    """Teacher-forced mean cross-entropy over the summary sequence.

    Gold out-of-vocabulary targets carry their extended IDs, so the copy
    path receives direct training signal.
    """
    enc = encode(params, config, instance.code_ids, instance.topic_ids)
    scatter = build_scatter(
        instance.copy_slots, config.sum_vocab_size, instance.n_oov, params.dtype
    )
    state = enc.code_final
    losses = []
    for y_prev, gold in zip(instance.summary_ids[:-1], instance.summary_ids[1:]):
        step = decode_step(params, config, y_prev, state, enc, scatter, instance.n_oov)
        losses.append(cross_entropy(step.final_dist, gold))
        state = step.state
    if not losses:
        raise ShapeError("instance has no decoding steps")
    return affine(add_n(losses), 1.0 / len(losses))
