"""Shared synthetic corpora and measurement helpers.

The generators double as oracles: recovery and copy tests check the
trained artifacts against the known structure that generated the data.
"""

import numpy as np

from topicsum.corpus.instances import TrainingInstance, encode_instance
from topicsum.corpus.vocab import Vocabulary
from topicsum.model import (
    ModelConfig,
    ModelParams,
    build_scatter,
    decode_step,
    encode,
)

PLANTED_TOPIC_WORDS = (
    [f"alpha{i}" for i in range(10)],
    [f"bravo{i}" for i in range(10)],
)


def planted_word_probs() -> np.ndarray:
    """Within-topic word probabilities, strictly decreasing so top words
    are unambiguous."""
    probs = np.arange(10, 0, -1.0)
    return probs / probs.sum()


def planted_lda_corpus(
    n_docs: int = 200, doc_len: int = 50, seed: int = 7
) -> tuple[Vocabulary, list[list[int]], list[list[str]]]:
    """Two-topic disjoint-vocabulary corpus drawn from a known model.

    Returns the vocabulary, the encoded documents, and each planted
    topic's words ranked by probability (the recovery oracle).
    """
    rng = np.random.default_rng(seed)
    words0, words1 = PLANTED_TOPIC_WORDS
    probs = planted_word_probs()
    vocab = Vocabulary(words0 + words1)
    docs = []
    for _ in range(n_docs):
        theta = rng.dirichlet([0.5, 0.5])
        doc = []
        for _ in range(doc_len):
            side = words1 if rng.random() < theta[1] else words0
            doc.append(vocab.id(side[rng.choice(10, p=probs)]))
        docs.append(doc)
    return vocab, docs, [list(words0), list(words1)]


def planted_single_topic_doc(
    vocab: Vocabulary, side: int, doc_len: int, rng: np.random.Generator
) -> list[int]:
    words = PLANTED_TOPIC_WORDS[side]
    probs = planted_word_probs()
    return [vocab.id(words[rng.choice(10, p=probs)]) for _ in range(doc_len)]


def greedy_topic_alignment(
    top_words_per_topic: list[list[str]], planted: list[list[str]], depth: int = 5
) -> float:
    """Best-permutation mean top-word overlap between fitted and planted topics."""
    fitted = [set(words[:depth]) for words in top_words_per_topic]
    expected = [set(words[:depth]) for words in planted]
    straight = sum(len(f & e) for f, e in zip(fitted, expected))
    crossed = sum(len(f & e) for f, e in zip(fitted, reversed(expected)))
    return max(straight, crossed) / (depth * len(expected))


def overfit_corpus(
    n: int = 50, seed: int = 5
) -> tuple[Vocabulary, Vocabulary, list[TrainingInstance]]:
    """Small memorization corpus: each instance opens with a unique key token."""
    rng = np.random.default_rng(seed)
    keys = [f"key{i}" for i in range(n)]
    filler = [f"fill{i}" for i in range(40)]
    words = [f"w{i}" for i in range(60)]
    code_vocab = Vocabulary(sorted(keys + filler))
    sum_vocab = Vocabulary(sorted(words))
    instances = []
    for i in range(n):
        code = [keys[i]] + [filler[int(j)] for j in rng.integers(0, 40, size=6)]
        summary = [words[int(j)] for j in rng.integers(0, 60, size=int(rng.integers(3, 6)))]
        topics = [int(rng.integers(0, 4))] + [4, 4]
        instances.append(
            encode_instance(
                code, summary, topics, code_vocab, sum_vocab, method_name=f"m{i}"
            )
        )
    return code_vocab, sum_vocab, instances


def copy_marker_corpus(
    n: int = 50, seed: int = 9
) -> tuple[Vocabulary, Vocabulary, list[TrainingInstance], list[str]]:
    """Corpus where each reference contains a token unique to its own source.

    Markers are in the code vocabulary but deliberately not in the summary
    vocabulary, so the only way to emit them is through the copy path.
    """
    rng = np.random.default_rng(seed)
    markers = [f"marker{i}" for i in range(n)]
    filler = [f"fill{i}" for i in range(20)]
    scaffold = ["returns", "the", "given", "value", "creates", "a", "new"]
    code_vocab = Vocabulary(sorted(markers + filler + ["(", ")"]))
    sum_vocab = Vocabulary(sorted(scaffold))
    instances = []
    for i in range(n):
        position_filler = [filler[int(j)] for j in rng.integers(0, 20, size=3)]
        code = [position_filler[0], "(", markers[i], ")"] + position_filler[1:]
        verb = ["returns", "creates"][i % 2]
        summary = [verb, "the", markers[i], "value"]
        topics = [int(rng.integers(0, 3))] + [3]
        instances.append(
            encode_instance(
                code, summary, topics, code_vocab, sum_vocab, method_name=f"m{i}"
            )
        )
    return code_vocab, sum_vocab, instances, markers


def teacher_forced_accuracy(
    params: ModelParams, config: ModelConfig, instances
) -> float:
    """Fraction of gold summary tokens predicted by argmax under teacher forcing."""
    hits = total = 0
    for inst in instances:
        enc = encode(params, config, inst.code_ids, inst.topic_ids)
        scatter = build_scatter(
            inst.copy_slots, config.sum_vocab_size, inst.n_oov, params.dtype
        )
        state = enc.code_final
        for y_prev, gold in zip(inst.summary_ids[:-1], inst.summary_ids[1:]):
            out = decode_step(
                params, config, y_prev, state, enc, scatter, inst.n_oov
            )
            hits += int(np.argmax(out.final_dist.data[0]) == gold)
            total += 1
            state = out.state
    return hits / total


def random_decode_case(rng: np.random.Generator):
    """One randomized decode_step setup for distribution fuzzing."""
    from topicsum.model import init_params
    from topicsum.neuro.tape import Tensor

    config = ModelConfig(
        code_vocab_size=int(rng.integers(6, 15)),
        sum_vocab_size=int(rng.integers(6, 12)),
        topic_count=int(rng.integers(2, 5)),
        n_topics=2,
        embed_dim=int(rng.integers(3, 7)),
        topic_embed_dim=3,
        hidden_dim=int(rng.integers(4, 10)),
        max_code_len=12,
        max_sum_len=8,
        use_topics=bool(rng.integers(0, 2)),
    )
    params = init_params(config, seed=int(rng.integers(0, 2**31)))
    # Nudge the switch away from saturation so both routes carry mass.
    params.gen_bias.data[0, 0] = float(rng.normal(scale=2.0))
    t = int(rng.integers(1, 9))
    code_ids = rng.integers(0, config.code_vocab_size, size=t).tolist()
    topic_ids = rng.integers(0, config.topic_count + 1, size=config.n_topics).tolist()
    n_oov = int(rng.integers(0, 4))
    ext = config.sum_vocab_size + n_oov
    copy_slots = []
    oov_used = 0
    for _ in range(t):
        if oov_used < n_oov and rng.random() < 0.5:
            copy_slots.append(config.sum_vocab_size + oov_used)
            oov_used += 1
        else:
            copy_slots.append(int(rng.integers(0, config.sum_vocab_size)))
    # Unassigned extended slots still exist in the distribution; that is fine.
    enc = encode(params, config, code_ids, topic_ids)
    mask = rng.random(t) < 0.8
    if not mask.any():
        mask[int(rng.integers(0, t))] = True
    enc.code_mask = mask
    scatter = build_scatter(copy_slots, config.sum_vocab_size, n_oov, params.dtype)
    y_prev = int(rng.integers(0, ext))
    state = Tensor(rng.normal(scale=0.5, size=(1, config.hidden_dim)))
    return params, config, enc, scatter, n_oov, copy_slots, y_prev, state
