"""Latent topic mining over class token bags via collapsed Gibbs sampling.

Each class is a bag-of-words document. The sampler keeps the usual
collapsed count tables and resamples every token's topic label per sweep
from p(z=k | rest), proportional to (n_dk + alpha) * (n_kw + eta) /
(n_k + V*eta). Everything is driven by a seeded generator, so a fit is
fully determined by (documents, config, seed).

The inner loop runs on plain Python lists: at desk scale that is much
faster than per-token numpy dispatch, and it keeps the sampler exact.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from topicsum.corpus.vocab import RESERVED_TOKENS, Vocabulary
from topicsum.errors import CheckpointError, ConfigError, CorpusError

DEFAULT_ETA = 0.01


@dataclass
class LdaConfig:
    """Sampler settings; alpha defaults to 50/k when not given."""

    k: int
    alpha: float | None = None
    eta: float = DEFAULT_ETA
    n_iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"topic count must be >= 1, got {self.k}")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.eta <= 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        if self.n_iterations < 1:
            raise ConfigError(
                f"n_iterations must be >= 1, got {self.n_iterations}"
            )

    @property
    def resolved_alpha(self) -> float:
        return 50.0 / self.k if self.alpha is None else self.alpha


@dataclass
class TopicModel:
    """Fitted topic model: smoothed topic-word rows plus training state."""

    k: int
    alpha: float
    eta: float
    beta: np.ndarray
    vocab: Vocabulary
    assignments: list[list[int]] | None = None
    doc_topic_counts: list[list[int]] | None = None
    likelihood_trace: list[float] = field(default_factory=list)

    @property
    def vocab_size(self) -> int:
        return self.beta.shape[1]


def encode_for_lda(vocab: Vocabulary, tokens: Sequence[str]) -> list[int]:
    """Encode a token bag for the sampler, dropping out-of-vocabulary tokens."""
    return [vocab.id(t) for t in tokens if t in vocab]


def _counts_theta(doc_counts, doc_lengths, k: int, alpha: float) -> np.ndarray:
    counts = np.asarray(doc_counts, dtype=np.float64)
    totals = np.asarray(doc_lengths, dtype=np.float64)[:, None]
    return (counts + alpha) / (totals + k * alpha)


def _counts_beta(word_counts, topic_totals, eta: float, v: int) -> np.ndarray:
    counts = np.asarray(word_counts, dtype=np.float64)
    totals = np.asarray(topic_totals, dtype=np.float64)[:, None]
    return (counts + eta) / (totals + v * eta)


def fit_gibbs(
    documents: Sequence[Sequence[int]],
    config: LdaConfig,
    vocab: Vocabulary,
    track_likelihood: bool = False,
    validate: bool = False,
) -> TopicModel:
    """Fit a topic model by collapsed Gibbs sampling.

    Empty documents are allowed and contribute nothing; an empty corpus is
    an error. With track_likelihood the per-sweep corpus log-likelihood is
    recorded on the returned model; with validate the count tables are
    cross-checked after every sweep (slow, for tests).
    """
    if not documents:
        raise CorpusError("cannot fit a topic model on an empty corpus")
    v = len(vocab)
    for doc in documents:
        for w in doc:
            if not 0 <= w < v:
                raise CorpusError(f"token ID {w} outside vocabulary of size {v}")
    k = config.k
    alpha = config.resolved_alpha
    eta = config.eta
    v_eta = v * eta
    rng = np.random.default_rng(config.seed)

    docs = [list(doc) for doc in documents]
    z = [rng.integers(0, k, size=len(doc)).tolist() for doc in docs]
    n_dk = [[0] * k for _ in docs]
    n_kw = [[0] * v for _ in range(k)]
    n_k = [0] * k
    for d, doc in enumerate(docs):
        row = n_dk[d]
        for w, topic in zip(doc, z[d]):
            row[topic] += 1
            n_kw[topic][w] += 1
            n_k[topic] += 1

    total_tokens = sum(len(doc) for doc in docs)
    doc_lengths = [len(doc) for doc in docs]
    trace: list[float] = []
    cumulative = [0.0] * k
    topics_range = range(k)

    for _ in range(config.n_iterations):
        uniforms = rng.random(total_tokens).tolist() if total_tokens else []
        pos = 0
        for d, doc in enumerate(docs):
            zd = z[d]
            row = n_dk[d]
            for n, w in enumerate(doc):
                old = zd[n]
                row[old] -= 1
                n_kw[old][w] -= 1
                n_k[old] -= 1
                total = 0.0
                for t in topics_range:
                    total += (row[t] + alpha) * (n_kw[t][w] + eta) / (n_k[t] + v_eta)
                    cumulative[t] = total
                target = uniforms[pos] * total
                pos += 1
                new = 0
                while new < k - 1 and cumulative[new] < target:
                    new += 1
                zd[n] = new
                row[new] += 1
                n_kw[new][w] += 1
                n_k[new] += 1
        if validate:
            _validate_counts(docs, z, n_dk, n_kw, n_k, k, v)
        if track_likelihood:
            theta = _counts_theta(n_dk, doc_lengths, k, alpha)
            beta = _counts_beta(n_kw, n_k, eta, v)
            trace.append(_log_likelihood(docs, theta, beta))

    model = TopicModel(
        k=k,
        alpha=alpha,
        eta=eta,
        beta=_counts_beta(n_kw, n_k, eta, v),
        vocab=vocab,
        assignments=z,
        doc_topic_counts=n_dk,
        likelihood_trace=trace,
    )
    return model


def _validate_counts(docs, z, n_dk, n_kw, n_k, k: int, v: int) -> None:
    for d, doc in enumerate(docs):
        assert sum(n_dk[d]) == len(doc), "document counts out of sync"
    for t in range(k):
        assert sum(n_kw[t]) == n_k[t], "topic counts out of sync"
    assert sum(n_k) == sum(len(doc) for doc in docs)


def infer_theta(
    model: TopicModel,
    document: Sequence[int],
    n_iterations: int = 50,
    seed: int = 0,
) -> np.ndarray:
    """Infer a topic distribution for a held-out document, rows of beta fixed.

    Token IDs outside the model's vocabulary are skipped. An empty document
    yields the prior, i.e. the uniform distribution.
    """
    k = model.k
    alpha = model.alpha
    doc = [w for w in document if 0 <= w < model.vocab_size]
    if not doc:
        return np.full(k, 1.0 / k)
    rng = np.random.default_rng(seed)
    beta_cols = [model.beta[:, w].tolist() for w in doc]
    z = rng.integers(0, k, size=len(doc)).tolist()
    counts = [0] * k
    for topic in z:
        counts[topic] += 1
    cumulative = [0.0] * k
    for _ in range(n_iterations):
        uniforms = rng.random(len(doc)).tolist()
        for n in range(len(doc)):
            old = z[n]
            counts[old] -= 1
            col = beta_cols[n]
            total = 0.0
            for t in range(k):
                total += (counts[t] + alpha) * col[t]
                cumulative[t] = total
            target = uniforms[n] * total
            new = 0
            while new < k - 1 and cumulative[new] < target:
                new += 1
            z[n] = new
            counts[new] += 1
    return (np.asarray(counts, dtype=np.float64) + alpha) / (len(doc) + k * alpha)


def top_n_topics(theta: np.ndarray, n: int) -> list[int]:
    """Indices of the n heaviest topics, descending, ties to the lower index."""
    theta = np.asarray(theta)
    if n > theta.shape[0]:
        raise ConfigError(f"asked for {n} topics from a {theta.shape[0]}-topic model")
    order = np.argsort(-theta, kind="stable")
    return order[:n].tolist()


def topic_top_words(model: TopicModel, topic: int, n: int) -> list[str]:
    """The n most probable words of one topic, ties broken lexicographically."""
    if not 0 <= topic < model.k:
        raise ConfigError(f"topic {topic} out of range for k={model.k}")
    row = model.beta[topic]
    order = sorted(range(len(row)), key=lambda w: (-row[w], model.vocab.token(w)))
    return [model.vocab.token(w) for w in order[:n]]


def _log_likelihood(docs, theta: np.ndarray, beta: np.ndarray) -> float:
    total = 0.0
    for d, doc in enumerate(docs):
        if not doc:
            continue
        probs = theta[d] @ beta[:, doc]
        total += float(np.log(probs).sum())
    return total


def document_thetas(model: TopicModel) -> np.ndarray:
    """Per-training-document topic distributions from the retained state."""
    if model.doc_topic_counts is None:
        raise CorpusError("model carries no training assignments")
    lengths = [sum(row) for row in model.doc_topic_counts]
    return _counts_theta(model.doc_topic_counts, lengths, model.k, model.alpha)


def corpus_log_likelihood(
    model: TopicModel,
    documents: Sequence[Sequence[int]],
    thetas: np.ndarray | None = None,
) -> float:
    """Corpus log-likelihood under pointwise theta/beta estimates.

    With thetas omitted the model's retained training distributions are
    used, which requires documents to be the training corpus.
    """
    if not documents:
        return 0.0
    if thetas is None:
        thetas = document_thetas(model)
        if len(documents) != thetas.shape[0]:
            raise CorpusError(
                "document count does not match the model's training corpus"
            )
    docs = [[w for w in doc if 0 <= w < model.vocab_size] for doc in documents]
    return _log_likelihood(docs, np.asarray(thetas), model.beta)


def save_topic_model(model: TopicModel, path: str | Path) -> None:
    """Persist as a JSON manifest plus a sibling raw float64 beta matrix."""
    path = Path(path)
    beta_name = path.stem + ".beta"
    manifest = {
        "k": model.k,
        "alpha": model.alpha,
        "eta": model.eta,
        "vocab": model.vocab.tokens,
        "beta_file": beta_name,
    }
    path.write_text(json.dumps(manifest), encoding="utf-8")
    (path.parent / beta_name).write_bytes(
        model.beta.astype("<f8").tobytes(order="C")
    )


def load_topic_model(path: str | Path) -> TopicModel:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read topic model manifest {path}: {exc}") from exc
    try:
        k = int(manifest["k"])
        vocab_tokens = manifest["vocab"]
        beta_file = manifest["beta_file"]
        alpha = float(manifest["alpha"])
        eta = float(manifest["eta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"topic model manifest {path} is malformed") from exc
    if not isinstance(vocab_tokens, list) or vocab_tokens[:4] != list(RESERVED_TOKENS):
        raise CheckpointError(f"topic model manifest {path} has a malformed vocabulary")
    vocab = Vocabulary(vocab_tokens[4:])
    raw = (path.parent / beta_file).read_bytes()
    expected = k * len(vocab) * struct.calcsize("<d")
    if len(raw) != expected:
        raise CheckpointError(
            f"beta matrix has {len(raw)} bytes, expected {expected}"
        )
    beta = np.frombuffer(raw, dtype="<f8").reshape(k, len(vocab)).copy()
    return TopicModel(k=k, alpha=alpha, eta=eta, beta=beta, vocab=vocab)
