"""File-level pipeline stages: everything the service endpoints expose.

Each function is a pure function of its input files plus explicit seeds,
so identical invocations produce identical outputs.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from topicsum.corpus.instances import (
    build_instances,
    collect_pairs,
    decode_records,
    encode_instance,
    read_instance_records,
    write_instance_records,
)
from topicsum.corpus.lexer import RawClass, RawMethod, extract_classes
from topicsum.corpus.vocab import Vocabulary, build_vocabulary
from topicsum.errors import CheckpointError, CorpusError, MetricError, ParseError
from topicsum.metrics import EvalReport, evaluate_pairs
from topicsum.model import ModelConfig
from topicsum.pipeline.checkpoint import load_checkpoint
from topicsum.pipeline.decoding import beam_search, detokenize, greedy_decode
from topicsum.pipeline.training import TrainConfig, train, write_loss_log
from topicsum import topics as topiclib

CLASSES_NAME = "classes.jsonl"
INSTANCES_NAME = "instances.jsonl"
CODE_VOCAB_NAME = "code_vocab.json"
SUM_VOCAB_NAME = "sum_vocab.json"
BUILD_MANIFEST_NAME = "build.json"
LOSS_LOG_NAME = "loss_log.csv"


@dataclass
class ExtractStats:
    files: int = 0
    classes: int = 0
    methods: int = 0
    errors: list[str] = field(default_factory=list)


@dataclass
class LdaStats:
    k: int
    documents: int
    vocab_size: int
    iterations: int


@dataclass
class BuildStats:
    instances: int
    methods_total: int
    skipped_no_summary: int
    skipped_short_code: int
    skipped_short_summary: int
    code_vocab_size: int
    sum_vocab_size: int


@dataclass
class TrainStats:
    instances: int
    epochs: int
    final_loss: float
    checkpoint_dir: str
    loss_log: str


def _class_to_record(cls: RawClass) -> dict:
    return {
        "path": cls.path,
        "class": cls.class_name,
        "class_tokens": cls.class_tokens,
        "methods": [
            {
                "name": m.method_name,
                "code_tokens": m.code_tokens,
                "doc_comment": m.doc_comment,
            }
            for m in cls.methods
        ],
    }


def _record_to_class(record: dict) -> RawClass:
    return RawClass(
        path=record["path"],
        class_name=record["class"],
        class_tokens=record["class_tokens"],
        methods=[
            RawMethod(
                method_name=m["name"],
                code_tokens=m["code_tokens"],
                doc_comment=m.get("doc_comment"),
            )
            for m in record["methods"]
        ],
    )


def extract_to_file(source_dir: str | Path, out_path: str | Path) -> ExtractStats:
    """Extract classes from every .java file under source_dir into JSON Lines.

    Files that fail to parse are skipped and reported; extraction order is
    the sorted relative path order, so output is deterministic.
    """
    source_dir = Path(source_dir)
    if not source_dir.is_dir():
        raise FileNotFoundError(f"source directory not found: {source_dir}")
    stats = ExtractStats()
    with open(out_path, "w", encoding="utf-8") as fh:
        for file_path in sorted(source_dir.rglob("*.java")):
            rel = file_path.relative_to(source_dir).as_posix()
            stats.files += 1
            try:
                text = file_path.read_text(encoding="utf-8", errors="replace")
                classes = extract_classes(text, path=rel)
            except (ParseError, OSError) as exc:
                stats.errors.append(f"{rel}: {exc}")
                continue
            for cls in classes:
                stats.classes += 1
                stats.methods += len(cls.methods)
                fh.write(json.dumps(_class_to_record(cls), ensure_ascii=False))
                fh.write("\n")
    return stats


def load_classes(path: str | Path) -> list[RawClass]:
    classes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                classes.append(_record_to_class(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: bad class record ({exc})") from exc
    return classes


def train_lda_files(
    classes_path: str | Path,
    model_path: str | Path,
    config: topiclib.LdaConfig,
    vocab_size: int = 50000,
    min_count: int = 1,
) -> LdaStats:
    """Fit a topic model over the class documents and persist it."""
    classes = load_classes(classes_path)
    if not classes:
        raise CorpusError(f"no classes in {classes_path}")
    bags = [cls.class_tokens for cls in classes]
    vocab = build_vocabulary(bags, max_size=vocab_size, min_count=min_count)
    documents = [topiclib.encode_for_lda(vocab, bag) for bag in bags]
    model = topiclib.fit_gibbs(documents, config, vocab)
    topiclib.save_topic_model(model, model_path)
    return LdaStats(
        k=model.k,
        documents=len(documents),
        vocab_size=len(vocab),
        iterations=config.n_iterations,
    )


def build_files(
    classes_path: str | Path,
    lda_model_path: str | Path,
    out_dir: str | Path,
    n_topics: int = 10,
    max_code_len: int = 100,
    max_sum_len: int = 30,
    code_vocab_size: int = 20000,
    sum_vocab_size: int = 10000,
    min_count: int = 1,
    infer_iterations: int = 50,
    seed: int = 0,
) -> BuildStats:
    """Build the training corpus: instances plus both vocabularies."""
    classes = sorted(load_classes(classes_path), key=lambda c: c.path)
    topic_model = topiclib.load_topic_model(lda_model_path)
    pairs, _ = collect_pairs(classes, max_code_len, max_sum_len)
    if not pairs:
        raise CorpusError("no usable method/summary pairs in the corpus")
    code_vocab = build_vocabulary(
        (code for _, _, code, _ in pairs), max_size=code_vocab_size, min_count=min_count
    )
    sum_vocab = build_vocabulary(
        (summary for _, _, _, summary in pairs),
        max_size=sum_vocab_size,
        min_count=min_count,
    )
    instances, report = build_instances(
        classes,
        topic_model,
        code_vocab,
        sum_vocab,
        n_topics=n_topics,
        l_code=max_code_len,
        l_sum=max_sum_len,
        infer_iterations=infer_iterations,
        seed=seed,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_instance_records(out_dir / INSTANCES_NAME, instances)
    code_vocab.save(out_dir / CODE_VOCAB_NAME)
    sum_vocab.save(out_dir / SUM_VOCAB_NAME)
    manifest = {
        "n_topics": n_topics,
        "topic_count": topic_model.k,
        "max_code_len": max_code_len,
        "max_sum_len": max_sum_len,
    }
    (out_dir / BUILD_MANIFEST_NAME).write_text(json.dumps(manifest), encoding="utf-8")
    return BuildStats(
        instances=report.instances,
        methods_total=report.methods_total,
        skipped_no_summary=report.skipped_no_summary,
        skipped_short_code=report.skipped_short_code,
        skipped_short_summary=report.skipped_short_summary,
        code_vocab_size=len(code_vocab),
        sum_vocab_size=len(sum_vocab),
    )


def _resolve_instances_dir(instances_path: str | Path) -> tuple[Path, Path]:
    path = Path(instances_path)
    if path.is_dir():
        return path, path / INSTANCES_NAME
    return path.parent, path


def train_files(
    instances_path: str | Path,
    checkpoint_dir: str | Path,
    model_overrides: dict | None = None,
    training_overrides: dict | None = None,
) -> TrainStats:
    """Train a model from a built corpus directory and checkpoint it.

    instances_path may be the corpus directory or the instances file; the
    vocabularies and build manifest are found next to it. Vocabulary
    copies are placed in the checkpoint directory so decoding is
    self-contained.
    """
    corpus_dir, instances_file = _resolve_instances_dir(instances_path)
    code_vocab = Vocabulary.load(corpus_dir / CODE_VOCAB_NAME)
    sum_vocab = Vocabulary.load(corpus_dir / SUM_VOCAB_NAME)
    records = read_instance_records(instances_file)
    if not records:
        raise CorpusError(f"no instances in {instances_file}")
    instances = decode_records(records, code_vocab, sum_vocab)

    manifest_path = corpus_dir / BUILD_MANIFEST_NAME
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    else:
        manifest = {}
    n_topics = manifest.get("n_topics", len(instances[0].topic_ids))
    topic_count = manifest.get(
        "topic_count", max(max(i.topic_ids) for i in instances)
    )
    topic_count = max(topic_count, n_topics)
    model_settings = {
        "code_vocab_size": len(code_vocab),
        "sum_vocab_size": len(sum_vocab),
        "topic_count": topic_count,
        "n_topics": n_topics,
        "max_code_len": manifest.get(
            "max_code_len", max(len(i.code_ids) for i in instances)
        ),
        "max_sum_len": manifest.get(
            "max_sum_len", max(len(i.summary_ids) for i in instances)
        ),
    }
    for key, value in (model_overrides or {}).items():
        if value is not None:
            model_settings[key] = value
    model_config = ModelConfig(**model_settings)
    train_config = TrainConfig(
        **{k: v for k, v in (training_overrides or {}).items() if v is not None}
    )

    checkpoint_dir = Path(checkpoint_dir)
    params, loss_log = train(
        model_config, train_config, instances, checkpoint_dir=checkpoint_dir
    )
    code_vocab.save(checkpoint_dir / CODE_VOCAB_NAME)
    sum_vocab.save(checkpoint_dir / SUM_VOCAB_NAME)
    loss_log_path = checkpoint_dir / LOSS_LOG_NAME
    write_loss_log(loss_log_path, loss_log)
    return TrainStats(
        instances=len(instances),
        epochs=train_config.epochs,
        final_loss=loss_log[-1][1],
        checkpoint_dir=str(checkpoint_dir),
        loss_log=str(loss_log_path),
    )


def summarize_source(
    checkpoint_path: str | Path,
    lda_model_path: str | Path,
    source_text: str,
    beam: int = 1,
    infer_iterations: int = 50,
    seed: int = 0,
) -> list[dict]:
    """The online phase: topics for each class, then a summary per method."""
    checkpoint_path = Path(checkpoint_path)
    ckpt_dir = (
        checkpoint_path if checkpoint_path.is_dir() else checkpoint_path.parent
    )
    params, config = load_checkpoint(checkpoint_path)
    try:
        code_vocab = Vocabulary.load(ckpt_dir / CODE_VOCAB_NAME)
        sum_vocab = Vocabulary.load(ckpt_dir / SUM_VOCAB_NAME)
    except FileNotFoundError as exc:
        raise CheckpointError(
            f"checkpoint at {ckpt_dir} is missing its vocabulary files"
        ) from exc
    topic_model = topiclib.load_topic_model(lda_model_path)
    if topic_model.k > config.topic_count:
        raise CheckpointError(
            f"topic model has k={topic_model.k} but the checkpoint expects "
            f"at most {config.topic_count} topics"
        )
    results = []
    for cls in extract_classes(source_text):
        doc = topiclib.encode_for_lda(topic_model.vocab, cls.class_tokens)
        theta = topiclib.infer_theta(
            topic_model, doc, n_iterations=infer_iterations, seed=seed
        )
        take = min(config.n_topics, topic_model.k)
        topic_ids = topiclib.top_n_topics(theta, take)
        topic_ids += [config.null_topic_id] * (config.n_topics - take)
        for method in cls.methods:
            code = method.code_tokens[: config.max_code_len]
            if not code:
                continue
            instance = encode_instance(
                code,
                [],
                topic_ids,
                code_vocab,
                sum_vocab,
                class_name=cls.class_name,
                method_name=method.method_name,
            )
            if beam <= 1:
                ids = greedy_decode(params, config, instance)
            else:
                ids = beam_search(params, config, instance, beam)
            results.append(
                {
                    "class_name": cls.class_name,
                    "method": method.method_name,
                    "summary": detokenize(ids, sum_vocab, instance.oov_map),
                }
            )
    return results


def _read_summary_lines(path: str | Path) -> list[list[str]]:
    summaries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                summary = record["summary"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MetricError(f"{path}:{lineno}: bad summary record ({exc})") from exc
            if isinstance(summary, str):
                summaries.append(summary.split())
            else:
                summaries.append([str(tok) for tok in summary])
    return summaries


def eval_files(hypotheses_path: str | Path, references_path: str | Path) -> EvalReport:
    """Score hypothesis summaries against references, aligned by line order."""
    hyps = _read_summary_lines(hypotheses_path)
    refs = _read_summary_lines(references_path)
    if len(hyps) != len(refs):
        raise MetricError(
            f"{len(hyps)} hypotheses vs {len(refs)} references"
        )
    return evaluate_pairs(hyps, refs)
