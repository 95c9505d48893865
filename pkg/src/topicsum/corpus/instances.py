"""Training-instance assembly: topic lookup, ID encoding, per-instance
extended vocabularies for the copy mechanism, and JSON Lines persistence.

Extended IDs are dense and start at the summary vocabulary size. A source
token gets an extended ID when the summary vocabulary cannot generate it
or the code vocabulary cannot represent it; copy probability mass for
such tokens lands on the extended slot, all other source tokens route
their copy mass onto their summary-vocabulary slot.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from topicsum.corpus.comments import extract_summary
from topicsum.corpus.lexer import RawClass
from topicsum.corpus.tokens import summary_tokens
from topicsum.corpus.vocab import BOS_ID, EOS_ID, Vocabulary
from topicsum.errors import CorpusError

MIN_CODE_TOKENS = 3
MIN_SUMMARY_TOKENS = 2


@dataclass
class TrainingInstance:
    """One method's encoded code, its class topics, and its reference."""

    code_ids: list[int]
    topic_ids: list[int]
    summary_ids: list[int]
    source_tokens: list[str]
    summary_tokens: list[str]
    oov_map: dict[str, int]
    copy_slots: list[int]
    class_name: str = ""
    method_name: str = ""

    @property
    def n_oov(self) -> int:
        return len(self.oov_map)


@dataclass
class BuildReport:
    """Skip accounting for one instance-construction run."""

    methods_total: int = 0
    skipped_no_summary: int = 0
    skipped_short_code: int = 0
    skipped_short_summary: int = 0
    instances: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def make_oov_map(
    source_tokens: Sequence[str], code_vocab: Vocabulary, sum_vocab: Vocabulary
) -> dict[str, int]:
    """Assign dense extended IDs, in first-occurrence order, to source
    tokens that need one."""
    oov: dict[str, int] = {}
    base = len(sum_vocab)
    for token in source_tokens:
        if token in oov:
            continue
        if token not in sum_vocab or token not in code_vocab:
            oov[token] = base + len(oov)
    return oov


def make_copy_slots(
    source_tokens: Sequence[str], sum_vocab: Vocabulary, oov_map: dict[str, int]
) -> list[int]:
    """Slot in the extended distribution that each source position copies to."""
    return [
        oov_map[t] if t in oov_map else sum_vocab.id(t) for t in source_tokens
    ]


def encode_instance(
    code_tokens: Sequence[str],
    summary: Sequence[str],
    topic_ids: Sequence[int],
    code_vocab: Vocabulary,
    sum_vocab: Vocabulary,
    class_name: str = "",
    method_name: str = "",
) -> TrainingInstance:
    """Encode one (code, topics, summary) triple into model-ready IDs."""
    source = list(code_tokens)
    oov_map = make_oov_map(source, code_vocab, sum_vocab)
    summary_ids = [BOS_ID]
    for token in summary:
        if token in sum_vocab:
            summary_ids.append(sum_vocab.id(token))
        elif token in oov_map:
            summary_ids.append(oov_map[token])
        else:
            summary_ids.append(sum_vocab.id(token))
    summary_ids.append(EOS_ID)
    return TrainingInstance(
        code_ids=code_vocab.encode(source),
        topic_ids=list(topic_ids),
        summary_ids=summary_ids,
        source_tokens=source,
        summary_tokens=list(summary),
        oov_map=oov_map,
        copy_slots=make_copy_slots(source, sum_vocab, oov_map),
        class_name=class_name,
        method_name=method_name,
    )


def collect_pairs(
    classes: Iterable[RawClass], l_code: int, l_sum: int
) -> tuple[list[tuple[RawClass, str, list[str], list[str]]], BuildReport]:
    """Pair every usable method with its truncated code and summary tokens.

    Methods without a usable doc comment, with fewer than MIN_CODE_TOKENS
    code tokens, or with fewer than MIN_SUMMARY_TOKENS summary tokens are
    skipped and counted.
    """
    report = BuildReport()
    pairs = []
    for cls in classes:
        for method in cls.methods:
            report.methods_total += 1
            sentence = (
                extract_summary(method.doc_comment)
                if method.doc_comment is not None
                else None
            )
            if sentence is None:
                report.skipped_no_summary += 1
                continue
            if len(method.code_tokens) < MIN_CODE_TOKENS:
                report.skipped_short_code += 1
                continue
            summary = summary_tokens(sentence)[: max(l_sum - 2, 0)]
            if len(summary) < MIN_SUMMARY_TOKENS:
                report.skipped_short_summary += 1
                continue
            code = method.code_tokens[:l_code]
            pairs.append((cls, method.method_name, code, summary))
    report.instances = len(pairs)
    return pairs, report


def build_instances(
    classes: Sequence[RawClass],
    topic_model,
    code_vocab: Vocabulary,
    sum_vocab: Vocabulary,
    n_topics: int,
    l_code: int,
    l_sum: int,
    infer_iterations: int = 50,
    seed: int = 0,
) -> tuple[list[TrainingInstance], BuildReport]:
    """Build training instances for every usable method.

    Topic IDs come from the method's class: its token bag is run through
    the fitted topic model and the top n_topics topics (by weight, padded
    with the null topic when the model has fewer) are attached to each of
    its methods. Classes are processed in sorted-by-path order so output
    is deterministic regardless of how callers gathered them.
    """
    from topicsum import topics as topiclib

    if n_topics > topic_model.k:
        pad = [topic_model.k] * (n_topics - topic_model.k)
        take = topic_model.k
    else:
        pad = []
        take = n_topics
    ordered = sorted(classes, key=lambda c: c.path)
    pairs, report = collect_pairs(ordered, l_code, l_sum)
    topic_cache: dict[int, list[int]] = {}
    instances = []
    for cls, method_name, code, summary in pairs:
        key = id(cls)
        if key not in topic_cache:
            theta = topiclib.infer_theta(
                topic_model,
                topiclib.encode_for_lda(topic_model.vocab, cls.class_tokens),
                n_iterations=infer_iterations,
                seed=seed,
            )
            topic_cache[key] = topiclib.top_n_topics(theta, take) + pad
        instances.append(
            encode_instance(
                code,
                summary,
                topic_cache[key],
                code_vocab,
                sum_vocab,
                class_name=cls.class_name,
                method_name=method_name,
            )
        )
    return instances, report


def instance_to_record(instance: TrainingInstance) -> dict:
    """The JSON Lines form of an instance (token strings, not IDs)."""
    return {
        "code": instance.source_tokens,
        "topics": instance.topic_ids,
        "summary": instance.summary_tokens,
        "class": instance.class_name,
        "method": instance.method_name,
    }


def write_instance_records(path: str | Path, instances: Iterable[TrainingInstance]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for instance in instances:
            fh.write(json.dumps(instance_to_record(instance), ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def read_instance_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: bad JSON ({exc})") from exc
            for key in ("code", "topics", "summary"):
                if key not in record:
                    raise CorpusError(f"{path}:{lineno}: missing field {key!r}")
            records.append(record)
    return records


def decode_records(
    records: Iterable[dict], code_vocab: Vocabulary, sum_vocab: Vocabulary
) -> list[TrainingInstance]:
    """Re-encode stored records against the given vocabularies."""
    return [
        encode_instance(
            r["code"],
            r["summary"],
            r["topics"],
            code_vocab,
            sum_vocab,
            class_name=r.get("class", ""),
            method_name=r.get("method", ""),
        )
        for r in records
    ]
