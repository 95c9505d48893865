"""Corpus construction: lexing, comment handling, vocabularies, instances."""

from topicsum.corpus.comments import extract_summary
from topicsum.corpus.instances import (
    TrainingInstance,
    build_instances,
    encode_instance,
    instance_to_record,
    read_instance_records,
    write_instance_records,
)
from topicsum.corpus.lexer import RawClass, RawMethod, extract_classes
from topicsum.corpus.tokens import split_identifier, summary_tokens
from topicsum.corpus.vocab import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    UNK_ID,
    Vocabulary,
    build_vocabulary,
)

__all__ = [
    "BOS_ID",
    "EOS_ID",
    "PAD_ID",
    "UNK_ID",
    "RawClass",
    "RawMethod",
    "TrainingInstance",
    "Vocabulary",
    "build_instances",
    "build_vocabulary",
    "encode_instance",
    "extract_classes",
    "extract_summary",
    "instance_to_record",
    "read_instance_records",
    "split_identifier",
    "summary_tokens",
    "write_instance_records",
]
