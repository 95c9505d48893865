"""Bidirectional token/ID maps with fixed reserved entries."""

import json
from collections import Counter
from pathlib import Path
from typing import Iterable

from topicsum.errors import ConfigError, CorpusError

PAD_ID = 0
UNK_ID = 1
BOS_ID = 2
EOS_ID = 3
RESERVED_TOKENS = ("<pad>", "<unk>", "<s>", "</s>")


class Vocabulary:
    """Token/ID bijection over non-reserved tokens; unknowns map to UNK."""

    def __init__(self, tokens: Iterable[str] = ()):
        self._id_to_token: list[str] = list(RESERVED_TOKENS)
        self._token_to_id: dict[str, int] = {
            t: i for i, t in enumerate(RESERVED_TOKENS)
        }
        for token in tokens:
            if token in self._token_to_id:
                raise CorpusError(f"duplicate vocabulary token: {token!r}")
            self._token_to_id[token] = len(self._id_to_token)
            self._id_to_token.append(token)

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def id(self, token: str) -> int:
        return self._token_to_id.get(token, UNK_ID)

    def token(self, token_id: int) -> str:
        return self._id_to_token[token_id]

    @property
    def tokens(self) -> list[str]:
        """All tokens in ID order, reserved entries first."""
        return list(self._id_to_token)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.id(t) for t in tokens]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self._id_to_token, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        try:
            entries = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorpusError(f"vocabulary file {path} is not valid JSON: {exc}") from exc
        if not isinstance(entries, list) or entries[:4] != list(RESERVED_TOKENS):
            raise CorpusError(f"vocabulary file {path} lacks reserved tokens")
        return cls(entries[4:])


def build_vocabulary(
    corpus: Iterable[Iterable[str]], max_size: int, min_count: int = 1
) -> Vocabulary:
    """Build a frequency-ranked vocabulary from an iterable of token lists.

    Tokens are ranked by count (descending) then lexicographically, and the
    result is truncated to max_size entries including the four reserved IDs.
    """
    if max_size <= 4:
        raise ConfigError(f"max_size must exceed 4, got {max_size}")
    counts: Counter[str] = Counter()
    for tokens in corpus:
        counts.update(tokens)
    for reserved in RESERVED_TOKENS:
        counts.pop(reserved, None)
    if not counts:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = [t for t, c in ranked if c >= min_count][: max_size - 4]
    return Vocabulary(kept)
