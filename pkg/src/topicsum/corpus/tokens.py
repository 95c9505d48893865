"""Token normalization for code, topic documents, and summaries.

Everything downstream (vocabularies, topic mining, the neural model)
sees lowercase subtokens produced here, so the rules are centralized:
identifiers split on camelCase/underscore/digit boundaries, punctuation
survives only in code sequences, and numbers survive only in code.
"""

import re

# Token kinds emitted by the lexer.
IDENT = "ident"
NUMBER = "number"
STRING = "string"
CHAR = "char"
PUNCT = "punct"

_ALNUM_RUN = re.compile(r"[A-Za-z]+|[0-9]+")
_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def split_identifier(ident: str) -> list[str]:
    """Split an identifier into lowercase subtokens, preserving order.

    Boundaries are camelCase transitions (including acronym runs such as
    "XMLParser"), underscores or any other non-alphanumeric character,
    and letter/digit transitions. Digit runs are kept as pieces so the
    alphanumeric content of the input is preserved.
    """
    pieces: list[str] = []
    for run in _ALNUM_RUN.findall(ident):
        if run.isdigit():
            pieces.append(run)
        else:
            pieces.extend(part.lower() for part in _CAMEL_BOUNDARY.split(run))
    return pieces


def code_token_pieces(kind: str, text: str) -> list[str]:
    """Normalize one lexer token for the neural code sequence.

    Identifiers and literal contents are subtoken-split; punctuation is
    kept verbatim so structure stays visible to the encoder.
    """
    if kind == IDENT:
        return split_identifier(text)
    if kind in (STRING, CHAR):
        return split_identifier(text)
    if kind == NUMBER:
        return [text.lower()]
    return [text]


def document_words(kind: str, text: str) -> list[str]:
    """Normalize one lexer token for a topic-model document.

    Only alphabetic subtokens of identifiers and string literals count
    as words; punctuation and numbers carry no topical signal.
    """
    if kind not in (IDENT, STRING):
        return []
    return [piece for piece in split_identifier(text) if not piece.isdigit()]


def summary_tokens(sentence: str) -> list[str]:
    """Tokenize a reference summary sentence, dropping punctuation."""
    tokens: list[str] = []
    for word in sentence.split():
        tokens.extend(split_identifier(word))
    return tokens
