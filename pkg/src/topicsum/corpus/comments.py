"""Reference-summary extraction from doc comments.

The reference for a method is the first sentence of its doc comment,
lowercased, with markup stripped. Comments whose first sentence carries
fewer than two alphabetic words yield no reference.
"""

import re

_LINE_STAR = re.compile(r"(?m)^\s*\*+ ?")
_INLINE_TAG = re.compile(r"\{@\w+\s*([^{}]*)\}")
_HTML_TAG = re.compile(r"</?[A-Za-z][^>]*>")
_BLOCK_TAG = re.compile(r"(?m)^\s*@\w.*$")
_SENTENCE_END = re.compile(r"\.(?=\s)")
_WS = re.compile(r"\s+")


def extract_summary(doc_comment: str) -> str | None:
    """Return the first sentence of a doc comment, or None if too thin."""
    body = doc_comment.strip()
    if body.startswith("/**"):
        body = body[3:]
    elif body.startswith("/*"):
        body = body[2:]
    if body.endswith("*/"):
        body = body[:-2]
    body = _LINE_STAR.sub("", body)
    # Drop everything from the first block tag (@param, @return, ...) on.
    tag = _BLOCK_TAG.search(body)
    if tag is not None:
        body = body[: tag.start()]
    body = _INLINE_TAG.sub(r"\1", body)
    body = _HTML_TAG.sub(" ", body)
    end = _SENTENCE_END.search(body)
    if end is not None:
        body = body[: end.start()]
    sentence = _WS.sub(" ", body).strip().rstrip(".").strip().lower()
    alpha_words = [w for w in sentence.split() if any(ch.isalpha() for ch in w)]
    if len(alpha_words) < 2:
        return None
    return sentence
