"""Brace-counting extraction of classes and commented methods.

This is deliberately not a Java parser. A scanner produces a comment-free
token stream; classes are found by keyword + brace matching, and methods
by the pattern ``name ( params ) [throws ...] {`` at class-body depth.
Nested classes are flattened into the enclosing top-level class, whose
token bag doubles as the topic-model document.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

from topicsum.corpus import tokens as tok
from topicsum.errors import ParseError

_CLASS_KEYWORDS = {"class", "interface", "enum"}
# Words that can never start a member declaration; guards the method heuristic.
_NON_METHOD_NAMES = {
    "if", "for", "while", "switch", "catch", "return", "new", "do",
    "try", "else", "assert", "super", "this", "synchronized", "throw",
}


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


@dataclass
class RawMethod:
    """One extracted method: normalized code tokens plus its doc comment."""

    method_name: str
    code_tokens: list[str]
    doc_comment: str | None = None


@dataclass
class RawClass:
    """One top-level class: its word bag and the methods found inside it."""

    path: str
    class_name: str
    class_tokens: list[str] = field(default_factory=list)
    methods: list[RawMethod] = field(default_factory=list)


def tokenize(source: str) -> tuple[list[Token], dict[int, str]]:
    """Scan source into tokens, returning doc comments keyed by the index
    of the token that follows them."""
    tokens: list[Token] = []
    doc_for_index: dict[int, str] = {}
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
        elif source.startswith("//", i):
            end = source.find("\n", i)
            i = n if end < 0 else end + 1
        elif source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated block comment", i)
            if source.startswith("/**", i):
                doc_for_index[len(tokens)] = source[i + 3 : end]
            i = end + 2
        elif c == '"' or c == "'":
            j = i + 1
            while j < n and source[j] not in (c, "\n"):
                j += 2 if source[j] == "\\" else 1
            kind = tok.STRING if c == '"' else tok.CHAR
            tokens.append(Token(kind, source[i + 1 : min(j, n)], i))
            i = min(j + 1, n)
        elif c.isalpha() or c in "_$":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            tokens.append(Token(tok.IDENT, source[i:j], i))
            i = j
        elif c.isdigit():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_."):
                j += 1
            tokens.append(Token(tok.NUMBER, source[i:j], i))
            i = j
        else:
            tokens.append(Token(tok.PUNCT, c, i))
            i += 1
    return tokens, doc_for_index


def _check_balance(tokens: list[Token]) -> None:
    stack: list[int] = []
    for t in tokens:
        if t.kind != tok.PUNCT:
            continue
        if t.text == "{":
            stack.append(t.offset)
        elif t.text == "}":
            if not stack:
                raise ParseError("unbalanced closing brace", t.offset)
            stack.pop()
    if stack:
        raise ParseError("unclosed brace", stack[-1])


def _is(token: Token, text: str) -> bool:
    return token.kind == tok.PUNCT and token.text == text


def _matching_brace(tokens: list[Token], open_idx: int) -> int:
    depth = 0
    for k in range(open_idx, len(tokens)):
        if _is(tokens[k], "{"):
            depth += 1
        elif _is(tokens[k], "}"):
            depth -= 1
            if depth == 0:
                return k
    raise ParseError("unclosed brace", tokens[open_idx].offset)


def _statement_start(tokens: list[Token], idx: int, floor: int) -> int:
    """Walk back to the start of the member declaration containing idx."""
    k = idx
    while k > floor:
        prev = tokens[k - 1]
        if prev.kind == tok.PUNCT and prev.text in (";", "{", "}"):
            break
        k -= 1
    return k


def _match_method_head(tokens: list[Token], name_idx: int, limit: int):
    """If tokens[name_idx] starts ``name ( ... ) [throws ...] {``, return
    (body_open, body_close); otherwise None."""
    k = name_idx + 1
    if k >= limit or not _is(tokens[k], "("):
        return None
    depth = 0
    while k < limit:
        if _is(tokens[k], "("):
            depth += 1
        elif _is(tokens[k], ")"):
            depth -= 1
            if depth == 0:
                break
        k += 1
    else:
        return None
    k += 1
    if k < limit and tokens[k].kind == tok.IDENT and tokens[k].text == "throws":
        k += 1
        while k < limit and (
            tokens[k].kind == tok.IDENT
            or (tokens[k].kind == tok.PUNCT and tokens[k].text in (",", "."))
        ):
            k += 1
    if k >= limit or not _is(tokens[k], "{"):
        return None
    return k, _matching_brace(tokens, k)


def _extract_methods(
    tokens: list[Token],
    docs: dict[int, str],
    open_idx: int,
    close_idx: int,
) -> list[RawMethod]:
    methods: list[RawMethod] = []
    scopes = ["class"]
    pending_class = False
    k = open_idx + 1
    while k < close_idx:
        t = tokens[k]
        if t.kind == tok.PUNCT:
            if t.text == "{":
                scopes.append("class" if pending_class else "other")
                pending_class = False
            elif t.text == "}":
                scopes.pop()
            elif t.text == ";":
                pending_class = False
        elif t.kind == tok.IDENT:
            if t.text in _CLASS_KEYWORDS and not (k > 0 and _is(tokens[k - 1], ".")):
                pending_class = True
            elif (
                scopes[-1] == "class"
                and not pending_class
                and t.text not in _NON_METHOD_NAMES
                and k > open_idx
                and tokens[k - 1].text not in ("@", ".", "new")
            ):
                head = _match_method_head(tokens, k, close_idx + 1)
                if head is not None:
                    body_open, body_close = head
                    start = _statement_start(tokens, k, open_idx + 1)
                    pieces: list[str] = []
                    for m in tokens[start : body_close + 1]:
                        pieces.extend(tok.code_token_pieces(m.kind, m.text))
                    methods.append(
                        RawMethod(
                            method_name=t.text,
                            code_tokens=pieces,
                            doc_comment=docs.get(start),
                        )
                    )
                    k = body_close
        k += 1
    return methods


def extract_classes(source_text: str, path: str = "") -> list[RawClass]:
    """Extract every top-level class from one source file.

    Returns an empty list for sources without classes. Raises ParseError
    (with byte offset) for structurally broken input such as unbalanced
    braces or an unterminated block comment.
    """
    tokens, docs = tokenize(source_text)
    _check_balance(tokens)
    classes: list[RawClass] = []
    depth = 0
    k = 0
    while k < len(tokens):
        t = tokens[k]
        if _is(t, "{"):
            depth += 1
        elif _is(t, "}"):
            depth -= 1
        elif (
            depth == 0
            and t.kind == tok.IDENT
            and t.text in _CLASS_KEYWORDS
            and not (k > 0 and _is(tokens[k - 1], "."))
        ):
            name_idx = k + 1
            if name_idx >= len(tokens) or tokens[name_idx].kind != tok.IDENT:
                k += 1
                continue
            open_idx = name_idx
            while open_idx < len(tokens) and not _is(tokens[open_idx], "{"):
                open_idx += 1
            if open_idx == len(tokens):
                k += 1
                continue
            close_idx = _matching_brace(tokens, open_idx)
            header_start = _statement_start(tokens, k, 0)
            words: list[str] = []
            for m in tokens[header_start : close_idx + 1]:
                words.extend(tok.document_words(m.kind, m.text))
            classes.append(
                RawClass(
                    path=path,
                    class_name=tokens[name_idx].text,
                    class_tokens=words,
                    methods=_extract_methods(tokens, docs, open_idx, close_idx),
                )
            )
            k = close_idx
        k += 1
    return classes
