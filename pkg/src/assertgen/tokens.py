"""Token model shared by the lexer cores and everything downstream.

Kind codes are plain ints inside the cores (keeps the compiled core free of
Python enum lookups); TokenKind wraps them for the public API.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence


class TokenKind(enum.IntEnum):
    IDENTIFIER = 0
    KEYWORD = 1
    STRING_LIT = 2
    CHAR_LIT = 3
    INT_LIT = 4
    FLOAT_LIT = 5
    BOOL_LIT = 6
    NULL_LIT = 7
    OPERATOR = 8
    SEPARATOR = 9
    ANNOTATION = 10
    # Synthetic stream tokens (<ASSERTION>, <SEP>, segment markers). Never
    # produced by the lexer; used when splicing placeholder tokens into
    # masked streams.
    SPECIAL = 11


@dataclass(frozen=True, slots=True)
class SourceToken:
    """One lexical token: exact lexeme, kind, and byte offset into its origin."""

    text: str
    kind: TokenKind
    offset: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("token text must be non-empty")


PLACEHOLDER = "<ASSERTION>"
SEP = "<SEP>"
TEST_MARKER = "TEST_METHOD:"
FOCAL_MARKER = "FOCAL_METHOD:"

#: Reserved stream tokens that may never become dictionary keys.
RESERVED_TOKENS = frozenset({PLACEHOLDER, SEP, TEST_MARKER, FOCAL_MARKER})

JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while var record yield
    sealed permits""".split()
)

#: JUnit assertion methods recognized by the pipeline (plus the try-catch
#: idiom handled structurally).
ASSERTION_METHODS = frozenset(
    {
        "assertEquals",
        "assertNotEquals",
        "assertTrue",
        "assertFalse",
        "assertNull",
        "assertNotNull",
        "assertThrows",
    }
)


def placeholder_token(offset: int = -1) -> SourceToken:
    return SourceToken(PLACEHOLDER, TokenKind.SPECIAL, offset)


def special_token(text: str) -> SourceToken:
    return SourceToken(text, TokenKind.SPECIAL, -1)


def token_texts(tokens: Iterable[SourceToken | str]) -> list[str]:
    """Project a token stream to its lexeme texts (strings pass through)."""
    return [t if isinstance(t, str) else t.text for t in tokens]


def join_tokens(tokens: Sequence[SourceToken | str]) -> str:
    """Single-space joining; re-lexing the result yields the same texts."""
    return " ".join(token_texts(tokens))
