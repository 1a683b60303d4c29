"""Java lexing: public API over the compiled or pure-Python core.

Core selection happens once at import time: the Cython extension is used
when it was built, unless ASSERTGEN_PURE_PYTHON=1 forces the fallback.
Both cores implement the identical scan() contract (see _lexer_py).
"""

from __future__ import annotations

import os

from .errors import UnterminatedLiteral
from .tokens import SourceToken, TokenKind

from . import _lexer_py

if os.environ.get("ASSERTGEN_PURE_PYTHON") == "1":
    _core = _lexer_py
    ACTIVE_CORE = "python"
else:
    try:
        from . import _lexer_c as _core  # type: ignore[attr-defined]

        ACTIVE_CORE = "compiled"
    except ImportError:
        _core = _lexer_py
        ACTIVE_CORE = "python"


def tokenize(source: str) -> list[SourceToken]:
    """Lex Java source text into tokens; comments are dropped.

    The input need not be a complete compilation unit.  String and char
    literals are single tokens including their quotes.

    Raises UnterminatedLiteral when a string/char literal never closes.
    """
    raw, _comments, err = _core.scan(source)
    if err >= 0:
        raise UnterminatedLiteral(err)
    return [SourceToken(text, TokenKind(kind), offset) for text, kind, offset in raw]


def tokenize_with_comments(source: str) -> tuple[list[SourceToken], list[tuple[str, int]]]:
    """Like tokenize() but also returns (comment_text, offset) pairs.

    Used by the structural parser to re-attach Javadoc to declarations.
    """
    raw, comments, err = _core.scan(source)
    if err >= 0:
        raise UnterminatedLiteral(err)
    tokens = [SourceToken(text, TokenKind(kind), offset) for text, kind, offset in raw]
    return tokens, comments


def try_tokenize(source: str) -> list[SourceToken] | None:
    """tokenize() returning None instead of raising; for syntax checks."""
    raw, _comments, err = _core.scan(source)
    if err >= 0:
        return None
    return [SourceToken(text, TokenKind(kind), offset) for text, kind, offset in raw]
