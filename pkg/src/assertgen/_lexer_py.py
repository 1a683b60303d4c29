"""Pure-Python lexer core.

Mirrors assertgen._lexer_c exactly; the public wrapper (assertgen.lexer)
selects whichever core is importable.  Keep the two implementations in
lockstep — the test suite asserts token-for-token equivalence.

Core contract
-------------
scan(source) -> (tokens, comments, error_offset)
  tokens:        list of (text, kind_code, byte_offset)
  comments:      list of (text, byte_offset), in source order
  error_offset:  -1 when clean; otherwise the offset of an unterminated
                 string/char literal (tokens cover the prefix before it)

Kind codes are the TokenKind values from assertgen.tokens.
"""

from __future__ import annotations

from .tokens import JAVA_KEYWORDS

_K_IDENTIFIER = 0
_K_KEYWORD = 1
_K_STRING = 2
_K_CHAR = 3
_K_INT = 4
_K_FLOAT = 5
_K_BOOL = 6
_K_NULL = 7
_K_OPERATOR = 8
_K_SEPARATOR = 9
_K_ANNOTATION = 10

_OPS3 = (">>>=", ">>>", "<<=", ">>=")  # longest first; 4-char entry included
_OPS2 = (
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->", "::",
)
_OPS1 = "+-*/%=<>!~&|^?:"
_SEPARATORS = "(){}[];,."

# Kinds after which a '.' cannot start a numeric literal.
_VALUE_END_KINDS = (_K_IDENTIFIER, _K_INT, _K_FLOAT, _K_STRING, _K_CHAR, _K_BOOL, _K_NULL)


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_" or c == "$"


def _is_ident_part(c: str) -> bool:
    return c.isalnum() or c == "_" or c == "$"


def scan(source: str):
    tokens: list[tuple[str, int, int]] = []
    comments: list[tuple[str, int]] = []
    n = len(source)
    i = 0
    # Annotation chain state: 0 none, 1 just after '@', 2 after an annotation
    # name, 3 after a '.' continuing an annotation chain.
    ann = 0
    while i < n:
        c = source[i]
        if c in " \t\r\n\f":
            i += 1
            continue
        if c == "/" and i + 1 < n:
            c2 = source[i + 1]
            if c2 == "/":
                end = source.find("\n", i)
                if end < 0:
                    end = n
                comments.append((source[i:end], i))
                i = end
                continue
            if c2 == "*":
                end = source.find("*/", i + 2)
                if end < 0:
                    comments.append((source[i:], i))
                    i = n
                else:
                    comments.append((source[i : end + 2], i))
                    i = end + 2
                continue
        if c == '"' or c == "'":
            start = i
            i += 1
            closed = False
            while i < n:
                ch = source[i]
                if ch == "\\":
                    i += 2
                    continue
                if ch == c:
                    i += 1
                    closed = True
                    break
                if ch == "\n" or ch == "\r":
                    break
                i += 1
            if not closed:
                return tokens, comments, start
            kind = _K_STRING if c == '"' else _K_CHAR
            tokens.append((source[start:i], kind, start))
            ann = 0
            continue
        if _is_ident_start(c):
            start = i
            i += 1
            while i < n and _is_ident_part(source[i]):
                i += 1
            text = source[start:i]
            if ann == 1 or ann == 3:
                if text in JAVA_KEYWORDS:
                    tokens.append((text, _K_KEYWORD, start))
                    ann = 0
                else:
                    tokens.append((text, _K_ANNOTATION, start))
                    ann = 2
            elif text == "true" or text == "false":
                tokens.append((text, _K_BOOL, start))
                ann = 0
            elif text == "null":
                tokens.append((text, _K_NULL, start))
                ann = 0
            elif text in JAVA_KEYWORDS:
                tokens.append((text, _K_KEYWORD, start))
                ann = 0
            else:
                tokens.append((text, _K_IDENTIFIER, start))
                ann = 0
            continue
        if c.isdigit() or (
            c == "."
            and i + 1 < n
            and source[i + 1].isdigit()
            and not (
                tokens
                and (tokens[-1][1] in _VALUE_END_KINDS or tokens[-1][0] in (")", "]"))
            )
        ):
            start = i
            is_float = c == "."
            if c == "0" and i + 1 < n and source[i + 1] in "xX":
                i += 2
                while i < n and (source[i] in "0123456789abcdefABCDEF_"):
                    i += 1
                if i < n and source[i] == ".":
                    is_float = True
                    i += 1
                    while i < n and (source[i] in "0123456789abcdefABCDEF_"):
                        i += 1
                if i < n and source[i] in "pP":
                    is_float = True
                    i += 1
                    if i < n and source[i] in "+-":
                        i += 1
                    while i < n and (source[i].isdigit() or source[i] == "_"):
                        i += 1
            elif c == "0" and i + 1 < n and source[i + 1] in "bB":
                i += 2
                while i < n and source[i] in "01_":
                    i += 1
            else:
                i += 1
                while i < n and (source[i].isdigit() or source[i] == "_"):
                    i += 1
                if i < n and source[i] == "." and not is_float:
                    # '1..2' is not a literal continuation; only consume a
                    # dot followed by a digit or a bare trailing dot ('1.').
                    if i + 1 >= n or source[i + 1].isdigit() or not _is_ident_start(source[i + 1]):
                        if i + 1 < n and source[i + 1] == ".":
                            pass
                        else:
                            is_float = True
                            i += 1
                            while i < n and (source[i].isdigit() or source[i] == "_"):
                                i += 1
                if i < n and source[i] in "eE":
                    j = i + 1
                    if j < n and source[j] in "+-":
                        j += 1
                    if j < n and source[j].isdigit():
                        is_float = True
                        i = j
                        while i < n and (source[i].isdigit() or source[i] == "_"):
                            i += 1
            if i < n and source[i] in "fFdD":
                is_float = True
                i += 1
            elif i < n and source[i] in "lL":
                i += 1
            text = source[start:i]
            tokens.append((text, _K_FLOAT if is_float else _K_INT, start))
            ann = 0
            continue
        if c == "@":
            tokens.append(("@", _K_ANNOTATION, i))
            i += 1
            ann = 1
            continue
        if c == "." and i + 2 < n and source[i + 1] == "." and source[i + 2] == ".":
            tokens.append(("...", _K_SEPARATOR, i))
            i += 3
            ann = 0
            continue
        matched = False
        for op in _OPS3:
            if source.startswith(op, i):
                tokens.append((op, _K_OPERATOR, i))
                i += len(op)
                matched = True
                break
        if matched:
            ann = 0
            continue
        two = source[i : i + 2]
        if two in _OPS2:
            tokens.append((two, _K_OPERATOR, i))
            i += 2
            ann = 0
            continue
        if c in _SEPARATORS:
            tokens.append((c, _K_SEPARATOR, i))
            if c == "." and ann == 2:
                ann = 3
            else:
                ann = 0
            i += 1
            continue
        # Any remaining single char (including OPS1 and stray symbols) is
        # emitted as an operator so the scan stays total.
        tokens.append((c, _K_OPERATOR, i))
        ann = 0
        i += 1
    return tokens, comments, -1
