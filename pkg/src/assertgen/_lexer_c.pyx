# cython: language_level=3
"""Compiled lexer core (hot kernel).

Token-for-token identical to assertgen._lexer_py.scan; see that module for
the core contract.  Any behavioural change must land in both cores — the
test suite enforces equivalence.
"""

from .tokens import JAVA_KEYWORDS

cdef int _K_IDENTIFIER = 0
cdef int _K_KEYWORD = 1
cdef int _K_STRING = 2
cdef int _K_CHAR = 3
cdef int _K_INT = 4
cdef int _K_FLOAT = 5
cdef int _K_BOOL = 6
cdef int _K_NULL = 7
cdef int _K_OPERATOR = 8
cdef int _K_SEPARATOR = 9
cdef int _K_ANNOTATION = 10

cdef tuple _OPS3 = (">>>=", ">>>", "<<=", ">>=")
cdef frozenset _OPS2 = frozenset((
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->", "::",
))
cdef str _SEPARATORS = "(){}[];,."
cdef frozenset _KEYWORDS = frozenset(JAVA_KEYWORDS)

cdef inline bint _is_ident_start(Py_UCS4 c):
    return c == u'_' or c == u'$' or c.isalpha()

cdef inline bint _is_ident_part(Py_UCS4 c):
    return c == u'_' or c == u'$' or c.isalnum()

cdef inline bint _is_digit(Py_UCS4 c):
    return u'0' <= c <= u'9'

cdef inline bint _is_hex_digit(Py_UCS4 c):
    return (u'0' <= c <= u'9') or (u'a' <= c <= u'f') or (u'A' <= c <= u'F') or c == u'_'


def scan(str source):
    cdef list tokens = []
    cdef list comments = []
    cdef Py_ssize_t n = len(source)
    cdef Py_ssize_t i = 0, start = 0, end = 0, j = 0
    cdef int ann = 0
    cdef int kind
    cdef bint closed, is_float, matched
    cdef Py_UCS4 c, c2, ch
    cdef str text, two, op

    while i < n:
        c = source[i]
        if c == u' ' or c == u'\t' or c == u'\r' or c == u'\n' or c == u'\f':
            i += 1
            continue
        if c == u'/' and i + 1 < n:
            c2 = source[i + 1]
            if c2 == u'/':
                end = source.find("\n", i)
                if end < 0:
                    end = n
                comments.append((source[i:end], i))
                i = end
                continue
            if c2 == u'*':
                end = source.find("*/", i + 2)
                if end < 0:
                    comments.append((source[i:], i))
                    i = n
                else:
                    comments.append((source[i:end + 2], i))
                    i = end + 2
                continue
        if c == u'"' or c == u"'":
            start = i
            i += 1
            closed = False
            while i < n:
                ch = source[i]
                if ch == u'\\':
                    i += 2
                    continue
                if ch == c:
                    i += 1
                    closed = True
                    break
                if ch == u'\n' or ch == u'\r':
                    break
                i += 1
            if not closed:
                return tokens, comments, start
            kind = _K_STRING if c == u'"' else _K_CHAR
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
                if text in _KEYWORDS:
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
            elif text in _KEYWORDS:
                tokens.append((text, _K_KEYWORD, start))
                ann = 0
            else:
                tokens.append((text, _K_IDENTIFIER, start))
                ann = 0
            continue
        if _is_digit(c) or (
            c == u'.'
            and i + 1 < n
            and _is_digit(source[i + 1])
            and not (
                len(tokens) > 0
                and (
                    (<int> (<tuple> tokens[len(tokens) - 1])[1]) in (
                        _K_IDENTIFIER, _K_INT, _K_FLOAT, _K_STRING, _K_CHAR, _K_BOOL, _K_NULL
                    )
                    or (<str> (<tuple> tokens[len(tokens) - 1])[0]) in (")", "]")
                )
            )
        ):
            start = i
            is_float = c == u'.'
            if c == u'0' and i + 1 < n and (source[i + 1] == u'x' or source[i + 1] == u'X'):
                i += 2
                while i < n and _is_hex_digit(source[i]):
                    i += 1
                if i < n and source[i] == u'.':
                    is_float = True
                    i += 1
                    while i < n and _is_hex_digit(source[i]):
                        i += 1
                if i < n and (source[i] == u'p' or source[i] == u'P'):
                    is_float = True
                    i += 1
                    if i < n and (source[i] == u'+' or source[i] == u'-'):
                        i += 1
                    while i < n and (_is_digit(source[i]) or source[i] == u'_'):
                        i += 1
            elif c == u'0' and i + 1 < n and (source[i + 1] == u'b' or source[i + 1] == u'B'):
                i += 2
                while i < n and (source[i] == u'0' or source[i] == u'1' or source[i] == u'_'):
                    i += 1
            else:
                i += 1
                while i < n and (_is_digit(source[i]) or source[i] == u'_'):
                    i += 1
                if i < n and source[i] == u'.' and not is_float:
                    if i + 1 >= n or _is_digit(source[i + 1]) or not _is_ident_start(source[i + 1]):
                        if i + 1 < n and source[i + 1] == u'.':
                            pass
                        else:
                            is_float = True
                            i += 1
                            while i < n and (_is_digit(source[i]) or source[i] == u'_'):
                                i += 1
                if i < n and (source[i] == u'e' or source[i] == u'E'):
                    j = i + 1
                    if j < n and (source[j] == u'+' or source[j] == u'-'):
                        j += 1
                    if j < n and _is_digit(source[j]):
                        is_float = True
                        i = j
                        while i < n and (_is_digit(source[i]) or source[i] == u'_'):
                            i += 1
            if i < n and (source[i] == u'f' or source[i] == u'F' or source[i] == u'd' or source[i] == u'D'):
                is_float = True
                i += 1
            elif i < n and (source[i] == u'l' or source[i] == u'L'):
                i += 1
            text = source[start:i]
            tokens.append((text, _K_FLOAT if is_float else _K_INT, start))
            ann = 0
            continue
        if c == u'@':
            tokens.append(("@", _K_ANNOTATION, i))
            i += 1
            ann = 1
            continue
        if c == u'.' and i + 2 < n and source[i + 1] == u'.' and source[i + 2] == u'.':
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
        two = source[i:i + 2]
        if two in _OPS2:
            tokens.append((two, _K_OPERATOR, i))
            i += 2
            ann = 0
            continue
        if _SEPARATORS.find(c) >= 0:
            text = source[i:i + 1]
            tokens.append((text, _K_SEPARATOR, i))
            if c == u'.' and ann == 2:
                ann = 3
            else:
                ann = 0
            i += 1
            continue
        text = source[i:i + 1]
        tokens.append((text, _K_OPERATOR, i))
        ann = 0
        i += 1
    return tokens, comments, -1
