"""Assertion-site detection, arity filtering, masking, and syntax checking.

The eight supported assertion forms are the seven JUnit assertion methods
(bare or qualified via Assert/Assertions) plus the try-catch-with-fail
idiom.  Sites are found at statement positions anywhere in a method body;
statements nested inside an already-claimed site (e.g. lambdas passed to
assertThrows, or the body of a try-catch-fail) are not separate sites.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ParseFailure, SpanOutOfRange
from .lexer import try_tokenize
from .parser import MethodUnit, _match_delimiters
from .tokens import (
    ASSERTION_METHODS,
    SourceToken,
    TokenKind,
    placeholder_token,
)


class AssertionKind(enum.Enum):
    ASSERT_EQUALS = "assertEquals"
    ASSERT_NOT_EQUALS = "assertNotEquals"
    ASSERT_TRUE = "assertTrue"
    ASSERT_FALSE = "assertFalse"
    ASSERT_NULL = "assertNull"
    ASSERT_NOT_NULL = "assertNotNull"
    ASSERT_THROWS = "assertThrows"
    TRY_CATCH_FAIL = "tryCatchFail"


_KIND_BY_METHOD = {k.value: k for k in AssertionKind if k is not AssertionKind.TRY_CATCH_FAIL}

#: Table of accepted parameter counts; message-bearing overloads exceed these.
EXPECTED_ARITY = {
    AssertionKind.ASSERT_EQUALS: 2,
    AssertionKind.ASSERT_NOT_EQUALS: 2,
    AssertionKind.ASSERT_THROWS: 2,
    AssertionKind.ASSERT_TRUE: 1,
    AssertionKind.ASSERT_FALSE: 1,
    AssertionKind.ASSERT_NULL: 1,
    AssertionKind.ASSERT_NOT_NULL: 1,
}

_QUALIFIERS = ("Assert", "Assertions")

_CONTROL_KEYWORDS = frozenset(
    {"if", "else", "for", "while", "do", "switch", "synchronized", "case", "default"}
)


@dataclass(frozen=True)
class AssertionSite:
    """One assertion occurrence; token_span indexes method.body_tokens (half-open)."""

    kind: AssertionKind
    token_span: tuple[int, int]
    arg_count: int
    has_message_param: bool


def _count_top_level_args(tokens: list[SourceToken], open_paren: int, close_paren: int) -> int:
    if close_paren == open_paren + 1:
        return 0
    count = 1
    depth = 0
    for i in range(open_paren + 1, close_paren):
        t = tokens[i].text
        if t in ("(", "[", "{"):
            depth += 1
        elif t in (")", "]", "}"):
            depth -= 1
        elif t == "," and depth == 0:
            count += 1
    return count


class _SiteScanner:
    def __init__(self, body: list[SourceToken], match: dict[int, int]):
        self.body = body
        self.match = match
        self.sites: list[AssertionSite] = []

    def scan(self, start: int, end: int) -> None:
        i = start
        while i < end:
            t = self.body[i].text
            if t == ";":
                i += 1
                continue
            if t == "{":
                self.scan(i + 1, self.match[i])
                i = self.match[i] + 1
                continue
            if t == "}":
                i += 1
                continue
            i = self._statement(i, end)

    def _statement(self, i: int, end: int) -> int:
        """Handle one statement starting at i; return the next position."""
        body = self.body
        t = body[i].text
        if t == "try":
            return self._try_statement(i, end)
        site_end = self._assertion_call(i, end)
        if site_end is not None:
            return site_end
        if body[i].kind == TokenKind.KEYWORD and t in _CONTROL_KEYWORDS:
            # Step over the condition parens; the following block (or
            # statement) is scanned at the surrounding level.
            if i + 1 < end and body[i + 1].text == "(":
                return self.match[i + 1] + 1
            return i + 1
        if t == "@":
            return i + 1
        # Plain expression/declaration statement: skip it wholesale, jumping
        # balanced groups (lambda bodies travel with their statement).
        j = i
        while j < end:
            tj = body[j].text
            if tj in ("(", "[", "{"):
                j = self.match[j] + 1
                continue
            if tj == ";":
                return j + 1
            j += 1
        return end

    def _assertion_call(self, i: int, end: int) -> int | None:
        body = self.body
        head = None
        if (
            body[i].text in ASSERTION_METHODS
            and i + 1 < end
            and body[i + 1].text == "("
        ):
            head = i
        elif (
            body[i].text in _QUALIFIERS
            and i + 3 < end
            and body[i + 1].text == "."
            and body[i + 2].text in ASSERTION_METHODS
            and body[i + 3].text == "("
        ):
            head = i + 2
        if head is None:
            return None
        open_paren = head + 1
        close = self.match[open_paren]
        if close + 1 >= len(body) or body[close + 1].text != ";":
            return None
        kind = _KIND_BY_METHOD[body[head].text]
        arg_count = _count_top_level_args(body, open_paren, close)
        self.sites.append(
            AssertionSite(
                kind=kind,
                token_span=(head, close + 2),
                arg_count=arg_count,
                has_message_param=(arg_count == EXPECTED_ARITY[kind] + 1),
            )
        )
        return close + 2

    def _try_statement(self, i: int, end: int) -> int:
        body = self.body
        j = i + 1
        if j < end and body[j].text == "(":  # try-with-resources
            j = self.match[j] + 1
        if j >= end or body[j].text != "{":
            return i + 1
        try_open = j
        try_close = self.match[try_open]
        j = try_close + 1
        n_catches = 0
        last_close = try_close
        while j + 1 < end and body[j].text == "catch" and body[j + 1].text == "(":
            params_close = self.match[j + 1]
            if params_close + 1 >= end or body[params_close + 1].text != "{":
                break
            last_close = self.match[params_close + 1]
            n_catches += 1
            j = last_close + 1
        if j < end and body[j].text == "finally" and j + 1 < end and body[j + 1].text == "{":
            last_close = self.match[j + 1]
            j = last_close + 1
        if n_catches >= 1 and self._try_block_has_fail(try_open + 1, try_close):
            self.sites.append(
                AssertionSite(
                    kind=AssertionKind.TRY_CATCH_FAIL,
                    token_span=(i, last_close + 1),
                    arg_count=0,
                    has_message_param=False,
                )
            )
            return last_close + 1
        # Ordinary try: its blocks are scanned for sites.
        self.scan(try_open + 1, try_close)
        k = try_close + 1
        while k < j:
            if body[k].text == "{":
                self.scan(k + 1, self.match[k])
                k = self.match[k] + 1
            else:
                k += 1
        return j

    def _try_block_has_fail(self, start: int, end: int) -> bool:
        for k in range(start, end - 1):
            if self.body[k].text == "fail" and self.body[k + 1].text == "(":
                return True
        return False


def find_assertions(method: MethodUnit) -> list[AssertionSite]:
    """All assertion sites of a method, in source order, non-overlapping."""
    if method.body_open_index < 0:
        return []
    body = list(method.body_tokens)
    match = _match_delimiters(body)
    scanner = _SiteScanner(body, match)
    close = match[method.body_open_index]
    scanner.scan(method.body_open_index + 1, close)
    return scanner.sites


def is_acceptable_assertion(site: AssertionSite) -> bool:
    """True iff the site matches the accepted parameter count for its kind.

    Message-bearing overloads (one extra parameter) are rejected; the
    try-catch idiom is always acceptable.
    """
    if site.kind is AssertionKind.TRY_CATCH_FAIL:
        return True
    return site.arg_count == EXPECTED_ARITY[site.kind]


def mask_assertion(
    method: MethodUnit, site: AssertionSite
) -> tuple[list[SourceToken], list[SourceToken]]:
    """Replace the site's span with the placeholder; return (masked, truth)."""
    start, end = site.token_span
    body = list(method.body_tokens)
    if not (0 <= start < end <= len(body)):
        raise SpanOutOfRange(f"site span {site.token_span} exceeds method of {len(body)} tokens")
    masked = body[:start] + [placeholder_token(body[start].offset)] + body[end:]
    truth = body[start:end]
    return masked, truth


# --- statement validator -------------------------------------------------

_PRIMITIVE_TYPES = frozenset(
    {"int", "long", "short", "byte", "char", "boolean", "float", "double", "void"}
)
_PREFIX_OPS = frozenset({"+", "-", "!", "~", "++", "--"})
_LITERAL_KINDS = (
    TokenKind.STRING_LIT,
    TokenKind.CHAR_LIT,
    TokenKind.INT_LIT,
    TokenKind.FLOAT_LIT,
    TokenKind.BOOL_LIT,
    TokenKind.NULL_LIT,
)
_BINARY_BP = {
    "=": 1, "+=": 1, "-=": 1, "*=": 1, "/=": 1, "%=": 1, "&=": 1, "|=": 1,
    "^=": 1, "<<=": 1, ">>=": 1, ">>>=": 1,
    "||": 3, "&&": 4, "|": 5, "^": 6, "&": 7,
    "==": 8, "!=": 8,
    "<": 9, ">": 9, "<=": 9, ">=": 9, "instanceof": 9,
    "<<": 10, ">>": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
}


class _ExprParser:
    """Tolerant Pratt parser: validates expression structure, no evaluation."""

    def __init__(self, tokens: list[SourceToken], match: dict[int, int]):
        self.toks = tokens
        self.match = match
        self.pos = 0

    def peek(self) -> SourceToken | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _fail(self) -> bool:
        raise _Invalid()

    def parse(self, min_bp: int = 0) -> None:
        self._primary()
        while True:
            tok = self.peek()
            if tok is None:
                return
            t = tok.text
            if t == "?" and min_bp <= 2:
                self.pos += 1
                self.parse(0)
                if self.peek() is None or self.peek().text != ":":
                    self._fail()
                self.pos += 1
                self.parse(2)
                continue
            if t == "->":
                # lambda with a bare-identifier parameter already consumed
                self.pos += 1
                self._lambda_body()
                continue
            bp = _BINARY_BP.get(t)
            if bp is None or bp < min_bp:
                return
            self.pos += 1
            if t == "instanceof":
                self._type_ref()
                tok = self.peek()
                if tok is not None and tok.kind == TokenKind.IDENTIFIER:
                    self.pos += 1  # pattern variable
                continue
            self.parse(bp + 1)

    def _primary(self) -> None:
        tok = self.peek()
        if tok is None:
            self._fail()
        t = tok.text
        if t in _PREFIX_OPS:
            self.pos += 1
            self.parse(13)
            return
        if t == "(":
            close = self.match[self.pos]
            if close + 1 < len(self.toks) and self.toks[close + 1].text == "->":
                self.pos = close + 2
                self._lambda_body()
                return
            self.pos += 1
            self.parse(0)
            if self.peek() is None or self.peek().text != ")":
                self._fail()
            self.pos += 1
            nxt = self.peek()
            if nxt is not None and (
                nxt.kind in _LITERAL_KINDS
                or nxt.kind == TokenKind.IDENTIFIER
                or nxt.text in ("(", "new")
                or nxt.text in _PREFIX_OPS
            ):
                # parenthesized type applied as a cast
                self.parse(13)
                return
            self._postfix()
            return
        if t == "new":
            self.pos += 1
            self._new_expr()
            self._postfix()
            return
        if (
            tok.kind in _LITERAL_KINDS
            or tok.kind == TokenKind.IDENTIFIER
            or t in _PRIMITIVE_TYPES
            or t in ("this", "super")
        ):
            self.pos += 1
            self._postfix()
            return
        self._fail()

    def _postfix(self) -> None:
        while True:
            tok = self.peek()
            if tok is None:
                return
            t = tok.text
            if t == ".":
                self.pos += 1
                nxt = self.peek()
                if nxt is None:
                    self._fail()
                if nxt.kind == TokenKind.IDENTIFIER or nxt.text in ("class", "this", "new"):
                    self.pos += 1
                    continue
                self._fail()
            elif t == "(":
                close = self.match[self.pos]
                self.pos += 1
                self._arguments(close)
                self.pos = close + 1
            elif t == "[":
                close = self.match[self.pos]
                self.pos += 1
                if self.pos < close:
                    self.parse(0)
                if self.pos != close:
                    self._fail()
                self.pos = close + 1
            elif t == "::":
                self.pos += 1
                nxt = self.peek()
                if nxt is None or (nxt.kind != TokenKind.IDENTIFIER and nxt.text != "new"):
                    self._fail()
                self.pos += 1
            elif t in ("++", "--"):
                self.pos += 1
            else:
                return

    def _arguments(self, close: int) -> None:
        if self.pos == close:
            return
        while True:
            self.parse(0)
            tok = self.peek()
            if tok is None or self.pos > close:
                self._fail()
            if self.pos == close:
                return
            if tok.text == ",":
                self.pos += 1
                continue
            self._fail()

    def _lambda_body(self) -> None:
        tok = self.peek()
        if tok is None:
            self._fail()
        if tok.text == "{":
            # Block bodies are accepted if balanced (contents not validated).
            self.pos = self.match[self.pos] + 1
            return
        self.parse(2)

    def _type_ref(self) -> None:
        tok = self.peek()
        if tok is None:
            self._fail()
        if tok.kind != TokenKind.IDENTIFIER and tok.text not in _PRIMITIVE_TYPES:
            self._fail()
        self.pos += 1
        while self.peek() is not None and self.peek().text == ".":
            self.pos += 1
            nxt = self.peek()
            if nxt is None or nxt.kind != TokenKind.IDENTIFIER:
                self._fail()
            self.pos += 1
        while (
            self.peek() is not None
            and self.peek().text == "["
            and self.match[self.pos] == self.pos + 1
        ):
            self.pos += 2

    def _new_expr(self) -> None:
        self._type_ref_with_generics()
        tok = self.peek()
        if tok is None:
            self._fail()
        if tok.text == "(":
            close = self.match[self.pos]
            self.pos += 1
            self._arguments(close)
            self.pos = close + 1
            nxt = self.peek()
            if nxt is not None and nxt.text == "{":
                # anonymous class body: balanced skip
                self.pos = self.match[self.pos] + 1
            return
        if tok.text == "[":
            while self.peek() is not None and self.peek().text == "[":
                close = self.match[self.pos]
                self.pos += 1
                if self.pos < close:
                    self.parse(0)
                if self.pos != close:
                    self._fail()
                self.pos = close + 1
            nxt = self.peek()
            if nxt is not None and nxt.text == "{":
                self.pos = self.match[self.pos] + 1
            return
        self._fail()

    def _type_ref_with_generics(self) -> None:
        self._type_ref()
        tok = self.peek()
        if tok is not None and tok.text == "<":
            depth = 0
            while self.pos < len(self.toks):
                t = self.toks[self.pos].text
                if t == "<":
                    depth += 1
                elif t in (">", ">>", ">>>"):
                    depth -= len(t)
                self.pos += 1
                if depth <= 0:
                    return
            self._fail()


class _Invalid(Exception):
    pass


def _valid_expression_statement(tokens: list[SourceToken], match: dict[int, int]) -> bool:
    toks = tokens
    if toks and toks[-1].text == ";":
        toks = toks[:-1]
    if not toks:
        return False
    parser = _ExprParser(toks, match)
    try:
        parser.parse(0)
    except (_Invalid, KeyError, IndexError):
        return False
    return parser.pos == len(toks)


def _valid_try_catch(tokens: list[SourceToken], match: dict[int, int]) -> bool:
    i = 1
    n = len(tokens)
    if i < n and tokens[i].text == "(":
        i = match[i] + 1
    if i >= n or tokens[i].text != "{":
        return False
    i = match[i] + 1
    n_catches = 0
    while i + 1 < n and tokens[i].text == "catch" and tokens[i + 1].text == "(":
        params_close = match[i + 1]
        inner = tokens[i + 2 : params_close]
        if not inner or not any(t.kind == TokenKind.IDENTIFIER for t in inner):
            return False
        if params_close + 1 >= n or tokens[params_close + 1].text != "{":
            return False
        i = match[params_close + 1] + 1
        n_catches += 1
    if i + 1 < n and tokens[i].text == "finally" and tokens[i + 1].text == "{":
        i = match[i + 1] + 1
    if tokens[i:] and all(t.text == ";" for t in tokens[i:]):
        i = n
    return n_catches >= 1 and i == n


def check_syntax(assertion_text: str) -> bool:
    """True iff the text parses as a single statement (call or try-catch).

    The trailing semicolon is optional.  Never raises; lexing failures
    (e.g. unterminated literals) yield False.
    """
    tokens = try_tokenize(assertion_text)
    if not tokens:
        return False
    try:
        match = _match_delimiters(tokens)
    except ParseFailure:
        return False
    if tokens[0].text == "try":
        return _valid_try_catch(tokens, match)
    return _valid_expression_statement(tokens, match)
