"""Lightweight structural Java parser.

Balanced-delimiter, declaration-pattern driven: recovers packages, classes,
methods/constructors, parameter lists, and method-level documentation.  It
does not attempt full grammar conformance — only the structure consumed
downstream (method extraction, doc attachment, statement boundaries).

Methods declared in anonymous-class bodies (and other unnamed scopes) are
attributed to their immediately enclosing named class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseFailure
from .lexer import tokenize_with_comments
from .tokens import SourceToken, TokenKind

_CLASS_KEYWORDS = frozenset({"class", "interface", "enum", "record"})
_OPEN_FOR = {")": "(", "]": "[", "}": "{"}


@dataclass(frozen=True)
class MethodUnit:
    """One parsed method or constructor declaration.

    body_tokens is the full declaration token sequence (annotations,
    modifiers, signature, and braced body); signature_tokens is the prefix
    up to but excluding the opening brace.  body_open_index marks the '{'
    within body_tokens (-1 for bodyless declarations).
    """

    name: str
    owner_class: str
    package: str
    is_constructor: bool
    params: tuple[tuple[str, str], ...]
    body_tokens: tuple[SourceToken, ...]
    signature_tokens: tuple[SourceToken, ...]
    doc_text: str | None
    source_span: tuple[int, int]
    source_text: str
    body_open_index: int

    @property
    def qualified_name(self) -> str:
        prefix = f"{self.package}." if self.package else ""
        return f"{prefix}{self.owner_class}.{self.name}"


@dataclass(frozen=True)
class ClassUnit:
    name: str
    package: str
    methods: tuple[MethodUnit, ...]
    tokens: tuple[SourceToken, ...]
    source_span: tuple[int, int]


@dataclass
class CompilationUnit:
    package: str
    classes: list[ClassUnit]
    methods: list[MethodUnit] = field(default_factory=list)
    type_names: frozenset[str] = frozenset()


def _match_delimiters(tokens: list[SourceToken]) -> dict[int, int]:
    """Map every opening-delimiter token index to its closing index."""
    match: dict[int, int] = {}
    stack: list[tuple[str, int]] = []
    for i, tok in enumerate(tokens):
        t = tok.text
        if t in ("(", "[", "{"):
            stack.append((t, i))
        elif t in (")", "]", "}"):
            if not stack or stack[-1][0] != _OPEN_FOR[t]:
                raise ParseFailure(f"unbalanced '{t}' at byte offset {tok.offset}")
            match[stack.pop()[1]] = i
    if stack:
        raise ParseFailure(
            f"unclosed '{stack[-1][0]}' at byte offset {tokens[stack[-1][1]].offset}"
        )
    return match


def _strip_javadoc(raw: str) -> str:
    body = raw.strip()
    if body.startswith("/**"):
        body = body[3:]
    elif body.startswith("/*"):
        body = body[2:]
    if body.endswith("*/"):
        body = body[:-2]
    lines = []
    for line in body.splitlines():
        line = line.strip()
        if line.startswith("*"):
            line = line[1:].strip()
        lines.append(line)
    return "\n".join(lines).strip()


class _Scanner:
    def __init__(self, source: str):
        self.source = source
        self.tokens, self.comments = tokenize_with_comments(source)
        self.match = _match_delimiters(self.tokens)
        self.methods: list[MethodUnit] = []
        # (name, declaration token index, body open index)
        self.class_decls: list[tuple[str, int, int]] = []
        self.package = self._parse_package()

    def _parse_package(self) -> str:
        toks = self.tokens
        if not toks or toks[0].text != "package":
            return ""
        parts: list[str] = []
        i = 1
        while i < len(toks) and toks[i].text != ";":
            parts.append(toks[i].text)
            i += 1
        return "".join(parts)

    def _doc_for(self, decl_index: int) -> str | None:
        decl_offset = self.tokens[decl_index].offset
        best: tuple[str, int] | None = None
        for text, offset in self.comments:
            if offset < decl_offset and text.startswith("/**"):
                if best is None or offset > best[1]:
                    best = (text, offset)
        if best is None:
            return None
        comment_end = best[1] + len(best[0])
        for tok in self.tokens:
            if comment_end <= tok.offset < decl_offset:
                return None
        doc = _strip_javadoc(best[0])
        return doc or None

    def _parse_params(self, open_paren: int) -> tuple[tuple[str, str], ...]:
        close = self.match[open_paren]
        inner = self.tokens[open_paren + 1 : close]
        if not inner:
            return ()
        groups: list[list[SourceToken]] = [[]]
        depth = 0
        for tok in inner:
            if tok.text in ("(", "[", "<"):
                depth += 1
            elif tok.text in (")", "]", ">"):
                depth -= 1
            elif tok.text == ">>":
                depth -= 2
            elif tok.text == ">>>":
                depth -= 3
            if tok.text == "," and depth <= 0:
                groups.append([])
            else:
                groups[-1].append(tok)
        params: list[tuple[str, str]] = []
        for group in groups:
            toks = [t for t in group if t.kind != TokenKind.ANNOTATION]
            toks = [t for t in toks if t.text != "final"]
            if not toks:
                continue
            name_idx = None
            for k in range(len(toks) - 1, -1, -1):
                if toks[k].kind == TokenKind.IDENTIFIER:
                    name_idx = k
                    break
            if name_idx is None:
                continue
            type_text = " ".join(t.text for t in toks[:name_idx]) or "<none>"
            params.append((type_text, toks[name_idx].text))
        return tuple(params)

    def _emit_method(self, stmt_start: int, name_idx: int, open_paren: int,
                     body_open: int, body_close: int, owner: str) -> None:
        toks = self.tokens
        name = toks[name_idx].text
        end_idx = body_close if body_close >= 0 else body_open  # body_open holds ';' index when bodyless
        sig_end = body_open if body_close >= 0 else end_idx
        body_tokens = tuple(toks[stmt_start : end_idx + 1])
        signature_tokens = tuple(toks[stmt_start:sig_end])
        start_off = toks[stmt_start].offset
        end_off = toks[end_idx].offset + len(toks[end_idx].text)
        self.methods.append(
            MethodUnit(
                name=name,
                owner_class=owner,
                package=self.package,
                is_constructor=(name == owner),
                params=self._parse_params(open_paren),
                body_tokens=body_tokens,
                signature_tokens=signature_tokens,
                doc_text=self._doc_for(stmt_start),
                source_span=(start_off, end_off),
                source_text=self.source[start_off:end_off],
                body_open_index=(body_open - stmt_start) if body_close >= 0 else -1,
            )
        )

    def scan_class_body(self, start: int, end: int, owner: str) -> None:
        """Scan a class-level token range [start, end) for members."""
        toks = self.tokens
        i = start
        while i < end:
            if toks[i].text in (";", ","):
                i += 1
                continue
            stmt_start = i
            class_kw_idx = -1
            decisive = None  # (kind, index)
            j = i
            while j < end:
                tok = toks[j]
                t = tok.text
                if tok.kind == TokenKind.ANNOTATION and t != "@":
                    if j + 1 < end and toks[j + 1].text == "(":
                        j = self.match[j + 1] + 1
                        continue
                elif t in _CLASS_KEYWORDS and tok.kind == TokenKind.KEYWORD:
                    class_kw_idx = j
                elif t == "=":
                    decisive = ("field", j)
                    break
                elif t == "(" and class_kw_idx < 0:
                    decisive = ("paren", j)
                    break
                elif t == "{":
                    decisive = ("brace", j)
                    break
                elif t == ";":
                    decisive = ("semi", j)
                    break
                j += 1
            if decisive is None:
                break
            kind, j = decisive
            if kind == "semi":
                i = j + 1
                continue
            if kind == "field":
                semi = self._skip_statement(j, end)
                # Field initializers may hold anonymous classes.
                self.scan_block(j + 1, semi, owner)
                i = semi + 1
                continue
            if kind == "brace":
                body_close = self.match[j]
                if class_kw_idx >= 0:
                    self._emit_class(stmt_start, class_kw_idx, j, body_close)
                else:
                    # Initializer block: scan for classes declared inside.
                    self.scan_block(j + 1, body_close, owner)
                i = body_close + 1
                continue
            # kind == "paren": method/constructor candidate.
            open_paren = j
            close_paren = self.match[open_paren]
            name_idx = open_paren - 1
            valid_name = (
                name_idx >= stmt_start and toks[name_idx].kind == TokenKind.IDENTIFIER
            )
            k = close_paren + 1
            while k < end and (
                toks[k].text in ("throws", ",", ".", "[", "]")
                or toks[k].kind in (TokenKind.IDENTIFIER, TokenKind.ANNOTATION)
            ):
                if toks[k].text == "[":
                    k = self.match[k] + 1
                else:
                    k += 1
            if valid_name and k < end and toks[k].text == "{" and self._plausible_params(open_paren):
                body_close = self.match[k]
                self._emit_method(stmt_start, name_idx, open_paren, k, body_close, owner)
                self.scan_block(k + 1, body_close, owner)
                i = body_close + 1
            elif valid_name and k < end and toks[k].text == ";" and self._plausible_params(open_paren):
                self._emit_method(stmt_start, name_idx, open_paren, k, -1, owner)
                i = k + 1
            elif k < end and toks[k].text == "{":
                # Not a method shape (e.g. enum constant with a body):
                # treat the braces as a class-level scope.
                body_close = self.match[k]
                self.scan_class_body(k + 1, body_close, owner)
                i = body_close + 1
            else:
                i = self._skip_statement(stmt_start, end) + 1

    def _plausible_params(self, open_paren: int) -> bool:
        first = self.tokens[open_paren + 1]
        if first.text == ")":
            return True
        return first.kind in (
            TokenKind.IDENTIFIER,
            TokenKind.KEYWORD,
            TokenKind.ANNOTATION,
        )

    def _emit_class(self, stmt_start: int, class_kw_idx: int, body_open: int,
                    body_close: int) -> None:
        toks = self.tokens
        if class_kw_idx + 1 > body_open or toks[class_kw_idx + 1].kind != TokenKind.IDENTIFIER:
            raise ParseFailure(
                f"class declaration without a name at byte offset {toks[class_kw_idx].offset}"
            )
        name = toks[class_kw_idx + 1].text
        self.class_decls.append((name, stmt_start, body_close))
        self.scan_class_body(body_open + 1, body_close, name)

    def _skip_statement(self, start: int, end: int) -> int:
        """Index of the ';' terminating the statement starting at start."""
        i = start
        while i < end:
            t = self.tokens[i].text
            if t in ("(", "[", "{"):
                i = self.match[i] + 1
                continue
            if t == ";":
                return i
            i += 1
        return end - 1

    def scan_block(self, start: int, end: int, owner: str) -> None:
        """Scan a statement block for local/anonymous class bodies."""
        toks = self.tokens
        i = start
        while i < end:
            t = toks[i].text
            if (
                t in _CLASS_KEYWORDS
                and toks[i].kind == TokenKind.KEYWORD
                and (i == 0 or toks[i - 1].text != ".")  # not a class literal
            ):
                j = i
                while j < end and toks[j].text != "{":
                    j += 1
                if j < end:
                    self._emit_class(i, i, j, self.match[j])
                    i = self.match[j] + 1
                    continue
                i += 1
                continue
            if t == "new":
                anon = self._anon_class_open(i, end)
                if anon is not None:
                    body_open, body_close = anon
                    self.scan_class_body(body_open + 1, body_close, owner)
                    i = body_close + 1
                    continue
                i += 1
                continue
            if t == "{":
                close = self.match[i]
                self.scan_block(i + 1, close, owner)
                i = close + 1
                continue
            i += 1

    def _anon_class_open(self, new_idx: int, end: int) -> tuple[int, int] | None:
        """Detect `new Type(...) {` from new_idx; returns the body braces."""
        toks = self.tokens
        i = new_idx + 1
        # qualified type name
        if i >= end or toks[i].kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
            return None
        i += 1
        while i + 1 < end and toks[i].text == "." and toks[i + 1].kind == TokenKind.IDENTIFIER:
            i += 2
        # optional generic argument group, counting shift-operator closers
        if i < end and toks[i].text == "<":
            depth = 0
            while i < end:
                t = toks[i].text
                if t == "<":
                    depth += 1
                elif t in (">", ">>", ">>>"):
                    depth -= len(t)
                i += 1
                if depth <= 0:
                    break
            if depth > 0:
                return None
        if i >= end or toks[i].text != "(":
            return None
        close = self.match[i]
        if close + 1 < end and toks[close + 1].text == "{":
            return close + 1, self.match[close + 1]
        return None

    def build(self) -> CompilationUnit:
        classes: list[ClassUnit] = []
        for name, decl_idx, body_close in self.class_decls:
            start_off = self.tokens[decl_idx].offset
            end_tok = self.tokens[body_close]
            end_off = end_tok.offset + len(end_tok.text)
            classes.append(
                ClassUnit(
                    name=name,
                    package=self.package,
                    methods=tuple(m for m in self.methods if m.owner_class == name),
                    tokens=tuple(self.tokens[decl_idx : body_close + 1]),
                    source_span=(start_off, end_off),
                )
            )
        return CompilationUnit(
            package=self.package,
            classes=classes,
            methods=list(self.methods),
            type_names=frozenset(c.name for c in classes),
        )


def parse_source(source: str) -> CompilationUnit:
    """Parse a compilation unit into classes and method units.

    Raises ParseFailure when delimiters cannot be balanced or the class
    structure cannot be recovered.
    """
    scanner = _Scanner(source)
    scanner.scan_class_body(0, len(scanner.tokens), owner="")
    return scanner.build()


def parse_methods(source: str) -> list[MethodUnit]:
    """All method and constructor declarations of a source text."""
    return parse_source(source).methods
