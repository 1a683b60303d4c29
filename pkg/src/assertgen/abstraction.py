"""Token abstraction: concrete lexemes to indexed category tokens and back.

Each sample owns one dictionary.  Indices are per-category, dense from 0,
assigned at first occurrence during the dictionary scan.  The scan order is
class context (when provided), then focal method, then test method — the
emitted stream puts the test segment first, but its indices come from that
scan, which mirrors the raw `focal <SEP> test` concatenation order.

Category rules: literals map to STRING/CHAR/INT/FLOAT/BOOL; identifiers
that head a call or follow a dot become METHOD (the seven assertion names
in call position become ASSERT); names of the sample's own classes become
TYPE; remaining identifiers become IDENT.  Keywords, operators, separators,
annotations, `null`, well-known library type names, and the reserved stream
tokens pass through unchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import MissingPlaceholder, UnknownAbstractToken
from .tokens import (
    ASSERTION_METHODS,
    FOCAL_MARKER,
    JAVA_KEYWORDS,
    PLACEHOLDER,
    RESERVED_TOKENS,
    SEP,
    TEST_MARKER,
)

CATEGORIES = ("IDENT", "METHOD", "STRING", "CHAR", "INT", "FLOAT", "BOOL", "ASSERT", "TYPE")

ABSTRACT_TOKEN_RE = re.compile(
    r"^(IDENT|METHOD|STRING|CHAR|INT|FLOAT|BOOL|ASSERT|TYPE)_(\d+)$"
)

#: Library surface left concrete, mirroring how `String` stays unabstracted.
WELL_KNOWN_TYPES = frozenset(
    """String Object Integer Long Short Byte Double Float Boolean Character
    Number CharSequence StringBuilder StringBuffer Math System Arrays
    Collections Objects List ArrayList LinkedList Map HashMap TreeMap
    LinkedHashMap Set HashSet TreeSet LinkedHashSet Collection Iterator
    Iterable Optional Stream IntStream Comparable Comparator Runnable
    Thread Class Exception RuntimeException Error Throwable
    IllegalArgumentException IllegalStateException NullPointerException
    IndexOutOfBoundsException ArrayIndexOutOfBoundsException
    ArithmeticException IOException UncheckedIOException
    UnsupportedOperationException ClassCastException NumberFormatException
    NoSuchElementException ConcurrentModificationException Test Assert
    Assertions""".split()
)


@dataclass
class AbstractionConfig:
    max_input_tokens: int = 386
    max_output_tokens: int = 64
    include_class_context: bool = True
    placeholder: str = PLACEHOLDER
    test_marker: str = TEST_MARKER
    focal_marker: str = FOCAL_MARKER
    separator: str = SEP

    def __post_init__(self) -> None:
        if self.max_input_tokens <= 1:
            raise ValueError("max_input_tokens must be > 1")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")


@dataclass
class AbstractionDictionary:
    """Bidirectional per-sample map between abstract tokens and lexemes."""

    entries: dict[str, str] = field(default_factory=dict)  # abstract -> concrete
    _by_key: dict[tuple[str, str], str] = field(default_factory=dict, repr=False)
    _counters: dict[str, int] = field(default_factory=dict, repr=False)

    def lookup(self, category: str, lexeme: str) -> str | None:
        return self._by_key.get((category, lexeme))

    def intern(self, category: str, lexeme: str) -> str:
        """Existing abstract token for (category, lexeme), or a fresh one."""
        existing = self._by_key.get((category, lexeme))
        if existing is not None:
            return existing
        index = self._counters.get(category, 0)
        abstract = f"{category}_{index}"
        self._counters[category] = index + 1
        self.entries[abstract] = lexeme
        self._by_key[(category, lexeme)] = abstract
        return abstract

    def concrete(self, abstract: str) -> str | None:
        return self.entries.get(abstract)

    def __len__(self) -> int:
        return len(self.entries)

    def to_pairs(self) -> list[list[str]]:
        return [[a, c] for a, c in self.entries.items()]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[str]]) -> "AbstractionDictionary":
        d = cls()
        for pair in pairs:
            if len(pair) != 2:
                raise ValueError(f"dictionary pair must have 2 elements: {pair!r}")
            abstract, concrete = pair
            m = ABSTRACT_TOKEN_RE.match(abstract)
            if m is None:
                raise ValueError(f"malformed abstract token: {abstract!r}")
            category, index = m.group(1), int(m.group(2))
            if abstract in d.entries:
                raise ValueError(f"duplicate abstract token: {abstract!r}")
            if (category, concrete) in d._by_key:
                raise ValueError(f"duplicate lexeme in category {category}: {concrete!r}")
            if index != d._counters.get(category, 0):
                raise ValueError(f"non-dense index for {abstract!r}")
            d._counters[category] = index + 1
            d.entries[abstract] = concrete
            d._by_key[(category, concrete)] = abstract
        return d


def _is_string_lit(t: str) -> bool:
    return t.startswith('"')


def _is_char_lit(t: str) -> bool:
    return t.startswith("'")


_NUM_START = re.compile(r"^\.?[0-9]")
_FLOAT_MARK = re.compile(r"[.eEpP]|[fFdD]$")


def _numeric_category(t: str) -> str | None:
    if not _NUM_START.match(t):
        return None
    if t.lower().startswith("0x"):
        return "FLOAT" if ("." in t or "p" in t.lower()) else "INT"
    return "FLOAT" if _FLOAT_MARK.search(t) else "INT"


def _is_identifier(t: str) -> bool:
    if not t:
        return False
    c = t[0]
    if not (c.isalpha() or c in "_$"):
        return False
    return all(ch.isalnum() or ch in "_$" for ch in t[1:])


def _in_annotation_chain(texts: Sequence[str], i: int) -> bool:
    """True when texts[i] is part of an `@ Name (. Name)*` chain."""
    j = i - 1
    while j >= 1 and texts[j] == "." and _is_identifier(texts[j - 1]):
        j -= 2
    return j >= 0 and texts[j] == "@"


def categorize(texts: Sequence[str], i: int, sample_types: frozenset[str] = frozenset()) -> str | None:
    """Abstraction category for texts[i], or None for pass-through tokens."""
    t = texts[i]
    if t in RESERVED_TOKENS:
        return None
    if _is_string_lit(t):
        return "STRING"
    if _is_char_lit(t):
        return "CHAR"
    num = _numeric_category(t)
    if num is not None:
        return num
    if t in ("true", "false"):
        return "BOOL"
    if t == "null" or t in JAVA_KEYWORDS:
        return None
    if not _is_identifier(t):
        return None
    prev = texts[i - 1] if i > 0 else ""
    nxt = texts[i + 1] if i + 1 < len(texts) else ""
    if prev == "@" or (prev == "." and _in_annotation_chain(texts, i)):
        return None
    if prev in ("class", "interface", "enum", "record"):
        return "TYPE"  # declaration name
    if prev == "new":
        return "TYPE" if t in sample_types else None
    if t in ASSERTION_METHODS and nxt == "(":
        return "ASSERT"
    if nxt == "(":
        return "METHOD"
    if prev == ".":
        return "METHOD"
    if t in sample_types:
        return "TYPE"
    if t in WELL_KNOWN_TYPES:
        return None
    return "IDENT"


def _register_stream(
    texts: Sequence[str],
    dictionary: AbstractionDictionary,
    sample_types: frozenset[str],
) -> None:
    for i in range(len(texts)):
        category = categorize(texts, i, sample_types)
        if category is not None:
            dictionary.intern(category, texts[i])


def _emit_stream(
    texts: Sequence[str],
    dictionary: AbstractionDictionary,
    sample_types: frozenset[str],
) -> list[str]:
    out: list[str] = []
    for i in range(len(texts)):
        category = categorize(texts, i, sample_types)
        if category is None:
            out.append(texts[i])
        else:
            out.append(dictionary.intern(category, texts[i]))
    return out


def abstract(
    test_tokens: Sequence[str],
    focal_tokens: Sequence[str] | None = None,
    class_context_tokens: Sequence[str] | None = None,
    config: AbstractionConfig | None = None,
    sample_types: frozenset[str] = frozenset(),
) -> tuple[list[str], AbstractionDictionary]:
    """Abstract a masked test (and optional focal) into category tokens.

    Class-context tokens, when given, extend the dictionary but are not
    emitted.  Output layout: TEST_METHOD: <test..> [FOCAL_METHOD: <focal..>].
    """
    config = config or AbstractionConfig()
    if list(test_tokens).count(config.placeholder) != 1:
        raise MissingPlaceholder("test tokens must contain exactly one placeholder")
    dictionary = AbstractionDictionary()
    if class_context_tokens:
        _register_stream(class_context_tokens, dictionary, sample_types)
    if focal_tokens:
        _register_stream(focal_tokens, dictionary, sample_types)
    _register_stream(test_tokens, dictionary, sample_types)

    out = [config.test_marker]
    out.extend(_emit_stream(test_tokens, dictionary, sample_types))
    if focal_tokens:
        out.append(config.focal_marker)
        out.extend(_emit_stream(focal_tokens, dictionary, sample_types))
    return out, dictionary


def abstract_truth(
    truth_tokens: Sequence[str],
    dictionary: AbstractionDictionary,
    sample_types: frozenset[str] = frozenset(),
) -> list[str]:
    """Abstract a ground-truth assertion against the sample's dictionary.

    Known lexemes reuse their tokens; unseen ones extend the dictionary at
    the next free index of their category.
    """
    return _emit_stream(truth_tokens, dictionary, sample_types)


def deabstract(
    abstract_tokens: Sequence[str], dictionary: AbstractionDictionary
) -> list[str]:
    """Map abstract tokens back to concrete lexemes.

    Raises UnknownAbstractToken listing every category token that has no
    dictionary binding (such a prediction is unusable as code).
    """
    out: list[str] = []
    unknown: list[str] = []
    for t in abstract_tokens:
        if ABSTRACT_TOKEN_RE.match(t):
            concrete = dictionary.concrete(t)
            if concrete is None:
                unknown.append(t)
            else:
                out.append(concrete)
        else:
            out.append(t)
    if unknown:
        raise UnknownAbstractToken(unknown)
    return out


def truncate_input(tokens: Sequence[str], config: AbstractionConfig | None = None) -> list[str]:
    """Clip a stream to the input budget, always retaining the placeholder.

    A placeholder inside the kept prefix stays in place; one beyond the cut
    is re-appended as the final token after a (budget - 1)-token prefix.
    """
    config = config or AbstractionConfig()
    toks = list(tokens)
    if toks.count(config.placeholder) != 1:
        raise MissingPlaceholder("input must contain exactly one placeholder")
    budget = config.max_input_tokens
    if len(toks) <= budget:
        return toks
    position = toks.index(config.placeholder)
    if position < budget:
        return toks[:budget]
    return toks[: budget - 1] + [config.placeholder]
