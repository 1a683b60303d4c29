from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assertgen import _lexer_py
from assertgen.errors import UnterminatedLiteral
from assertgen.lexer import tokenize, tokenize_with_comments
from assertgen.tokens import TokenKind, join_tokens

try:
    from assertgen import _lexer_c
except ImportError:
    _lexer_c = None


def texts(source):
    return [t.text for t in tokenize(source)]


def test_char_literal_is_single_token():
    assert texts("assertEquals(res, 'c');") == [
        "assertEquals", "(", "res", ",", "'c'", ")", ";",
    ]


def test_empty_input():
    assert tokenize("") == []


def test_array_index_expression():
    assert texts("return s[s.length-1];") == [
        "return", "s", "[", "s", ".", "length", "-", "1", "]", ";",
    ]


def test_string_literal_with_spaces_and_escapes():
    toks = tokenize('x = "hello \\"big\\" world";')
    lits = [t for t in toks if t.kind == TokenKind.STRING_LIT]
    assert len(lits) == 1
    assert lits[0].text == '"hello \\"big\\" world"'


def test_comments_are_dropped_but_collected():
    src = "int x = 1; // line\n/* block */ int y = 2; /** doc */"
    toks, comments = tokenize_with_comments(src)
    assert [t.text for t in toks] == ["int", "x", "=", "1", ";", "int", "y", "=", "2", ";"]
    assert [c[0] for c in comments] == ["// line", "/* block */", "/** doc */"]


def test_unterminated_string_raises():
    with pytest.raises(UnterminatedLiteral):
        tokenize('assertEquals(a, "oops')


def test_unterminated_char_raises():
    with pytest.raises(UnterminatedLiteral):
        tokenize("char c = 'x")


@pytest.mark.parametrize(
    "source,expected_kinds",
    [
        ("42", [TokenKind.INT_LIT]),
        ("42L", [TokenKind.INT_LIT]),
        ("0x1F", [TokenKind.INT_LIT]),
        ("0b101", [TokenKind.INT_LIT]),
        ("1_000", [TokenKind.INT_LIT]),
        ("1.5", [TokenKind.FLOAT_LIT]),
        ("1.5e-3", [TokenKind.FLOAT_LIT]),
        ("2f", [TokenKind.FLOAT_LIT]),
        ("3d", [TokenKind.FLOAT_LIT]),
        ("true", [TokenKind.BOOL_LIT]),
        ("null", [TokenKind.NULL_LIT]),
    ],
)
def test_literal_kinds(source, expected_kinds):
    assert [t.kind for t in tokenize(source)] == expected_kinds


def test_member_dot_never_starts_a_number():
    assert texts("s.length") == ["s", ".", "length"]
    assert texts("f(.5)") == ["f", "(", ".5", ")"]


def test_annotation_tokens():
    toks = tokenize("@Test void m() {}")
    assert toks[0].text == "@" and toks[0].kind == TokenKind.ANNOTATION
    assert toks[1].text == "Test" and toks[1].kind == TokenKind.ANNOTATION
    assert toks[2].kind == TokenKind.KEYWORD


def test_qualified_annotation_chain():
    toks = tokenize("@org.junit.Test void m() {}")
    kinds = {t.text: t.kind for t in toks[:6]}
    assert kinds["org"] == TokenKind.ANNOTATION
    assert kinds["junit"] == TokenKind.ANNOTATION
    assert kinds["Test"] == TokenKind.ANNOTATION


def test_shift_operators_longest_match():
    assert texts("a >>>= b >>> c >> d") == ["a", ">>>=", "b", ">>>", "c", ">>", "d"]


def test_varargs_separator():
    assert texts("void f(String... args)") == ["void", "f", "(", "String", "...", "args", ")"]


def test_offsets_point_into_source():
    src = "int  foo = 12;"
    for tok in tokenize(src):
        assert src[tok.offset : tok.offset + len(tok.text)] == tok.text


FIXTURES = [
    "class A { void m() { assertEquals(1, f(\"a b\")); } }",
    "int x = a >= 2 ? 1 : 0;",
    "try { f(); fail(); } catch (IOException e) {}",
    "List<Map<String, Integer>> xs = new ArrayList<>();",
    "double d = -1.5e3 + 0x2p1 - 07;",
    "@SuppressWarnings(\"x\") void m(int... a) { s.charAt(0); }",
]


@pytest.mark.parametrize("source", FIXTURES)
def test_lexical_idempotence_on_fixtures(source):
    once = texts(source)
    again = texts(join_tokens(tokenize(source)))
    assert once == again


_java_chunks = st.sampled_from(
    ["foo", "Bar", "_x9", "1", "2.5f", "0x1F", "'c'", '"a b"', "(", ")", "[", "]",
     "{", "}", ";", ",", ".", "+", "-", ">>", ">=", "->", "::", "@", "new",
     "int", "return", "true", "null", "...", "assertEquals"]
)


@given(st.lists(_java_chunks, max_size=40))
@settings(max_examples=200, deadline=None)
def test_lexical_idempotence_property(chunks):
    source = " ".join(chunks)
    first = texts(source)
    assert texts(" ".join(first)) == first


@pytest.mark.skipif(_lexer_c is None, reason="compiled core not built")
@given(st.text(alphabet=st.characters(codec="ascii"), max_size=120))
@settings(max_examples=300, deadline=None)
def test_cores_equivalent_on_arbitrary_text(source):
    assert _lexer_py.scan(source) == _lexer_c.scan(source)


@pytest.mark.skipif(_lexer_c is None, reason="compiled core not built")
@pytest.mark.parametrize("source", FIXTURES)
def test_cores_equivalent_on_fixtures(source):
    assert _lexer_py.scan(source) == _lexer_c.scan(source)
