"""Deterministic synthetic Java corpus for tests and acceptance runs.

Every pair is a (focal class source, test class source) tuple following the
Test-affix naming convention so the pairing heuristics apply.  Assertion
kinds, literal shapes, and assertion counts rotate with the pair index.
"""

from __future__ import annotations

_ASSERTION_TEMPLATES = [
    "assertEquals(res, {int_lit});",
    "assertNotEquals(res, {int_lit2});",
    "assertTrue(res > {int_lit3});",
    "assertFalse(label.isEmpty());",
    "assertNull(w.missing());",
    "assertNotNull(label);",
    "assertThrows(IllegalArgumentException.class, () -> w.compute{i}(-1));",
    'try {{ w.compute{i}(-5); fail(); }} catch (IllegalArgumentException e) {{}}',
    'Assert.assertEquals(label, "widget {i} name");',
    'assertEquals(label, "multi word {i} label");',
    "assertEquals(label.charAt(0), 'w');",
    "assertEquals(res + 0.5f, {float_lit});",
    "assertTrue(flag);",
]


def assertion_statement(i: int, slot: int) -> str:
    template = _ASSERTION_TEMPLATES[(i + slot) % len(_ASSERTION_TEMPLATES)]
    return template.format(
        i=i,
        int_lit=i * 2,
        int_lit2=i + 11,
        int_lit3=i - 1,
        float_lit=f"{i % 9}.5f",
    )


def focal_source(i: int) -> str:
    pkg = f"fix.p{i % 5}"
    return f"""package {pkg};

public class Widget{i} {{
  /** Computes value number {i}. */
  public int compute{i}(int x) {{
    int acc = x * {i % 7} + 1;
    if (x < 0) {{
      throw new IllegalArgumentException("negative " + x);
    }}
    return acc - {i % 3};
  }}

  public String name{i}() {{
    return "widget {i} name";
  }}

  public Object missing() {{
    return null;
  }}
}}
"""


def test_source(i: int, n_assertions: int = 0) -> str:
    pkg = f"fix.p{i % 5}"
    n = n_assertions or (1 + i % 3)
    statements = "\n    ".join(assertion_statement(i, s) for s in range(n))
    return f"""package {pkg};

public class Widget{i}Test {{
  @Test
  public void testCompute{i}() {{
    Widget{i} w = new Widget{i}();
    int res = w.compute{i}({i % 13});
    String label = w.name{i}();
    boolean flag = res >= 0;
    {statements}
  }}
}}
"""


def make_pairs(n: int) -> list[tuple[str, str]]:
    """n (focal_source, test_source) pairs with rotating assertion shapes."""
    return [(focal_source(i), test_source(i)) for i in range(n)]


def write_repo_corpus(root, n_pairs: int, repos: int = 4) -> None:
    """Write the pairs as .java files spread over repo subdirectories."""
    for i in range(n_pairs):
        repo = root / f"repo{i % repos}"
        repo.mkdir(parents=True, exist_ok=True)
        (repo / f"Widget{i}.java").write_text(focal_source(i), encoding="utf-8")
        (repo / f"Widget{i}Test.java").write_text(test_source(i), encoding="utf-8")
