"""Benchmark: compiled lexer core vs pure-Python fallback.

Usage: python benchmarks/bench_lexer.py [repeats]

Builds a synthetic Java corpus, scans it with both cores, verifies they
agree, and reports tokens/second plus the speedup factor.
"""

from __future__ import annotations

import sys
import time

from assertgen import _lexer_py

try:
    from assertgen import _lexer_c
except ImportError:
    _lexer_c = None


def synth_source(i: int) -> str:
    return f"""package bench.p{i % 11};

public class Widget{i} {{
  /** Doc for widget {i}. */
  private static final String LABEL_{i} = "widget {i} label text";

  public int compute{i}(int x, double scale) {{
    int acc = x * {i % 9} + 1;
    for (int k = 0; k < {i % 17 + 2}; k++) {{
      acc += (k % 2 == 0) ? k : -k;
    }}
    if (acc < 0) {{
      throw new IllegalArgumentException("negative: " + acc);
    }}
    return acc - {i % 5};
  }}

  @Test
  public void testCompute{i}() {{
    Widget{i} w = new Widget{i}();
    int res = w.compute{i}({i}, {i % 7}.5);
    assertEquals(res, {i * 3});
    assertTrue(res >= 0x{i % 255:02x});
    try {{ w.compute{i}(-1, 0.0); fail(); }} catch (IllegalArgumentException e) {{}}
  }}
}}
"""


def bench(scan, corpus: list[str], repeats: int) -> tuple[float, int]:
    n_tokens = 0
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        n_tokens = 0
        for source in corpus:
            tokens, _comments, err = scan(source)
            assert err < 0
            n_tokens += len(tokens)
        best = min(best, time.perf_counter() - started)
    return best, n_tokens


def main() -> int:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    corpus = [synth_source(i) for i in range(300)]
    total_bytes = sum(len(s) for s in corpus)

    py_time, py_tokens = bench(_lexer_py.scan, corpus, repeats)
    print(f"corpus: {len(corpus)} files, {total_bytes / 1024:.1f} KiB, {py_tokens} tokens")
    print(f"pure python : {py_time * 1e3:8.2f} ms  ({py_tokens / py_time / 1e6:6.2f} Mtok/s)")

    if _lexer_c is None:
        print("compiled    : not built (pip install -e . with Cython available)")
        return 0

    for source in corpus[:25]:
        assert _lexer_c.scan(source) == _lexer_py.scan(source)
    c_time, c_tokens = bench(_lexer_c.scan, corpus, repeats)
    assert c_tokens == py_tokens
    print(f"compiled    : {c_time * 1e3:8.2f} ms  ({c_tokens / c_time / 1e6:6.2f} Mtok/s)")
    print(f"speedup     : {py_time / c_time:8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
