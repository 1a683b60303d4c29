from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from assertgen.assertions import find_assertions, mask_assertion
from assertgen.corpus import TestFocalPair
from assertgen.parser import parse_source

TestFocalPair.__test__ = False  # dataclass, not a pytest suite

FIG_FOCAL_SOURCE = """class Last {
  char last(String s) {
    return s[s.length-1];
  }
}
"""

FIG_TEST_SOURCE = """class LastTest {
  @Test void testLast() {
    char res = last("abc");
    assertEquals(res, 'c');
  }
}
"""


@pytest.fixture
def fig_pair():
    """The running-example pair: (focal method, test method, masked, truth)."""
    focal = parse_source(FIG_FOCAL_SOURCE).methods[0]
    test = parse_source(FIG_TEST_SOURCE).methods[0]
    site = find_assertions(test)[0]
    masked, truth = mask_assertion(test, site)
    return focal, test, masked, truth
