"""Test/focal pairing, corpus filtering, sample explosion, and splitting.

Pairing follows the two-stage heuristics: the focal class is the test class
name with a case-insensitive Test prefix or suffix removed, in the same
package; the focal method is found by the same affix-stripping on the test
method name, falling back to a unique intersection between methods invoked
in the test body and the focal class's methods.
"""

from __future__ import annotations

import enum
import hashlib
from collections import Counter
from dataclasses import dataclass, field

from .assertions import (
    AssertionSite,
    find_assertions,
    is_acceptable_assertion,
    mask_assertion,
)
from .dataset import DatasetSample, TEST_FOCAL, RAW
from .errors import DegenerateCorpus
from .parser import ClassUnit, MethodUnit
from .tokens import SEP, TokenKind, token_texts


class FocalDetection(enum.Enum):
    CLASS_AND_NAME_MATCH = "class_and_name_match"
    CALL_INTERSECTION = "call_intersection"
    NONE = "none"


SUBSET_ONE = "one"
SUBSET_UP_TO_FIVE = "up_to_five"
SUBSET_UP_TO_TEN = "up_to_ten"
SUBSET_CAPS = {SUBSET_ONE: 1, SUBSET_UP_TO_FIVE: 5, SUBSET_UP_TO_TEN: 10}

DEFAULT_MAX_CHARS = 10000


@dataclass(frozen=True)
class TestFocalPair:
    test: MethodUnit
    focal: MethodUnit | None
    focal_detection: FocalDetection
    repo_id: str

    def __post_init__(self) -> None:
        if (self.focal is None) != (self.focal_detection is FocalDetection.NONE):
            raise ValueError("focal is present iff focal_detection is not NONE")


@dataclass
class SplitSpec:
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def __post_init__(self) -> None:
        if any(r < 0 for r in self.ratios):
            raise ValueError("ratios must be non-negative")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError("ratios must sum to 1.0")


@dataclass
class CorpusStats:
    """Per-stage drop accounting; stage counts are conserved."""

    files_in: int = 0
    files_parse_failed: int = 0
    pairs_in: int = 0
    constructor_dropped: int = 0
    length_dropped: int = 0
    zero_assertion_dropped: int = 0
    over_cap_dropped: int = 0
    survivors: int = 0
    exploded_samples: int = 0
    kind_counts: Counter = field(default_factory=Counter)

    @property
    def assertion_filtered(self) -> int:
        return self.zero_assertion_dropped + self.over_cap_dropped

    def conserved(self) -> bool:
        return self.pairs_in == (
            self.survivors
            + self.constructor_dropped
            + self.length_dropped
            + self.zero_assertion_dropped
            + self.over_cap_dropped
        )

    def to_dict(self) -> dict:
        return {
            "files_in": self.files_in,
            "files_parse_failed": self.files_parse_failed,
            "pairs_in": self.pairs_in,
            "constructor_dropped": self.constructor_dropped,
            "length_dropped": self.length_dropped,
            "zero_assertion_dropped": self.zero_assertion_dropped,
            "over_cap_dropped": self.over_cap_dropped,
            "assertion_filtered": self.assertion_filtered,
            "survivors": self.survivors,
            "exploded_samples": self.exploded_samples,
            "kind_frequencies": dict(sorted(self.kind_counts.items())),
        }


def _strip_test_affix(name: str) -> list[str]:
    """Candidate names after removing one case-insensitive Test prefix/suffix."""
    lowered = name.lower()
    out = []
    if lowered.startswith("test") and len(name) > 4:
        out.append(name[4:])
    if lowered.endswith("test") and len(name) > 4:
        out.append(name[:-4])
    return out


def match_focal_class(
    test_class: str,
    package: str,
    candidate_classes: list[tuple[str, str]],
) -> tuple[str, str] | None:
    """Unique same-package candidate equal to the affix-stripped test class."""
    stripped = _strip_test_affix(test_class)
    matches = [
        (name, pkg)
        for name, pkg in candidate_classes
        if pkg == package and name in stripped
    ]
    if len(matches) == 1:
        return matches[0]
    return None


def _invoked_names(test: MethodUnit) -> set[str]:
    """Names of methods invoked in the test body (constructor calls excluded)."""
    toks = test.body_tokens
    names: set[str] = set()
    for i in range(len(toks) - 1):
        if (
            toks[i].kind == TokenKind.IDENTIFIER
            and toks[i + 1].text == "("
            and (i == 0 or toks[i - 1].text not in ("new", "@"))
        ):
            names.add(toks[i].text)
    return names


def match_focal_method(
    test: MethodUnit, focal_class_methods: list[MethodUnit]
) -> tuple[MethodUnit | None, FocalDetection]:
    """Affix-stripped name match first, unique call intersection second."""
    stripped = [s.lower() for s in _strip_test_affix(test.name)]
    named = [m for m in focal_class_methods if m.name.lower() in stripped]
    if len(named) == 1:
        return named[0], FocalDetection.CLASS_AND_NAME_MATCH

    invoked = _invoked_names(test)
    focal_names = {m.name for m in focal_class_methods if not m.is_constructor}
    intersection = invoked & focal_names
    if len(intersection) == 1:
        name = next(iter(intersection))
        for m in focal_class_methods:
            if m.name == name:
                return m, FocalDetection.CALL_INTERSECTION
    return None, FocalDetection.NONE


def is_test_method(method: MethodUnit) -> bool:
    """A method is a test iff it carries a @Test annotation."""
    sig = method.signature_tokens
    for i in range(len(sig) - 1):
        if sig[i].text == "@" and sig[i + 1].text == "Test":
            return True
    return False


def pair_classes(
    classes: list[ClassUnit], repo_id: str
) -> list[TestFocalPair]:
    """Pair every test method in the class set with its focal method."""
    candidates = [(c.name, c.package) for c in classes]
    by_key = {(c.name, c.package): c for c in classes}
    pairs: list[TestFocalPair] = []
    for cls in classes:
        for method in cls.methods:
            if not is_test_method(method):
                continue
            focal: MethodUnit | None = None
            detection = FocalDetection.NONE
            focal_cls_key = match_focal_class(cls.name, cls.package, candidates)
            if focal_cls_key is not None:
                focal_cls = by_key[focal_cls_key]
                focal, detection = match_focal_method(method, list(focal_cls.methods))
            pairs.append(
                TestFocalPair(test=method, focal=focal, focal_detection=detection, repo_id=repo_id)
            )
    return pairs


def acceptable_sites(test: MethodUnit) -> list[AssertionSite]:
    return [s for s in find_assertions(test) if is_acceptable_assertion(s)]


def filter_pairs(
    pairs: list[TestFocalPair],
    subset: str = SUBSET_UP_TO_TEN,
    max_chars: int = DEFAULT_MAX_CHARS,
    stats: CorpusStats | None = None,
) -> tuple[list[TestFocalPair], CorpusStats]:
    """Apply constructor/length/assertion-count filters in order."""
    cap = SUBSET_CAPS[subset]
    stats = stats or CorpusStats()
    stats.pairs_in += len(pairs)
    kept: list[TestFocalPair] = []
    for pair in pairs:
        if pair.focal is not None and pair.focal.is_constructor:
            stats.constructor_dropped += 1
            continue
        if len(pair.test.source_text) > max_chars:
            stats.length_dropped += 1
            continue
        n_acceptable = len(acceptable_sites(pair.test))
        if n_acceptable == 0:
            stats.zero_assertion_dropped += 1
            continue
        if n_acceptable > cap:
            stats.over_cap_dropped += 1
            continue
        kept.append(pair)
    stats.survivors += len(kept)
    return kept, stats


def _group_key(pair: TestFocalPair) -> str:
    if pair.focal is not None:
        return pair.focal.qualified_name
    test = pair.test
    prefix = f"{test.package}." if test.package else ""
    return f"{prefix}{test.owner_class}"


def explode_assertions(
    pair: TestFocalPair,
    subset: str = SUBSET_UP_TO_TEN,
    variant: str = TEST_FOCAL,
) -> list[DatasetSample]:
    """One raw sample per acceptable assertion, for the requested variant.

    Other assertions stay in the input as context.  Pairs without a focal
    method yield no samples for the test+focal variant.
    """
    if variant == TEST_FOCAL and pair.focal is None:
        return []
    samples: list[DatasetSample] = []
    test = pair.test
    group = _group_key(pair)
    for idx, site in enumerate(acceptable_sites(test)):
        masked, truth = mask_assertion(test, site)
        masked_texts = token_texts(masked)
        if variant == TEST_FOCAL:
            assert pair.focal is not None
            input_tokens = token_texts(pair.focal.body_tokens) + [SEP] + masked_texts
        else:
            input_tokens = masked_texts
        pkg_prefix = f"{test.package}." if test.package else ""
        sample_id = f"{pair.repo_id}:{pkg_prefix}{test.owner_class}.{test.name}:a{idx}:{variant}"
        samples.append(
            DatasetSample(
                sample_id=sample_id,
                input_variant=variant,
                token_form=RAW,
                masked_input=tuple(input_tokens),
                truth_assertion=tuple(token_texts(truth)),
                assertion_kind=site.kind.value,
                group_key=group,
                subset=subset,
            )
        )
    return samples


def _split_bucket(group_key: str, spec: SplitSpec) -> str:
    digest = hashlib.sha256(f"{spec.seed}:{group_key}".encode("utf-8")).digest()
    u = int.from_bytes(digest[:8], "big") / 2**64
    train, validation, _test = spec.ratios
    if u < train:
        return "train"
    if u < train + validation:
        return "validation"
    return "test"


def split_corpus(
    samples: list[DatasetSample], spec: SplitSpec
) -> tuple[list[DatasetSample], list[DatasetSample], list[DatasetSample]]:
    """Leak-free split: all samples of a group land in one split.

    Assignment is a pure function of (group_key, seed); raises
    DegenerateCorpus when fewer than three groups exist.
    """
    groups = {s.group_key for s in samples}
    if len(groups) < 3:
        raise DegenerateCorpus(f"need at least 3 groups, got {len(groups)}")
    buckets: dict[str, list[DatasetSample]] = {"train": [], "validation": [], "test": []}
    assignment = {g: _split_bucket(g, spec) for g in groups}
    for sample in samples:
        buckets[assignment[sample.group_key]].append(sample)
    return buckets["train"], buckets["validation"], buckets["test"]
