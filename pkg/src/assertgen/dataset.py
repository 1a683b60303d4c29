"""Dataset records and their line-delimited file format.

One JSON object per line, UTF-8.  Token streams are stored space-joined;
re-import inverts the join with a quote-aware splitter (string/char
literals are the only tokens that may contain whitespace).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from .abstraction import AbstractionDictionary
from .errors import MalformedRecord, MissingFocal
from .tokens import PLACEHOLDER, SEP

TEST_ONLY = "test_only"
TEST_FOCAL = "test_focal"
RAW = "raw"
ABSTRACT = "abstract"

_VARIANTS = (TEST_ONLY, TEST_FOCAL)
_FORMS = (RAW, ABSTRACT)


@dataclass(frozen=True)
class DatasetSample:
    sample_id: str
    input_variant: str
    token_form: str
    masked_input: tuple[str, ...]
    truth_assertion: tuple[str, ...]
    assertion_kind: str
    group_key: str
    subset: str
    dictionary: AbstractionDictionary | None = None

    def __post_init__(self) -> None:
        if self.input_variant not in _VARIANTS:
            raise ValueError(f"bad input_variant: {self.input_variant}")
        if self.token_form not in _FORMS:
            raise ValueError(f"bad token_form: {self.token_form}")
        if self.masked_input.count(PLACEHOLDER) != 1:
            raise ValueError("masked_input must contain exactly one placeholder")
        if self.token_form == ABSTRACT:
            if self.dictionary is None:
                raise ValueError("abstract samples must carry a dictionary")
            from .abstraction import ABSTRACT_TOKEN_RE

            unbound = [
                t
                for t in (*self.masked_input, *self.truth_assertion)
                if ABSTRACT_TOKEN_RE.match(t) and self.dictionary.concrete(t) is None
            ]
            if unbound:
                raise ValueError(f"dictionary does not cover {unbound[:3]}")

    def with_form(
        self,
        token_form: str,
        masked_input: tuple[str, ...],
        truth_assertion: tuple[str, ...],
        dictionary: AbstractionDictionary | None,
    ) -> "DatasetSample":
        return replace(
            self,
            token_form=token_form,
            masked_input=masked_input,
            truth_assertion=truth_assertion,
            dictionary=dictionary,
        )


def split_model_tokens(joined: str) -> list[str]:
    """Invert single-space joining, keeping quoted literals whole.

    A word starting with a quote runs to its matching unescaped close quote;
    everything else splits on whitespace.
    """
    out: list[str] = []
    i = 0
    n = len(joined)
    while i < n:
        c = joined[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c in ("\"", "'"):
            i += 1
            while i < n:
                ch = joined[i]
                if ch == "\\":
                    i += 2
                    continue
                if ch == c:
                    i += 1
                    break
                i += 1
            # any attached non-space tail belongs to the same token
            while i < n and not joined[i].isspace():
                i += 1
        else:
            while i < n and not joined[i].isspace():
                i += 1
        out.append(joined[start:i])
    return out


_FIELDS = (
    "sample_id",
    "input_variant",
    "token_form",
    "masked_input",
    "truth_assertion",
    "assertion_kind",
    "group_key",
    "subset",
    "dictionary",
)


def sample_to_record(sample: DatasetSample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "input_variant": sample.input_variant,
        "token_form": sample.token_form,
        "masked_input": " ".join(sample.masked_input),
        "truth_assertion": " ".join(sample.truth_assertion),
        "assertion_kind": sample.assertion_kind,
        "group_key": sample.group_key,
        "subset": sample.subset,
        "dictionary": sample.dictionary.to_pairs() if sample.dictionary else None,
    }


def record_to_sample(record: dict) -> DatasetSample:
    for name in _FIELDS:
        if name not in record:
            raise MalformedRecord(f"record missing field {name!r}")
    try:
        dictionary = (
            AbstractionDictionary.from_pairs(record["dictionary"])
            if record["dictionary"] is not None
            else None
        )
        return DatasetSample(
            sample_id=record["sample_id"],
            input_variant=record["input_variant"],
            token_form=record["token_form"],
            masked_input=tuple(split_model_tokens(record["masked_input"])),
            truth_assertion=tuple(split_model_tokens(record["truth_assertion"])),
            assertion_kind=record["assertion_kind"],
            group_key=record["group_key"],
            subset=record["subset"],
            dictionary=dictionary,
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise MalformedRecord(str(exc)) from exc


def export_samples(samples: Iterable[DatasetSample], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_record(sample), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def import_samples(path: str | Path) -> list[DatasetSample]:
    out: list[DatasetSample] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise MalformedRecord(f"{path}:{lineno}: record must be an object")
            try:
                out.append(record_to_sample(record))
            except MalformedRecord as exc:
                raise MalformedRecord(f"{path}:{lineno}: {exc}") from exc
    return out


def iter_records(path: str | Path) -> Iterator[dict]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: invalid JSON: {exc}") from exc


SYSTEM_MESSAGE = (
    "You will receive two code snippets that are written in the Java programming "
    "language. The first code snippet contains a test method, and the second code "
    "snippet is the focal method that is exercised by the test method. The test "
    'method snippet contains a masked "<ASSERTION>" part. Please suggest 10 '
    "different and suitable assertions for this masked statement, ranked by their "
    "suitability. Only return Java code! Only use the JUnit assertion methods "
    '"assertTrue", "assertFalse", "assertEquals", "assertNotEquals", "assertNull", '
    '"assertNotNull", "assertThrows". Alternatively, assert expected exceptions '
    'using a try-catch and the "fail" method. Add an empty line between assertions.'
)

PROMPT_TEMPLATE = "Focal method: '''{focal_method_code}''' Test method: '''{test_method_code}'''"


def build_prompt(sample: DatasetSample) -> dict:
    """Instantiate the system message and prompt template for one sample."""
    if sample.input_variant != TEST_FOCAL:
        raise MissingFocal(f"sample {sample.sample_id} lacks focal context")
    if sample.token_form != RAW:
        raise ValueError("prompts are exported from raw-form samples")
    tokens = list(sample.masked_input)
    if SEP not in tokens:
        raise MissingFocal(f"sample {sample.sample_id} lacks a focal segment")
    sep_at = tokens.index(SEP)
    focal_code = " ".join(tokens[:sep_at])
    test_code = " ".join(tokens[sep_at + 1 :])
    return {
        "sample_id": sample.sample_id,
        "system": SYSTEM_MESSAGE,
        "prompt": PROMPT_TEMPLATE.format(
            focal_method_code=focal_code, test_method_code=test_code
        ),
    }


def export_prompts(samples: Iterable[DatasetSample], path: str | Path) -> None:
    """One record per sample: verbatim system message plus filled template."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(build_prompt(sample), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
