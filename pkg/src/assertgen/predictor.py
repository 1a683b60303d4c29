"""Predictor backends: deterministic retrieval baseline and external adapters.

The retrieval baseline is a nearest-neighbour lookup over training samples
using multiset Jaccard similarity on input tokens.  External model processes
speak a line-delimited JSON protocol over stdin/stdout:

  request:  {"id": ..., "masked_input": ..., "token_form": ..., "k": ...}
  response: {"id": ..., "candidates": [{"text": ..., "score": ...}, ...]}

One response line per request line, order-preserving.
"""

from __future__ import annotations

import json
import logging
import select
import shlex
import subprocess
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .abstraction import deabstract
from .assertions import check_syntax
from .dataset import ABSTRACT, DatasetSample, split_model_tokens
from .errors import (
    AdapterProtocolError,
    AdapterTimeout,
    BackendUnavailable,
    EmptyIndex,
    UnknownAbstractToken,
)

log = logging.getLogger(__name__)

DEFAULT_ADAPTER_TIMEOUT = 60.0


@dataclass(frozen=True)
class Prediction:
    sample_id: str
    candidates: tuple[tuple[str, float], ...]
    backend: str


def _rank(candidates: Iterable[tuple[str, float]], k: int) -> tuple[tuple[str, float], ...]:
    """Descending score, ties broken by ascending text; first k kept."""
    ordered = sorted(candidates, key=lambda c: (-c[1], c[0]))
    return tuple(ordered[:k])


def retrieval_similarity(query: Sequence[str] | Counter, entry: Sequence[str] | Counter) -> float:
    """Multiset Jaccard: |intersection| / |union| over token multisets."""
    a = query if isinstance(query, Counter) else Counter(query)
    b = entry if isinstance(entry, Counter) else Counter(entry)
    if not a and not b:
        return 1.0
    intersection = sum((a & b).values())
    union = sum((a | b).values())
    if union == 0:
        return 0.0
    return intersection / union


class RetrievalIndex:
    """Nearest-neighbour index built from training-split samples only."""

    def __init__(self) -> None:
        self.entries: list[tuple[Counter, str]] = []

    @classmethod
    def build(cls, samples: Iterable[DatasetSample]) -> "RetrievalIndex":
        index = cls()
        for sample in samples:
            index.entries.append(
                (Counter(sample.masked_input), " ".join(sample.truth_assertion))
            )
        return index

    def query(self, tokens: Sequence[str], k: int) -> tuple[tuple[str, float], ...]:
        if not self.entries:
            raise EmptyIndex("retrieval index has no entries")
        query_counter = Counter(tokens)
        best_by_text: dict[str, float] = {}
        for entry_counter, truth in self.entries:
            score = retrieval_similarity(query_counter, entry_counter)
            if truth not in best_by_text or score > best_by_text[truth]:
                best_by_text[truth] = score
        return _rank(best_by_text.items(), k)


class RetrievalBackend:
    name = "retrieval"

    def __init__(self, index: RetrievalIndex):
        self.index = index

    def predict(self, sample: DatasetSample, k: int) -> Prediction:
        return Prediction(
            sample_id=sample.sample_id,
            candidates=self.index.query(list(sample.masked_input), k),
            backend=self.name,
        )


def predict_top_k(sample: DatasetSample, k: int, backend) -> Prediction:
    """Ranked candidates for one masked sample from the given backend."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return backend.predict(sample, k)


class AdapterClient:
    """Line-protocol client for an external adapter process."""

    def __init__(self, command: str | Sequence[str], timeout: float = DEFAULT_ADAPTER_TIMEOUT):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._line_no = 0

    def _ensure_started(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise BackendUnavailable(f"cannot start adapter {self.command}: {exc}") from exc
            self._line_no = 0
        return self._proc

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()
            self._proc = None

    def __enter__(self) -> "AdapterClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _read_line(self, proc: subprocess.Popen) -> str:
        ready, _, _ = select.select([proc.stdout], [], [], self.timeout)
        if not ready:
            self.close()
            raise AdapterTimeout(f"adapter produced no response within {self.timeout}s")
        line = proc.stdout.readline()
        if line == "":
            self.close()
            raise AdapterProtocolError("adapter closed its output stream")
        self._line_no += 1
        return line

    def request(self, request: dict) -> dict:
        proc = self._ensure_started()
        proc.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
        proc.stdin.flush()
        line = self._read_line(proc)
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterProtocolError(
                f"adapter response line {self._line_no} is not valid JSON: {exc}"
            ) from exc
        if not isinstance(response, dict):
            raise AdapterProtocolError(f"adapter response line {self._line_no} is not an object")
        return response


def external_predict(
    sample: DatasetSample,
    k: int,
    adapter: AdapterClient,
    extra_fields: dict | None = None,
) -> Prediction:
    """Query an adapter process; drop and report unusable candidates.

    Abstract-form candidates are deabstracted with the sample's dictionary
    before the syntax check; candidates that fail it are dropped.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    request = {
        "id": sample.sample_id,
        "masked_input": " ".join(sample.masked_input),
        "token_form": sample.token_form,
        "k": k,
    }
    if extra_fields:
        request.update(extra_fields)
    response = adapter.request(request)
    if response.get("id") != sample.sample_id:
        raise AdapterProtocolError(
            f"adapter answered id {response.get('id')!r} for request {sample.sample_id!r}"
        )
    raw_candidates = response.get("candidates")
    if not isinstance(raw_candidates, list):
        raise AdapterProtocolError("adapter response lacks a candidates list")
    kept: list[tuple[str, float]] = []
    dropped = 0
    for entry in raw_candidates:
        if not isinstance(entry, dict) or "text" not in entry:
            raise AdapterProtocolError(f"malformed candidate entry: {entry!r}")
        text = str(entry["text"])
        score = float(entry.get("score", 0.0))
        concrete = text
        if sample.token_form == ABSTRACT:
            if sample.dictionary is None:
                raise AdapterProtocolError("abstract sample without dictionary")
            try:
                concrete = " ".join(
                    deabstract(split_model_tokens(text), sample.dictionary)
                )
            except UnknownAbstractToken as exc:
                log.warning("sample %s: dropped candidate with %s", sample.sample_id, exc)
                dropped += 1
                continue
        if not check_syntax(concrete):
            log.warning("sample %s: dropped unparseable candidate %r", sample.sample_id, text)
            dropped += 1
            continue
        kept.append((text, score))
    if dropped:
        log.info("sample %s: dropped %d/%d candidates", sample.sample_id, dropped, len(raw_candidates))
    return Prediction(
        sample_id=sample.sample_id,
        candidates=_rank(kept, k),
        backend="adapter",
    )


def prediction_to_record(prediction: Prediction) -> dict:
    return {
        "sample_id": prediction.sample_id,
        "backend": prediction.backend,
        "candidates": [{"text": t, "score": s} for t, s in prediction.candidates],
    }


def record_to_prediction(record: dict) -> Prediction:
    try:
        return Prediction(
            sample_id=record["sample_id"],
            candidates=tuple(
                (str(c["text"]), float(c["score"])) for c in record["candidates"]
            ),
            backend=record.get("backend", "unknown"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AdapterProtocolError(f"malformed prediction record: {exc}") from exc
