"""Scoring: top-k exact match, corpus BLEU, assertion-type P/R/F1,
syntactic correctness, and type-conditional accuracy.

Exact match is token-level (whitespace-insensitive) with the trailing
semicolon normalized away on both sides.  BLEU is corpus-level, n-grams up
to 4 with uniform weights, brevity penalty exp(1 - r/c) for c <= r, and
add-one smoothing on the n-gram precisions for n >= 2.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .assertions import AssertionKind, check_syntax
from .errors import EmptyCorpus, MismatchedIds
from .lexer import try_tokenize
from .predictor import Prediction
from .tokens import ASSERTION_METHODS, token_texts


def _normalized_tokens(tokens: Sequence[str]) -> list[str]:
    toks = list(tokens)
    while toks and toks[-1] == ";":
        toks.pop()
    return toks


def candidate_tokens(candidate: str) -> list[str] | None:
    """Lex a candidate string; None when it cannot be lexed."""
    toks = try_tokenize(candidate)
    if toks is None:
        return None
    return token_texts(toks)


def exact_match(candidate: str, truth: Sequence[str]) -> bool:
    """Token-exact equality after whitespace/semicolon normalization."""
    cand = candidate_tokens(candidate)
    if cand is None:
        return False
    return _normalized_tokens(cand) == _normalized_tokens(truth)


def top_k_accuracy(
    predictions: Sequence[Prediction],
    truths: Mapping[str, Sequence[str]],
    ks: Sequence[int],
) -> dict[int, float]:
    """Per k: fraction of samples whose first k candidates hit the truth."""
    if set(p.sample_id for p in predictions) != set(truths):
        raise MismatchedIds("predictions and truths cover different sample ids")
    if not predictions:
        raise EmptyCorpus("no predictions to score")
    hit_rank: list[int | None] = []
    for pred in predictions:
        truth = truths[pred.sample_id]
        rank = None
        for idx, (text, _score) in enumerate(pred.candidates):
            if exact_match(text, truth):
                rank = idx + 1
                break
        hit_rank.append(rank)
    n = len(predictions)
    return {
        k: sum(1 for r in hit_rank if r is not None and r <= k) / n
        for k in ks
    }


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    candidates: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    max_n: int = 4,
) -> float:
    """Corpus BLEU in [0, 1]; see module docstring for the pinned variant."""
    if len(candidates) != len(references):
        raise ValueError("candidates and references must have equal length")
    if not candidates:
        raise EmptyCorpus("BLEU over an empty corpus")
    matches = [0] * (max_n + 1)
    totals = [0] * (max_n + 1)
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand = list(cand)
        ref = list(ref)
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            cand_ngrams = _ngram_counts(cand, n)
            ref_ngrams = _ngram_counts(ref, n)
            totals[n] += sum(cand_ngrams.values())
            matches[n] += sum((cand_ngrams & ref_ngrams).values())
    log_sum = 0.0
    for n in range(1, max_n + 1):
        if n == 1:
            if totals[1] == 0 or matches[1] == 0:
                return 0.0
            precision = matches[1] / totals[1]
        else:
            precision = (matches[n] + 1) / (totals[n] + 1)
        log_sum += math.log(precision)
    score = math.exp(log_sum / max_n)
    if cand_len <= ref_len and cand_len > 0:
        score *= math.exp(1 - ref_len / cand_len)
    return score


def assertion_type_of(text: str) -> AssertionKind | None:
    """The supported kind of a statement's head call, or None."""
    toks = candidate_tokens(text)
    if not toks:
        return None
    if toks[0] == "try":
        # the idiom requires a catch clause and a fail call in the try block
        if "catch" in toks and any(
            toks[i] == "fail" and i + 1 < len(toks) and toks[i + 1] == "("
            for i in range(len(toks))
        ):
            return AssertionKind.TRY_CATCH_FAIL
        return None
    head = None
    if len(toks) >= 2 and toks[0] in ASSERTION_METHODS and toks[1] == "(":
        head = toks[0]
    elif (
        len(toks) >= 4
        and toks[0] in ("Assert", "Assertions")
        and toks[1] == "."
        and toks[2] in ASSERTION_METHODS
        and toks[3] == "("
    ):
        head = toks[2]
    if head is None:
        return None
    return AssertionKind(head)


@dataclass
class KindScores:
    precision: float
    recall: float
    f1: float
    support: int


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def type_prf(
    predictions: Sequence[Prediction],
    truth_kinds: Mapping[str, str],
) -> tuple[dict[str, KindScores], float, float, float]:
    """Per-kind precision/recall/F1 of rank-1 kind labels, plus macro scores.

    Predictions whose rank-1 text has no supported kind carry a distinct
    wrong label; kinds with zero truth support are excluded from the macro
    averages.
    """
    if set(p.sample_id for p in predictions) != set(truth_kinds):
        raise MismatchedIds("predictions and truths cover different sample ids")
    predicted: dict[str, str] = {}
    for pred in predictions:
        if pred.candidates:
            kind = assertion_type_of(pred.candidates[0][0])
            predicted[pred.sample_id] = kind.value if kind else "<none>"
        else:
            predicted[pred.sample_id] = "<none>"
    support = Counter(truth_kinds.values())
    predicted_counts = Counter(predicted.values())
    correct = Counter(
        truth_kinds[sid] for sid, label in predicted.items() if truth_kinds[sid] == label
    )
    per_kind: dict[str, KindScores] = {}
    for kind in sorted(support):
        prec = correct[kind] / predicted_counts[kind] if predicted_counts[kind] else 0.0
        rec = correct[kind] / support[kind]
        per_kind[kind] = KindScores(prec, rec, _f1(prec, rec), support[kind])
    if per_kind:
        macro_p = sum(s.precision for s in per_kind.values()) / len(per_kind)
        macro_r = sum(s.recall for s in per_kind.values()) / len(per_kind)
        macro_f1 = sum(s.f1 for s in per_kind.values()) / len(per_kind)
    else:
        macro_p = macro_r = macro_f1 = 0.0
    return per_kind, macro_p, macro_r, macro_f1


def conditional_accuracy(
    predictions: Sequence[Prediction],
    truths: Mapping[str, Sequence[str]],
    truth_kinds: Mapping[str, str],
    kind: str,
) -> float | None:
    """Exact-match rate among samples of `kind` whose rank-1 kind is correct.

    None when no sample meets the condition (reported as absent).
    """
    hits = 0
    eligible = 0
    for pred in predictions:
        if truth_kinds.get(pred.sample_id) != kind or not pred.candidates:
            continue
        rank1 = pred.candidates[0][0]
        predicted_kind = assertion_type_of(rank1)
        if predicted_kind is None or predicted_kind.value != kind:
            continue
        eligible += 1
        if exact_match(rank1, truths[pred.sample_id]):
            hits += 1
    if eligible == 0:
        return None
    return hits / eligible


def syntactic_correctness_rate(predictions: Sequence[Prediction]) -> float:
    """Fraction of rank-1 candidates that parse; empty predictions count false."""
    if not predictions:
        raise EmptyCorpus("no predictions to score")
    good = sum(
        1 for p in predictions if p.candidates and check_syntax(p.candidates[0][0])
    )
    return good / len(predictions)


@dataclass
class EvalReport:
    n_samples: int
    top_k_accuracy: dict[int, float]
    bleu: float
    per_kind: dict[str, KindScores]
    type_macro_precision: float
    type_macro_recall: float
    type_macro_f1: float
    syntactic_correctness: float
    conditional_accuracy: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "top_k_accuracy": {str(k): v for k, v in sorted(self.top_k_accuracy.items())},
            "bleu": self.bleu,
            "per_kind": {
                kind: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for kind, s in sorted(self.per_kind.items())
            },
            "type_macro_precision": self.type_macro_precision,
            "type_macro_recall": self.type_macro_recall,
            "type_macro_f1": self.type_macro_f1,
            "syntactic_correctness": self.syntactic_correctness,
            "conditional_accuracy": dict(sorted(self.conditional_accuracy.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def evaluate(
    predictions: Sequence[Prediction],
    truths: Mapping[str, Sequence[str]],
    truth_kinds: Mapping[str, str],
    ks: Sequence[int] = (1, 5, 10),
) -> EvalReport:
    """Full metric suite over aligned predictions and ground truths."""
    predictions = sorted(predictions, key=lambda p: p.sample_id)
    accuracy = top_k_accuracy(predictions, truths, ks)
    cands: list[list[str]] = []
    refs: list[list[str]] = []
    for pred in predictions:
        rank1 = pred.candidates[0][0] if pred.candidates else ""
        cands.append(candidate_tokens(rank1) or [])
        refs.append(list(truths[pred.sample_id]))
    per_kind, macro_p, macro_r, macro_f1 = type_prf(predictions, truth_kinds)
    conditional: dict[str, float] = {}
    for kind in sorted(set(truth_kinds.values())):
        value = conditional_accuracy(predictions, truths, truth_kinds, kind)
        if value is not None:
            conditional[kind] = value
    return EvalReport(
        n_samples=len(predictions),
        top_k_accuracy=accuracy,
        bleu=bleu(cands, refs),
        per_kind=per_kind,
        type_macro_precision=macro_p,
        type_macro_recall=macro_r,
        type_macro_f1=macro_f1,
        syntactic_correctness=syntactic_correctness_rate(predictions),
        conditional_accuracy=conditional,
    )


def render_table(report: EvalReport) -> str:
    """Aligned plain-text table of the report."""
    lines: list[str] = []
    lines.append(f"{'samples':<28}{report.n_samples:>10}")
    for k in sorted(report.top_k_accuracy):
        lines.append(f"{f'top-{k} accuracy':<28}{report.top_k_accuracy[k]:>10.4f}")
    lines.append(f"{'BLEU':<28}{report.bleu:>10.4f}")
    lines.append(f"{'syntactic correctness':<28}{report.syntactic_correctness:>10.4f}")
    lines.append(f"{'type macro precision':<28}{report.type_macro_precision:>10.4f}")
    lines.append(f"{'type macro recall':<28}{report.type_macro_recall:>10.4f}")
    lines.append(f"{'type macro F1':<28}{report.type_macro_f1:>10.4f}")
    lines.append("")
    header = f"{'kind':<18}{'prec':>8}{'rec':>8}{'f1':>8}{'support':>9}{'cond.acc':>10}"
    lines.append(header)
    lines.append("-" * len(header))
    for kind, s in sorted(report.per_kind.items()):
        cond = report.conditional_accuracy.get(kind)
        cond_text = f"{cond:>10.4f}" if cond is not None else f"{'-':>10}"
        lines.append(
            f"{kind:<18}{s.precision:>8.4f}{s.recall:>8.4f}{s.f1:>8.4f}{s.support:>9}{cond_text}"
        )
    return "\n".join(lines)
