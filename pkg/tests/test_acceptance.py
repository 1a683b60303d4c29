"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see every line.  The
figure-reproduction criterion is split: the input segments pass exactly;
the ground-truth line is asserted verbatim as printed in the source figure
and is expected to fail (the printed figure is internally inconsistent —
see notes/decisions.md at the repository root for the analysis).
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

from assertgen.abstraction import (
    AbstractionConfig,
    abstract,
    abstract_truth,
    deabstract,
    truncate_input,
)
from assertgen.assertions import find_assertions, mask_assertion
from assertgen.bugharness import (
    CATEGORY_DISPLAY,
    ExecutionHooks,
    TrialCategory,
    aggregate_bugs,
    detect_focal_extended,
    run_trial,
)
from assertgen.corpus import (
    SUBSET_UP_TO_TEN,
    SplitSpec,
    filter_pairs,
    pair_classes,
    split_corpus,
)
from assertgen.dataset import TEST_ONLY, DatasetSample, export_samples
from assertgen.metrics import bleu, top_k_accuracy, type_prf
from assertgen.parser import parse_source
from assertgen.predictor import Prediction, RetrievalBackend, RetrievalIndex, predict_top_k
from assertgen.tokens import PLACEHOLDER, token_texts

from conftest import FIG_FOCAL_SOURCE, FIG_TEST_SOURCE
from corpusgen import make_pairs
from test_metrics import oracle_bleu

STUB = str(Path(__file__).parent / "stub_hook.py")


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" — {detail}" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


# --- criterion: abstraction fidelity ---------------------------------------


def test_criterion_abstraction_fidelity():
    started = time.perf_counter()
    pairs = make_pairs(110)
    n_samples = 0
    failures = 0
    for focal_src, test_src in pairs:
        focal_unit = parse_source(focal_src)
        test_unit = parse_source(test_src)
        types = focal_unit.type_names | test_unit.type_names
        focal = focal_unit.methods[0]
        test = test_unit.methods[0]
        for site in find_assertions(test):
            masked, truth = mask_assertion(test, site)
            masked_t, focal_t, truth_t = (
                token_texts(masked), token_texts(focal.body_tokens), token_texts(truth),
            )
            out, dictionary = abstract(masked_t, focal_t, sample_types=types)
            expected = ["TEST_METHOD:"] + masked_t + ["FOCAL_METHOD:"] + focal_t
            if deabstract(out, dictionary) != expected:
                failures += 1
            truth_abs = abstract_truth(truth_t, dictionary, sample_types=types)
            if deabstract(truth_abs, dictionary) != truth_t:
                failures += 1
            n_samples += 1
    elapsed = time.perf_counter() - started
    report(
        "abstraction fidelity",
        failures == 0 and n_samples >= 100 and elapsed < 10.0,
        f"{n_samples} samples over {len(pairs)} pairs, {failures} mismatches, {elapsed:.2f}s",
    )


# --- criterion: figure reproduction -----------------------------------------

FIG_TEST_LINE = (
    "TEST_METHOD: @ Test void METHOD_2 ( ) { char IDENT_1 = METHOD_0 ( STRING_0 ) ; <ASSERTION> }"
)
FIG_FOCAL_LINE = (
    "FOCAL_METHOD: char METHOD_0 ( String IDENT_0 ) { return IDENT_0 [ IDENT_0 . METHOD_1 - INT_0 ] ; }"
)
FIG_TRUTH_LINE = "ASSERTION: ASSERT_0 ( IDENT_0 , CHAR_0 )"


def _figure_lines() -> tuple[str, str, str]:
    focal = parse_source(FIG_FOCAL_SOURCE).methods[0]
    test = parse_source(FIG_TEST_SOURCE).methods[0]
    site = find_assertions(test)[0]
    masked, truth = mask_assertion(test, site)
    out, dictionary = abstract(token_texts(masked), token_texts(focal.body_tokens))
    focal_marker_at = out.index("FOCAL_METHOD:")
    test_line = " ".join(out[:focal_marker_at])
    focal_line = " ".join(out[focal_marker_at:])
    truth_abs = abstract_truth(token_texts(truth), dictionary)
    if truth_abs and truth_abs[-1] == ";":
        truth_abs = truth_abs[:-1]
    return test_line, focal_line, "ASSERTION: " + " ".join(truth_abs)


def test_criterion_figure_reproduction_input_segments():
    test_line, focal_line, _ = _figure_lines()
    report(
        "figure reproduction (test/focal input segments)",
        test_line == FIG_TEST_LINE and focal_line == FIG_FOCAL_LINE,
    )


@pytest.mark.xfail(
    strict=True,
    reason=(
        "printed figure is internally inconsistent: its own input lines bind "
        "IDENT_0 to the focal parameter and IDENT_1 to the test variable, yet "
        "its ground-truth line prints IDENT_0 for that same test variable; no "
        "single bijective per-sample dictionary can produce both (see the "
        "decisions ledger)"
    ),
)
def test_criterion_figure_reproduction_full():
    test_line, focal_line, truth_line = _figure_lines()
    ok = (
        test_line == FIG_TEST_LINE
        and focal_line == FIG_FOCAL_LINE
        and truth_line == FIG_TRUTH_LINE
    )
    report(
        "figure reproduction (full, incl. ground-truth line)",
        ok,
        f"got {truth_line!r}",
    )


# --- criterion: filter conformance -------------------------------------------


def test_criterion_filter_conformance(tmp_path):
    every_kind_test = """package p;
    public class EveryKindTest {
      @Test void testEvery() {
        EveryKind w = new EveryKind();
        int res = w.every(1);
        String s = w.label();
        assertEquals(res, 1);
        assertNotEquals(res, 2);
        assertTrue(res > 0);
        assertFalse(s.isEmpty());
        assertNull(w.missing());
        assertNotNull(s);
        assertThrows(IllegalArgumentException.class, () -> w.every(-1));
        try { w.every(-2); fail(); } catch (IllegalArgumentException e) {}
      }
    }
    """
    every_kind_focal = """package p;
    public class EveryKind {
      public int every(int x) { return x; }
      public String label() { return "n"; }
      public Object missing() { return null; }
    }
    """
    message_param_test = """package p;
    public class MsgOnlyTest {
      @Test void testMsgOnly() { assertEquals(a, b, "message"); }
    }
    """
    message_param_focal = "package p;\npublic class MsgOnly { public int msgOnly() { return 1; } }\n"
    mixed_message_test = """package p;
    public class MixedTest {
      @Test void testMixed() {
        assertTrue(ok);
        assertEquals(a, b, "message dropped");
      }
    }
    """
    mixed_focal = "package p;\npublic class Mixed { public int mixed() { return 1; } }\n"
    ctor_test = """package p;
    public class BuilderTest {
      @Test void testBuilder() { assertNotNull(new Builder()); }
    }
    """
    ctor_focal = "package p;\npublic class Builder { public Builder() {} }\n"
    long_test = (
        "package p;\npublic class LongRunTest {\n  @Test void testLongRun() {\n"
        '    String s = "' + "x" * 10200 + '";\n    assertNotNull(s);\n  }\n}\n'
    )
    long_focal = "package p;\npublic class LongRun { public int longRun() { return 1; } }\n"
    over_cap_test = (
        "package p;\npublic class SixCheckTest {\n  @Test void testSixCheck() {\n    "
        + "\n    ".join(f"assertTrue(x{i});" for i in range(6))
        + "\n  }\n}\n"
    )
    over_cap_focal = "package p;\npublic class SixCheck { public int sixCheck() { return 1; } }\n"
    unparseable = "public class Broken { public void m() { if (x {"

    sources = [
        every_kind_focal, every_kind_test,
        message_param_focal, message_param_test,
        mixed_focal, mixed_message_test,
        ctor_focal, ctor_test,
        long_focal, long_test,
        over_cap_focal, over_cap_test,
    ]
    files_in = len(sources) + 1
    parse_failed = 0
    classes = []
    for source in sources + [unparseable]:
        try:
            classes.extend(parse_source(source).classes)
        except Exception:
            parse_failed += 1

    pairs = pair_classes(classes, "fixture")

    # subset up_to_five, hand-specified decisions:
    #   EveryKindTest  -> dropped (8 acceptable assertions > cap 5)
    #   MsgOnlyTest    -> dropped (zero acceptable assertions)
    #   MixedTest      -> kept (1 acceptable; message overload not counted)
    #   BuilderTest    -> dropped (constructor focal)
    #   LongRunTest    -> dropped (test source > 10000 chars)
    #   SixCheckTest   -> dropped (6 acceptable > cap 5)
    #   Broken.java    -> parse failure at file level
    kept5, stats5 = filter_pairs(pairs, subset="up_to_five", max_chars=10000)
    stats5.files_in = files_in
    stats5.files_parse_failed = parse_failed
    kept5_names = sorted(p.test.name for p in kept5)
    five_ok = (
        stats5.files_parse_failed == 1
        and stats5.pairs_in == 6
        and kept5_names == ["testMixed"]
        and stats5.constructor_dropped == 1
        and stats5.length_dropped == 1
        and stats5.zero_assertion_dropped == 1
        and stats5.over_cap_dropped == 2
        and stats5.survivors == 1
        and stats5.conserved()
    )

    # subset up_to_ten: the 8- and 6-assertion tests survive; explosion
    # yields one sample per acceptable site and covers all eight kinds.
    from assertgen.corpus import explode_assertions
    from assertgen.dataset import TEST_FOCAL

    kept10, stats10 = filter_pairs(pairs, subset="up_to_ten", max_chars=10000)
    kept10_names = sorted(p.test.name for p in kept10)
    samples10 = [
        s
        for pair in kept10
        for s in explode_assertions(pair, subset="up_to_ten", variant=TEST_FOCAL)
    ]
    for s in samples10:
        stats10.kind_counts[s.assertion_kind] += 1
    stats10.exploded_samples = len(samples10)
    ten_ok = (
        kept10_names == ["testEvery", "testMixed", "testSixCheck"]
        and stats10.over_cap_dropped == 0
        and stats10.survivors == 3
        and stats10.conserved()
        and stats10.exploded_samples == 15
        and dict(stats10.kind_counts)
        == {
            "assertEquals": 1,
            "assertNotEquals": 1,
            "assertTrue": 8,
            "assertFalse": 1,
            "assertNull": 1,
            "assertNotNull": 1,
            "assertThrows": 1,
            "tryCatchFail": 1,
        }
    )
    report(
        "filter conformance",
        five_ok and ten_ok,
        f"cap5 kept={kept5_names} cap10 kept={kept10_names} "
        f"cap5 stats={stats5.to_dict()}",
    )


# --- criterion: split leak-freedom -------------------------------------------


def test_criterion_split_leak_freedom(tmp_path):
    samples = []
    rng = random.Random(1234)
    for g in range(10_000):
        key = f"pkg{g % 97}.Cls{g}.method{rng.randrange(1000)}"
        samples.append(
            DatasetSample(
                sample_id=f"s{g}",
                input_variant=TEST_ONLY,
                token_form="raw",
                masked_input=("f", "(", ")", ";", PLACEHOLDER),
                truth_assertion=("assertTrue", "(", "x", ")", ";"),
                assertion_kind="assertTrue",
                group_key=key,
                subset=SUBSET_UP_TO_TEN,
            )
        )
    spec = SplitSpec(ratios=(0.8, 0.1, 0.1), seed=42)
    train, val, test = split_corpus(samples, spec)
    groups = lambda xs: {s.group_key for s in xs}
    overlap = (
        (groups(train) & groups(val))
        | (groups(train) & groups(test))
        | (groups(val) & groups(test))
    )
    n = len(samples)
    fractions = (len(train) / n, len(val) / n, len(test) / n)
    within = all(abs(f - r) <= 0.02 for f, r in zip(fractions, (0.8, 0.1, 0.1)))

    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir()
    d2.mkdir()
    for d in (d1, d2):
        t, v, te = split_corpus(samples, SplitSpec(ratios=(0.8, 0.1, 0.1), seed=42))
        export_samples(t, d / "train.jsonl")
        export_samples(v, d / "validation.jsonl")
        export_samples(te, d / "test.jsonl")
    identical = all(
        (d1 / f).read_bytes() == (d2 / f).read_bytes()
        for f in ("train.jsonl", "validation.jsonl", "test.jsonl")
    )
    report(
        "split leak-freedom",
        not overlap and within and identical,
        f"fractions={tuple(round(f, 4) for f in fractions)} overlap={len(overlap)}",
    )


# --- criterion: metric oracles -------------------------------------------------


def test_criterion_metric_oracles():
    from test_metrics import BLEU_FIXTURES

    toks = lambda s: s.split()
    pair_count = 0
    agree = True
    for cands, refs in BLEU_FIXTURES:
        c = [toks(x) for x in cands]
        r = [toks(x) for x in refs]
        agree &= abs(bleu(c, r) - oracle_bleu(c, r)) < 1e-9
        pair_count += len(c)
    pooled_c = [toks(x) for cands, _ in BLEU_FIXTURES for x in cands]
    pooled_r = [toks(x) for _, refs in BLEU_FIXTURES for x in refs]
    pair_count += len(pooled_c)
    agree &= abs(bleu(pooled_c, pooled_r) - oracle_bleu(pooled_c, pooled_r)) < 1e-9
    self_one = abs(bleu(pooled_r, pooled_r) - 1.0) < 1e-12

    # 50-sample fixture: top-k and type P/R/F1 against brute-force recounts.
    kinds_cycle = ["assertEquals", "assertTrue", "assertNull", "assertFalse", "assertNotNull"]
    truths, kinds, preds = {}, {}, []
    for i in range(50):
        kind = kinds_cycle[i % 5]
        arg = "x" if kind != "assertEquals" else f"x , {i}"
        truth = f"{kind} ( {arg} ) ;"
        truths[f"s{i}"] = toks(truth)
        kinds[f"s{i}"] = kind
        candidates = []
        for j in range(i % 3):
            candidates.append(f"assertNotEquals ( q , {j} ) ;")
        if i % 7 != 0:
            candidates.append(truth)
        else:
            candidates.append(f"{kinds_cycle[(i + 1) % 5]} ( y ) ;")
        preds.append(
            Prediction(f"s{i}", tuple((c, 1.0 - idx / 10) for idx, c in enumerate(candidates)), "fx")
        )

    got_topk = top_k_accuracy(preds, truths, ks=[1, 2, 3])
    expected_topk = {}
    for k in (1, 2, 3):
        hits = 0
        for i in range(50):
            rank = (i % 3) + 1
            if i % 7 != 0 and rank <= k:
                hits += 1
        expected_topk[k] = hits / 50
    topk_ok = got_topk == expected_topk

    per_kind, _mp, _mr, _mf1 = type_prf(preds, kinds)
    prf_ok = True
    for kind in kinds_cycle:
        predicted = correct = support = 0
        for i in range(50):
            true_kind = kinds_cycle[i % 5]
            if i % 3 > 0:
                rank1_kind = "assertNotEquals"  # wrong-value fillers rank first
            elif i % 7 == 0:
                rank1_kind = kinds_cycle[(i + 1) % 5]
            else:
                rank1_kind = true_kind
            if true_kind == kind:
                support += 1
                if rank1_kind == kind:
                    correct += 1
            if rank1_kind == kind:
                predicted += 1
        precision = correct / predicted if predicted else 0.0
        recall = correct / support
        scores = per_kind[kind]
        prf_ok &= (
            abs(scores.precision - precision) < 1e-12
            and abs(scores.recall - recall) < 1e-12
            and scores.support == support
        )
    report(
        "metric oracles",
        agree and self_one and topk_ok and prf_ok and pair_count >= 20,
        f"{pair_count} BLEU sentence pairs; top-k {got_topk}",
    )


# --- criterion: monotonicity suite ----------------------------------------------


def test_criterion_monotonicity():
    toks = lambda s: s.split()
    ok = True
    for spread in range(4):
        truths, kinds, preds = {}, {}, []
        for i in range(30):
            truth = f"assertEquals ( r , {i} ) ;"
            truths[f"s{i}"] = toks(truth)
            kinds[f"s{i}"] = "assertEquals"
            candidates = [f"assertEquals ( r , {i + j + 1} ) ;" for j in range(i % (spread + 2))]
            if i % 4 != 3:
                candidates.append(truth)
            preds.append(
                Prediction(f"s{i}", tuple((c, 1.0 - j / 100) for j, c in enumerate(candidates)), "fx")
            )
        acc = top_k_accuracy(preds, truths, ks=[1, 5, 10])
        ok &= acc[1] <= acc[5] <= acc[10]
        per_kind, _, _, _ = type_prf(preds, kinds)
        type_correct = sum(s.recall * s.support for s in per_kind.values()) / 30
        ok &= acc[1] <= type_correct + 1e-12
    report("monotonicity suite", ok)


# --- criterion: retrieval baseline ------------------------------------------------


def test_criterion_retrieval_baseline():
    samples = []
    for i in range(50):
        samples.append(
            DatasetSample(
                sample_id=f"s{i}",
                input_variant=TEST_ONLY,
                token_form="raw",
                masked_input=tuple(
                    ["call", f"alpha{i}", f"beta{i % 7}", "shared", str(i % 5), PLACEHOLDER]
                ),
                truth_assertion=tuple(f"assertEquals ( out , {i} ) ;".split()),
                assertion_kind="assertEquals",
                group_key=f"g{i}",
                subset=SUBSET_UP_TO_TEN,
            )
        )
    index = RetrievalIndex.build(samples)
    backend = RetrievalBackend(index)

    self_hits = sum(
        1
        for s in samples
        if predict_top_k(s, 1, backend).candidates[0][0] == " ".join(s.truth_assertion)
    )

    def oracle_sim(xs, ys):
        ca, cb = {}, {}
        for x in xs:
            ca[x] = ca.get(x, 0) + 1
        for y in ys:
            cb[y] = cb.get(y, 0) + 1
        keys = set(ca) | set(cb)
        inter = sum(min(ca.get(t, 0), cb.get(t, 0)) for t in keys)
        union = sum(max(ca.get(t, 0), cb.get(t, 0)) for t in keys)
        return inter / union if union else 1.0

    query = samples[13]
    expected = sorted(
        ((oracle_sim(query.masked_input, s.masked_input), " ".join(s.truth_assertion)) for s in samples),
        key=lambda p: (-p[0], p[1]),
    )
    got = predict_top_k(query, 50, backend).candidates
    ranking_ok = [(text, round(score, 12)) for text, score in got] == [
        (text, round(score, 12)) for score, text in expected
    ]
    report(
        "retrieval baseline",
        self_hits == len(samples) and ranking_ok,
        f"self-retrieval {self_hits}/{len(samples)}",
    )


# --- criterion: truncation ---------------------------------------------------------


def test_criterion_truncation():
    rng = random.Random(777)
    config = AbstractionConfig(max_input_tokens=386)
    ok = True
    for _ in range(2000):
        length = rng.randint(1, 1000)
        position = rng.randrange(length)
        tokens = [f"t{i}" for i in range(length)]
        tokens[position] = PLACEHOLDER
        out = truncate_input(tokens, config)
        ok &= len(out) <= 386 and out.count(PLACEHOLDER) == 1
    report("truncation", ok, "2000 randomized streams, lengths 1-1000")


# --- criterion: bug-harness truth table ----------------------------------------------


def test_criterion_bug_harness_truth_table(tmp_path):
    hooks = ExecutionHooks(
        compile_command=f"{sys.executable} {STUB} {{root}} compile",
        test_command=f"{sys.executable} {STUB} {{root}} test {{test_class}} {{test_method}}",
        timeout=30.0,
    )
    expected_map = {
        (1, 0, 0): TrialCategory.NOT_COMPILABLE,
        (1, 0, 1): TrialCategory.NOT_COMPILABLE,
        (1, 1, 0): TrialCategory.NOT_COMPILABLE,
        (1, 1, 1): TrialCategory.NOT_COMPILABLE,
        (0, 1, 0): TrialCategory.FAILS_ON_FIXED,
        (0, 1, 1): TrialCategory.FAILS_ON_FIXED,
        (0, 0, 1): TrialCategory.FAILS_ONLY_ON_BUGGY,
        (0, 0, 0): TrialCategory.PASSES_ON_BOTH,
    }
    from test_bugharness import make_case

    all_ok = True
    trials = []
    for combo, expected in expected_map.items():
        c, f, b = combo
        case = make_case(tmp_path, bug_id=f"bug_{c}{f}{b}", compile_exit=c,
                         fixed_exit=f, buggy_exit=b)
        outcome = run_trial(case, case.trigger_tests[0], "assertTrue(x);", hooks)
        all_ok &= outcome.category is expected
        trials.append((case.bug_id, outcome))

    agg = aggregate_bugs(trials)
    # hand-derived: one combo yields fails-only-on-buggy -> exactly 1 bug found
    agg_ok = (
        agg.bugs_found == 1
        and agg.per_category
        == {
            "not compilable": 4,
            "fails on fixed": 2,
            "fails only on buggy": 1,
            "passes on both": 1,
        }
        and agg.n_trials == 8
    )
    names_ok = list(CATEGORY_DISPLAY.values()) == [
        "not compilable", "fails on fixed", "fails only on buggy", "passes on both",
    ]
    report("bug-harness truth table", all_ok and agg_ok and names_ok)


# --- criterion: focal detection --------------------------------------------------------


def test_criterion_focal_detection():
    results = []

    candidates = parse_source(
        "package p; class Last { char last(String s) { return 'c'; } }"
    ).classes
    test = parse_source(
        "package p; class LastTest { @Test void testLast() { assertTrue(x); } }"
    ).methods[0]
    method, tag = detect_focal_extended(test, candidates)
    results.append(method.name == "last" and tag == "methods2test")

    candidates = parse_source(
        "package p; class Util { char lastChar(String s) { return 'c'; } "
        "char firstChar(String s) { return 'a'; } }"
    ).classes
    test = parse_source(
        "package p; class RegressionSuite { @Test void testLastChar() { assertTrue(x); } }"
    ).methods[0]
    method, tag = detect_focal_extended(test, candidates)
    results.append(method.name == "lastChar" and tag == "subtoken_overlap")

    candidates = parse_source(
        "package p; class Engine { int compute() { return 1; } }"
    ).classes
    test = parse_source(
        "package p; class ScenarioSuite { @Test void testIssue1024() "
        "{ Engine obj = new Engine(); obj.compute(); assertTrue(x); } }"
    ).methods[0]
    method, tag = detect_focal_extended(test, candidates)
    results.append(method.name == "compute" and tag == "last_call")

    candidates = parse_source("package p; class Engine { Engine() {} }").classes
    test = parse_source(
        "package p; class ScenarioSuite { @Test void testIssue7() { int x = 5; assertEquals(x, 5); } }"
    ).methods[0]
    method, tag = detect_focal_extended(
        test, candidates, diff_changed_methods=("p.Engine.Engine",)
    )
    results.append(method.is_constructor and tag == "diff_changed")

    override = parse_source("package q; class Helper { int helper() { return 1; } }").methods[0]
    test = parse_source(
        "package p; class ScenarioSuite { @Test void testIssue9() { int y = 1; assertEquals(y, 1); } }"
    ).methods[0]
    method, tag = detect_focal_extended(test, [], manual_override=override)
    results.append(method.name == "helper" and tag == "manual")

    report(
        "focal detection",
        all(results),
        "strategies: " + ", ".join(
            tag for tag in ("methods2test", "subtoken_overlap", "last_call", "diff_changed", "manual")
        ),
    )
