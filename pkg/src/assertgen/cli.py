"""Command-line entry point: reproducible pipelines over the library.

Subcommands: build-corpus, abstract, predict, evaluate, bug-eval,
export-prompts.  Options may come from an INI config file (sections mirror
the subcommands); command-line flags override the file, and
ASSERTGEN_ADAPTER_CMD / ASSERTGEN_ADAPTER_TIMEOUT override the adapter
settings.  Identical inputs, config, and seed produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus as corpus_mod
from .abstraction import AbstractionConfig, abstract, abstract_truth, deabstract, truncate_input
from .bugharness import (
    ExecutionHooks,
    aggregate_bugs,
    load_manifest,
    render_bug_table,
    run_trial,
)
from .corpus import (
    CorpusStats,
    SplitSpec,
    explode_assertions,
    filter_pairs,
    pair_classes,
    split_corpus,
)
from .dataset import (
    ABSTRACT,
    RAW,
    TEST_FOCAL,
    DatasetSample,
    export_prompts,
    export_samples,
    import_samples,
    iter_records,
    split_model_tokens,
)
from .errors import AssertGenError, UnknownAbstractToken
from .metrics import evaluate, render_table
from .parser import CompilationUnit, parse_source
from .predictor import (
    AdapterClient,
    Prediction,
    RetrievalBackend,
    RetrievalIndex,
    external_predict,
    predict_top_k,
    prediction_to_record,
    record_to_prediction,
)
from .tokens import SEP


class StageError(AssertGenError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise StageError("config", f"cannot read config file {path}")
    flat: dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[f"{section}.{key}"] = value
    return flat


def _cfg(config: dict[str, str], key: str, fallback=None):
    return config.get(key, fallback)


def _parse_java_file(item: tuple[str, str]) -> tuple[str, CompilationUnit | None, str]:
    label, text = item
    try:
        return label, parse_source(text), ""
    except AssertGenError as exc:
        return label, None, str(exc)


def _discover_repos(root: Path) -> list[tuple[str, list[Path]]]:
    direct = sorted(root.glob("*.java"))
    if direct:
        return [(root.name, direct)]
    repos = []
    for child in sorted(p for p in root.iterdir() if p.is_dir()):
        files = sorted(child.rglob("*.java"))
        if files:
            repos.append((child.name, files))
    return repos


def _parse_files(
    files: list[tuple[str, str]], jobs: int
) -> list[tuple[str, CompilationUnit | None, str]]:
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_parse_java_file, files))
    else:
        results = [_parse_java_file(item) for item in files]
    return sorted(results, key=lambda r: r[0])


def _build_samples(
    root: Path, subset: str, variant: str, max_chars: int, jobs: int
) -> tuple[list[DatasetSample], CorpusStats]:
    repos = _discover_repos(root)
    if not repos:
        raise StageError("parse", f"no .java files under {root}")
    stats = CorpusStats()
    samples: list[DatasetSample] = []
    for repo_id, paths in repos:
        files = [(str(p), p.read_text(encoding="utf-8")) for p in paths]
        stats.files_in += len(files)
        units: list[CompilationUnit] = []
        for label, unit, error in _parse_files(files, jobs):
            if unit is None:
                stats.files_parse_failed += 1
                print(f"note: parse failed for {label}: {error}", file=sys.stderr)
            else:
                units.append(unit)
        classes = [c for unit in units for c in unit.classes]
        pairs = pair_classes(classes, repo_id)
        kept, stats = filter_pairs(pairs, subset=subset, max_chars=max_chars, stats=stats)
        for pair in kept:
            samples.extend(explode_assertions(pair, subset=subset, variant=variant))
    samples.sort(key=lambda s: s.sample_id)
    stats.exploded_samples = len(samples)
    for sample in samples:
        stats.kind_counts[sample.assertion_kind] += 1
    return samples, stats


def cmd_build_corpus(args: argparse.Namespace) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise StageError("parse", f"corpus root {root} does not exist")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples, stats = _build_samples(root, args.subset, args.variant, args.max_chars, args.jobs)
    if args.token_form == ABSTRACT:
        samples = [_abstract_sample(s, AbstractionConfig(), truncate=False) for s in samples]
    ratios = tuple(float(r) for r in args.ratios.split(","))
    if len(ratios) != 3:
        raise StageError("split", "ratios must be three comma-separated fractions")
    spec = SplitSpec(ratios=ratios, seed=args.seed)
    try:
        train, validation, test = split_corpus(samples, spec)
    except AssertGenError as exc:
        raise StageError("split", str(exc)) from exc
    for name, split in (("train", train), ("validation", validation), ("test", test)):
        export_samples(split, out_dir / f"{name}.jsonl")
    report = stats.to_dict()
    report["split_sizes"] = {
        "train": len(train),
        "validation": len(validation),
        "test": len(test),
    }
    report["seed"] = args.seed
    report["subset"] = args.subset
    report["variant"] = args.variant
    report["token_form"] = args.token_form
    (out_dir / "stats.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(train)}/{len(validation)}/{len(test)} samples to {out_dir}")
    if not stats.conserved():
        raise StageError("stats", "stage counts are not conserved")
    return 0


def _abstract_sample(
    sample: DatasetSample, config: AbstractionConfig, truncate: bool
) -> DatasetSample:
    tokens = list(sample.masked_input)
    if sample.input_variant == TEST_FOCAL and SEP in tokens:
        sep_at = tokens.index(SEP)
        focal_tokens: list[str] | None = tokens[:sep_at]
        test_tokens = tokens[sep_at + 1 :]
    else:
        focal_tokens = None
        test_tokens = tokens
    abstract_tokens, dictionary = abstract(test_tokens, focal_tokens, None, config)
    truth_tokens = abstract_truth(list(sample.truth_assertion), dictionary)
    if truncate:
        abstract_tokens = truncate_input(abstract_tokens, config)
    return sample.with_form(
        ABSTRACT, tuple(abstract_tokens), tuple(truth_tokens), dictionary
    )


def cmd_abstract(args: argparse.Namespace) -> int:
    samples = import_samples(args.input)
    config = AbstractionConfig(
        max_input_tokens=args.max_input_tokens,
        max_output_tokens=args.max_output_tokens,
    )
    out: list[DatasetSample] = []
    for sample in samples:
        if sample.token_form != RAW:
            raise StageError("abstract", f"sample {sample.sample_id} is not raw form")
        out.append(_abstract_sample(sample, config, truncate=args.truncate))
    export_samples(out, args.output)
    print(f"abstracted {len(out)} samples to {args.output}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    samples = import_samples(args.dataset)
    predictions: list[Prediction] = []
    if args.backend == "retrieval":
        index_samples = import_samples(args.index) if args.index else samples
        index = RetrievalIndex.build(index_samples)
        backend = RetrievalBackend(index)
        for sample in samples:
            predictions.append(predict_top_k(sample, args.k, backend))
    elif args.backend == "adapter":
        command = os.environ.get("ASSERTGEN_ADAPTER_CMD", args.adapter_cmd)
        if not command:
            raise StageError("predict", "no adapter command configured")
        timeout = float(os.environ.get("ASSERTGEN_ADAPTER_TIMEOUT", args.adapter_timeout))
        with AdapterClient(command, timeout=timeout) as adapter:
            for sample in samples:
                predictions.append(external_predict(sample, args.k, adapter))
    else:
        raise StageError("predict", f"unknown backend {args.backend}")
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for prediction in predictions:
            fh.write(json.dumps(prediction_to_record(prediction), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    print(f"wrote {len(predictions)} predictions to {args.out}")
    return 0


def _concrete_truth(sample: DatasetSample) -> list[str]:
    if sample.token_form == ABSTRACT:
        assert sample.dictionary is not None
        return deabstract(list(sample.truth_assertion), sample.dictionary)
    return list(sample.truth_assertion)


def _concrete_candidates(sample: DatasetSample, prediction: Prediction) -> Prediction:
    if sample.token_form != ABSTRACT:
        return prediction
    assert sample.dictionary is not None
    converted = []
    for text, score in prediction.candidates:
        try:
            concrete = " ".join(deabstract(split_model_tokens(text), sample.dictionary))
        except UnknownAbstractToken:
            concrete = text  # unusable as code; scoring treats it as a miss
        converted.append((concrete, score))
    return Prediction(prediction.sample_id, tuple(converted), prediction.backend)


def cmd_evaluate(args: argparse.Namespace) -> int:
    samples = {s.sample_id: s for s in import_samples(args.dataset)}
    predictions = [record_to_prediction(r) for r in iter_records(args.predictions)]
    missing = [p.sample_id for p in predictions if p.sample_id not in samples]
    if missing:
        raise StageError("evaluate", f"predictions for unknown samples: {missing[:3]}")
    predictions = [_concrete_candidates(samples[p.sample_id], p) for p in predictions]
    truths = {sid: _concrete_truth(s) for sid, s in samples.items()}
    truth_kinds = {sid: s.assertion_kind for sid, s in samples.items()}
    ks = [int(k) for k in args.ks.split(",")]
    report = evaluate(predictions, truths, truth_kinds, ks)
    print(render_table(report))
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0


def cmd_bug_eval(args: argparse.Namespace) -> int:
    cases = {c.bug_id: c for c in load_manifest(args.manifest, check_roots=not args.no_check_roots)}
    hooks = ExecutionHooks(
        compile_command=args.compile_cmd,
        test_command=args.test_cmd,
        timeout=args.hook_timeout,
    )
    trials: list[tuple[str, object]] = []
    detail_rows: list[dict] = []
    for record in iter_records(args.trials):
        bug_id = record["bug_id"]
        if bug_id not in cases:
            raise StageError("bug-eval", f"trial references unknown bug {bug_id}")
        outcome = run_trial(
            cases[bug_id],
            (record["test_class"], record["test_method"]),
            record["generated_assertion"],
            hooks,
        )
        trials.append((bug_id, outcome))
        detail_rows.append(
            {
                "bug_id": bug_id,
                "test_class": record["test_class"],
                "test_method": record["test_method"],
                "category": outcome.category.value,
            }
        )
    report = aggregate_bugs(trials)
    print(render_bug_table(report))
    if args.report:
        payload = report.to_dict()
        payload["trials"] = detail_rows
        Path(args.report).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def cmd_export_prompts(args: argparse.Namespace) -> int:
    samples = import_samples(args.dataset)
    export_prompts(samples, args.out)
    print(f"wrote {len(samples)} prompts to {args.out}")
    return 0


def build_arg_parser(config: dict[str, str]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assertgen",
        description="Assertion-generation corpus, prediction, and evaluation toolchain",
    )
    parser.add_argument("--config", help="INI config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", help="parse, pair, filter, explode, split, export")
    p.add_argument("--root", default=_cfg(config, "corpus.root"), required="corpus.root" not in config)
    p.add_argument("--out-dir", default=_cfg(config, "corpus.out_dir", "corpus_out"))
    p.add_argument("--subset", choices=list(corpus_mod.SUBSET_CAPS), default=_cfg(config, "corpus.subset", corpus_mod.SUBSET_UP_TO_TEN))
    p.add_argument("--variant", choices=[TEST_FOCAL, "test_only"], default=_cfg(config, "corpus.variant", TEST_FOCAL))
    p.add_argument("--token-form", choices=[RAW, ABSTRACT], default=_cfg(config, "corpus.token_form", RAW))
    p.add_argument("--max-chars", type=int, default=int(_cfg(config, "corpus.max_chars", corpus_mod.DEFAULT_MAX_CHARS)))
    p.add_argument("--ratios", default=_cfg(config, "split.ratios", "0.8,0.1,0.1"))
    p.add_argument("--seed", type=int, default=int(_cfg(config, "split.seed", 0)))
    p.add_argument("--jobs", type=int, default=int(_cfg(config, "corpus.jobs", os.cpu_count() or 1)))
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("abstract", help="raw dataset file -> abstract form")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--max-input-tokens", type=int, default=int(_cfg(config, "abstraction.max_input_tokens", 386)))
    p.add_argument("--max-output-tokens", type=int, default=int(_cfg(config, "abstraction.max_output_tokens", 64)))
    p.add_argument("--truncate", action="store_true", help="clip inputs to the token budget")
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("predict", help="produce ranked candidates for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--index", help="training samples for the retrieval index")
    p.add_argument("--backend", choices=["retrieval", "adapter"], default=_cfg(config, "predictor.backend", "retrieval"))
    p.add_argument("--adapter-cmd", default=_cfg(config, "predictor.adapter_cmd"))
    p.add_argument("--adapter-timeout", type=float, default=float(_cfg(config, "predictor.adapter_timeout", 60.0)))
    p.add_argument("--k", type=int, default=int(_cfg(config, "predictor.k", 10)))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--ks", default=_cfg(config, "eval.ks", "1,5,10"))
    p.add_argument("--report", help="write the report JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bug-eval", help="run generated assertions against buggy/fixed roots")
    p.add_argument("--manifest", required=True)
    p.add_argument("--trials", required=True, help="JSONL of bug_id/test/generated_assertion")
    p.add_argument("--compile-cmd", default=_cfg(config, "hooks.compile_command"), required="hooks.compile_command" not in config)
    p.add_argument("--test-cmd", default=_cfg(config, "hooks.test_command"), required="hooks.test_command" not in config)
    p.add_argument("--hook-timeout", type=float, default=float(_cfg(config, "hooks.timeout", 300.0)))
    p.add_argument("--no-check-roots", action="store_true")
    p.add_argument("--report", help="write the report JSON here")
    p.set_defaults(func=cmd_bug_eval)

    p = sub.add_parser("export-prompts", help="emit system message + filled prompt per sample")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_prompts)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # --config must be read before defaults are wired into the parser.
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
    try:
        config = _load_config(config_path)
        parser = build_arg_parser(config)
        args = parser.parse_args(argv)
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertGenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
