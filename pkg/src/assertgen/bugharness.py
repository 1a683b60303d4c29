"""Bug-detection harness: focal detection with extended heuristics,
assertion replacement, trial execution against buggy/fixed revisions, and
four-way outcome classification.

Hook contract: exit 0 = success/pass, exit 1 = compile-error/test-failure,
any other status = HookCrash.  Hooks are command templates with {root},
{test_class}, and {test_method} substitution variables, so real build tools
and desk-scale stub scripts run through the same path.
"""

from __future__ import annotations

import enum
import json
import re
import shlex
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .assertions import AssertionSite, find_assertions
from .corpus import FocalDetection, match_focal_class, match_focal_method
from .errors import HookCrash, HookTimeout, NoFocalFound, SiteNotInTest
from .parser import ClassUnit, MethodUnit
from .tokens import TokenKind


class TrialCategory(enum.Enum):
    NOT_COMPILABLE = "not_compilable"
    FAILS_ON_FIXED = "fails_on_fixed"
    FAILS_ONLY_ON_BUGGY = "fails_only_on_buggy"
    PASSES_ON_BOTH = "passes_on_both"


#: Display names matching the published result table rows.
CATEGORY_DISPLAY = {
    TrialCategory.NOT_COMPILABLE: "not compilable",
    TrialCategory.FAILS_ON_FIXED: "fails on fixed",
    TrialCategory.FAILS_ONLY_ON_BUGGY: "fails only on buggy",
    TrialCategory.PASSES_ON_BOTH: "passes on both",
}


@dataclass(frozen=True)
class BugCase:
    bug_id: str
    buggy_root: str
    fixed_root: str
    trigger_tests: tuple[tuple[str, str], ...]
    diff_changed_methods: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.trigger_tests:
            raise ValueError(f"bug {self.bug_id}: trigger_tests must be non-empty")


def load_manifest(path: str | Path, check_roots: bool = True) -> list[BugCase]:
    """Read a line-delimited bug-case manifest."""
    cases: list[BugCase] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            case = BugCase(
                bug_id=record["bug_id"],
                buggy_root=record["buggy_root"],
                fixed_root=record["fixed_root"],
                trigger_tests=tuple(
                    (t["test_class"], t["test_method"]) for t in record["trigger_tests"]
                ),
                diff_changed_methods=tuple(record.get("diff_changed_methods", ())),
            )
            if check_roots:
                for root in (case.buggy_root, case.fixed_root):
                    if not Path(root).is_dir():
                        raise ValueError(f"{path}:{lineno}: missing root {root}")
            cases.append(case)
    return cases


@dataclass
class ExecutionHooks:
    compile_command: str
    test_command: str
    timeout: float = 300.0

    def __post_init__(self) -> None:
        if "{root}" not in self.compile_command:
            raise ValueError("compile_command must use {root}")
        for var in ("{root}", "{test_class}", "{test_method}"):
            if var not in self.test_command:
                raise ValueError(f"test_command must use {var}")


@dataclass(frozen=True)
class TrialOutcome:
    category: TrialCategory
    generated_assertion: str
    compile_log: str = ""
    run_logs: Mapping[str, str] = field(default_factory=dict)


def _run_hook(template: str, timeout: float, **substitutions: str) -> tuple[bool, str]:
    """Run one hook; returns (passed, output) under the exit-status contract."""
    command = template.format(**substitutions)
    argv = shlex.split(command)
    try:
        proc = subprocess.run(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise HookTimeout(f"hook exceeded {timeout}s: {command}") from exc
    except OSError as exc:
        raise HookCrash(command, -1, str(exc)) from exc
    if proc.returncode == 0:
        return True, proc.stdout
    if proc.returncode == 1:
        return False, proc.stdout
    raise HookCrash(command, proc.returncode, proc.stdout)


def run_trial(
    case: BugCase,
    test: tuple[str, str],
    generated: str,
    hooks: ExecutionHooks,
) -> TrialOutcome:
    """Compile on fixed, run on fixed, then run on buggy; classify.

    Decision chain: compile failure -> not compilable; fixed-run failure ->
    fails on fixed; buggy-run failure -> fails only on buggy; else passes
    on both.
    """
    test_class, test_method = test
    compiled, compile_log = _run_hook(
        hooks.compile_command, hooks.timeout, root=case.fixed_root,
        test_class=test_class, test_method=test_method,
    )
    if not compiled:
        return TrialOutcome(TrialCategory.NOT_COMPILABLE, generated, compile_log)
    passed_fixed, fixed_log = _run_hook(
        hooks.test_command, hooks.timeout, root=case.fixed_root,
        test_class=test_class, test_method=test_method,
    )
    if not passed_fixed:
        return TrialOutcome(
            TrialCategory.FAILS_ON_FIXED, generated, compile_log, {"fixed": fixed_log}
        )
    passed_buggy, buggy_log = _run_hook(
        hooks.test_command, hooks.timeout, root=case.buggy_root,
        test_class=test_class, test_method=test_method,
    )
    category = (
        TrialCategory.PASSES_ON_BOTH if passed_buggy else TrialCategory.FAILS_ONLY_ON_BUGGY
    )
    return TrialOutcome(
        category, generated, compile_log, {"fixed": fixed_log, "buggy": buggy_log}
    )


@dataclass
class BugReport:
    n_trials: int
    per_category: dict[str, int]
    bugs_found: int
    found_bug_ids: list[str]

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "per_category": self.per_category,
            "bugs_found": self.bugs_found,
            "found_bug_ids": self.found_bug_ids,
        }


def aggregate_bugs(trials: Iterable[tuple[str, TrialOutcome]]) -> BugReport:
    """A bug counts as found iff at least one trial fails only on buggy."""
    per_category: Counter = Counter()
    found: set[str] = set()
    all_bugs: set[str] = set()
    n = 0
    for bug_id, outcome in trials:
        n += 1
        all_bugs.add(bug_id)
        per_category[CATEGORY_DISPLAY[outcome.category]] += 1
        if outcome.category is TrialCategory.FAILS_ONLY_ON_BUGGY:
            found.add(bug_id)
    categories = {name: per_category.get(name, 0) for name in CATEGORY_DISPLAY.values()}
    return BugReport(
        n_trials=n,
        per_category=categories,
        bugs_found=len(found),
        found_bug_ids=sorted(found),
    )


def render_bug_table(report: BugReport) -> str:
    lines = [f"{'Result':<22}{'Count':>7}"]
    lines.append("-" * 29)
    for name in CATEGORY_DISPLAY.values():
        lines.append(f"{name:<22}{report.per_category.get(name, 0):>7}")
    lines.append("-" * 29)
    lines.append(f"{'trials':<22}{report.n_trials:>7}")
    lines.append(f"{'bugs found':<22}{report.bugs_found:>7}")
    return "\n".join(lines)


# --- focal detection with extended heuristics -----------------------------

_SUBTOKEN_RE = re.compile(r"\d+|[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+")


def _strip_affix_for_subtokens(name: str) -> str:
    lowered = name.lower()
    if lowered.startswith("test") and len(name) > 4:
        return name[4:]
    if lowered.endswith("test") and len(name) > 4:
        return name[:-4]
    return name


def subtokens(name: str, strip_test_affix: bool = False) -> set[str]:
    """Lowercased camel-case/underscore/digit-boundary subtokens of a name."""
    if strip_test_affix:
        name = _strip_affix_for_subtokens(name)
    return {m.group(0).lower() for m in _SUBTOKEN_RE.finditer(name)}


def _last_call_before_assertion(
    test: MethodUnit, site: AssertionSite | None
) -> str | None:
    """Name of the last method invoked before the (failing) assertion."""
    sites = find_assertions(test)
    if site is None:
        site = sites[-1] if sites else None
    limit = site.token_span[0] if site is not None else len(test.body_tokens)
    toks = test.body_tokens
    last: str | None = None
    for i in range(min(limit, len(toks)) - 1):
        if (
            toks[i].kind == TokenKind.IDENTIFIER
            and toks[i + 1].text == "("
            and (i == 0 or toks[i - 1].text not in ("new", "@"))
            and toks[i].text != test.name
        ):
            last = toks[i].text
    return last


def detect_focal_extended(
    test: MethodUnit,
    candidate_classes: Sequence[ClassUnit],
    diff_changed_methods: Sequence[str] = (),
    manual_override: MethodUnit | None = None,
    failing_site: AssertionSite | None = None,
) -> tuple[MethodUnit, str]:
    """Try the five strategies in order; return (method, strategy tag).

    Strategies: (1) methods2test name/class match, (2) most common name
    subtokens, (3) last method call before the assertion, (4) a method or
    constructor named in the revision diff, (5) the manual override.
    """
    pool: list[MethodUnit] = []
    for cls in candidate_classes:
        pool.extend(cls.methods)

    # 1: Methods2Test pairing against the name-matched focal class.
    key = match_focal_class(
        test.owner_class, test.package, [(c.name, c.package) for c in candidate_classes]
    )
    if key is not None:
        focal_cls = next(c for c in candidate_classes if (c.name, c.package) == key)
        method, detection = match_focal_method(test, list(focal_cls.methods))
        if method is not None and detection is not FocalDetection.NONE:
            return method, "methods2test"

    # 2: largest common-subtoken count, ties broken by declaration order.
    test_subs = subtokens(test.name, strip_test_affix=True)
    best: MethodUnit | None = None
    best_count = 0
    for method in pool:
        if method.is_constructor:
            continue
        common = len(test_subs & subtokens(method.name))
        if common > best_count:
            best, best_count = method, common
    if best is not None:
        return best, "subtoken_overlap"

    # 3: last method call before the assertion.
    name = _last_call_before_assertion(test, failing_site)
    if name is not None:
        for method in pool:
            if method.name == name:
                return method, "last_call"

    # 4: methods (constructors included) changed by the fix.
    by_qualified = {m.qualified_name: m for m in pool}
    plain = {f"{m.owner_class}.{m.name}": m for m in pool}
    for qualified in diff_changed_methods:
        method = by_qualified.get(qualified) or plain.get(qualified)
        if method is not None:
            return method, "diff_changed"

    # 5: manual override.
    if manual_override is not None:
        return manual_override, "manual"

    raise NoFocalFound(f"no focal method found for test {test.name}")


def failing_site_in_test(test: MethodUnit, index: int = -1) -> AssertionSite:
    """The trigger test's failing assertion site (last one by default).

    Raises SiteNotInTest when the test body holds no assertion at all —
    the check then lives in a helper method and the trial is excluded.
    """
    sites = find_assertions(test)
    if not sites:
        raise SiteNotInTest(
            f"test {test.name} contains no assertion; it must live in a helper method"
        )
    return sites[index]


def replace_failing_assertion(
    test_source: str, test: MethodUnit, failing_site: AssertionSite, generated: str
) -> str:
    """Splice the generated assertion over the failing site's byte span.

    All other bytes stay identical.  Raises SiteNotInTest when the span is
    not inside the test method (assertions living in helper methods are
    rejected upstream).
    """
    start_idx, end_idx = failing_site.token_span
    if not (0 <= start_idx < end_idx <= len(test.body_tokens)):
        raise SiteNotInTest(
            f"site span {failing_site.token_span} is not inside test {test.name}"
        )
    first = test.body_tokens[start_idx]
    last = test.body_tokens[end_idx - 1]
    start_off = first.offset
    end_off = last.offset + len(last.text)
    span = test.source_span
    if not (span[0] <= start_off and end_off <= span[1]):
        raise SiteNotInTest(
            f"assertion at bytes {start_off}:{end_off} lies outside test {test.name}"
        )
    return test_source[:start_off] + generated + test_source[end_off:]
