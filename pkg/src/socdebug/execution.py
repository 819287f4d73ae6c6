"""Execution harness: run buggy code against unit tests in a sandbox,
classify outcomes, pick the simplest failing test, and describe it.

Each sample runs in its own interpreter process (see sandbox_runner.py):
the harness feeds a job JSON on stdin and reads a report JSON from
stdout, both UTF-8. Classification is a function of observed behavior
only; reports are immutable.
"""

from __future__ import annotations

import ast
import json
import logging
import math
import re
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import prompts
from .gateway import DESCRIBER_PROFILE, Gateway, GatewayError, GenerationRequest, ModelConfig
from .model import FailedTestDescription, TestCase

logger = logging.getLogger(__name__)

RUNNER_PATH = Path(__file__).resolve().parent / "sandbox_runner.py"
DEFAULT_TIMEOUT_MS = 5000

STATUSES = ("passed", "logical", "runtime", "syntax", "timeout")
# Selection priority per failure kind; timeout ranks last because a hang
# yields the least usable description.
_PRIORITY = {"syntax": 0, "runtime": 1, "logical": 2, "timeout": 3}


class SandboxError(RuntimeError):
    """Sandbox launch/protocol failure; distinct from any test status."""


@dataclass(frozen=True)
class TestOutcome:
    ordinal: int
    status: str
    actual: str | None = None
    error_type: str | None = None
    line: int | None = None
    duration_ms: float = 0.0


@dataclass(frozen=True)
class ExecutionReport:
    outcomes: tuple[TestOutcome, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if any(o.status == "syntax" for o in self.outcomes) and not all(
            o.status == "syntax" for o in self.outcomes
        ):
            raise ValueError("a syntax failure must apply to every test identically")

    @property
    def failing(self) -> list[TestOutcome]:
        return [o for o in self.outcomes if o.status != "passed"]


def run_tests(
    source: str,
    tests: list[TestCase],
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    *,
    runner: Path | str = RUNNER_PATH,
) -> ExecutionReport:
    """Execute all tests against the source in a fresh sandbox process."""
    if timeout_ms <= 0:
        raise ValueError("timeout_ms must be positive")
    job = {
        "source": source,
        "tests": [
            {"call": t.call_expression, "expected": t.expected_value} for t in tests
        ],
        "timeout_ms": timeout_ms,
    }
    # Backstop for anything the child's own per-test alarm cannot catch.
    backstop_s = (timeout_ms / 1000.0) * max(1, len(tests)) + 10.0
    try:
        proc = subprocess.run(
            [sys.executable, str(runner)],
            input=json.dumps(job),
            capture_output=True,
            text=True,
            timeout=backstop_s,
        )
    except subprocess.TimeoutExpired:
        return ExecutionReport(
            outcomes=tuple(
                TestOutcome(ordinal=i, status="timeout")
                for i in range(1, len(tests) + 1)
            )
        )
    except OSError as exc:
        raise SandboxError(f"could not launch sandbox process: {exc}") from exc
    if proc.returncode != 0:
        raise SandboxError(
            f"sandbox exited with {proc.returncode}: {proc.stderr.strip()[:500]}"
        )
    try:
        payload = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise SandboxError(f"sandbox emitted undecodable report: {exc}") from exc
    return ExecutionReport(
        outcomes=tuple(
            TestOutcome(
                ordinal=e["ordinal"],
                status=e["status"],
                actual=e.get("actual"),
                error_type=e.get("error_type"),
                line=e.get("line"),
                duration_ms=e.get("duration_ms", 0.0),
            )
            for e in payload["tests"]
        )
    )


def run_many(
    jobs: list[tuple[str, list[TestCase]]],
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    max_jobs: int = 4,
) -> list[ExecutionReport | SandboxError]:
    """Run independent samples across up to `max_jobs` sandbox processes."""

    def one(job: tuple[str, list[TestCase]]) -> ExecutionReport | SandboxError:
        try:
            return run_tests(job[0], job[1], timeout_ms)
        except SandboxError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=max(1, max_jobs)) as pool:
        return list(pool.map(one, jobs))


def is_buggy(report: ExecutionReport) -> bool:
    """False iff every test passed. Vacuously false for an empty test list."""
    if not report.outcomes:
        logger.warning("is_buggy called with an empty report: vacuous pass")
        return False
    return any(o.status != "passed" for o in report.outcomes)


def _argument_text(call_expression: str) -> str:
    open_paren = call_expression.find("(")
    close_paren = call_expression.rfind(")")
    if 0 <= open_paren < close_paren:
        return call_expression[open_paren + 1 : close_paren]
    return call_expression


def _first_scalar_magnitude(call_expression: str) -> float:
    try:
        node = ast.parse(call_expression.strip(), mode="eval").body
    except (SyntaxError, ValueError):
        return math.inf
    if not isinstance(node, ast.Call):
        return math.inf
    for arg in node.args:
        for sub in ast.walk(arg):
            if isinstance(sub, ast.Constant) and isinstance(sub.value, (int, float)) \
                    and not isinstance(sub.value, bool):
                return abs(float(sub.value))
    return math.inf


def simplicity_key(test: TestCase) -> tuple[int, float, int]:
    """Total order for "simplest inputs": shorter serialized arguments win,
    then smaller first numeric scalar, then lower ordinal."""
    return (
        len(_argument_text(test.call_expression)),
        _first_scalar_magnitude(test.call_expression),
        test.ordinal,
    )


@dataclass(frozen=True)
class SelectedFailure:
    test: TestCase
    outcome: TestOutcome


def select_simplest_failure(
    report: ExecutionReport, tests: list[TestCase]
) -> SelectedFailure:
    """Pick the unique minimum failing test under (priority, simplicity, ordinal).

    Priority: syntax > runtime > logical (> timeout); precondition is that
    the report is buggy.
    """
    by_ordinal = {t.ordinal: t for t in tests}
    failing = report.failing
    if not failing:
        raise ValueError("select_simplest_failure requires at least one failing test")

    def key(outcome: TestOutcome):
        test = by_ordinal[outcome.ordinal]
        length, magnitude, _ = simplicity_key(test)
        return (_PRIORITY[outcome.status], length, magnitude, outcome.ordinal)

    chosen = min(failing, key=key)
    return SelectedFailure(test=by_ordinal[chosen.ordinal], outcome=chosen)


def render_convention(failure: FailedTestDescription) -> str:
    """Byte-exact instantiation of the one-sentence description templates."""
    call = failure.call_expression
    if failure.kind == "logical":
        if failure.actual is None or failure.expected is None:
            raise ValueError("logical description requires actual and expected")
        return (
            f"When called as {call}, the function returns {failure.actual}; "
            f"whereas the expected result is {failure.expected}."
        )
    if failure.kind == "runtime":
        if failure.error_type is None or failure.line is None:
            raise ValueError("runtime description requires error_type and line")
        return (
            f"When called as {call}, the function raises "
            f"{failure.error_type} on line {failure.line}."
        )
    if failure.kind == "syntax":
        if failure.line is None:
            raise ValueError("syntax description requires line")
        return (
            f"When called as {call}, the function produces a SyntaxError "
            f"on line {failure.line}."
        )
    raise ValueError(f"unknown failure kind: {failure.kind!r}")


def describe_selected(selected: SelectedFailure) -> FailedTestDescription:
    """Deterministic structured description of a selected failing test."""
    outcome, test = selected.outcome, selected.test
    kind = "timeout" if outcome.status == "timeout" else outcome.status
    if kind == "timeout":
        # No published convention for hangs; treat as a runtime description.
        fields = dict(
            kind="runtime", call_expression=test.call_expression,
            error_type="Timeout", line=outcome.line or 1,
        )
    elif kind == "logical":
        fields = dict(
            kind="logical", call_expression=test.call_expression,
            actual=outcome.actual, expected=test.expected_value,
        )
    elif kind == "runtime":
        fields = dict(
            kind="runtime", call_expression=test.call_expression,
            error_type=outcome.error_type, line=outcome.line,
        )
    else:
        fields = dict(
            kind="syntax", call_expression=test.call_expression, line=outcome.line,
        )
    sentence = render_convention(FailedTestDescription(sentence="-", **fields))
    return FailedTestDescription(sentence=sentence, **fields)


# --- LLM-backed description ---------------------------------------------------

_LOGICAL_RE = re.compile(
    r"^When called as (.+), the function returns (.+); "
    r"whereas the expected result is (.+)\.$"
)
_RUNTIME_RE = re.compile(
    r"^When called as (.+), the function raises (\w+) on line (\d+)\.$"
)
_SYNTAX_RE = re.compile(
    r"^When called as (.+), the function produces a SyntaxError on line (\d+)\.$"
)


class DescribeFailureError(GatewayError):
    """Provider failure while describing; carries the deterministic fallback."""

    def __init__(self, message: str, fallback: FailedTestDescription):
        super().__init__(message)
        self.fallback = fallback


def parse_convention_sentence(text: str) -> FailedTestDescription | None:
    """Parse a convention-formatted sentence back into structured fields."""
    sentence = text.strip().splitlines()[0].strip() if text.strip() else ""
    m = _SYNTAX_RE.match(sentence)
    if m:
        return FailedTestDescription(
            kind="syntax", call_expression=m.group(1), sentence=sentence,
            line=int(m.group(2)),
        )
    m = _RUNTIME_RE.match(sentence)
    if m:
        return FailedTestDescription(
            kind="runtime", call_expression=m.group(1), sentence=sentence,
            error_type=m.group(2), line=int(m.group(3)),
        )
    m = _LOGICAL_RE.match(sentence)
    if m:
        return FailedTestDescription(
            kind="logical", call_expression=m.group(1), sentence=sentence,
            actual=m.group(2), expected=m.group(3),
        )
    return None


def _execution_results_block(report: ExecutionReport, tests: list[TestCase]) -> str:
    by_ordinal = {t.ordinal: t for t in tests}
    lines = []
    for o in report.outcomes:
        test = by_ordinal[o.ordinal]
        if o.status == "passed":
            lines.append(f"Test {o.ordinal}: {test.call_expression} -> passed")
        elif o.status == "logical":
            lines.append(
                f"Test {o.ordinal}: {test.call_expression} -> output mismatch: "
                f"returned {o.actual}, expected {test.expected_value}"
            )
        elif o.status == "runtime":
            lines.append(
                f"Test {o.ordinal}: {test.call_expression} -> raises "
                f"{o.error_type} on line {o.line}"
            )
        elif o.status == "syntax":
            lines.append(
                f"Test {o.ordinal}: {test.call_expression} -> SyntaxError on line {o.line}"
            )
        else:
            lines.append(f"Test {o.ordinal}: {test.call_expression} -> timed out")
    return "\n".join(lines)


def build_describe_prompt(problem: str, source: str, report: ExecutionReport,
                          tests: list[TestCase]) -> str:
    return (
        prompts.DESCRIBE_TASK
        + "\nNow describe the simplest failing test for the following input.\n\n"
        + f"Problem Description: {problem}\n"
        + f"Buggy Code: {source}\n"
        + f"Execution Results:\n{_execution_results_block(report, tests)}\n"
    )


def _sentence_plausible(
    candidate: FailedTestDescription, report: ExecutionReport, tests: list[TestCase]
) -> bool:
    """The described call must name a test whose observed status matches."""
    by_call = {t.call_expression: t for t in tests}
    test = by_call.get(candidate.call_expression)
    if test is None:
        return False
    outcome = next(o for o in report.outcomes if o.ordinal == test.ordinal)
    return outcome.status == candidate.kind


def describe_failure(
    gateway: Gateway,
    problem: str,
    source: str,
    report: ExecutionReport,
    tests: list[TestCase],
    config: ModelConfig = DESCRIBER_PROFILE,
    *,
    tag: str = "describe",
) -> FailedTestDescription:
    """LLM-authored failure description, validated and parsed back.

    Output that fails validation falls back to the deterministic
    select_simplest_failure + render_convention path; a provider error
    (after retries) raises DescribeFailureError carrying that fallback.
    """
    fallback = describe_selected(select_simplest_failure(report, tests))
    prompt = build_describe_prompt(problem, source, report, tests)
    try:
        response = gateway.generate(
            GenerationRequest(prompt=prompt, config_id=config.config_id, tag=tag)
        )
    except GatewayError as exc:
        raise DescribeFailureError(str(exc), fallback) from exc
    candidate = parse_convention_sentence(response.text)
    if candidate is None or not _sentence_plausible(candidate, report, tests):
        logger.info("describer output failed validation; using deterministic description")
        return fallback
    return candidate
