"""Domain types shared across the pipeline, plus sample validation.

All types are immutable values; construction performs only shape checks,
while `validate_sample` reports content-rule violations as data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

FAILURE_KINDS = ("logical", "runtime", "syntax")
PROVENANCES = ("injected", "handwritten")


@dataclass(frozen=True)
class Misconception:
    """A false belief about a programming concept that causes a bug."""

    id: str
    description: str
    related_constructs: frozenset[str] = field(default_factory=frozenset)
    special_case_id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "related_constructs", frozenset(self.related_constructs))


@dataclass(frozen=True)
class TestCase:
    """One unit test: a call expression and an optional expected literal."""

    call_expression: str
    expected_value: str | None
    ordinal: int  # 1-based, unique within a SolutionRecord


@dataclass(frozen=True)
class SolutionRecord:
    """A correct reference solution with its problem and unit tests."""

    problem_id: str
    problem_description: str
    source: str
    unit_tests: tuple[TestCase, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "unit_tests", tuple(self.unit_tests))
        ordinals = [t.ordinal for t in self.unit_tests]
        if len(set(ordinals)) != len(ordinals):
            raise ValueError(f"duplicate test ordinals in solution {self.problem_id!r}")


@dataclass(frozen=True)
class FailedTestDescription:
    """Structured description of how the simplest failing test fails.

    `sentence` is the one-sentence rendering in the fixed convention for
    the failure kind (see execution.render_convention).
    """

    kind: str  # logical | runtime | syntax
    call_expression: str
    sentence: str
    actual: str | None = None
    expected: str | None = None
    error_type: str | None = None
    line: int | None = None


@dataclass(frozen=True)
class DebugSample:
    """One <problem, buggy code, failed test, misconception> input unit."""

    sample_id: str
    problem_description: str
    buggy_source: str
    failed_test: FailedTestDescription
    misconception: Misconception
    provenance: str = "injected"


@dataclass(frozen=True)
class Violation:
    """One broken invariant: the offending field and the rule it breaks."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def validate_sample(sample: DebugSample) -> list[Violation]:
    """Check every DebugSample invariant; an empty list means valid.

    Violations are data, not errors: callers decide whether to reject.
    Pure and deterministic.
    """
    out: list[Violation] = []

    def bad(field_name: str, rule: str) -> None:
        out.append(Violation(field_name, rule))

    if not sample.sample_id.strip():
        bad("sample_id", "must be non-empty")
    if not sample.problem_description.strip():
        bad("problem_description", "must be non-empty")
    if not sample.buggy_source.strip():
        bad("buggy_source", "must be non-empty")
    if sample.provenance not in PROVENANCES:
        bad("provenance", f"must be one of {PROVENANCES}")

    m = sample.misconception
    if not m.id.strip():
        bad("misconception.id", "must be non-empty")
    if not m.description.strip():
        bad("misconception.description", "must be non-empty")
    if not m.related_constructs and m.special_case_id is None:
        bad(
            "misconception.related_constructs",
            "must be non-empty unless special_case_id is present",
        )

    f = sample.failed_test
    if f.kind not in FAILURE_KINDS:
        bad("failed_test.kind", f"must be one of {FAILURE_KINDS}")
    if not f.call_expression.strip():
        bad("failed_test.call_expression", "must be non-empty")
    if not f.sentence.strip():
        bad("failed_test.sentence", "must be non-empty")
    if f.kind == "logical":
        if f.actual is None:
            bad("failed_test.actual", "required when kind=logical")
        if f.expected is None:
            bad("failed_test.expected", "required when kind=logical")
    if f.kind in ("runtime", "syntax") and f.line is None:
        bad("failed_test.line", "required when kind=runtime or kind=syntax")
    if f.kind == "runtime" and f.error_type is None:
        bad("failed_test.error_type", "required when kind=runtime")
    if f.line is not None and f.line < 1:
        bad("failed_test.line", "must be a positive integer")

    return out
