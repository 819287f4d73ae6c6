"""Reasoning trajectories: prompt building, parsing, rendering, generation.

A trajectory is an ordered list of deductive steps labeled A.1..A.n with
no gaps; step text may cite strictly earlier steps with parenthesized
tokens like "(A.2)". The final step states the contradiction with the
misconception; judging its semantic validity is the judge module's job.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import prompts
from .gateway import Gateway, GenerationRequest, GenerationResponse, ModelConfig
from .model import DebugSample, validate_sample

STEP_RE = re.compile(r"^Step A\.(\d+): ?(.*)$")
_PAREN_RE = re.compile(r"\(([^()]*)\)")
_LABEL_IN_PAREN_RE = re.compile(r"\bA\.(\d+)\b")
_LABEL_RE = re.compile(r"^A\.[1-9]\d*$")


class RtError(Exception):
    """Base class for trajectory failures."""


class RtParseError(RtError):
    """Output text does not follow the step grammar."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class RtGenerationError(RtError):
    """The model failed to produce a parseable trajectory after a re-prompt."""


def extract_citations(text: str) -> frozenset[str]:
    """Labels cited in parenthesized tokens, e.g. "... 2.0 (A.3, A.1)"."""
    found: set[str] = set()
    for group in _PAREN_RE.findall(text):
        for num in _LABEL_IN_PAREN_RE.findall(group):
            found.add(f"A.{int(num)}")
    return frozenset(found)


@dataclass(frozen=True)
class RtStep:
    label: str  # "A.k", k >= 1
    text: str

    def __post_init__(self) -> None:
        if not _LABEL_RE.match(self.label):
            raise ValueError(f"malformed step label: {self.label!r}")
        if not self.text.strip():
            raise ValueError(f"step {self.label} has empty text")
        # These two rules keep parse(render(...)) an exact inverse.
        if self.text != self.text.rstrip():
            raise ValueError(f"step {self.label} text has trailing whitespace")
        for ln in self.text.splitlines()[1:]:
            if STEP_RE.match(ln):
                raise ValueError(f"step {self.label} text embeds a step label line")

    @property
    def number(self) -> int:
        return int(self.label.split(".")[1])

    @property
    def cited_labels(self) -> frozenset[str]:
        return extract_citations(self.text)


@dataclass(frozen=True)
class ReasoningTrajectory:
    steps: tuple[RtStep, ...]
    sample_id: str = ""
    config_id: str = ""
    prompt_version: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if len(self.steps) < 2:
            raise ValueError("a trajectory needs at least 2 steps")
        for i, step in enumerate(self.steps, start=1):
            if step.number != i:
                raise ValueError(
                    f"labels must be A.1..A.n with no gaps: expected A.{i}, found {step.label}"
                )
            for cited in step.cited_labels:
                if int(cited.split(".")[1]) >= i:
                    raise ValueError(
                        f"step {step.label} cites {cited}, which is not an earlier step"
                    )

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.steps]


def parse_rt(text: str) -> ReasoningTrajectory:
    """Parse "Step A.k: ..." lines into a trajectory (without metadata).

    Lines that do not open a new step attach to the preceding step's body;
    non-blank text before the first label is an error, as are gaps,
    duplicates, or a sequence not starting at A.1.
    """
    raw: list[tuple[int, int, list[str]]] = []  # (number, line_no, body lines)
    for line_no, line in enumerate(text.splitlines(), start=1):
        m = STEP_RE.match(line)
        if m:
            raw.append((int(m.group(1)), line_no, [m.group(2)]))
        elif raw:
            raw[-1][2].append(line)
        elif line.strip():
            raise RtParseError("missing step label before text", line_no)
    if not raw:
        raise RtParseError("no 'Step A.k:' lines found")

    steps: list[RtStep] = []
    for number, line_no, body in raw:
        expected = len(steps) + 1
        if number != expected:
            raise RtParseError(
                f"expected Step A.{expected}, found Step A.{number}", line_no
            )
        text_block = "\n".join(body).rstrip()
        if not text_block.strip():
            raise RtParseError(f"Step A.{number} has empty text", line_no)
        steps.append(RtStep(label=f"A.{number}", text=text_block))

    try:
        return ReasoningTrajectory(steps=tuple(steps))
    except ValueError as exc:
        raise RtParseError(str(exc)) from exc


def render_rt(rt: ReasoningTrajectory) -> str:
    """Inverse of parse_rt on the step content: one "Step A.k:" line group per step."""
    return "\n".join(f"Step {s.label}: {s.text}" for s in rt.steps)


def build_rt_prompt(sample: DebugSample) -> str:
    """Compose the 2-shot trajectory prompt with the sample's input block."""
    return (
        prompts.RT_TEMPLATE
        + "\nNow write the reasoning trajectory for the following input. "
        + "Output only the steps.\n\n"
        + prompts.sample_input_block(sample, bug_tag="bug_code")
        + "\n"
    )


def generate_rt_with_response(
    gateway: Gateway, sample: DebugSample, config: ModelConfig
) -> tuple[ReasoningTrajectory, "GenerationResponse"]:
    """generate_rt, but also returns the raw response (for reasoning traces)."""
    violations = validate_sample(sample)
    if violations:
        raise ValueError(f"invalid sample {sample.sample_id!r}: " + "; ".join(map(str, violations)))

    prompt = build_rt_prompt(sample)
    response = gateway.generate(
        GenerationRequest(prompt=prompt, config_id=config.config_id, tag=f"rt:{sample.sample_id}")
    )
    try:
        parsed = parse_rt(response.text)
    except RtParseError:
        response = gateway.generate(
            GenerationRequest(
                prompt=prompt + "\n" + prompts.RT_FORMAT_REMINDER,
                config_id=config.config_id,
                tag=f"rt:{sample.sample_id}:retry",
            )
        )
        try:
            parsed = parse_rt(response.text)
        except RtParseError as exc:
            raise RtGenerationError(
                f"unparseable trajectory for sample {sample.sample_id!r} after re-prompt: {exc}"
            ) from exc
    trajectory = replace(
        parsed,
        sample_id=sample.sample_id,
        config_id=config.config_id,
        prompt_version=prompts.PROMPT_VERSIONS["rt"],
    )
    return trajectory, response


def generate_rt(gateway: Gateway, sample: DebugSample, config: ModelConfig) -> ReasoningTrajectory:
    """Generate, parse, and validate a trajectory for one sample.

    A parse failure triggers one automatic re-prompt with a format
    reminder appended; a second failure is surfaced as RtGenerationError.
    """
    return generate_rt_with_response(gateway, sample, config)[0]
