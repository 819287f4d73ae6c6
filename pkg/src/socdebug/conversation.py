"""Socratic conversations: prompt building, transcript parsing, generation.

Accepted conversations are Teacher-first, strictly alternating, and align
every trajectory step to exactly one Teacher turn. The opening exchange
(Teacher inquiry + Student failure report) carries no step alignment.

Generation asks the model to end each stepped Teacher utterance with a
bracketed label like "[A.3]"; parsing reads those annotations when
present and falls back to positional assignment otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import prompts
from .gateway import Gateway, GenerationRequest, GenerationResponse, ModelConfig
from .model import DebugSample
from .rt import ReasoningTrajectory, render_rt

SPEAKERS = ("Teacher", "Student")
SPEAKER_RE = re.compile(r"^([A-Z][A-Za-z]*): ?(.*)$")
ANNOTATION_RE = re.compile(r"\s*\[A\.(\d+)\]\s*$")


class ConversationError(Exception):
    """Base class for conversation failures."""


class ConversationParseError(ConversationError):
    """Transcript violates the speaker/alternation/alignment rules."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConversationGenerationError(ConversationError):
    """The model failed to produce a valid conversation after a re-prompt."""


@dataclass(frozen=True)
class Turn:
    speaker: str
    text: str  # display text, step annotation already stripped
    aligned_step: str | None = None  # "A.k" on stepped Teacher turns

    def __post_init__(self) -> None:
        if self.speaker not in SPEAKERS:
            raise ValueError(f"unknown speaker: {self.speaker!r}")
        if not self.text.strip():
            raise ValueError(f"{self.speaker} turn has empty text")
        if self.text != self.text.rstrip():
            raise ValueError("turn text has trailing whitespace")
        for ln in self.text.splitlines()[1:]:
            if SPEAKER_RE.match(ln):
                raise ValueError("turn text embeds a speaker label line")


@dataclass(frozen=True)
class Conversation:
    turns: tuple[Turn, ...]
    rt_step_count: int
    sample_id: str = ""
    config_id: str = ""
    prompt_version: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "turns", tuple(self.turns))
        if not self.turns:
            raise ValueError("conversation has no turns")
        if self.turns[0].speaker != "Teacher":
            raise ValueError("conversation must begin with a Teacher turn")
        for i in range(1, len(self.turns)):
            if self.turns[i].speaker == self.turns[i - 1].speaker:
                raise ValueError(
                    f"speakers must strictly alternate: consecutive "
                    f"{self.turns[i].speaker} turns at position {i + 1}"
                )
        if len(self.turns) % 2 != 0:
            raise ValueError("conversation must end with a Student response")
        if self.turns[0].aligned_step is not None:
            raise ValueError("the opening Teacher turn must not be step-aligned")
        for t in self.turns:
            if t.speaker == "Student" and t.aligned_step is not None:
                raise ValueError("Student turns must not be step-aligned")

        expected = [f"A.{k}" for k in range(1, self.rt_step_count + 1)]
        aligned = [t.aligned_step for t in self.turns if t.aligned_step is not None]
        for label in expected:
            n = aligned.count(label)
            if n == 0:
                raise ValueError(f"alignment error: no Teacher turn aligned to {label}")
            if n > 1:
                raise ValueError(f"alignment error: {label} aligned to {n} Teacher turns")
        for label in aligned:
            if label not in expected:
                raise ValueError(f"alignment error: {label} is not a step of this trajectory")

    @property
    def teacher_turns(self) -> list[tuple[int, Turn]]:
        """(index, turn) for every Teacher turn, opener included."""
        return [(i, t) for i, t in enumerate(self.turns) if t.speaker == "Teacher"]

    @property
    def aligned_teacher_turns(self) -> list[tuple[int, Turn]]:
        return [(i, t) for i, t in self.teacher_turns if t.aligned_step is not None]


def _split_turns(text: str) -> list[tuple[str, str, int]]:
    """Split a transcript into (speaker, body, first_line_no) triples."""
    turns: list[tuple[str, list[str], int]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        m = SPEAKER_RE.match(line)
        if m:
            speaker = m.group(1)
            if speaker not in SPEAKERS:
                raise ConversationParseError(f"unknown speaker label {speaker!r}", line_no)
            turns.append((speaker, [m.group(2)], line_no))
        elif turns:
            turns[-1][1].append(line)
        elif line.strip():
            raise ConversationParseError("text before the first speaker label", line_no)
    if not turns:
        raise ConversationParseError("no speaker turns found")
    return [(s, "\n".join(body).rstrip(), ln) for s, body, ln in turns]


def parse_conversation(text: str, rt: ReasoningTrajectory) -> Conversation:
    """Parse a transcript and align Teacher turns to the trajectory steps.

    If any Teacher turn ends with a bracketed step annotation, annotations
    are authoritative (and required on every stepped Teacher turn);
    otherwise Teacher turn k+1 is positionally assigned A.k after the
    opener, which requires exactly n+1 Teacher turns.
    """
    split = _split_turns(text)
    if split[0][0] != "Teacher":
        raise ConversationParseError(
            "conversation must begin with a Teacher turn", split[0][2]
        )

    annotated = any(
        s == "Teacher" and ANNOTATION_RE.search(body) for s, body, _ in split
    )
    n = len(rt.steps)
    turns: list[Turn] = []
    teacher_seen = 0
    for speaker, body, line_no in split:
        if speaker != "Teacher":
            turns.append(Turn(speaker=speaker, text=body))
            continue
        teacher_seen += 1
        aligned: str | None = None
        m = ANNOTATION_RE.search(body)
        if annotated:
            if m:
                aligned = f"A.{int(m.group(1))}"
                body = body[: m.start()].rstrip()
            if teacher_seen == 1 and aligned is not None:
                raise ConversationParseError(
                    "the opening Teacher turn must not carry a step annotation", line_no
                )
            if teacher_seen > 1 and aligned is None:
                raise ConversationParseError(
                    f"Teacher turn {teacher_seen} carries no step annotation", line_no
                )
        else:
            if teacher_seen > 1:
                aligned = f"A.{teacher_seen - 1}"
        turns.append(Turn(speaker=speaker, text=body, aligned_step=aligned))

    if not annotated and teacher_seen != n + 1:
        raise ConversationParseError(
            f"positional alignment needs {n + 1} Teacher turns for {n} steps, "
            f"found {teacher_seen}"
        )
    try:
        return Conversation(turns=tuple(turns), rt_step_count=n)
    except ValueError as exc:
        raise ConversationParseError(str(exc)) from exc


def render_conversation(conversation: Conversation, *, annotations: bool = True) -> str:
    """Render back to transcript text; `annotations=False` gives plain display text."""
    lines = []
    for t in conversation.turns:
        suffix = f" [{t.aligned_step}]" if annotations and t.aligned_step else ""
        lines.append(f"{t.speaker}: {t.text}{suffix}")
    return "\n".join(lines)


def build_sc_prompt(sample: DebugSample, rt: ReasoningTrajectory) -> str:
    """Compose the 1-shot conversation prompt with the sample and trajectory."""
    return (
        prompts.SC_TEMPLATE
        + "\nNow write the Socratic conversation for the following input. "
        + "Output only the conversation turns.\n\n"
        + prompts.sample_input_block(sample, bug_tag="buggy_code")
        + f"\n<rt>{render_rt(rt)}</rt>\n"
    )


def generate_conversation_with_response(
    gateway: Gateway,
    sample: DebugSample,
    rt: ReasoningTrajectory,
    config: ModelConfig,
) -> tuple[Conversation, GenerationResponse]:
    """generate_conversation, but also returns the raw response."""
    prompt = build_sc_prompt(sample, rt)
    response = gateway.generate(
        GenerationRequest(prompt=prompt, config_id=config.config_id, tag=f"sc:{sample.sample_id}")
    )
    try:
        parsed = parse_conversation(response.text, rt)
    except ConversationParseError:
        response = gateway.generate(
            GenerationRequest(
                prompt=prompt + "\n" + prompts.SC_FORMAT_REMINDER,
                config_id=config.config_id,
                tag=f"sc:{sample.sample_id}:retry",
            )
        )
        try:
            parsed = parse_conversation(response.text, rt)
        except ConversationParseError as exc:
            raise ConversationGenerationError(
                f"invalid conversation for sample {sample.sample_id!r} after re-prompt: {exc}"
            ) from exc
    conversation = replace(
        parsed,
        sample_id=sample.sample_id,
        config_id=config.config_id,
        prompt_version=prompts.PROMPT_VERSIONS["sc"],
    )
    return conversation, response


def generate_conversation(
    gateway: Gateway,
    sample: DebugSample,
    rt: ReasoningTrajectory,
    config: ModelConfig,
) -> Conversation:
    """Generate, parse, and align a conversation for one trajectory.

    One automatic re-prompt with a format reminder on parse or alignment
    failure; a second failure raises ConversationGenerationError.
    """
    return generate_conversation_with_response(gateway, sample, rt, config)[0]
