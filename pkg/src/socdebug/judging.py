"""LLM-as-judge evaluation of trajectories and Socratic teacher turns.

Verdicts are strict: the model must emit the rubric's exact JSON shape,
and the top-level `valid` flag must equal the conjunction of the
category/criterion booleans. A malformed or inconsistent verdict is
re-requested once, then surfaced as an error. Judging never mutates the
artifacts it evaluates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import prompts
from .conversation import Conversation
from .gateway import Gateway, GenerationRequest, ModelConfig
from .model import DebugSample
from .rt import ReasoningTrajectory, render_rt


class JudgeError(Exception):
    """The judge model failed to deliver a usable verdict."""


class VerdictParseError(JudgeError):
    """Verdict text is not the rubric's JSON shape (or is inconsistent)."""


@dataclass(frozen=True)
class RtCategories:
    logical_soundness: bool
    step_construction_and_precision: bool
    formatting_and_focus: bool

    def all_pass(self) -> bool:
        return (
            self.logical_soundness
            and self.step_construction_and_precision
            and self.formatting_and_focus
        )


@dataclass(frozen=True)
class RtVerdict:
    valid: bool
    categories: RtCategories
    comments: str
    feedback: str  # actionable suggestions, or "NONE"

    def __post_init__(self) -> None:
        if self.valid != self.categories.all_pass():
            raise ValueError(
                "verdict conjunction violated: valid must equal the AND of the categories"
            )


@dataclass(frozen=True)
class TurnCriteria:
    prompts_correct_inference: bool
    does_not_state_inference: bool

    def all_pass(self) -> bool:
        return self.prompts_correct_inference and self.does_not_state_inference


@dataclass(frozen=True)
class TurnVerdict:
    valid: bool
    criteria: TurnCriteria
    comments: str
    feedback: str

    def __post_init__(self) -> None:
        if self.valid != self.criteria.all_pass():
            raise ValueError(
                "verdict conjunction violated: valid must equal the AND of the criteria"
            )


def extract_json_object(text: str) -> dict:
    """First well-formed JSON object in the text (judges may wrap JSON in prose)."""
    decoder = json.JSONDecoder()
    idx = text.find("{")
    while idx != -1:
        try:
            value, _ = decoder.raw_decode(text[idx:])
        except json.JSONDecodeError:
            idx = text.find("{", idx + 1)
            continue
        if isinstance(value, dict):
            return value
        idx = text.find("{", idx + 1)
    raise VerdictParseError("no JSON object found in verdict text")


def _checked(payload: dict, keys: tuple[str, ...], where: str) -> None:
    for key in keys:
        if key not in payload:
            raise VerdictParseError(f"missing key: {where}{key}")
    for key in payload:
        if key not in keys:
            raise VerdictParseError(f"unknown key: {where}{key}")


def _bool(payload: dict, key: str, where: str = "") -> bool:
    value = payload[key]
    if not isinstance(value, bool):
        raise VerdictParseError(f"key {where}{key} must be a boolean, got {type(value).__name__}")
    return value


def _text(payload: dict, key: str) -> str:
    value = payload[key]
    if not isinstance(value, str):
        raise VerdictParseError(f"key {key} must be a string, got {type(value).__name__}")
    return value


def parse_verdict(text: str, kind: str) -> RtVerdict | TurnVerdict:
    """Parse judge output into a verdict; `kind` is "rt" or "turn".

    All required keys must be present with the right types, unknown keys
    are rejected, and the conjunction invariant must hold.
    """
    payload = extract_json_object(text)
    try:
        if kind == "rt":
            _checked(payload, ("valid", "categories", "comments", "feedback"), "")
            cats = payload["categories"]
            if not isinstance(cats, dict):
                raise VerdictParseError("key categories must be an object")
            names = ("logical_soundness", "step_construction_and_precision", "formatting_and_focus")
            _checked(cats, names, "categories.")
            return RtVerdict(
                valid=_bool(payload, "valid"),
                categories=RtCategories(*(_bool(cats, n, "categories.") for n in names)),
                comments=_text(payload, "comments"),
                feedback=_text(payload, "feedback"),
            )
        if kind == "turn":
            _checked(payload, ("valid", "criteria_scores", "comments", "feedback"), "")
            crits = payload["criteria_scores"]
            if not isinstance(crits, dict):
                raise VerdictParseError("key criteria_scores must be an object")
            names = ("prompts_correct_inference", "does_not_state_inference")
            _checked(crits, names, "criteria_scores.")
            return TurnVerdict(
                valid=_bool(payload, "valid"),
                criteria=TurnCriteria(*(_bool(crits, n, "criteria_scores.") for n in names)),
                comments=_text(payload, "comments"),
                feedback=_text(payload, "feedback"),
            )
    except ValueError as exc:  # conjunction violation from the dataclass
        raise VerdictParseError(str(exc)) from exc
    raise ValueError(f"kind must be 'rt' or 'turn', got {kind!r}")


_RETRY_NOTE = (
    "\nYour previous answer was not a well-formed verdict. Respond with only "
    "the JSON object in the exact shape given above, with valid equal to the "
    "conjunction of the per-category values."
)


def _judged(gateway: Gateway, prompt: str, config: ModelConfig, tag: str, kind: str):
    response = gateway.generate(
        GenerationRequest(prompt=prompt, config_id=config.config_id, tag=tag)
    )
    try:
        return parse_verdict(response.text, kind)
    except VerdictParseError:
        retry = gateway.generate(
            GenerationRequest(prompt=prompt + _RETRY_NOTE, config_id=config.config_id, tag=f"{tag}:retry")
        )
        try:
            return parse_verdict(retry.text, kind)
        except VerdictParseError as exc:
            raise JudgeError(f"unusable verdict for {tag!r} after re-request: {exc}") from exc


def build_judge_rt_prompt(sample: DebugSample, rt: ReasoningTrajectory) -> str:
    return (
        prompts.JUDGE_RT_TEMPLATE
        + "\nEvaluate the following reasoning trajectory.\n\n"
        + prompts.sample_input_block(sample, bug_tag="bug_code")
        + f"\n<rt>{render_rt(rt)}</rt>\n"
    )


def build_judge_turn_prompt(
    sample: DebugSample,
    rt: ReasoningTrajectory,
    teacher_text: str,
    student_text: str,
    step_label: str,
) -> str:
    return (
        prompts.JUDGE_TURN_TEMPLATE
        + "\nEvaluate the following teacher utterance.\n\n"
        + prompts.sample_input_block(sample, bug_tag="bug_code")
        + f"\n<rt>{render_rt(rt)}</rt>\n"
        + f"<target_step>{step_label}</target_step>\n"
        + f"<teacher_utterance>{teacher_text}</teacher_utterance>\n"
        + f"<student_response>{student_text}</student_response>\n"
    )


def judge_rt(
    gateway: Gateway,
    sample: DebugSample,
    rt: ReasoningTrajectory,
    judge_config: ModelConfig,
) -> RtVerdict:
    """Evaluate one trajectory against the three-category rubric."""
    prompt = build_judge_rt_prompt(sample, rt)
    verdict = _judged(gateway, prompt, judge_config, f"judge-rt:{sample.sample_id}", "rt")
    assert isinstance(verdict, RtVerdict)
    return verdict


def judge_turn(
    gateway: Gateway,
    sample: DebugSample,
    rt: ReasoningTrajectory,
    conversation: Conversation,
    turn_index: int,
    judge_config: ModelConfig,
) -> TurnVerdict:
    """Evaluate one step-aligned Teacher turn (with its Student response)."""
    turn = conversation.turns[turn_index]
    if turn.speaker != "Teacher" or turn.aligned_step is None:
        raise ValueError(f"turn {turn_index} is not a step-aligned Teacher turn")
    student = conversation.turns[turn_index + 1]
    prompt = build_judge_turn_prompt(sample, rt, turn.text, student.text, turn.aligned_step)
    verdict = _judged(
        gateway, prompt, judge_config,
        f"judge-turn:{sample.sample_id}:{turn.aligned_step}", "turn",
    )
    assert isinstance(verdict, TurnVerdict)
    return verdict


@dataclass(frozen=True)
class ConversationValidity:
    conversation_valid: bool
    grounded_fraction: Fraction
    valid_turns: int
    total_turns: int


def conversation_validity(turn_verdicts: list[TurnVerdict]) -> ConversationValidity:
    """Fold per-turn verdicts: valid conversation = every aligned turn grounded.

    Opening turns are never judged, so they must not appear here; an empty
    verdict list is ill-posed.
    """
    if not turn_verdicts:
        raise ValueError("conversation_validity needs at least one aligned-turn verdict")
    valid = sum(1 for v in turn_verdicts if v.valid)
    return ConversationValidity(
        conversation_valid=valid == len(turn_verdicts),
        grounded_fraction=Fraction(valid, len(turn_verdicts)),
        valid_turns=valid,
        total_turns=len(turn_verdicts),
    )
