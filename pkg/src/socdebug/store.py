"""JSONL persistence for samples, trajectories, conversations, verdicts,
plus the run manifest.

One JSON object per line, UTF-8, stable key order, a schema_version field
on every record, strict loading (unknown fields rejected by name, with
the line number). Round-tripping any record list is the identity.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from .conversation import Conversation, Turn
from .judging import RtCategories, RtVerdict, TurnCriteria, TurnVerdict
from .model import (
    DebugSample,
    FailedTestDescription,
    Misconception,
    SolutionRecord,
    TestCase,
)
from .rt import ReasoningTrajectory, RtStep

SCHEMA_VERSION = 1


class DatasetError(ValueError):
    """Malformed persisted record; names the line number and field."""

    def __init__(self, message: str, *, line: int | None = None, field_name: str | None = None):
        prefix = f"line {line}: " if line is not None else ""
        middle = f"field {field_name!r}: " if field_name else ""
        super().__init__(f"{prefix}{middle}{message}")
        self.line = line
        self.field_name = field_name


def _check_keys(record: dict, keys: tuple[str, ...], line: int) -> None:
    for key in keys:
        if key not in record:
            raise DatasetError("missing field", line=line, field_name=key)
    for key in record:
        if key not in keys:
            raise DatasetError("unknown field", line=line, field_name=key)


def _check_version(record: dict, line: int) -> None:
    if record.get("schema_version") != SCHEMA_VERSION:
        raise DatasetError(
            f"unsupported schema_version {record.get('schema_version')!r}",
            line=line, field_name="schema_version",
        )


# --- codecs -------------------------------------------------------------------


def _failed_test_record(f: FailedTestDescription) -> dict:
    return {
        "kind": f.kind,
        "call": f.call_expression,
        "actual": f.actual,
        "expected": f.expected,
        "error_type": f.error_type,
        "line": f.line,
        "sentence": f.sentence,
    }


def _failed_test_from(record: Any, line: int) -> FailedTestDescription:
    if not isinstance(record, dict):
        raise DatasetError("must be an object", line=line, field_name="failed_test")
    _check_keys(record, ("kind", "call", "actual", "expected", "error_type", "line", "sentence"), line)
    return FailedTestDescription(
        kind=record["kind"],
        call_expression=record["call"],
        actual=record["actual"],
        expected=record["expected"],
        error_type=record["error_type"],
        line=record["line"],
        sentence=record["sentence"],
    )


def _misconception_record(m: Misconception) -> dict:
    return {
        "id": m.id,
        "description": m.description,
        "related_constructs": sorted(m.related_constructs),
        "special_case_id": m.special_case_id,
    }


def _misconception_from(record: Any, line: int) -> Misconception:
    if not isinstance(record, dict):
        raise DatasetError("must be an object", line=line, field_name="misconception")
    _check_keys(record, ("id", "description", "related_constructs", "special_case_id"), line)
    return Misconception(
        id=record["id"],
        description=record["description"],
        related_constructs=frozenset(record["related_constructs"]),
        special_case_id=record["special_case_id"],
    )


def sample_to_record(sample: DebugSample) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sample_id": sample.sample_id,
        "problem": sample.problem_description,
        "bug_code": sample.buggy_source,
        "failed_test": _failed_test_record(sample.failed_test),
        "misconception": _misconception_record(sample.misconception),
        "provenance": sample.provenance,
    }


def sample_from_record(record: dict, line: int = 0) -> DebugSample:
    _check_version(record, line)
    _check_keys(
        record,
        ("schema_version", "sample_id", "problem", "bug_code", "failed_test",
         "misconception", "provenance"),
        line,
    )
    return DebugSample(
        sample_id=record["sample_id"],
        problem_description=record["problem"],
        buggy_source=record["bug_code"],
        failed_test=_failed_test_from(record["failed_test"], line),
        misconception=_misconception_from(record["misconception"], line),
        provenance=record["provenance"],
    )


def misconception_to_record(m: Misconception) -> dict:
    return {"schema_version": SCHEMA_VERSION, **_misconception_record(m)}


def misconception_from_record(record: dict, line: int = 0) -> Misconception:
    _check_version(record, line)
    _check_keys(record, ("schema_version", "id", "description", "related_constructs",
                         "special_case_id"), line)
    inner = {k: v for k, v in record.items() if k != "schema_version"}
    return _misconception_from(inner, line)


def solution_to_record(s: SolutionRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "problem_id": s.problem_id,
        "problem": s.problem_description,
        "source": s.source,
        "unit_tests": [
            {"call": t.call_expression, "expected": t.expected_value, "ordinal": t.ordinal}
            for t in s.unit_tests
        ],
    }


def solution_from_record(record: dict, line: int = 0) -> SolutionRecord:
    _check_version(record, line)
    _check_keys(record, ("schema_version", "problem_id", "problem", "source", "unit_tests"), line)
    tests = []
    for t in record["unit_tests"]:
        _check_keys(t, ("call", "expected", "ordinal"), line)
        tests.append(TestCase(call_expression=t["call"], expected_value=t["expected"],
                              ordinal=t["ordinal"]))
    return SolutionRecord(
        problem_id=record["problem_id"],
        problem_description=record["problem"],
        source=record["source"],
        unit_tests=tuple(tests),
    )


def trajectory_to_record(rt: ReasoningTrajectory) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sample_id": rt.sample_id,
        "config_id": rt.config_id,
        "prompt_version": rt.prompt_version,
        "steps": [{"label": s.label, "text": s.text} for s in rt.steps],
    }


def trajectory_from_record(record: dict, line: int = 0) -> ReasoningTrajectory:
    _check_version(record, line)
    _check_keys(record, ("schema_version", "sample_id", "config_id", "prompt_version", "steps"), line)
    steps = []
    for s in record["steps"]:
        _check_keys(s, ("label", "text"), line)
        steps.append(RtStep(label=s["label"], text=s["text"]))
    return ReasoningTrajectory(
        steps=tuple(steps),
        sample_id=record["sample_id"],
        config_id=record["config_id"],
        prompt_version=record["prompt_version"],
    )


def conversation_to_record(c: Conversation) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sample_id": c.sample_id,
        "config_id": c.config_id,
        "prompt_version": c.prompt_version,
        "rt_step_count": c.rt_step_count,
        "turns": [
            {"speaker": t.speaker, "text": t.text, "step": t.aligned_step}
            for t in c.turns
        ],
    }


def conversation_from_record(record: dict, line: int = 0) -> Conversation:
    _check_version(record, line)
    _check_keys(record, ("schema_version", "sample_id", "config_id", "prompt_version",
                         "rt_step_count", "turns"), line)
    turns = []
    for t in record["turns"]:
        _check_keys(t, ("speaker", "text", "step"), line)
        turns.append(Turn(speaker=t["speaker"], text=t["text"], aligned_step=t["step"]))
    return Conversation(
        turns=tuple(turns),
        rt_step_count=record["rt_step_count"],
        sample_id=record["sample_id"],
        config_id=record["config_id"],
        prompt_version=record["prompt_version"],
    )


@dataclass(frozen=True)
class StoredRtVerdict:
    sample_id: str
    config_id: str
    verdict: RtVerdict


@dataclass(frozen=True)
class StoredTurnVerdict:
    sample_id: str
    config_id: str
    turn_index: int
    step: str
    verdict: TurnVerdict


def verdict_to_record(v: StoredRtVerdict | StoredTurnVerdict) -> dict:
    if isinstance(v, StoredRtVerdict):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "rt",
            "sample_id": v.sample_id,
            "config_id": v.config_id,
            "valid": v.verdict.valid,
            "categories": {
                "logical_soundness": v.verdict.categories.logical_soundness,
                "step_construction_and_precision":
                    v.verdict.categories.step_construction_and_precision,
                "formatting_and_focus": v.verdict.categories.formatting_and_focus,
            },
            "comments": v.verdict.comments,
            "feedback": v.verdict.feedback,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "turn",
        "sample_id": v.sample_id,
        "config_id": v.config_id,
        "turn_index": v.turn_index,
        "step": v.step,
        "valid": v.verdict.valid,
        "criteria_scores": {
            "prompts_correct_inference": v.verdict.criteria.prompts_correct_inference,
            "does_not_state_inference": v.verdict.criteria.does_not_state_inference,
        },
        "comments": v.verdict.comments,
        "feedback": v.verdict.feedback,
    }


def verdict_from_record(record: dict, line: int = 0) -> StoredRtVerdict | StoredTurnVerdict:
    _check_version(record, line)
    kind = record.get("kind")
    if kind == "rt":
        _check_keys(record, ("schema_version", "kind", "sample_id", "config_id",
                             "valid", "categories", "comments", "feedback"), line)
        cats = record["categories"]
        _check_keys(cats, ("logical_soundness", "step_construction_and_precision",
                           "formatting_and_focus"), line)
        return StoredRtVerdict(
            sample_id=record["sample_id"],
            config_id=record["config_id"],
            verdict=RtVerdict(
                valid=record["valid"],
                categories=RtCategories(**cats),
                comments=record["comments"],
                feedback=record["feedback"],
            ),
        )
    if kind == "turn":
        _check_keys(record, ("schema_version", "kind", "sample_id", "config_id",
                             "turn_index", "step", "valid", "criteria_scores",
                             "comments", "feedback"), line)
        crits = record["criteria_scores"]
        _check_keys(crits, ("prompts_correct_inference", "does_not_state_inference"), line)
        return StoredTurnVerdict(
            sample_id=record["sample_id"],
            config_id=record["config_id"],
            turn_index=record["turn_index"],
            step=record["step"],
            verdict=TurnVerdict(
                valid=record["valid"],
                criteria=TurnCriteria(**crits),
                comments=record["comments"],
                feedback=record["feedback"],
            ),
        )
    raise DatasetError(f"unknown verdict kind {kind!r}", line=line, field_name="kind")


# --- JSONL files ----------------------------------------------------------------

_write_lock = threading.Lock()  # store writes are single-writer by contract


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    lines = [json.dumps(r, ensure_ascii=False) for r in records]
    with _write_lock:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_jsonl(path: str | Path) -> list[tuple[int, dict]]:
    out: list[tuple[int, dict]] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"not valid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(record, dict):
            raise DatasetError("record must be a JSON object", line=line_no)
        out.append((line_no, record))
    return out


def _loader(decode: Callable[[dict, int], Any]) -> Callable[[str | Path], list]:
    def load(path: str | Path) -> list:
        return [decode(record, line_no) for line_no, record in read_jsonl(path)]

    return load


def _saver(encode: Callable[[Any], dict]) -> Callable[[Iterable[Any], str | Path], None]:
    def save(items: Iterable[Any], path: str | Path) -> None:
        write_jsonl(path, (encode(item) for item in items))

    return save


load_dataset = _loader(sample_from_record)
save_dataset = _saver(sample_to_record)
load_misconceptions = _loader(misconception_from_record)
save_misconceptions = _saver(misconception_to_record)
load_solutions = _loader(solution_from_record)
save_solutions = _saver(solution_to_record)
load_trajectories = _loader(trajectory_from_record)
save_trajectories = _saver(trajectory_to_record)
load_conversations = _loader(conversation_from_record)
save_conversations = _saver(conversation_to_record)
load_verdicts = _loader(verdict_from_record)
save_verdicts = _saver(verdict_to_record)


# --- run manifest -----------------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    created_at: str
    config_ids: tuple[str, ...]
    judge_config_id: str
    prompt_versions: dict[str, str]
    artifacts: dict[str, str] = field(default_factory=dict)  # name -> relative path
    sample_ids: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "run_id": self.run_id,
            "created_at": self.created_at,
            "config_ids": list(self.config_ids),
            "judge_config_id": self.judge_config_id,
            "prompt_versions": dict(self.prompt_versions),
            "artifacts": dict(self.artifacts),
            "sample_ids": list(self.sample_ids),
        }

    @classmethod
    def from_record(cls, record: dict) -> "RunManifest":
        _check_version(record, 1)
        _check_keys(record, ("schema_version", "run_id", "created_at", "config_ids",
                             "judge_config_id", "prompt_versions", "artifacts",
                             "sample_ids"), 1)
        return cls(
            run_id=record["run_id"],
            created_at=record["created_at"],
            config_ids=tuple(record["config_ids"]),
            judge_config_id=record["judge_config_id"],
            prompt_versions=dict(record["prompt_versions"]),
            artifacts=dict(record["artifacts"]),
            sample_ids=tuple(record["sample_ids"]),
        )


def save_manifest(manifest: RunManifest, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_record(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def load_manifest(path: str | Path) -> RunManifest:
    return RunManifest.from_record(json.loads(Path(path).read_text(encoding="utf-8")))


def manifest_violations(manifest: RunManifest, root: str | Path) -> list[str]:
    """Referenced artifacts that do not exist under the manifest root."""
    missing = []
    for name, rel in manifest.artifacts.items():
        if not (Path(root) / rel).exists():
            missing.append(f"{name}: {rel}")
    return missing
