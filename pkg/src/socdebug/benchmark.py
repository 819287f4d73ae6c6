"""Benchmark orchestration and aggregate reporting.

Runs the full pipeline (trajectory -> conversation -> judge) across model
configurations, then folds verdicts into one row per configuration:
total step count, % valid trajectories, % valid conversations (all turns
grounded), and % grounded turns. Percentages are rounded half-up to one
decimal. Generation failures count as invalid with the sample-level
denominator held fixed.
"""

from __future__ import annotations

import datetime as _dt
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

from . import prompts, store
from .conversation import Conversation, generate_conversation
from .gateway import Gateway, GatewayError, get_config
from .judging import (
    ConversationValidity,
    JudgeError,
    conversation_validity,
    judge_rt,
    judge_turn,
)
from .model import DebugSample
from .rt import ReasoningTrajectory, RtError, generate_rt

logger = logging.getLogger(__name__)


def percent(numerator: int, denominator: int) -> float:
    """numerator/denominator as a percentage, rounded half-up to one decimal."""
    if denominator == 0:
        return 0.0
    exact = Fraction(numerator * 100, denominator)
    quotient = Decimal(exact.numerator) / Decimal(exact.denominator)
    return float(quotient.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class BenchmarkRow:
    config_id: str
    reasoning: bool
    total_rt_steps: int
    pct_valid_rts: float
    pct_valid_convs: float
    pct_grounded_turns: float

    def __post_init__(self) -> None:
        for name in ("pct_valid_rts", "pct_valid_convs", "pct_grounded_turns"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{name} out of range: {value}")


def aggregate(
    config_id: str,
    rt_verdicts: list[store.StoredRtVerdict],
    conversation_validities: list[ConversationValidity],
    trajectories: list[ReasoningTrajectory],
    *,
    total_samples: int | None = None,
) -> BenchmarkRow:
    """Fold one configuration's verdicts into a benchmark row.

    `total_samples` pins the sample-level denominator when some samples
    failed to generate; the turn-level denominator is the judged turns.
    """
    denominator = total_samples if total_samples is not None else len(rt_verdicts)
    if len(rt_verdicts) > denominator or len(conversation_validities) > denominator:
        raise ValueError("more verdicts than samples: incomplete coverage bookkeeping")
    valid_rts = sum(1 for v in rt_verdicts if v.verdict.valid)
    valid_convs = sum(1 for c in conversation_validities if c.conversation_valid)
    valid_turns = sum(c.valid_turns for c in conversation_validities)
    total_turns = sum(c.total_turns for c in conversation_validities)
    return BenchmarkRow(
        config_id=config_id,
        reasoning=get_config(config_id).reasoning_enabled,
        total_rt_steps=sum(len(rt.steps) for rt in trajectories),
        pct_valid_rts=percent(valid_rts, denominator),
        pct_valid_convs=percent(valid_convs, denominator),
        pct_grounded_turns=percent(valid_turns, total_turns),
    )


@dataclass(frozen=True)
class AgreementReport:
    rate: float  # percentage, one decimal
    matches: int
    n: int


def agreement(judge_labels: dict[str, bool], human_labels: dict[str, bool]) -> AgreementReport:
    """Agreement rate between judge and human over the same item ids."""
    if set(judge_labels) != set(human_labels):
        only_judge = sorted(set(judge_labels) - set(human_labels))[:5]
        only_human = sorted(set(human_labels) - set(judge_labels))[:5]
        raise ValueError(
            f"label sets must cover the same items "
            f"(judge-only: {only_judge}, human-only: {only_human})"
        )
    if not judge_labels:
        raise ValueError("empty label sets")
    matches = sum(1 for k, v in judge_labels.items() if human_labels[k] == v)
    return AgreementReport(rate=percent(matches, len(judge_labels)), matches=matches,
                           n=len(judge_labels))


@dataclass(frozen=True)
class DatasetStats:
    problems: int
    solutions: int
    misconceptions: int
    triplets: int
    handwritten_rts: int
    handwritten_rt_steps: int
    llm_configs: int
    llm_rt_steps: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


HANDWRITTEN_CONFIG_ID = "handwritten"


def dataset_stats(root: str | Path) -> DatasetStats:
    """Corpus-level counts from a store directory's JSONL files."""
    root = Path(root)

    def has(name: str) -> bool:
        return (root / name).exists()

    solutions = store.load_solutions(root / "solutions.jsonl") if has("solutions.jsonl") else []
    misconceptions = (
        store.load_misconceptions(root / "misconceptions.jsonl")
        if has("misconceptions.jsonl") else []
    )
    samples = store.load_dataset(root / "samples.jsonl") if has("samples.jsonl") else []
    trajectories = (
        store.load_trajectories(root / "trajectories.jsonl")
        if has("trajectories.jsonl") else []
    )
    handwritten = [t for t in trajectories if t.config_id == HANDWRITTEN_CONFIG_ID]
    generated = [t for t in trajectories if t.config_id != HANDWRITTEN_CONFIG_ID]
    return DatasetStats(
        problems=len({s.problem_id for s in solutions}),
        solutions=len(solutions),
        misconceptions=len(misconceptions),
        triplets=len(samples),
        handwritten_rts=len(handwritten),
        handwritten_rt_steps=sum(len(t.steps) for t in handwritten),
        llm_configs=len({t.config_id for t in generated}),
        llm_rt_steps=sum(len(t.steps) for t in generated),
    )


# --- full pipeline -------------------------------------------------------------


@dataclass(frozen=True)
class SampleRun:
    sample_id: str
    trajectory: ReasoningTrajectory | None
    conversation: Conversation | None
    rt_verdict: store.StoredRtVerdict | None
    turn_verdicts: tuple[store.StoredTurnVerdict, ...]
    error: str | None = None


def run_sample(
    gateway: Gateway,
    sample: DebugSample,
    config_id: str,
    judge_config_id: str,
) -> SampleRun:
    """One sample through generate -> converse -> judge; failures recorded."""
    config = get_config(config_id)
    judge_config = get_config(judge_config_id)
    try:
        trajectory = generate_rt(gateway, sample, config)
        conversation = generate_conversation(gateway, sample, trajectory, config)
        rt_verdict = store.StoredRtVerdict(
            sample_id=sample.sample_id,
            config_id=config_id,
            verdict=judge_rt(gateway, sample, trajectory, judge_config),
        )
        turn_verdicts = []
        for index, turn in conversation.aligned_teacher_turns:
            verdict = judge_turn(gateway, sample, trajectory, conversation, index, judge_config)
            turn_verdicts.append(
                store.StoredTurnVerdict(
                    sample_id=sample.sample_id,
                    config_id=config_id,
                    turn_index=index,
                    step=turn.aligned_step or "",
                    verdict=verdict,
                )
            )
        return SampleRun(sample.sample_id, trajectory, conversation, rt_verdict,
                         tuple(turn_verdicts))
    except (GatewayError, RtError, JudgeError, ValueError) as exc:
        logger.warning("sample %s failed under %s: %s", sample.sample_id, config_id, exc)
        return SampleRun(sample.sample_id, None, None, None, (), error=str(exc))


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchmarkRow, ...]
    failures: dict[str, list[str]]  # config_id -> failed sample ids

    def to_json(self) -> dict:
        return {
            "rows": [dict(r.__dict__) for r in self.rows],
            "failures": {k: list(v) for k, v in self.failures.items()},
        }


def render_report_table(rows: tuple[BenchmarkRow, ...] | list[BenchmarkRow]) -> str:
    """Aligned text table mirroring the benchmark columns."""
    headers = ("Model Config", "Reasoning", "RT Steps", "% Valid RTs",
               "% Valid Convs", "% Grounded Turns")
    body = [
        (
            r.config_id,
            "yes" if r.reasoning else "no",
            f"{r.total_rt_steps:,}",
            f"{r.pct_valid_rts:.1f}%",
            f"{r.pct_valid_convs:.1f}%",
            f"{r.pct_grounded_turns:.1f}%",
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(headers), line(["-" * w for w in widths]),
                      *(line(row) for row in body)])


def run_benchmark(
    gateway: Gateway,
    samples: list[DebugSample],
    config_ids: list[str],
    judge_config_id: str,
    *,
    run_id: str,
    out_dir: str | Path | None = None,
    max_in_flight: int = 4,
) -> tuple[BenchmarkReport, store.RunManifest]:
    """Benchmark every configuration over the corpus; emit report + manifest.

    Per-sample failures are recorded, not fatal; they count as invalid
    with the denominator fixed at the corpus size.
    """
    rows: list[BenchmarkRow] = []
    failures: dict[str, list[str]] = {}
    all_trajectories: list[ReasoningTrajectory] = []
    all_conversations: list[Conversation] = []
    all_verdicts: list[store.StoredRtVerdict | store.StoredTurnVerdict] = []

    for config_id in config_ids:
        with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
            runs = list(
                pool.map(lambda s: run_sample(gateway, s, config_id, judge_config_id), samples)
            )
        failed = [r.sample_id for r in runs if r.error]
        if failed:
            failures[config_id] = failed
        ok = [r for r in runs if not r.error]
        validities = [
            conversation_validity([tv.verdict for tv in r.turn_verdicts]) for r in ok
        ]
        rows.append(
            aggregate(
                config_id,
                [r.rt_verdict for r in ok if r.rt_verdict],
                validities,
                [r.trajectory for r in ok if r.trajectory],
                total_samples=len(samples),
            )
        )
        all_trajectories.extend(r.trajectory for r in ok if r.trajectory)
        all_conversations.extend(r.conversation for r in ok if r.conversation)
        all_verdicts.extend(r.rt_verdict for r in ok if r.rt_verdict)
        all_verdicts.extend(tv for r in ok for tv in r.turn_verdicts)

    report = BenchmarkReport(rows=tuple(rows), failures=failures)
    artifacts: dict[str, str] = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        store.save_trajectories(all_trajectories, out / "trajectories.jsonl")
        store.save_conversations(all_conversations, out / "conversations.jsonl")
        store.save_verdicts(all_verdicts, out / "verdicts.jsonl")
        artifacts = {
            "trajectories": "trajectories.jsonl",
            "conversations": "conversations.jsonl",
            "verdicts": "verdicts.jsonl",
        }
    manifest = store.RunManifest(
        run_id=run_id,
        created_at=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        config_ids=tuple(config_ids),
        judge_config_id=judge_config_id,
        prompt_versions=dict(prompts.PROMPT_VERSIONS),
        artifacts=artifacts,
        sample_ids=tuple(s.sample_id for s in samples),
    )
    return report, manifest
