"""Unified command-line entry point.

Subcommands cover the whole pipeline: extract-constructs, pair,
run-tests, describe-failure, gen-rt, gen-conversation, judge, benchmark,
stats, agreement, serve. Exit codes: 0 success, 1 data/provider errors,
2 usage errors. `--replay <cassette>` switches any LLM-backed command
offline.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import benchmark as bench
from . import constructs, execution, store
from .conversation import generate_conversation, render_conversation
from .gateway import (
    DESCRIBER_PROFILE,
    Gateway,
    GatewayError,
    get_config,
    registered_ids,
)
from .judging import judge_rt, judge_turn
from .model import TestCase
from .pairing import CandidateSolution, pair, pairing_report
from .rt import generate_rt
from .store import DatasetError


class DataError(Exception):
    """User-facing data problem: bad file, bad id, provider failure."""


def _gateway(args: argparse.Namespace) -> Gateway:
    if getattr(args, "replay", None):
        return Gateway.replay(args.replay)
    return Gateway.live()


def _add_replay(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--replay", metavar="CASSETTE",
                        help="serve recorded responses from this cassette (offline)")


def _load_execution_jobs(path: str) -> list[dict]:
    """Jobs for run-tests/describe-failure: {"id", "source", "tests", "problem"?}."""
    jobs = []
    for line_no, record in store.read_jsonl(path):
        for key in ("id", "source", "tests"):
            if key not in record:
                raise DatasetError(f"{path}:{line_no}: job record missing {key!r}")
        jobs.append(record)
    return jobs


def _job_tests(record: dict) -> list[TestCase]:
    return [
        TestCase(call_expression=t["call"], expected_value=t.get("expected"), ordinal=i)
        for i, t in enumerate(record["tests"], start=1)
    ]


# --- subcommand handlers --------------------------------------------------------


def cmd_extract_constructs(args: argparse.Namespace) -> int:
    source = Path(args.source).read_text(encoding="utf-8")
    found = sorted(constructs.extract_constructs(source))
    if args.json:
        print(json.dumps({"constructs": found}, ensure_ascii=False))
    else:
        print("\n".join(found))
    return 0


def cmd_pair(args: argparse.Namespace) -> int:
    misconceptions = store.load_misconceptions(args.misconceptions)
    solutions = store.load_solutions(args.solutions)
    needed_patterns = {m.special_case_id for m in misconceptions if m.special_case_id}
    candidates = [
        CandidateSolution(
            solution_id=s.problem_id,
            constructs=constructs.extract_constructs(s.source),
            special_cases=frozenset(
                p for p in needed_patterns if constructs.matches_pattern(s.source, p)
            ),
        )
        for s in solutions
    ]
    result = pair(misconceptions, candidates, args.count)
    store.write_jsonl(
        args.out,
        (
            {
                "misconception_id": p.misconception_id,
                "solution_id": p.solution_id,
                "overlap_score": p.overlap_score,
                "matched_constructs": sorted(p.matched_constructs),
                "matched_by_special_case": p.matched_by_special_case,
            }
            for p in result.pairings
        ),
    )
    if args.trace:
        store.write_jsonl(
            args.trace,
            (
                {
                    "visit": e.visit,
                    "misconception_id": e.misconception_id,
                    "candidates": [
                        {"solution_id": c.solution_id, "ordinal": c.ordinal,
                         "score": c.score, "special_case": c.special_case}
                        for c in e.candidates
                    ],
                    "chosen_solution_id": e.chosen_solution_id,
                }
                for e in result.trace
            ),
        )
    counts = pairing_report(result.pairings, [m.id for m in misconceptions])
    print(f"wrote {len(result.pairings)} pairings to {args.out}"
          + (" (candidates exhausted)" if result.exhausted else ""))
    for mid, count in counts.items():
        print(f"  {mid}: {count}")
    return 0


def cmd_run_tests(args: argparse.Namespace) -> int:
    jobs = _load_execution_jobs(args.samples)
    reports = execution.run_many(
        [(j["source"], _job_tests(j)) for j in jobs],
        timeout_ms=args.timeout_ms,
        max_jobs=args.jobs,
    )
    records = []
    for job, report in zip(jobs, reports):
        if isinstance(report, execution.SandboxError):
            raise DataError(f"sandbox failure for job {job['id']!r}: {report}")
        records.append(
            {
                "id": job["id"],
                "buggy": execution.is_buggy(report),
                "tests": [
                    {"ordinal": o.ordinal, "status": o.status, "actual": o.actual,
                     "error_type": o.error_type, "line": o.line,
                     "duration_ms": o.duration_ms}
                    for o in report.outcomes
                ],
            }
        )
    store.write_jsonl(args.out, records)
    print(f"wrote {len(records)} reports to {args.out}")
    return 0


def cmd_describe_failure(args: argparse.Namespace) -> int:
    jobs = _load_execution_jobs(args.samples)
    gateway = None if args.deterministic else _gateway(args)
    records = []
    for job in jobs:
        tests = _job_tests(job)
        report = execution.run_tests(job["source"], tests, timeout_ms=args.timeout_ms)
        if not execution.is_buggy(report):
            records.append({"id": job["id"], "failed_test": None})
            continue
        if gateway is None:
            description = execution.describe_selected(
                execution.select_simplest_failure(report, tests)
            )
        else:
            description = execution.describe_failure(
                gateway, job.get("problem", ""), job["source"], report, tests,
                tag=f"describe:{job['id']}",
            )
        records.append(
            {
                "id": job["id"],
                "failed_test": {
                    "kind": description.kind,
                    "call": description.call_expression,
                    "actual": description.actual,
                    "expected": description.expected,
                    "error_type": description.error_type,
                    "line": description.line,
                    "sentence": description.sentence,
                },
            }
        )
    store.write_jsonl(args.out, records)
    print(f"wrote {len(records)} descriptions to {args.out}")
    return 0


def cmd_gen_rt(args: argparse.Namespace) -> int:
    samples = store.load_dataset(args.samples)
    gateway = _gateway(args)
    config = get_config(args.model)
    trajectories = [generate_rt(gateway, s, config) for s in samples]
    store.save_trajectories(trajectories, args.out)
    print(f"wrote {len(trajectories)} trajectories to {args.out}")
    return 0


def cmd_gen_conversation(args: argparse.Namespace) -> int:
    samples = {s.sample_id: s for s in store.load_dataset(args.samples)}
    trajectories = store.load_trajectories(args.trajectories)
    gateway = _gateway(args)
    config = get_config(args.model)
    conversations = []
    for rt in trajectories:
        if rt.sample_id not in samples:
            raise DataError(f"trajectory references unknown sample {rt.sample_id!r}")
        conversations.append(
            generate_conversation(gateway, samples[rt.sample_id], rt, config)
        )
    store.save_conversations(conversations, args.out)
    print(f"wrote {len(conversations)} conversations to {args.out}")
    if args.render == "plain":
        for c in conversations:
            print(f"\n# {c.sample_id} ({c.config_id})")
            print(render_conversation(c, annotations=False))
    return 0


def cmd_judge(args: argparse.Namespace) -> int:
    samples = {s.sample_id: s for s in store.load_dataset(args.samples)}
    trajectories = {t.sample_id: t for t in store.load_trajectories(args.trajectories)}
    conversations = store.load_conversations(args.conversations)
    gateway = _gateway(args)
    judge_config = get_config(args.judge)
    verdicts: list[store.StoredRtVerdict | store.StoredTurnVerdict] = []
    for sample_id, rt in trajectories.items():
        if sample_id not in samples:
            raise DataError(f"trajectory references unknown sample {sample_id!r}")
        verdicts.append(
            store.StoredRtVerdict(
                sample_id=sample_id,
                config_id=rt.config_id,
                verdict=judge_rt(gateway, samples[sample_id], rt, judge_config),
            )
        )
    for conversation in conversations:
        sample = samples.get(conversation.sample_id)
        rt = trajectories.get(conversation.sample_id)
        if sample is None or rt is None:
            raise DataError(
                f"conversation references unknown sample {conversation.sample_id!r}"
            )
        for index, turn in conversation.aligned_teacher_turns:
            verdicts.append(
                store.StoredTurnVerdict(
                    sample_id=conversation.sample_id,
                    config_id=conversation.config_id,
                    turn_index=index,
                    step=turn.aligned_step or "",
                    verdict=judge_turn(gateway, sample, rt, conversation, index, judge_config),
                )
            )
    store.save_verdicts(verdicts, args.out)
    print(f"wrote {len(verdicts)} verdicts to {args.out}")
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    samples = store.load_dataset(args.corpus)
    gateway = _gateway(args)
    config_ids = [c.strip() for c in args.configs.split(",") if c.strip()]
    for config_id in [*config_ids, args.judge]:
        get_config(config_id)  # fail fast on unknown ids
    report, manifest = bench.run_benchmark(
        gateway,
        samples,
        config_ids,
        args.judge,
        run_id=args.run_id,
        out_dir=args.artifacts_dir,
        max_in_flight=args.max_in_flight,
    )
    Path(args.out).write_text(
        json.dumps(report.to_json(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    store.save_manifest(manifest, args.manifest)
    print(bench.render_report_table(report.rows))
    if report.failures:
        print(f"failures: {report.failures}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    stats = bench.dataset_stats(args.store)
    if args.json:
        print(json.dumps(stats.to_json(), ensure_ascii=False))
    else:
        for key, value in stats.to_json().items():
            print(f"{key}: {value}")
    return 0


def _verdict_item_id(v: store.StoredRtVerdict | store.StoredTurnVerdict) -> str:
    if isinstance(v, store.StoredRtVerdict):
        return f"{v.sample_id}:{v.config_id}"
    return f"{v.sample_id}:{v.config_id}:{v.turn_index}"


def cmd_agreement(args: argparse.Namespace) -> int:
    judge_labels = {
        _verdict_item_id(v): v.verdict.valid for v in store.load_verdicts(args.judge)
    }
    human_labels = {}
    for line_no, record in store.read_jsonl(args.human):
        if "item_id" not in record or "valid" not in record:
            raise DatasetError("human label record needs item_id and valid",
                               line=line_no)
        human_labels[record["item_id"]] = bool(record["valid"])
    result = bench.agreement(judge_labels, human_labels)
    print(f"agreement: {result.rate}% ({result.matches}/{result.n})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(args.bind, _gateway(args))
    return 0


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socdebug",
        description="Reasoning-trajectory and Socratic-conversation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-constructs", help="list constructs found in a source file")
    p.add_argument("--source", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_extract_constructs)

    p = sub.add_parser("pair", help="pair misconceptions with solutions by construct overlap")
    p.add_argument("--misconceptions", required=True)
    p.add_argument("--solutions", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.set_defaults(fn=cmd_pair)

    p = sub.add_parser("run-tests", help="run buggy sources against unit tests in a sandbox")
    p.add_argument("--samples", required=True,
                   help="JSONL of {id, source, tests:[{call, expected?}]}")
    p.add_argument("--out", required=True)
    p.add_argument("--timeout-ms", type=int, default=execution.DEFAULT_TIMEOUT_MS)
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(fn=cmd_run_tests)

    p = sub.add_parser("describe-failure", help="describe each sample's simplest failing test")
    p.add_argument("--samples", required=True,
                   help="JSONL of {id, source, tests, problem?}")
    p.add_argument("--out", required=True)
    p.add_argument("--timeout-ms", type=int, default=execution.DEFAULT_TIMEOUT_MS)
    p.add_argument("--deterministic", action="store_true",
                   help="skip the describer model; use the convention renderer")
    _add_replay(p)
    p.set_defaults(fn=cmd_describe_failure)

    p = sub.add_parser("gen-rt", help="generate reasoning trajectories")
    p.add_argument("--samples", required=True)
    p.add_argument("--model", required=True, help="config id, e.g. gpt-5-medium")
    p.add_argument("--out", required=True)
    _add_replay(p)
    p.set_defaults(fn=cmd_gen_rt)

    p = sub.add_parser("gen-conversation", help="generate Socratic conversations")
    p.add_argument("--samples", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--render", choices=["plain"],
                   help="also print transcripts with step annotations stripped")
    _add_replay(p)
    p.set_defaults(fn=cmd_gen_conversation)

    p = sub.add_parser("judge", help="judge trajectories and teacher turns")
    p.add_argument("--samples", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--conversations", required=True)
    p.add_argument("--judge", default="judge-claude-sonnet-4-5-thinking")
    p.add_argument("--out", required=True)
    _add_replay(p)
    p.set_defaults(fn=cmd_judge)

    p = sub.add_parser("benchmark", help="run the full pipeline across configurations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--configs", required=True, help="comma-separated config ids")
    p.add_argument("--judge", default="judge-claude-sonnet-4-5-thinking")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--artifacts-dir")
    p.add_argument("--run-id", default="bench")
    p.add_argument("--max-in-flight", type=int, default=4)
    _add_replay(p)
    p.set_defaults(fn=cmd_benchmark)

    p = sub.add_parser("stats", help="corpus statistics from a store directory")
    p.add_argument("--store", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("agreement", help="judge vs human agreement rate")
    p.add_argument("--judge", required=True, help="verdicts.jsonl")
    p.add_argument("--human", required=True, help="JSONL of {item_id, valid}")
    p.set_defaults(fn=cmd_agreement)

    p = sub.add_parser("serve", help="run the HTTP API service")
    p.add_argument("--bind", default="127.0.0.1:8000")
    _add_replay(p)
    p.set_defaults(fn=cmd_serve)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (DataError, DatasetError, GatewayError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
