"""HTTP API backing the instructor tool.

Endpoints: POST /generate/rt, POST /generate/conversation, POST /judge/rt,
POST /judge/turn, GET /models, GET /health. Single-sample generation is
synchronous (latency is provider-bound); every request is also recorded
as a job with monotone status transitions, inspectable at /jobs/{job_id}.
Errors use a uniform {code, message, detail} shape. With a replay-mode
gateway the whole service runs offline and identical requests yield
identical responses.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import prompts
from .conversation import (
    Conversation,
    ConversationError,
    Turn,
    generate_conversation_with_response,
    render_conversation,
)
from .execution import parse_convention_sentence
from .gateway import ConfigError, Gateway, GatewayError, get_config, registered_ids
from .judging import JudgeError, judge_rt, judge_turn
from .model import DebugSample, FailedTestDescription, Misconception, validate_sample
from .rt import ReasoningTrajectory, RtError, RtStep, generate_rt_with_response

JOB_STATUSES = ("queued", "running", "done", "failed")
_TRANSITIONS = {"queued": {"running"}, "running": {"done", "failed"}}


class ServiceError(Exception):
    def __init__(self, code: str, message: str, detail: str = "", status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail
        self.status = status


@dataclass
class ApiJob:
    job_id: str
    kind: str  # rt | conversation | judge
    status: str = "queued"
    result_ref: str | None = None

    def transition(self, status: str) -> None:
        if status not in _TRANSITIONS.get(self.status, set()):
            raise ValueError(f"illegal job transition {self.status} -> {status}")
        self.status = status


class JobStore:
    """Thread-safe in-memory job registry."""

    def __init__(self) -> None:
        self._jobs: dict[str, ApiJob] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    def create(self, kind: str) -> ApiJob:
        with self._lock:
            job = ApiJob(job_id=f"job-{next(self._counter)}", kind=kind)
            self._jobs[job.job_id] = job
            return job

    def get(self, job_id: str) -> ApiJob | None:
        with self._lock:
            return self._jobs.get(job_id)


# --- request bodies -----------------------------------------------------------


class SamplePayload(BaseModel):
    problem: str
    bug_code: str
    failed_test: str  # convention-formatted one-sentence description
    misconception: str
    sample_id: str = "interactive"


class GenerateRtBody(BaseModel):
    sample: SamplePayload
    config_id: str


class StepPayload(BaseModel):
    label: str
    text: str


class GenerateConversationBody(BaseModel):
    sample: SamplePayload
    rt: list[StepPayload]
    config_id: str


class JudgeRtBody(BaseModel):
    sample: SamplePayload
    rt: list[StepPayload]
    judge_config_id: str = "judge-claude-sonnet-4-5-thinking"


class TurnPayload(BaseModel):
    speaker: str
    text: str
    step: str | None = None


class JudgeTurnBody(BaseModel):
    sample: SamplePayload
    rt: list[StepPayload]
    turns: list[TurnPayload]
    turn_index: int
    judge_config_id: str = "judge-claude-sonnet-4-5-thinking"


def _to_sample(payload: SamplePayload) -> DebugSample:
    description = parse_convention_sentence(payload.failed_test)
    if description is None:
        raise ServiceError(
            code="invalid_failed_test",
            message="failed_test must follow one of the three description conventions",
            detail=(
                'e.g. "When called as f(1), the function returns 2; whereas the '
                'expected result is 3." / "... raises IndexError on line 5." / '
                '"... produces a SyntaxError on line 5."'
            ),
            status=422,
        )
    sample = DebugSample(
        sample_id=payload.sample_id,
        problem_description=payload.problem,
        buggy_source=payload.bug_code,
        failed_test=description,
        # Interactive inputs carry no construct annotation; "unspecified"
        # satisfies the non-empty rule without claiming registry membership.
        misconception=Misconception(
            id=f"{payload.sample_id}-misconception",
            description=payload.misconception,
            related_constructs=frozenset({"unspecified"}),
        ),
    )
    violations = validate_sample(sample)
    if violations:
        raise ServiceError(
            code="invalid_sample",
            message="sample failed validation",
            detail="; ".join(str(v) for v in violations),
            status=422,
        )
    return sample


def _to_rt(steps: list[StepPayload], sample_id: str) -> ReasoningTrajectory:
    try:
        return ReasoningTrajectory(
            steps=tuple(RtStep(label=s.label, text=s.text) for s in steps),
            sample_id=sample_id,
        )
    except ValueError as exc:
        raise ServiceError("invalid_rt", "trajectory failed validation", str(exc), 422)


def _to_conversation(turns: list[TurnPayload], n_steps: int) -> Conversation:
    try:
        return Conversation(
            turns=tuple(
                Turn(speaker=t.speaker, text=t.text, aligned_step=t.step) for t in turns
            ),
            rt_step_count=n_steps,
        )
    except ValueError as exc:
        raise ServiceError("invalid_conversation", "conversation failed validation", str(exc), 422)


def _config(config_id: str):
    try:
        return get_config(config_id)
    except ConfigError as exc:
        raise ServiceError("unknown_config", str(exc), status=422) from exc


def create_app(gateway: Gateway) -> FastAPI:
    app = FastAPI(title="socdebug service")
    jobs = JobStore()

    @app.exception_handler(ServiceError)
    async def service_error(_req: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def run_job(kind: str, fn):
        # Bookkeeping only: response payloads carry no job id, so identical
        # replay-mode requests yield byte-identical responses.
        job = jobs.create(kind)
        job.transition("running")
        try:
            result = fn()
        except (GatewayError, RtError, ConversationError, JudgeError) as exc:
            job.transition("failed")
            raise ServiceError(
                code=f"{kind}_failed", message=str(exc), status=502
            ) from exc
        job.transition("done")
        job.result_ref = kind
        return result

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/models")
    def models():
        return {"models": registered_ids()}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise ServiceError("unknown_job", f"no job {job_id!r}", status=404)
        return {"job_id": job.job_id, "kind": job.kind, "status": job.status,
                "result_ref": job.result_ref}

    @app.post("/generate/rt")
    def generate_rt_endpoint(body: GenerateRtBody):
        sample = _to_sample(body.sample)
        config = _config(body.config_id)

        def work():
            trajectory, response = generate_rt_with_response(gateway, sample, config)
            return {
                "sample_id": sample.sample_id,
                "config_id": config.config_id,
                "prompt_version": trajectory.prompt_version,
                "steps": [
                    {"label": s.label, "text": s.text, "cites": sorted(s.cited_labels)}
                    for s in trajectory.steps
                ],
                "reasoning_trace": response.reasoning,
            }

        return run_job("rt", work)

    @app.post("/generate/conversation")
    def generate_conversation_endpoint(body: GenerateConversationBody):
        sample = _to_sample(body.sample)
        config = _config(body.config_id)
        rt = _to_rt(body.rt, sample.sample_id)

        def work():
            conversation, response = generate_conversation_with_response(
                gateway, sample, rt, config
            )
            return {
                "sample_id": sample.sample_id,
                "config_id": config.config_id,
                "prompt_version": conversation.prompt_version,
                "turns": [
                    {"speaker": t.speaker, "text": t.text, "step": t.aligned_step}
                    for t in conversation.turns
                ],
                "plain_transcript": render_conversation(conversation, annotations=False),
                "reasoning_trace": response.reasoning,
            }

        return run_job("conversation", work)

    @app.post("/judge/rt")
    def judge_rt_endpoint(body: JudgeRtBody):
        sample = _to_sample(body.sample)
        judge_config = _config(body.judge_config_id)
        rt = _to_rt(body.rt, sample.sample_id)

        def work():
            verdict = judge_rt(gateway, sample, rt, judge_config)
            return {
                "sample_id": sample.sample_id,
                "config_id": judge_config.config_id,
                "prompt_version": prompts.PROMPT_VERSIONS["judge_rt"],
                "valid": verdict.valid,
                "categories": dict(verdict.categories.__dict__),
                "comments": verdict.comments,
                "feedback": verdict.feedback,
            }

        return run_job("judge", work)

    @app.post("/judge/turn")
    def judge_turn_endpoint(body: JudgeTurnBody):
        sample = _to_sample(body.sample)
        judge_config = _config(body.judge_config_id)
        rt = _to_rt(body.rt, sample.sample_id)
        conversation = _to_conversation(body.turns, len(rt.steps))
        if not (0 <= body.turn_index < len(conversation.turns)):
            raise ServiceError("invalid_turn_index", "turn_index out of range", status=422)
        turn = conversation.turns[body.turn_index]
        if turn.speaker != "Teacher" or turn.aligned_step is None:
            raise ServiceError(
                "invalid_turn_index",
                "turn_index must point at a step-aligned Teacher turn",
                status=422,
            )

        def work():
            verdict = judge_turn(
                gateway, sample, rt, conversation, body.turn_index, judge_config
            )
            return {
                "sample_id": sample.sample_id,
                "config_id": judge_config.config_id,
                "prompt_version": prompts.PROMPT_VERSIONS["judge_turn"],
                "step": turn.aligned_step,
                "valid": verdict.valid,
                "criteria_scores": dict(verdict.criteria.__dict__),
                "comments": verdict.comments,
                "feedback": verdict.feedback,
            }

        return run_job("judge", work)

    return app


def serve(bind: str, gateway: Gateway) -> None:
    """Run the service with uvicorn; `bind` is host:port."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(gateway), host=host or "127.0.0.1", port=int(port))
