"""Provider-agnostic generation client with retries, batching, and replay.

Three interchangeable transports sit behind the Gateway:

  LiveTransport    real provider HTTP calls (credentials from env vars)
  ReplayTransport  deterministic playback from a recorded cassette; the
                   whole offline test suite runs on this
  MockTransport    scripted responses/errors for unit tests
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import httpx

from . import providers
from .config import ModelConfig, get_config


class GatewayError(Exception):
    """Base class for generation failures."""


class RequestError(GatewayError):
    """The request itself is invalid (e.g. empty prompt)."""


class AuthError(GatewayError):
    """Missing or rejected credentials; never retried."""


class RateLimitError(GatewayError):
    """Provider rate limit; retried with backoff."""


class TransportFailure(GatewayError):
    """Transient network/server failure; retried with backoff."""


class EmptyResponseError(GatewayError):
    """Provider returned no usable text."""


class ReplayMissError(GatewayError):
    """Replay cassette has no entry for this request."""


@dataclass(frozen=True)
class TokenUsage:
    input_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    config_id: str
    tag: str = ""


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    config_id: str
    tag: str = ""
    reasoning: str | None = None
    usage: TokenUsage = field(default_factory=TokenUsage)
    latency_ms: float = 0.0
    retry_count: int = 0


def request_hash(request: GenerationRequest) -> str:
    """Stable content hash identifying a request in a cassette."""
    blob = json.dumps(
        {"config_id": request.config_id, "prompt": request.prompt},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def send(self, request: GenerationRequest, config: ModelConfig) -> GenerationResponse: ...


# --- Replay -----------------------------------------------------------------


class Cassette:
    """Recorded request/response pairs, one JSON object per line."""

    def __init__(self, entries: dict[str, dict] | None = None):
        self.entries: dict[str, dict] = dict(entries or {})

    @classmethod
    def load(cls, path: str | Path) -> "Cassette":
        entries: dict[str, dict] = {}
        text = Path(path).read_text(encoding="utf-8")
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{i}: malformed cassette line: {exc}") from exc
            entries[record["request_hash"]] = record["response"]
        return cls(entries)

    def save(self, path: str | Path) -> None:
        lines = [
            json.dumps({"request_hash": h, "response": r}, ensure_ascii=False)
            for h, r in self.entries.items()
        ]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    def add(self, request: GenerationRequest, text: str, reasoning: str | None = None) -> None:
        self.entries[request_hash(request)] = {"text": text, "reasoning": reasoning}


class ReplayTransport:
    """Byte-identical playback of recorded responses; needs no network."""

    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayTransport":
        return cls(Cassette.load(path))

    def send(self, request: GenerationRequest, config: ModelConfig) -> GenerationResponse:
        entry = self.cassette.entries.get(request_hash(request))
        if entry is None:
            raise ReplayMissError(
                f"no recorded response for config {request.config_id!r} "
                f"(hash {request_hash(request)[:12]}…, tag {request.tag!r})"
            )
        return GenerationResponse(
            text=entry["text"],
            config_id=request.config_id,
            tag=request.tag,
            reasoning=entry.get("reasoning"),
            usage=TokenUsage(**entry.get("usage", {})),
        )


# --- Mock -------------------------------------------------------------------


class MockTransport:
    """Scripted transport for tests: yields responses or raises exceptions.

    `script` maps a tag (or "" for any) to a list of str | Exception
    consumed in order; str becomes the response text.
    """

    def __init__(self, script: dict[str, list], latency_s: float = 0.0):
        self.script = {k: list(v) for k, v in script.items()}
        self.latency_s = latency_s
        self.calls: list[GenerationRequest] = []
        self._lock = threading.Lock()
        self._active = 0
        self.peak_concurrency = 0

    def send(self, request: GenerationRequest, config: ModelConfig) -> GenerationResponse:
        with self._lock:
            self.calls.append(request)
            self._active += 1
            self.peak_concurrency = max(self.peak_concurrency, self._active)
            queue = self.script.get(request.tag) or self.script.get("")
            item = queue.pop(0) if queue else ""
        try:
            if self.latency_s:
                time.sleep(self.latency_s)
            if isinstance(item, Exception):
                raise item
            return GenerationResponse(text=item, config_id=request.config_id, tag=request.tag)
        finally:
            with self._lock:
                self._active -= 1


# --- Live -------------------------------------------------------------------


class LiveTransport:
    """Real provider calls over HTTP. One shared client, per-call auth."""

    def __init__(self, client: httpx.Client | None = None, timeout_s: float = 120.0):
        self._client = client or httpx.Client(timeout=timeout_s)

    def send(self, request: GenerationRequest, config: ModelConfig) -> GenerationResponse:
        api_key = providers.api_key_for(config.provider)
        if not api_key:
            raise AuthError(
                f"no credentials for provider {config.provider!r}: "
                f"set {providers.ENV_VARS[config.provider]}"
            )
        try:
            data = providers.post(self._client, config, request.prompt, api_key)
        except httpx.HTTPStatusError as exc:
            status = exc.response.status_code
            if status in (401, 403):
                raise AuthError(f"{config.provider} rejected credentials ({status})") from exc
            if status == 429:
                raise RateLimitError(f"{config.provider} rate limit (429)") from exc
            if status >= 500:
                raise TransportFailure(f"{config.provider} server error ({status})") from exc
            raise GatewayError(f"{config.provider} error {status}: {exc.response.text[:200]}") from exc
        except httpx.TransportError as exc:
            raise TransportFailure(f"{config.provider} transport error: {exc}") from exc
        text, reasoning, tokens_in, tokens_out = providers.parse_response(config, data)
        return GenerationResponse(
            text=text,
            config_id=request.config_id,
            tag=request.tag,
            reasoning=reasoning,
            usage=TokenUsage(tokens_in, tokens_out),
        )


# --- Gateway ----------------------------------------------------------------

RETRYABLE = (RateLimitError, TransportFailure)


class Gateway:
    """Shared, thread-safe entry point for all generation in the pipeline."""

    def __init__(
        self,
        transport: Transport,
        *,
        max_attempts: int = 3,
        backoff_base_s: float = 0.5,
        backoff_cap_s: float = 8.0,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.transport = transport
        self.max_attempts = max_attempts
        self.backoff_base_s = backoff_base_s
        self.backoff_cap_s = backoff_cap_s
        self._sleep = sleep
        self._rng = rng or random.Random()

    @classmethod
    def replay(cls, cassette_path: str | Path) -> "Gateway":
        return cls(ReplayTransport.from_file(cassette_path))

    @classmethod
    def live(cls) -> "Gateway":
        return cls(LiveTransport())

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        """Run one request through the transport, retrying transient errors."""
        if not request.prompt.strip():
            raise RequestError("prompt must be non-empty")
        config = get_config(request.config_id)

        last_error: GatewayError | None = None
        started = time.monotonic()
        for attempt in range(self.max_attempts):
            if attempt:
                # Exponential backoff with jitter in [0.5, 1.0) of the step.
                step = min(self.backoff_base_s * 2 ** (attempt - 1), self.backoff_cap_s)
                self._sleep(step * (0.5 + self._rng.random() / 2))
            try:
                response = self.transport.send(request, config)
            except RETRYABLE as exc:
                last_error = exc
                continue
            if not response.text:
                raise EmptyResponseError(
                    f"empty response from {config.provider} for tag {request.tag!r}"
                )
            latency_ms = (time.monotonic() - started) * 1000.0
            return GenerationResponse(
                **{**response.__dict__, "latency_ms": latency_ms, "retry_count": attempt}
            )
        raise last_error  # type: ignore[misc]  # loop always sets it before falling through

    def generate_batch(
        self, requests: list[GenerationRequest], max_in_flight: int
    ) -> list[GenerationResponse | GatewayError]:
        """Run requests concurrently, bounded by `max_in_flight`.

        Output order matches input order; a failed request occupies its
        slot as the raised GatewayError instead of poisoning the batch.
        """
        if max_in_flight < 1:
            raise RequestError("max_in_flight must be >= 1")
        if not requests:
            return []

        def run(req: GenerationRequest) -> GenerationResponse | GatewayError:
            try:
                return self.generate(req)
            except GatewayError as exc:
                return exc

        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            return list(pool.map(run, requests))
