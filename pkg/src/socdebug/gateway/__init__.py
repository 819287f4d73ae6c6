"""LLM gateway: configuration registry, transports, retrying client."""

from .client import (
    AuthError,
    Cassette,
    EmptyResponseError,
    Gateway,
    GatewayError,
    GenerationRequest,
    GenerationResponse,
    LiveTransport,
    MockTransport,
    RateLimitError,
    ReplayMissError,
    ReplayTransport,
    RequestError,
    TokenUsage,
    TransportFailure,
    request_hash,
)
from .config import (
    DESCRIBER_PROFILE,
    JUDGE_PROFILE,
    PROFILES,
    REGISTRY,
    ConfigError,
    ModelConfig,
    get_config,
    registered_ids,
    resolve_config,
)

__all__ = [
    "AuthError",
    "Cassette",
    "ConfigError",
    "DESCRIBER_PROFILE",
    "EmptyResponseError",
    "Gateway",
    "GatewayError",
    "GenerationRequest",
    "GenerationResponse",
    "JUDGE_PROFILE",
    "LiveTransport",
    "MockTransport",
    "ModelConfig",
    "PROFILES",
    "REGISTRY",
    "RateLimitError",
    "ReplayMissError",
    "ReplayTransport",
    "RequestError",
    "TokenUsage",
    "TransportFailure",
    "get_config",
    "registered_ids",
    "request_hash",
    "resolve_config",
]
