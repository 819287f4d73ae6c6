"""Provider wire formats: payload builders, response parsers, HTTP plumbing.

Only prompt text and a ModelConfig cross this boundary; everything
provider-specific stays here. Credentials come from environment variables
(OPENAI_API_KEY, ANTHROPIC_API_KEY, GEMINI_API_KEY), never from files.
"""

from __future__ import annotations

import os
from typing import Any

import httpx

from .config import ModelConfig

ENV_VARS = {
    "openai": "OPENAI_API_KEY",
    "anthropic": "ANTHROPIC_API_KEY",
    "google": "GEMINI_API_KEY",
}

_OPENAI_URL = "https://api.openai.com/v1/responses"
_ANTHROPIC_URL = "https://api.anthropic.com/v1/messages"
_GOOGLE_URL = "https://generativelanguage.googleapis.com/v1beta/models/{model}:generateContent"


def api_key_for(provider: str) -> str | None:
    return os.environ.get(ENV_VARS[provider])


def build_payload(config: ModelConfig, prompt: str) -> dict[str, Any]:
    """Build the provider-specific request body for one generation."""
    if config.provider == "openai":
        return {
            "model": config.model_name,
            "input": prompt,
            "max_output_tokens": config.max_output_tokens,
            "reasoning": {"effort": config.reasoning_level},
            "text": {"verbosity": config.verbosity},
        }
    if config.provider == "anthropic":
        payload: dict[str, Any] = {
            "model": config.model_name,
            "max_tokens": config.max_output_tokens,
            "temperature": config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        if config.reasoning_enabled:
            payload["thinking"] = {
                "type": "enabled",
                "budget_tokens": config.thinking_budget_tokens,
            }
        return payload
    if config.provider == "google":
        generation: dict[str, Any] = {
            "temperature": config.temperature,
            "maxOutputTokens": config.max_output_tokens,
        }
        if config.reasoning_enabled:
            generation["thinkingConfig"] = {
                "thinkingBudget": config.thinking_budget_tokens,
                "includeThoughts": config.include_thoughts,
            }
        return {
            "contents": [{"role": "user", "parts": [{"text": prompt}]}],
            "generationConfig": generation,
        }
    raise ValueError(f"unknown provider: {config.provider!r}")


def parse_response(config: ModelConfig, data: dict[str, Any]) -> tuple[str, str | None, int, int]:
    """Extract (text, reasoning_trace, input_tokens, output_tokens)."""
    if config.provider == "openai":
        texts: list[str] = []
        reasoning: list[str] = []
        for item in data.get("output", []):
            if item.get("type") == "message":
                for part in item.get("content", []):
                    if part.get("type") == "output_text":
                        texts.append(part.get("text", ""))
            elif item.get("type") == "reasoning":
                for part in item.get("summary", []):
                    if part.get("text"):
                        reasoning.append(part["text"])
        usage = data.get("usage", {})
        return (
            "".join(texts),
            "\n".join(reasoning) or None,
            usage.get("input_tokens", 0),
            usage.get("output_tokens", 0),
        )
    if config.provider == "anthropic":
        texts = []
        reasoning = []
        for block in data.get("content", []):
            if block.get("type") == "text":
                texts.append(block.get("text", ""))
            elif block.get("type") == "thinking":
                reasoning.append(block.get("thinking", ""))
        usage = data.get("usage", {})
        return (
            "".join(texts),
            "\n".join(reasoning) or None,
            usage.get("input_tokens", 0),
            usage.get("output_tokens", 0),
        )
    if config.provider == "google":
        texts = []
        reasoning = []
        candidates = data.get("candidates", [])
        parts = candidates[0].get("content", {}).get("parts", []) if candidates else []
        for part in parts:
            if part.get("thought"):
                reasoning.append(part.get("text", ""))
            else:
                texts.append(part.get("text", ""))
        usage = data.get("usageMetadata", {})
        return (
            "".join(texts),
            "\n".join(reasoning) or None,
            usage.get("promptTokenCount", 0),
            usage.get("candidatesTokenCount", 0),
        )
    raise ValueError(f"unknown provider: {config.provider!r}")


def request_url(config: ModelConfig) -> str:
    if config.provider == "openai":
        return _OPENAI_URL
    if config.provider == "anthropic":
        return _ANTHROPIC_URL
    return _GOOGLE_URL.format(model=config.model_name)


def request_headers(config: ModelConfig, api_key: str) -> dict[str, str]:
    if config.provider == "openai":
        return {"Authorization": f"Bearer {api_key}"}
    if config.provider == "anthropic":
        return {"x-api-key": api_key, "anthropic-version": "2023-06-01"}
    return {"x-goog-api-key": api_key}


def post(
    client: httpx.Client, config: ModelConfig, prompt: str, api_key: str
) -> dict[str, Any]:
    """POST one generation request; returns the decoded JSON body."""
    response = client.post(
        request_url(config),
        json=build_payload(config, prompt),
        headers=request_headers(config, api_key),
    )
    response.raise_for_status()
    return response.json()
