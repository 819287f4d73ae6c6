"""Model configuration registry and resolution.

Fourteen named generation configurations across three provider families,
plus two task profiles (judge, failure describer). Family rules:

  openai (gpt-5 / gpt-5-mini): effort-based reasoning (minimal/low/medium;
      high is not registered), max_output_tokens 4000, verbosity medium,
      no temperature knob.
  anthropic (claude-sonnet-4-5 / claude-haiku-4-5): standard mode at
      temperature 0.1 / max 4000; extended thinking forces temperature 1.0,
      adds a 2000-token thinking budget on top of the 4000 output budget.
  google (gemini-2.5-flash / gemini-2.5-pro): temperature 0.1 / max 4000;
      thinking mode adds 2000 output tokens and a 2000-token thinking
      budget with thoughts included.
"""

from __future__ import annotations

from dataclasses import dataclass

PROVIDERS = ("openai", "anthropic", "google")
EFFORT_LEVELS = ("minimal", "low", "medium")

OPENAI_MODELS = ("gpt-5", "gpt-5-mini")
ANTHROPIC_MODELS = ("claude-sonnet-4-5", "claude-haiku-4-5")
GOOGLE_MODELS = ("gemini-2.5-flash", "gemini-2.5-pro")


class ConfigError(ValueError):
    """Unknown model family or an unsupported parameter combination."""


@dataclass(frozen=True)
class ModelConfig:
    config_id: str
    provider: str
    model_name: str
    reasoning_enabled: bool
    max_output_tokens: int
    reasoning_level: str | None = None  # openai effort levels only
    temperature: float | None = None
    thinking_budget_tokens: int | None = None
    include_thoughts: bool = False  # google thinking mode surfaces traces
    verbosity: str | None = None  # openai text verbosity


def _openai(model: str, effort: str) -> ModelConfig:
    return ModelConfig(
        config_id=f"{model}-{effort}",
        provider="openai",
        model_name=model,
        reasoning_enabled=True,
        reasoning_level=effort,
        temperature=None,
        max_output_tokens=4000,
        verbosity="medium",
    )


def _anthropic(model: str, thinking: bool) -> ModelConfig:
    if thinking:
        return ModelConfig(
            config_id=f"{model}-thinking",
            provider="anthropic",
            model_name=model,
            reasoning_enabled=True,
            temperature=1.0,
            max_output_tokens=6000,
            thinking_budget_tokens=2000,
        )
    return ModelConfig(
        config_id=model,
        provider="anthropic",
        model_name=model,
        reasoning_enabled=False,
        temperature=0.1,
        max_output_tokens=4000,
    )


def _google(model: str, thinking: bool) -> ModelConfig:
    if thinking:
        return ModelConfig(
            config_id=f"{model}-thinking",
            provider="google",
            model_name=model,
            reasoning_enabled=True,
            temperature=0.1,
            max_output_tokens=6000,
            thinking_budget_tokens=2000,
            include_thoughts=True,
        )
    return ModelConfig(
        config_id=model,
        provider="google",
        model_name=model,
        reasoning_enabled=False,
        temperature=0.1,
        max_output_tokens=4000,
    )


# The 14 registered generation configurations, in registry order.
REGISTRY: tuple[ModelConfig, ...] = tuple(
    [_openai(m, e) for m in OPENAI_MODELS for e in EFFORT_LEVELS]
    + [_anthropic(m, t) for m in ANTHROPIC_MODELS for t in (False, True)]
    + [_google(m, t) for m in GOOGLE_MODELS for t in (False, True)]
)

# Task profiles. The judge runs claude-sonnet-4-5 with extended thinking at
# temperature 1.0 / max 8000; the failure describer runs it without
# reasoning at temperature 0.1 / max 4000.
JUDGE_PROFILE = ModelConfig(
    config_id="judge-claude-sonnet-4-5-thinking",
    provider="anthropic",
    model_name="claude-sonnet-4-5",
    reasoning_enabled=True,
    temperature=1.0,
    max_output_tokens=8000,
    thinking_budget_tokens=2000,
)
DESCRIBER_PROFILE = ModelConfig(
    config_id="failure-describer-claude-sonnet-4-5",
    provider="anthropic",
    model_name="claude-sonnet-4-5",
    reasoning_enabled=False,
    temperature=0.1,
    max_output_tokens=4000,
)

PROFILES: dict[str, ModelConfig] = {
    "judge": JUDGE_PROFILE,
    "describer": DESCRIBER_PROFILE,
}

_BY_ID: dict[str, ModelConfig] = {c.config_id: c for c in REGISTRY}
_BY_ID.update({p.config_id: p for p in PROFILES.values()})


def registered_ids() -> list[str]:
    """The 14 generation config ids, in registry order."""
    return [c.config_id for c in REGISTRY]


def get_config(config_id: str) -> ModelConfig:
    """Look up a registered configuration or task profile by id."""
    try:
        return _BY_ID[config_id]
    except KeyError:
        raise ConfigError(f"unknown config id: {config_id!r}") from None


def resolve_config(
    model_name: str,
    *,
    effort: str | None = None,
    thinking: bool | None = None,
    profile: str | None = None,
    temperature: float | None = None,
    max_output_tokens: int | None = None,
) -> ModelConfig:
    """Resolve a model name plus reasoning flags to a full configuration.

    With no overrides this returns the registered configuration for the
    family; `temperature`/`max_output_tokens` overrides produce a custom
    config that still has to pass the family validity rules. `profile`
    selects a task profile ("judge", "describer") and takes precedence.
    """
    if profile is not None:
        if profile not in PROFILES:
            raise ConfigError(f"unknown profile: {profile!r}")
        cfg = PROFILES[profile]
        if model_name != cfg.model_name:
            raise ConfigError(f"profile {profile!r} is defined for {cfg.model_name}")
        return cfg

    if model_name in OPENAI_MODELS:
        if thinking is not None:
            raise ConfigError("gpt-5 family reasoning is set via effort, not a thinking flag")
        if temperature is not None:
            raise ConfigError("gpt-5 family does not support temperature configuration")
        if effort is None:
            effort = "medium"
        if effort not in EFFORT_LEVELS:
            raise ConfigError(f"effort must be one of {EFFORT_LEVELS}, got {effort!r}")
        cfg = _openai(model_name, effort)
        if max_output_tokens is not None:
            cfg = ModelConfig(
                **{**cfg.__dict__, "max_output_tokens": max_output_tokens,
                   "config_id": f"{cfg.config_id}-custom"}
            )
        return cfg

    if model_name in ANTHROPIC_MODELS or model_name in GOOGLE_MODELS:
        if effort is not None:
            raise ConfigError(f"{model_name} does not take a reasoning effort level")
        base = (_anthropic if model_name in ANTHROPIC_MODELS else _google)(
            model_name, bool(thinking)
        )
        if temperature is None and max_output_tokens is None:
            return base
        if model_name in ANTHROPIC_MODELS and base.reasoning_enabled and temperature not in (None, 1.0):
            raise ConfigError("anthropic extended thinking requires temperature 1.0")
        return ModelConfig(
            **{
                **base.__dict__,
                "config_id": f"{base.config_id}-custom",
                "temperature": base.temperature if temperature is None else temperature,
                "max_output_tokens": base.max_output_tokens
                if max_output_tokens is None
                else max_output_tokens,
            }
        )

    raise ConfigError(f"unrecognized model family: {model_name!r}")
