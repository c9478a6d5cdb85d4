"""Run configuration: a flat JSON object with dotted ``provider.*`` keys."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dip.errors import ConfigError

TOP_LEVEL_KEYS = {
    "datasets",
    "languages",
    "strategies",
    "lexicon_dir",
    "max_concurrency",
    "sample_n",
    "seed",
    "out_dir",
}
PROVIDER_KEYS = {
    "type",
    "id",
    "url",
    "api_key_env",
    "model",
    "temperature",
    "max_output_tokens",
    "seed",
    "store",
    "cache",
    "max_retries",
    "backoff_s",
    "timeout",
}
PROVIDER_TYPES = ("replay", "chat")


@dataclass
class ProviderConfig:
    type: str = "replay"
    id: Optional[str] = None
    url: Optional[str] = None
    api_key_env: Optional[str] = None
    model: str = "replay"
    temperature: float = 0.0
    max_output_tokens: int = 256
    seed: Optional[int] = None
    store: Optional[Path] = None
    cache: Optional[Path] = None
    max_retries: int = 3
    backoff_s: float = 1.0
    timeout: float = 60.0


@dataclass
class RunConfig:
    datasets: list[Path]
    out_dir: Path
    languages: Optional[list[str]] = None
    strategies: Optional[list[str]] = None
    lexicon_dir: Optional[Path] = None
    max_concurrency: int = 4
    sample_n: Optional[int] = None
    seed: int = 0
    provider: ProviderConfig = field(default_factory=ProviderConfig)


def flatten(obj: dict) -> dict:
    """``{"provider": {"url": ...}}`` and ``{"provider.url": ...}`` are equivalent."""
    flat = {}
    for key, value in obj.items():
        if key == "provider" and isinstance(value, dict):
            for sub, v in value.items():
                flat[f"provider.{sub}"] = v
        else:
            flat[key] = value
    return flat


def _typed(key, value, kinds, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigError(f"config key {key!r} has the wrong type ({type(value).__name__})")
    if not isinstance(value, kinds):
        raise ConfigError(f"config key {key!r} has the wrong type ({type(value).__name__})")
    return value


def _str_list(key, value):
    if value is None:
        return None
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        raise ConfigError(f"config key {key!r} must be a list of strings")
    return list(value)


def parse_config(obj, base_dir=Path(".")) -> RunConfig:
    """Validate a decoded config object; relative paths resolve against ``base_dir``."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    flat = flatten(obj)
    provider_raw = {}
    for key, value in flat.items():
        if key.startswith("provider."):
            sub = key[len("provider."):]
            if sub not in PROVIDER_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            provider_raw[sub] = value
        elif key not in TOP_LEVEL_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    if "api_key" in provider_raw:
        raise ConfigError("credentials must come from the environment (use provider.api_key_env)")

    def path(value):
        p = Path(value)
        return p if p.is_absolute() else Path(base_dir) / p

    datasets = _str_list("datasets", flat.get("datasets"))
    if not datasets:
        raise ConfigError("config key 'datasets' must list at least one dataset file")
    out_dir = _typed("out_dir", flat.get("out_dir", "out"), (str,))

    pc = ProviderConfig()
    kinds = {
        "type": (str,), "id": (str,), "url": (str,), "api_key_env": (str,), "model": (str,),
        "temperature": (int, float), "max_output_tokens": (int,), "seed": (int,), "store": (str,),
        "cache": (str,), "max_retries": (int,), "backoff_s": (int, float), "timeout": (int, float),
    }
    for sub, value in provider_raw.items():
        value = _typed(f"provider.{sub}", value, kinds[sub], allow_none=sub in ("seed", "cache", "id"))
        if sub in ("store", "cache") and value is not None:
            value = path(value)
        setattr(pc, sub, value)
    if pc.type not in PROVIDER_TYPES:
        raise ConfigError(f"provider.type must be one of {PROVIDER_TYPES}, got {pc.type!r}")
    if pc.type == "chat" and not pc.url:
        raise ConfigError("provider.url is required for the chat provider")
    if pc.type == "replay" and pc.store is None:
        raise ConfigError("provider.store is required for the replay provider")

    max_concurrency = _typed("max_concurrency", flat.get("max_concurrency", 4), (int,))
    if max_concurrency < 1:
        raise ConfigError("max_concurrency must be at least 1")
    sample_n = _typed("sample_n", flat.get("sample_n"), (int,), allow_none=True)
    if sample_n is not None and sample_n < 1:
        raise ConfigError("sample_n must be positive")
    lexicon_dir = _typed("lexicon_dir", flat.get("lexicon_dir"), (str,), allow_none=True)

    return RunConfig(
        datasets=[path(d) for d in datasets],
        out_dir=path(out_dir),
        languages=_str_list("languages", flat.get("languages")),
        strategies=_str_list("strategies", flat.get("strategies")),
        lexicon_dir=path(lexicon_dir) if lexicon_dir else None,
        max_concurrency=max_concurrency,
        sample_n=sample_n,
        seed=_typed("seed", flat.get("seed", 0), (int,)),
        provider=pc,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    return parse_config(obj, base_dir=path.parent)
