"""Completion client: HTTP chat-completions and replay providers behind a JSONL cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Protocol

import httpx

from dip.errors import ConfigError, ProviderError, ReplayMissError, TransportError
from dip.prompts import Prompt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompletionParams:
    model: str
    temperature: float = 0.0
    max_output_tokens: int = 256
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.temperature <= 2:
            raise ConfigError(f"temperature must be within [0, 2], got {self.temperature}")
        if isinstance(self.max_output_tokens, bool) or not isinstance(self.max_output_tokens, int) or self.max_output_tokens < 1:
            raise ConfigError(f"max_output_tokens must be a positive integer, got {self.max_output_tokens!r}")
        if self.seed is not None and (isinstance(self.seed, bool) or not isinstance(self.seed, int)):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class ModelResponse:
    raw_text: str
    provider_id: str
    cached: bool
    latency_ms: float


def cache_key(provider_id: str, params: CompletionParams, prompt_text: str) -> str:
    """SHA-256 hex digest of the newline-joined request fields."""
    seed = "null" if params.seed is None else str(params.seed)
    canonical = "\n".join(
        [provider_id, params.model, repr(float(params.temperature)), str(params.max_output_tokens), seed, prompt_text]
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Provider(Protocol):
    provider_id: str

    def generate(self, prompt_text: str, params: CompletionParams) -> tuple[str, float]:
        """Return ``(raw_text, latency_ms)``."""


class ResponseCache:
    """Append-only JSONL store; the last record for a key wins.

    Unreadable lines (e.g. a torn final write) are skipped with a warning.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._data: dict[str, str] = {}
        if self.path is not None and self.path.exists():
            self._data = read_store(self.path)

    def get(self, key: str) -> Optional[str]:
        with self._lock:
            return self._data.get(key)

    def put(self, key: str, raw_text: str, provider_id: str, model: str):
        record = {
            "key": key,
            "raw_text": raw_text,
            "provider_id": provider_id,
            "model": model,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with self._lock:
            self._data[key] = raw_text
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8", newline="\n") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    def __len__(self):
        return len(self._data)


def read_store(path) -> dict[str, str]:
    data = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                data[obj["key"]] = obj["raw_text"]
            except (json.JSONDecodeError, KeyError, TypeError):
                logger.warning("%s:%d: skipping unreadable store record", path, lineno)
    return data


class ReplayProvider:
    """Serves stored responses keyed by :func:`cache_key`; never touches the network."""

    def __init__(self, store=None, provider_id: str = "replay"):
        self.provider_id = provider_id
        if store is None:
            self._data = {}
        elif isinstance(store, dict):
            self._data = dict(store)
        else:
            self._data = read_store(store)

    def generate(self, prompt_text, params):
        key = cache_key(self.provider_id, params, prompt_text)
        try:
            return self._data[key], 0.0
        except KeyError:
            raise ReplayMissError(key) from None

    def __len__(self):
        return len(self._data)


class ChatCompletionsProvider:
    """POSTs ``{model, messages, temperature, max_tokens}`` to a chat-completions endpoint."""

    def __init__(self, url: str, api_key_env: Optional[str] = None, provider_id: Optional[str] = None,
                 timeout: float = 60.0, http_client: Optional[httpx.Client] = None):
        self.url = url
        self.api_key_env = api_key_env
        self.provider_id = provider_id or url
        self._client = http_client or httpx.Client(timeout=timeout)

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise ConfigError(f"environment variable {self.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def generate(self, prompt_text, params):
        payload = {
            "model": params.model,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        if params.seed is not None:
            payload["seed"] = params.seed
        started = time.perf_counter()
        response = self._client.post(self.url, json=payload, headers=self._headers())
        latency = (time.perf_counter() - started) * 1000
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text[:500])
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise ProviderError(response.status_code, f"unexpected response body: {response.text[:500]}") from None
        if not isinstance(text, str):
            raise ProviderError(response.status_code, "completion content is not a string")
        return text, latency


def _retryable(exc: Exception) -> bool:
    if isinstance(exc, httpx.TransportError):
        return True
    return isinstance(exc, ProviderError) and (exc.status == 429 or exc.status >= 500)


class LLMClient:
    """Cache-first completion with retries and a cap on in-flight requests."""

    def __init__(self, provider: Provider, cache: Optional[ResponseCache] = None, max_retries: int = 3,
                 backoff_s: float = 1.0, max_concurrency: int = 4, sleep=time.sleep):
        if max_concurrency < 1:
            raise ConfigError("max_concurrency must be at least 1")
        self.provider = provider
        self.cache = cache if cache is not None else ResponseCache()
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self.max_concurrency = max_concurrency
        self._slots = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep
        self.origin_calls = 0
        self._count_lock = threading.Lock()

    def key_for(self, prompt_text: str, params: CompletionParams) -> str:
        return cache_key(self.provider.provider_id, params, prompt_text)

    def complete(self, prompt, params: CompletionParams) -> ModelResponse:
        text = prompt.text if isinstance(prompt, Prompt) else prompt
        key = self.key_for(text, params)
        hit = self.cache.get(key)
        if hit is not None:
            return ModelResponse(hit, self.provider.provider_id, True, 0.0)
        raw, latency = self._call(text, params)
        self.cache.put(key, raw, self.provider.provider_id, params.model)
        return ModelResponse(raw, self.provider.provider_id, False, latency)

    def _call(self, text, params):
        attempts = 0
        while True:
            attempts += 1
            try:
                with self._slots:
                    with self._count_lock:
                        self.origin_calls += 1
                    return self.provider.generate(text, params)
            except Exception as exc:
                if not _retryable(exc):
                    raise
                if attempts > self.max_retries:
                    if isinstance(exc, ProviderError):
                        raise
                    raise TransportError(f"transport failure: {exc}", attempts) from exc
                delay = self.backoff_s * 2 ** (attempts - 1)
                logger.warning("attempt %d failed (%s); retrying in %.1fs", attempts, exc, delay)
                self._sleep(delay)
