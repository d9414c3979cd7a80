"""Provider gateway: cached, retried, bounded-concurrency model calls.

Three providers share one interface:

* ``live-http``: POSTs a chat-completion request to a configurable endpoint.
* ``scripted``: answers from an in-memory ``comment id -> content`` mapping.
* ``replay``: answers only from a recorded cache file.
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Protocol

import httpx
import yaml

from modgate.corpus import Corpus, LabeledComment
from modgate.errors import (
    CacheError,
    FileError,
    ModgateError,
    ProviderError,
    ReplayMiss,
    RequestTimeout,
)
from modgate.promptkit import PromptSpec, render_messages, render_prompt, request_digest

log = logging.getLogger(__name__)

API_KEY_ENV = "MODGATE_API_KEY"
PROVIDERS = ("live-http", "replay", "scripted")
RETRY_STATUSES = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class ModelConfig:
    provider: str = "live-http"
    model_id: str = "gpt-4o"
    endpoint: str | None = None
    temperature: float = 0.1
    top_p: float = 0.9
    max_tokens: int = 150
    request_timeout: float = 60.0
    max_retries: int = 3
    concurrency_limit: int = 4
    backoff_base: float = 0.5
    backoff_max: float = 20.0

    def __post_init__(self):
        if self.provider not in PROVIDERS:
            raise ValueError(f"provider must be one of {PROVIDERS}, got {self.provider!r}")
        if not self.model_id:
            raise ValueError("model_id is required")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.concurrency_limit < 1:
            raise ValueError("concurrency_limit must be >= 1")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.provider == "live-http" and not self.endpoint:
            raise ValueError("live-http provider needs an endpoint")
        # normalize numeric types so cache keys do not depend on YAML spelling
        object.__setattr__(self, "temperature", float(self.temperature))
        object.__setattr__(self, "top_p", float(self.top_p))

    def request_digest(self, rendered: str) -> str:
        return request_digest(rendered, self.model_id, self.temperature, self.top_p, self.max_tokens)

    def public_dict(self) -> dict:
        return {
            "provider": self.provider,
            "model_id": self.model_id,
            "endpoint": self.endpoint,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_tokens": self.max_tokens,
            "request_timeout": self.request_timeout,
            "max_retries": self.max_retries,
            "concurrency_limit": self.concurrency_limit,
        }


_CONFIG_KEYS = {f for f in ModelConfig.__dataclass_fields__}


def load_model_config(path: str | Path) -> tuple[ModelConfig, dict]:
    """Read a YAML key-value model config.

    Returns the config and any extra keys (for example ``script`` for the
    scripted provider), which are not part of :class:`ModelConfig`.
    """
    try:
        data = yaml.safe_load(Path(path).read_text("utf-8")) or {}
    except OSError as exc:
        raise FileError(f"cannot read model config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ModgateError(f"model config {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ModgateError(f"model config {path} must be a mapping")
    known = {k: v for k, v in data.items() if k in _CONFIG_KEYS}
    extra = {k: v for k, v in data.items() if k not in _CONFIG_KEYS}
    try:
        return ModelConfig(**known), extra
    except (TypeError, ValueError) as exc:
        raise ModgateError(f"model config {path}: {exc}") from exc


@dataclass(frozen=True)
class RawResponse:
    request_digest: str
    model_id: str
    content: str
    latency: float = 0.0
    attempt: int = 1
    from_cache: bool = False


@dataclass(frozen=True)
class Request:
    digest: str
    comment_id: str
    messages: list
    config: ModelConfig


# -- cache -------------------------------------------------------------------


class ResponseCache:
    """Thread-safe ``digest -> content`` store, optionally backed by JSONL.

    New entries are appended to the backing file as they arrive, so an
    interrupted batch keeps everything it already paid for. With
    ``replay_only`` the cache answers lookups but never accepts writes.
    """

    def __init__(self, path: str | Path | None = None, *, replay_only: bool = False):
        self.path = Path(path) if path is not None else None
        self.replay_only = replay_only
        self._entries: dict[str, tuple[str, str]] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        try:
            fh = open(self.path, encoding="utf-8")
        except OSError as exc:
            raise FileError(f"cannot read cache {self.path}: {exc}") from exc
        with fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    digest, model_id, content = rec["digest"], rec["model_id"], rec["content"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise CacheError(f"{self.path}:{lineno}: bad cache record ({exc})") from None
                if not all(isinstance(v, str) for v in (digest, model_id, content)):
                    raise CacheError(f"{self.path}:{lineno}: cache fields must be strings")
                self._entries.setdefault(digest, (model_id, content))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, digest: str) -> bool:
        return digest in self._entries

    def get(self, digest: str) -> str | None:
        entry = self._entries.get(digest)
        return None if entry is None else entry[1]

    def put(self, digest: str, model_id: str, content: str) -> None:
        if self.replay_only:
            raise CacheError("replay cache is read-only")
        with self._lock:
            if digest in self._entries:
                return
            self._entries[digest] = (model_id, content)
            if self.path is not None:
                rec = {"digest": digest, "model_id": model_id, "content": content}
                try:
                    with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                        fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
                except OSError as exc:
                    raise CacheError(f"cannot append to cache {self.path}: {exc}") from exc

    def key_lock(self, digest: str) -> threading.Lock:
        with self._lock:
            return self._key_locks.setdefault(digest, threading.Lock())

    def get_or_compute(self, digest: str, model_id: str, compute: Callable[[], str]) -> tuple[str, bool]:
        """Atomic get-or-insert; returns ``(content, was_cached)``."""
        hit = self.get(digest)
        if hit is not None:
            return hit, True
        with self.key_lock(digest):
            hit = self.get(digest)
            if hit is not None:
                return hit, True
            content = compute()
            self.put(digest, model_id, content)
            return content, False

    def records(self) -> list[dict]:
        return [
            {"digest": d, "model_id": m, "content": c} for d, (m, c) in self._entries.items()
        ]


def record_replay(path: str | Path) -> ResponseCache:
    """Open a recorded cache file for offline replay."""
    if not Path(path).is_file():
        raise FileError(f"replay file {path} does not exist")
    return ResponseCache(path, replay_only=True)


# -- providers ---------------------------------------------------------------


class Provider(Protocol):
    def complete(self, request: Request) -> str: ...


class TransientError(Exception):
    """A failure worth retrying."""

    def __init__(self, message: str, status: int | None = None, timeout: bool = False):
        super().__init__(message)
        self.status = status
        self.timeout = timeout


class ScriptedProvider:
    """Answers from a fixed mapping; counts calls for tests."""

    def __init__(self, script: Mapping[str, str] | Callable[[Request], str]):
        self.script = script
        self.calls = 0
        self.requests: list[Request] = []
        self._lock = threading.Lock()

    def complete(self, request: Request) -> str:
        with self._lock:
            self.calls += 1
            self.requests.append(request)
        if callable(self.script):
            return self.script(request)
        try:
            return self.script[request.comment_id]
        except KeyError:
            raise ProviderError(f"script has no response for comment {request.comment_id!r}") from None


class LiveHttpProvider:
    """Vendor chat-completion client over HTTPS."""

    def __init__(self, api_key: str, client: httpx.Client | None = None):
        self._api_key = api_key
        self._client = client or httpx.Client()

    def complete(self, request: Request) -> str:
        cfg = request.config
        body = {
            "model": cfg.model_id,
            "messages": request.messages,
            "temperature": cfg.temperature,
            "top_p": cfg.top_p,
            "max_tokens": cfg.max_tokens,
        }
        try:
            resp = self._client.post(
                cfg.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {self._api_key}"},
                timeout=cfg.request_timeout,
            )
        except httpx.TimeoutException as exc:
            raise TransientError(f"timeout: {exc.__class__.__name__}", timeout=True) from exc
        except httpx.TransportError as exc:
            raise TransientError(f"transport error: {exc.__class__.__name__}") from exc
        if resp.status_code in RETRY_STATUSES:
            raise TransientError(f"HTTP {resp.status_code}", resp.status_code)
        if resp.status_code >= 400:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc!r}", resp.status_code) from exc
        if not isinstance(content, str):
            raise ProviderError("response content is not text", resp.status_code)
        return content

    def close(self) -> None:
        self._client.close()


def live_provider_from_env(client: httpx.Client | None = None) -> LiveHttpProvider:
    key = os.environ.get(API_KEY_ENV, "").strip()
    if not key:
        raise ProviderError(f"{API_KEY_ENV} is not set")
    return LiveHttpProvider(key, client)


# -- gateway -----------------------------------------------------------------


def _call_with_retry(provider: Provider, request: Request, sleep=time.sleep) -> tuple[str, int]:
    cfg = request.config
    last: TransientError | None = None
    for attempt in range(1, cfg.max_retries + 2):
        try:
            return provider.complete(request), attempt
        except TransientError as exc:
            last = exc
            if attempt > cfg.max_retries:
                break
            delay = min(cfg.backoff_max, cfg.backoff_base * 2 ** (attempt - 1))
            delay *= random.uniform(0.5, 1.0)
            log.debug("attempt %d for %s failed (%s); retrying in %.2fs", attempt, request.comment_id, exc, delay)
            sleep(delay)
    assert last is not None
    msg = f"gave up on comment {request.comment_id!r} after {cfg.max_retries + 1} attempts: {last}"
    if last.timeout:
        raise RequestTimeout(msg, cause=last)
    raise ProviderError(msg, status=last.status, cause=last)


@dataclass
class Gateway:
    """Binds a config, a provider and a cache.

    ``provider`` may be omitted for the replay provider, which never calls
    out.
    """

    config: ModelConfig
    cache: ResponseCache
    provider: Provider | None = None
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def classify_one(self, spec: PromptSpec, comment: LabeledComment) -> RawResponse:
        rendered = render_prompt(spec, comment.text)
        digest = self.config.request_digest(rendered)
        start = time.monotonic()
        if self.config.provider == "replay":
            content = self.cache.get(digest)
            if content is None:
                raise ReplayMiss(digest, comment.id)
            return RawResponse(digest, self.config.model_id, content, 0.0, 0, True)
        if self.provider is None:
            raise ProviderError(f"no provider configured for {self.config.provider}")

        attempts = 0

        def compute() -> str:
            nonlocal attempts
            request = Request(digest, comment.id, render_messages(spec, comment.text), self.config)
            content, attempts = _call_with_retry(self.provider, request, self.sleep)
            return content

        content, cached = self.cache.get_or_compute(digest, self.config.model_id, compute)
        return RawResponse(
            digest, self.config.model_id, content, time.monotonic() - start, attempts, cached
        )

    def classify_batch(self, spec: PromptSpec, corpus: Corpus) -> list[BatchItem]:
        def run(comment: LabeledComment) -> BatchItem:
            try:
                return BatchItem(comment, self.classify_one(spec, comment))
            except ModgateError as exc:
                return BatchItem(comment, None, exc)

        comments = list(corpus)
        if not comments:
            return []
        with ThreadPoolExecutor(max_workers=self.config.concurrency_limit) as pool:
            # map() yields in submission order whatever the completion order
            return list(pool.map(run, comments))


@dataclass(frozen=True)
class BatchItem:
    comment: LabeledComment
    response: RawResponse | None
    error: ModgateError | None = None

    @property
    def ok(self) -> bool:
        return self.response is not None


def classify_one(
    config: ModelConfig,
    spec: PromptSpec,
    comment: LabeledComment,
    cache: ResponseCache,
    provider: Provider | None = None,
) -> RawResponse:
    return Gateway(config, cache, provider).classify_one(spec, comment)


def classify_batch(
    config: ModelConfig,
    spec: PromptSpec,
    corpus: Corpus,
    cache: ResponseCache,
    provider: Provider | None = None,
) -> list[BatchItem]:
    return Gateway(config, cache, provider).classify_batch(spec, corpus)


def with_overrides(config: ModelConfig, **changes) -> ModelConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(config, **changes) if changes else config
