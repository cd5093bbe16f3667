"""Uniform client over chat/completion providers with retries, bounded
concurrency, and resumable batch runs backed by a manifest file."""

import hashlib
import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable, Protocol

from .prompts import PromptBundle
from .tokens import tokenize

log = logging.getLogger(__name__)

CHAT_PROFILE = "chat-instruct"
COMPLETION_PROFILE = "completion"
MOCK_PROFILE = "mock"


class FatalProviderError(RuntimeError):
    """Misconfiguration (e.g. bad credentials); aborts the run."""


class TransientProviderError(RuntimeError):
    """Retryable failure (rate limit, timeout, 5xx)."""


@dataclass(frozen=True)
class GenerationConfig:
    temperature: float = 0.7
    n: int = 5
    max_new_tokens: int = 100
    shot_count: int = 5
    provider_profile: str = MOCK_PROFILE
    model: str | None = None
    endpoint: str | None = None
    max_attempts: int = 5
    backoff_initial: float = 1.0
    backoff_factor: float = 2.0
    backoff_jitter: float = 0.1
    concurrency: int = 4

    def __post_init__(self):
        if not (0.0 <= self.temperature <= 2.0):
            raise ValueError("temperature must be in [0, 2]")
        if self.n < 1 or self.max_new_tokens < 1:
            raise ValueError("n and max_new_tokens must be >= 1")


@dataclass
class GenerationResult:
    record_id: str
    candidates: list[str] = field(default_factory=list)
    latency: float = 0.0
    attempts: int = 0
    prompt_tokens: int = 0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class Provider(Protocol):
    def complete(self, bundle: PromptBundle, config: GenerationConfig) -> list[str]: ...


class MockProvider:
    """Deterministic offline provider: echoes the first line of the
    query block's code diff, truncated to the token cap."""

    def complete(self, bundle: PromptBundle, config: GenerationConfig) -> list[str]:
        lines = bundle.query_block.split("\n")
        first = ""
        in_diff = False
        for line in lines:
            if line == "Code Diff:":
                in_diff = True
                continue
            if in_diff and line.strip():
                first = line.strip()
                break
        toks = tokenize(first)[: config.max_new_tokens]
        text = " ".join(toks) if toks else "looks fine"
        return [text] * config.n


class HttpProvider:
    """OpenAI-style chat/completions endpoint client."""

    def __init__(self, profile: str):
        self.profile = profile

    def complete(self, bundle: PromptBundle, config: GenerationConfig) -> list[str]:
        import httpx

        api_key = os.environ.get("REVIEWGEN_API_KEY")
        if not api_key:
            raise FatalProviderError("REVIEWGEN_API_KEY is not set")
        if not config.endpoint:
            raise FatalProviderError("provider endpoint is not configured")
        if self.profile == CHAT_PROFILE:
            payload = {
                "model": config.model,
                "messages": [{"role": "user", "content": bundle.text}],
                "temperature": config.temperature,
                "n": config.n,
                "max_tokens": config.max_new_tokens,
            }
        else:
            payload = {
                "model": config.model,
                "prompt": bundle.text,
                "temperature": config.temperature,
                "n": config.n,
                "max_tokens": config.max_new_tokens,
            }
        try:
            resp = httpx.post(
                config.endpoint,
                json=payload,
                headers={"authorization": f"Bearer {api_key}"},
                timeout=120.0,
            )
        except Exception as exc:
            raise TransientProviderError(str(exc)) from exc
        if resp.status_code in (401, 403):
            raise FatalProviderError(f"auth failure: {resp.status_code}")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientProviderError(f"status {resp.status_code}")
        try:
            body = resp.json()
            if self.profile == CHAT_PROFILE:
                return [c["message"]["content"] for c in body["choices"]]
            return [c["text"] for c in body["choices"]]
        except Exception as exc:
            raise TransientProviderError(f"malformed provider response: {exc}") from exc


def make_provider(config: GenerationConfig) -> Provider:
    if config.provider_profile == MOCK_PROFILE:
        return MockProvider()
    if config.provider_profile in (CHAT_PROFILE, COMPLETION_PROFILE):
        return HttpProvider(config.provider_profile)
    raise FatalProviderError(f"unknown provider profile: {config.provider_profile!r}")


def generate(
    bundle: PromptBundle,
    config: GenerationConfig,
    provider: Provider | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> GenerationResult:
    """One record's n candidates, with exponential-backoff retries.

    Exhausted retries yield an error result rather than raising, so a
    batch can skip the record and continue.
    """
    provider = provider or make_provider(config)
    rng = random.Random(bundle.record_id)
    start = time.monotonic()
    attempts = 0
    delay = config.backoff_initial
    while True:
        attempts += 1
        try:
            candidates = provider.complete(bundle, config)
            return GenerationResult(
                record_id=bundle.record_id,
                candidates=candidates,
                latency=time.monotonic() - start,
                attempts=attempts,
                prompt_tokens=bundle.token_estimate,
            )
        except TransientProviderError as exc:
            if attempts >= config.max_attempts:
                log.warning("record %s skipped after %d attempts: %s",
                            bundle.record_id, attempts, exc)
                return GenerationResult(
                    record_id=bundle.record_id,
                    latency=time.monotonic() - start,
                    attempts=attempts,
                    error=str(exc),
                )
            sleep(delay * (1.0 + config.backoff_jitter * rng.random()))
            delay *= config.backoff_factor


def prompt_hash(bundle: PromptBundle) -> str:
    return hashlib.sha256(bundle.text.encode("utf-8")).hexdigest()


def run_batch(
    bundles: list[PromptBundle],
    config: GenerationConfig,
    out_dir: str | Path,
    provider: Provider | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> dict:
    """Generate for every bundle, streaming results to durable storage.

    ``manifest.json`` records the config and per-record status; a rerun
    over the same directory only touches missing or errored records.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.jsonl"
    manifest_path = out_dir / "manifest.json"

    manifest = {"config": asdict(config), "records": {}}
    done_ids: set[str] = set()
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        manifest["config"] = asdict(config)
        done_ids = {
            rid for rid, entry in manifest["records"].items() if entry.get("status") == "ok"
        }

    provider = provider or make_provider(config)
    write_lock = threading.Lock()

    def flush_manifest():
        tmp = manifest_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True))
        tmp.replace(manifest_path)

    def process(bundle: PromptBundle):
        result = generate(bundle, config, provider=provider, sleep=sleep)
        with write_lock:
            with open(results_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({
                    "record_id": result.record_id,
                    "candidates": result.candidates,
                    "attempts": result.attempts,
                    "error": result.error,
                }, ensure_ascii=False) + "\n")
            manifest["records"][bundle.record_id] = {
                "status": "ok" if result.ok else "error",
                "prompt_sha256": prompt_hash(bundle),
                "attempts": result.attempts,
                "error": result.error,
            }
            flush_manifest()
        return result

    pending = [b for b in bundles if b.record_id not in done_ids]
    if pending:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            list(pool.map(process, pending))
    else:
        flush_manifest()
    return manifest


def load_results(out_dir: str | Path) -> list[GenerationResult]:
    """Latest result per record id, in first-seen order."""
    results: dict[str, GenerationResult] = {}
    path = Path(out_dir) / "results.jsonl"
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            results[row["record_id"]] = GenerationResult(
                record_id=row["record_id"],
                candidates=row.get("candidates") or [],
                attempts=row.get("attempts", 0),
                error=row.get("error"),
            )
    return list(results.values())
