"""Diff-relevant region extraction, chunking, and pluggable summarization.

The remote backend is a plain-text POST contract (chunk in, summary
out). The extractive fallback keeps the whole pipeline runnable and
deterministic without any model service.
"""

import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import diff as diffmod
from . import syntax
from .corpus import ReviewRecord
from .tokens import count_tokens, token_spans

log = logging.getLogger(__name__)

FALLBACK_WINDOW = 10  # lines of context above/below a bare diff

REMOTE_BACKEND = "remote-service"
FALLBACK_BACKEND = "extractive-fallback"


class SummaryUnavailableError(RuntimeError):
    pass


@dataclass(frozen=True)
class SummarizerConfig:
    chunk_budget: int = 480
    backend: str = FALLBACK_BACKEND
    endpoint: str | None = None
    timeout: float = 30.0
    max_attempts: int = 3
    max_in_flight: int = 4

    def __post_init__(self):
        if self.chunk_budget < 16:
            raise ValueError("chunk_budget must be >= 16")
        if self.backend not in (REMOTE_BACKEND, FALLBACK_BACKEND):
            raise ValueError(f"unknown backend: {self.backend!r}")


@dataclass(frozen=True)
class SummaryRequest:
    record_id: str
    region_text: str
    chunks: tuple[str, ...] = field(default_factory=tuple)


def extract_region(record: ReviewRecord, window: int = FALLBACK_WINDOW) -> str:
    """The code region a diff is about.

    Enclosing function body when the diff lands inside one; otherwise a
    window of lines around the touched region; for records without an
    old file, the diff's own old-side text.
    """
    hunks = diffmod.parse_diff(record.diff_text)
    touched = diffmod.touched_old_lines(hunks)
    if not record.old_file:
        old_side = []
        for hunk in hunks:
            old_side.extend(hunk.old_lines())
        return "\n".join(old_side)
    if not touched:
        return ""
    spans = syntax.list_functions(record.lang, record.old_file)
    span = syntax.enclosing_function(spans, touched)
    if span is not None:
        return span.body
    lines = record.old_file.split("\n")
    lo = max(1, min(touched) - window)
    hi = min(len(lines), max(touched) + window)
    return "\n".join(lines[lo - 1 : hi])


def chunk_region(region: str, budget: int) -> list[str]:
    """Split a region into token-budgeted chunks.

    Chunks are exact substrings of the region (line boundaries keep
    their newline), so concatenating them reproduces the region
    byte-for-byte. A single line over budget is split at token
    boundaries.
    """
    if budget < 16:
        raise ValueError("budget must be >= 16")
    if region == "":
        return []
    pieces: list[tuple[str, int]] = []  # (text, token count)
    for line in region.splitlines(keepends=True):
        n = count_tokens(line)
        if n <= budget:
            pieces.append((line, n))
            continue
        spans = token_spans(line)
        start = 0
        while spans:
            take, rest = spans[:budget], spans[budget:]
            cut = take[-1][1] if rest else len(line)
            pieces.append((line[start:cut], len(take)))
            start = cut
            spans = rest
    chunks: list[str] = []
    current: list[str] = []
    current_tokens = 0
    for text, n in pieces:
        if current and current_tokens + n > budget:
            chunks.append("".join(current))
            current, current_tokens = [], 0
        current.append(text)
        current_tokens += n
    if current:
        chunks.append("".join(current))
    return chunks


def build_request(record: ReviewRecord, config: SummarizerConfig) -> SummaryRequest:
    region = extract_region(record)
    return SummaryRequest(record.id, region, tuple(chunk_region(region, config.chunk_budget)))


# identifier tokens that introduce a definition rather than describe it
_DEF_KEYWORDS = frozenset({"def", "function", "func", "fn", "sub"})

_IDENT_RE = re.compile(r"[A-Za-z_]\w*")


def _signature_line(chunk: str) -> str:
    for line in chunk.split("\n"):
        if line.strip():
            first = line.strip()
            open_idx = first.find("(")
            if open_idx != -1:
                depth = 0
                for i in range(open_idx, len(first)):
                    if first[i] == "(":
                        depth += 1
                    elif first[i] == ")":
                        depth -= 1
                        if depth == 0:
                            return first[: i + 1]
            return first
    return ""


def extractive_summary(chunk: str) -> str:
    """Signature line plus the 5 most frequent identifiers in the chunk."""
    sig = _signature_line(chunk)
    counts = Counter(
        t for t in _IDENT_RE.findall(chunk) if t not in _DEF_KEYWORDS
    )
    if not counts:
        return sig
    top = sorted(counts, key=lambda t: (-counts[t], t))[:5]
    return f"{sig}; identifiers: {', '.join(sorted(top))}"


def _remote_summary(chunk: str, config: SummarizerConfig) -> str:
    import httpx

    last_error: Exception | None = None
    for _ in range(config.max_attempts):
        try:
            resp = httpx.post(
                config.endpoint,
                content=chunk.encode("utf-8"),
                headers={"content-type": "text/plain; charset=utf-8"},
                timeout=config.timeout,
            )
            resp.raise_for_status()
            return resp.text
        except Exception as exc:  # transport and status failures retried alike
            last_error = exc
    raise SummaryUnavailableError(f"summarizer backend failed: {last_error}")


def summarize(request: SummaryRequest, config: SummarizerConfig) -> str:
    """Per-chunk summaries joined into one string with "; "."""
    if not request.chunks:
        return ""
    if config.backend == FALLBACK_BACKEND:
        parts = [extractive_summary(c) for c in request.chunks]
    else:
        if not config.endpoint:
            raise SummaryUnavailableError("remote backend configured without endpoint")
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            parts = list(pool.map(lambda c: _remote_summary(c, config), request.chunks))
    return "; ".join(parts)


def summarize_record(record: ReviewRecord, config: SummarizerConfig) -> str:
    return summarize(build_request(record, config), config)
