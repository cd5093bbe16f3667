"""Dataset ingestion: line-delimited review records, validation, subsetting.

The on-disk format mirrors the upstream corpus field names (``oldf``,
``patch``, ``msg``, ``lang``) so files round-trip losslessly; unknown
fields are preserved verbatim.
"""

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

LANGUAGES = frozenset(
    {"c", "cpp", "csharp", "go", "java", "javascript", "php", "python", "ruby"}
)

# aliases seen in the wild for the nine supported languages
_LANG_ALIASES = {
    "c++": "cpp",
    "cc": "cpp",
    "c#": "csharp",
    "cs": "csharp",
    "js": "javascript",
    "py": "python",
    "rb": "ruby",
    ".c": "c",
    ".cpp": "cpp",
    ".cs": "csharp",
    ".go": "go",
    ".java": "java",
    ".js": "javascript",
    ".php": "php",
    ".py": "python",
    ".rb": "ruby",
}


class CorpusError(ValueError):
    pass


def normalize_lang(raw: str) -> str:
    lang = raw.strip().lower()
    lang = _LANG_ALIASES.get(lang, lang)
    if lang not in LANGUAGES:
        raise CorpusError(f"unsupported language: {raw!r}")
    return lang


@dataclass(frozen=True)
class ReviewRecord:
    """One dataset sample: pre-change file, diff hunk text, reviewer message."""

    id: str
    lang: str
    old_file: str
    diff_text: str
    reference_comment: str
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("record id must be nonempty")
        if self.lang not in LANGUAGES:
            raise CorpusError(f"unsupported language: {self.lang!r}")
        if not self.diff_text:
            raise CorpusError("diff_text must be nonempty")
        if not self.reference_comment:
            raise CorpusError("reference_comment must be nonempty")

    @property
    def has_old_file(self) -> bool:
        return bool(self.old_file)


@dataclass(frozen=True)
class SubsetSpec:
    source_split: str
    size: int
    seed: int

    def __post_init__(self):
        if self.source_split not in ("train", "valid", "test"):
            raise CorpusError(f"unknown split: {self.source_split!r}")
        if self.size <= 0:
            raise CorpusError("subset size must be positive")


@dataclass(frozen=True)
class Reject:
    line_no: int
    reason: str


@dataclass(frozen=True)
class LoadResult:
    records: tuple[ReviewRecord, ...]
    rejects: tuple[Reject, ...]
    line_count: int


_CANONICAL_FIELDS = ("id", "oldf", "patch", "msg", "lang")


def record_from_fields(fields: Mapping[str, object]) -> ReviewRecord:
    """Build a record from upstream-style field names.

    ``id`` falls back to ``ghid`` when absent; missing required fields
    raise CorpusError.
    """
    raw_id = fields.get("id", fields.get("ghid"))
    if raw_id is None or raw_id == "":
        raise CorpusError("missing field: id")
    for key in ("patch", "msg", "lang"):
        if not fields.get(key):
            raise CorpusError(f"missing field: {key}")
    extra = {
        k: v for k, v in fields.items() if k not in _CANONICAL_FIELDS and k != "ghid"
    }
    return ReviewRecord(
        id=str(raw_id),
        lang=normalize_lang(str(fields["lang"])),
        old_file=str(fields.get("oldf", "") or ""),
        diff_text=str(fields["patch"]),
        reference_comment=str(fields["msg"]),
        extra=extra,
    )


def record_to_fields(record: ReviewRecord) -> dict:
    fields = {
        "id": record.id,
        "lang": record.lang,
        "oldf": record.old_file,
        "patch": record.diff_text,
        "msg": record.reference_comment,
    }
    fields.update(record.extra)
    return fields


def load_split(path: str | Path, split: str = "test") -> LoadResult:
    """Parse a line-delimited record file.

    Record-level problems (bad JSON, missing fields, duplicate ids) are
    collected as rejects; processing continues. Unreadable files raise.
    """
    if split not in ("train", "valid", "test"):
        raise CorpusError(f"unknown split: {split!r}")
    records: list[ReviewRecord] = []
    rejects: list[Reject] = []
    seen_ids: set[str] = set()
    line_count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            line_count += 1
            try:
                fields = json.loads(line)
                if not isinstance(fields, dict):
                    raise CorpusError("record is not an object")
                record = record_from_fields(fields)
                if record.id in seen_ids:
                    raise CorpusError(f"duplicate id: {record.id}")
            except (json.JSONDecodeError, CorpusError) as exc:
                rejects.append(Reject(line_no, str(exc)))
                continue
            seen_ids.add(record.id)
            records.append(record)
    return LoadResult(tuple(records), tuple(rejects), line_count)


def write_split(path: str | Path, records: Iterable[ReviewRecord]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_fields(record), ensure_ascii=False) + "\n")
            n += 1
    return n


def write_rejects(input_path: str | Path, rejects: Iterable[Reject]) -> Path:
    """Write the sidecar rejects report next to the input file."""
    out = Path(str(input_path) + ".rejects")
    with open(out, "w", encoding="utf-8") as fh:
        for reject in rejects:
            fh.write(json.dumps({"line": reject.line_no, "reason": reject.reason}) + "\n")
    return out


def sample_subset(records: list[ReviewRecord], spec: SubsetSpec) -> list[ReviewRecord]:
    """Deterministic uniform sample without replacement, original order kept.

    Seeded Fisher-Yates partial shuffle over indices; the chosen indices
    are then sorted so output order is stable by original position.
    """
    n = len(records)
    if spec.size > n:
        raise CorpusError(f"subset size {spec.size} exceeds split size {n}")
    rng = random.Random(spec.seed)
    idx = list(range(n))
    for i in range(spec.size):
        j = rng.randrange(i, n)
        idx[i], idx[j] = idx[j], idx[i]
    return [records[i] for i in sorted(idx[: spec.size])]
