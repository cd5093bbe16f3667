"""Unified-diff hunk parsing and old-file line mapping."""

import re
from dataclasses import dataclass, field

CONTEXT = "context"
DELETED = "deleted"
ADDED = "added"

_MARKERS = {" ": CONTEXT, "-": DELETED, "+": ADDED}

_HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


class DiffParseError(ValueError):
    pass


@dataclass(frozen=True)
class DiffLine:
    tag: str
    content: str


@dataclass(frozen=True)
class DiffHunk:
    old_start: int
    old_count: int
    new_start: int
    new_count: int
    lines: tuple[DiffLine, ...] = field(default_factory=tuple)

    def old_lines(self) -> list[str]:
        """Old-file content of the hunk (context + deleted, in order)."""
        return [l.content for l in self.lines if l.tag in (CONTEXT, DELETED)]


def _finish(header, body) -> DiffHunk:
    old_start, new_start = header
    # counts are recomputed from the body; dataset headers are not
    # always arithmetically consistent, the body is authoritative
    old_count = sum(1 for l in body if l.tag in (CONTEXT, DELETED))
    new_count = sum(1 for l in body if l.tag in (CONTEXT, ADDED))
    return DiffHunk(old_start, old_count, new_start, new_count, tuple(body))


def parse_diff(diff_text: str) -> list[DiffHunk]:
    """Split hunk text into structured hunks.

    Headerless patches (present in the dataset) become one synthetic
    hunk anchored at old line 1 with every line treated as context.
    ``\\ No newline at end of file`` markers are dropped.
    """
    if not diff_text:
        return []
    raw_lines = diff_text.split("\n")
    if raw_lines and raw_lines[-1] == "":
        raw_lines.pop()

    if not any(_HUNK_HEADER.match(l) for l in raw_lines):
        body = [DiffLine(CONTEXT, l) for l in raw_lines]
        return [_finish((1, 1), body)] if body else []

    hunks: list[DiffHunk] = []
    header = None
    body: list[DiffLine] = []
    for i, line in enumerate(raw_lines, start=1):
        m = _HUNK_HEADER.match(line)
        if m:
            if header is not None:
                hunks.append(_finish(header, body))
            header = (int(m.group(1)), int(m.group(3)))
            body = []
            continue
        if header is None:
            # preamble before the first header (e.g. ---/+++ lines)
            continue
        if line.startswith("\\"):
            continue
        if line == "":
            # marker stripped by upstream whitespace trimming
            body.append(DiffLine(CONTEXT, ""))
            continue
        tag = _MARKERS.get(line[0])
        if tag is None:
            raise DiffParseError(f"unknown diff marker on line {i}: {line!r}")
        body.append(DiffLine(tag, line[1:]))
    if header is not None:
        hunks.append(_finish(header, body))
    return hunks


def touched_old_lines(hunks: list[DiffHunk]) -> set[int]:
    """1-based old-file line numbers a diff touches.

    Context and deleted lines occupy their own line; an added line
    contributes the old-file position it is inserted at.
    """
    touched: set[int] = set()
    for hunk in hunks:
        pos = hunk.old_start
        for line in hunk.lines:
            touched.add(pos)
            if line.tag in (CONTEXT, DELETED):
                pos += 1
    return touched
