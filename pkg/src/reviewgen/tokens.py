"""Token counting shared by chunking and prompt budgeting.

A token is a maximal run of identifier characters, or a single
punctuation character. Whitespace separates tokens and is never
counted. This rule deliberately overestimates subword tokenizers, so
budgets derived from it are conservative.
"""

import re

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def count_tokens(text: str) -> int:
    return sum(1 for _ in _TOKEN_RE.finditer(text))


def token_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) offsets of each token, in order."""
    return [m.span() for m in _TOKEN_RE.finditer(text)]
