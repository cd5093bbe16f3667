"""Okapi BM-25 retrieval of exemplar records by diff similarity."""

import hashlib
import math
import pickle
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import ReviewRecord


def tokenize(text: str) -> list[str]:
    """Lowercase, split on any non-alphanumeric character."""
    out = []
    current = []
    for ch in text.lower():
        if ch.isalnum():
            current.append(ch)
        elif current:
            out.append("".join(current))
            current = []
    if current:
        out.append("".join(current))
    return out


@dataclass
class Bm25Index:
    postings: dict[str, dict[int, int]]  # term -> {doc index -> tf}
    doc_ids: list[str]
    doc_lengths: list[int]
    avg_doc_length: float
    N: int
    k1: float = 1.2
    b: float = 0.75

    def doc_index(self, doc_id: str) -> int:
        try:
            return self._id_to_index[doc_id]
        except AttributeError:
            self._id_to_index = {d: i for i, d in enumerate(self.doc_ids)}
            return self._id_to_index[doc_id]


def build_index(records: list[ReviewRecord], k1: float = 1.2, b: float = 0.75) -> Bm25Index:
    if not records:
        raise ValueError("cannot build an index over zero records")
    if k1 <= 0 or not (0.0 <= b <= 1.0):
        raise ValueError("invalid BM-25 parameters")
    postings: dict[str, dict[int, int]] = {}
    doc_lengths: list[int] = []
    for i, record in enumerate(records):
        tokens = tokenize(record.diff_text)
        doc_lengths.append(len(tokens))
        for term, tf in Counter(tokens).items():
            postings.setdefault(term, {})[i] = tf
    return Bm25Index(
        postings=postings,
        doc_ids=[r.id for r in records],
        doc_lengths=doc_lengths,
        avg_doc_length=sum(doc_lengths) / len(records),
        N=len(records),
        k1=k1,
        b=b,
    )


def idf(index: Bm25Index, term: str) -> float:
    """Non-negative (Lucene-style) inverse document frequency."""
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.N - df + 0.5) / (df + 0.5))


def score(index: Bm25Index, query_tokens: list[str], doc_id: str) -> float:
    i = _resolve(index, doc_id)
    length_norm = index.k1 * (
        1.0 - index.b + index.b * index.doc_lengths[i] / index.avg_doc_length
    )
    total = 0.0
    for term in query_tokens:
        docs = index.postings.get(term)
        if not docs:
            continue  # unseen terms contribute nothing
        tf = docs.get(i, 0)
        if tf == 0:
            continue
        total += idf(index, term) * tf * (index.k1 + 1.0) / (tf + length_norm)
    return total


def _resolve(index: Bm25Index, doc_id: str) -> int:
    try:
        return index.doc_index(doc_id)
    except KeyError:
        raise ValueError(f"unknown doc id: {doc_id!r}") from None


def top_k(index: Bm25Index, query_record: ReviewRecord, k: int) -> list[tuple[str, float]]:
    """k best exemplars, descending score, ties by ascending index.

    The query record itself is excluded when present in the index. When
    k exceeds the corpus size, all available records are returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query_tokens = tokenize(query_record.diff_text)
    scored = []
    for i, doc_id in enumerate(index.doc_ids):
        if doc_id == query_record.id:
            continue
        scored.append((i, score(index, query_tokens, doc_id)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [(index.doc_ids[i], s) for i, s in scored[:k]]


# ---------------------------------------------------------------------------
# on-disk cache keyed by training-split content


def corpus_fingerprint(records: list[ReviewRecord]) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(r.id.encode())
        h.update(b"\x00")
        h.update(r.diff_text.encode())
        h.update(b"\x01")
    return h.hexdigest()


def save_index(index: Bm25Index, cache_dir: str | Path, fingerprint: str) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"bm25-{fingerprint}.idx"
    with open(path, "wb") as fh:
        pickle.dump(index, fh)
    return path


def load_index(cache_dir: str | Path, fingerprint: str) -> Bm25Index | None:
    path = Path(cache_dir) / f"bm25-{fingerprint}.idx"
    if not path.exists():
        return None
    with open(path, "rb") as fh:
        return pickle.load(fh)


def build_or_load(records: list[ReviewRecord], cache_dir: str | Path | None = None,
                  k1: float = 1.2, b: float = 0.75) -> Bm25Index:
    if cache_dir is None:
        return build_index(records, k1=k1, b=b)
    fp = corpus_fingerprint(records) + f"-{k1}-{b}"
    cached = load_index(cache_dir, fp)
    if cached is not None:
        return cached
    index = build_index(records, k1=k1, b=b)
    save_index(index, cache_dir, fp)
    return index
