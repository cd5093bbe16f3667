"""Scoring of generated comments: smoothed sentence BLEU-4, best-of-n
selection, corpus aggregation, Wilcoxon signed-rank comparison, and an
external-scorer plug-in point."""

import logging
import math
from dataclasses import dataclass, field
from statistics import NormalDist

from .gateway import GenerationResult

log = logging.getLogger(__name__)


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class BleuConfig:
    max_n: int = 4
    case_fold: bool = True


def bleu_tokenize(text: str, case_fold: bool = True) -> list[str]:
    """Pad punctuation with spaces, then split on whitespace."""
    if case_fold:
        text = text.lower()
    out = []
    for ch in text:
        if not ch.isalnum() and not ch.isspace() and ch != "_":
            out.append(f" {ch} ")
        else:
            out.append(ch)
    return "".join(out).split()


def _ngram_counts(tokens: list[str], n: int) -> dict[tuple, int]:
    counts: dict[tuple, int] = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i : i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def bleu4(candidate: str, reference: str, config: BleuConfig = BleuConfig()) -> float:
    """Smoothed sentence BLEU-4.

    Modified n-gram precision with reference-clipped counts for
    n = 1..4; any zero numerator gets add-one smoothing (numerator 1,
    denominator + 1). Brevity penalty exp(1 - ref/cand) applies when the
    candidate is shorter than the reference. Empty candidates score 0.
    """
    cand = bleu_tokenize(candidate, config.case_fold)
    ref = bleu_tokenize(reference, config.case_fold)
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, config.max_n + 1):
        cand_counts = _ngram_counts(cand, n)
        ref_counts = _ngram_counts(ref, n)
        matches = sum(min(c, ref_counts.get(g, 0)) for g, c in cand_counts.items())
        total = sum(cand_counts.values())
        if matches > 0:
            p = matches / total
        else:
            p = 1.0 / (max(total, 1) + 1.0)
        log_sum += math.log(p) / config.max_n
    if len(cand) >= len(ref):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(ref) / len(cand))
    return bp * math.exp(log_sum)


def best_of_n(candidates: list[str], reference: str,
              config: BleuConfig = BleuConfig()) -> tuple[int, float]:
    """Index and score of the highest-BLEU candidate (lowest index on ties)."""
    if not candidates:
        raise ValueError("candidate list is empty")
    best_idx, best_score = 0, -1.0
    for i, cand in enumerate(candidates):
        s = bleu4(cand, reference, config)
        if s > best_score:
            best_idx, best_score = i, s
    return best_idx, best_score


@dataclass
class EvalReport:
    per_record: dict[str, tuple[int, float]]  # id -> (best index, best BLEU)
    mean_bleu_x100: float
    record_count: int
    skipped: list[str] = field(default_factory=list)
    external_scores: dict[str, float] | None = None
    external_warnings: int = 0


def corpus_report(results: list[GenerationResult], references: dict[str, str],
                  config: BleuConfig = BleuConfig()) -> EvalReport:
    """Best-of-n per record, aggregate mean x100 to two decimals."""
    per_record: dict[str, tuple[int, float]] = {}
    skipped: list[str] = []
    for result in results:
        if not result.ok or not result.candidates:
            skipped.append(result.record_id)
            continue
        if result.record_id not in references:
            raise ValueError(f"no reference for record {result.record_id}")
        per_record[result.record_id] = best_of_n(
            result.candidates, references[result.record_id], config
        )
    if not per_record:
        raise InsufficientDataError("no scorable records")
    mean = sum(s for _, s in per_record.values()) / len(per_record)
    return EvalReport(
        per_record=per_record,
        mean_bleu_x100=round(mean * 100.0, 2),
        record_count=len(per_record),
        skipped=skipped,
    )


def render_table(rows: list[tuple[str, float]], baseline: tuple[str, float]) -> str:
    """Human-readable score table with a baseline row and deltas."""
    name_w = max(len(baseline[0]), *(len(n) for n, _ in rows), len("Model"))
    lines = [
        f"{'Model'.ljust(name_w)}  {'BLEU-4':>8}  {'Delta':>10}",
        f"{baseline[0].ljust(name_w)}  {baseline[1]:>8.2f}  {'baseline':>10}",
    ]
    for name, value in rows:
        delta = (value - baseline[1]) / baseline[1] * 100.0
        lines.append(f"{name.ljust(name_w)}  {value:>8.2f}  {delta:>+9.2f}%")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test


def _signed_ranks(a: list[float], b: list[float]):
    if len(a) != len(b):
        raise ValueError("sequences must have equal length")
    diffs = [x - y for x, y in zip(a, b) if x - y != 0.0]
    if len(diffs) < 5:
        raise InsufficientDataError("fewer than 5 nonzero differences")
    order = sorted(range(len(diffs)), key=lambda i: abs(diffs[i]))
    ranks = [0.0] * len(diffs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(diffs[order[j + 1]]) == abs(diffs[order[i]]):
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return diffs, ranks


def wilcoxon_signed_rank(a: list[float], b: list[float]) -> tuple[float, float]:
    """(W, two-sided p) with W = min(positive rank sum, negative rank sum).

    Exact p by sign enumeration for n <= 12; otherwise a normal
    approximation with tie and continuity corrections.
    """
    diffs, ranks = _signed_ranks(a, b)
    n = len(diffs)
    w_pos = sum(r for d, r in zip(diffs, ranks) if d > 0)
    w_neg = sum(r for d, r in zip(diffs, ranks) if d < 0)
    w = min(w_pos, w_neg)

    if n <= 12:
        # distribution of min(S+, S-) over all 2^n sign assignments,
        # ranks doubled so sums stay integral under mean ranks
        doubled = [int(round(2 * r)) for r in ranks]
        total = sum(doubled)
        dist = {0: 1}
        for r in doubled:
            nxt: dict[int, int] = {}
            for s, c in dist.items():
                nxt[s] = nxt.get(s, 0) + c
                nxt[s + r] = nxt.get(s + r, 0) + c
            dist = nxt
        w2 = int(round(2 * w))
        hits = sum(c for s, c in dist.items() if min(s, total - s) <= w2)
        return w, hits / 2**n

    mean = n * (n + 1) / 4.0
    tie_term = 0.0
    seen: dict[float, int] = {}
    for d in diffs:
        seen[abs(d)] = seen.get(abs(d), 0) + 1
    for t in seen.values():
        tie_term += t**3 - t
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    if var <= 0:
        raise InsufficientDataError("zero variance (all differences tied)")
    z = (w - mean + 0.5) / math.sqrt(var)
    p = 2.0 * NormalDist().cdf(z)
    return w, min(1.0, p)


# ---------------------------------------------------------------------------
# external scorer plug-in


def external_score(results: list[GenerationResult], references: dict[str, str],
                   scorer_endpoint: str | None, best_indices: dict[str, int] | None = None,
                   ) -> tuple[dict[str, float] | None, int]:
    """POST candidate/reference pairs to an external scorer.

    Returns (scores or None, warning count); failure never aborts the
    report, the external section is simply omitted.
    """
    if not scorer_endpoint:
        return None, 0
    import httpx

    pairs = []
    for result in results:
        if not result.ok or not result.candidates:
            continue
        idx = (best_indices or {}).get(result.record_id, 0)
        pairs.append({
            "id": result.record_id,
            "candidate": result.candidates[idx],
            "reference": references[result.record_id],
        })
    try:
        resp = httpx.post(scorer_endpoint, json={"pairs": pairs}, timeout=120.0)
        resp.raise_for_status()
        scores = resp.json()["scores"]
        return {p["id"]: float(s) for p, s in zip(pairs, scores)}, 0
    except Exception as exc:
        log.warning("external scorer failed, omitting section: %s", exc)
        return None, 1
