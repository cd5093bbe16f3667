"""Study state: items, assignments, ratings.

Repository interface with a file-backed default so desk-scale studies
need no external services. All mutations are serialized through one
lock, which makes assignment and submission linearizable per item.
"""

import hashlib
import json
import random
import threading
from dataclasses import dataclass, field, asdict
from pathlib import Path

RATERS_PER_ITEM = 2
SCORE_MIN, SCORE_MAX = 0, 5


class AuthError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class ConflictError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class StudyItem:
    item_id: str
    diff_lines: tuple[dict, ...]  # [{"tag": ..., "text": ...}]
    region: str
    summary: str
    ground_truth: str
    model_outputs: dict[str, str]  # anonymized key -> comment
    key_map: dict[str, str]  # anonymized key -> real model name (never served)

    def participant_view(self, order: list[str]) -> dict:
        return {
            "item_id": self.item_id,
            "diff_lines": list(self.diff_lines),
            "region": self.region,
            "summary": self.summary,
            "ground_truth": self.ground_truth,
            "outputs": [{"key": k, "comment": self.model_outputs[k]} for k in order],
        }


@dataclass(frozen=True)
class RatingRecord:
    participant_id: str
    item_id: str
    key: str
    relevance: int
    information: int
    clarity: int
    timestamp: float


def anonymize_outputs(outputs_by_model: dict[str, str], item_id: str) -> StudyItem | tuple:
    """Stable anonymized keys for one item's model outputs."""
    keys = [chr(ord("A") + i) for i in range(len(outputs_by_model))]
    models = sorted(outputs_by_model)
    rng = random.Random(f"anon:{item_id}")
    rng.shuffle(models)
    key_map = dict(zip(keys, models))
    model_outputs = {k: outputs_by_model[m] for k, m in key_map.items()}
    return model_outputs, key_map


def shuffled_order(item_id: str, participant_id: str, keys: list[str]) -> list[str]:
    """Deterministic per-(item, participant) presentation order."""
    seed = hashlib.sha256(f"{item_id}:{participant_id}".encode()).hexdigest()
    order = sorted(keys)
    random.Random(seed).shuffle(order)
    return order


class StudyStore:
    def __init__(self, items: list[StudyItem], participant_tokens: list[str],
                 admin_token: str, path: str | Path | None = None):
        self._lock = threading.Lock()
        self.items = {it.item_id: it for it in items}
        self.item_order = [it.item_id for it in items]
        self.tokens = set(participant_tokens)
        self.admin_token = admin_token
        self.path = Path(path) if path else None
        self.acknowledged: set[str] = set()
        self.assignments: dict[str, list[str]] = {}  # item_id -> participants
        self.ratings: list[RatingRecord] = []
        if self.path and self.path.exists():
            self._load()

    # -- persistence -------------------------------------------------

    def _load(self):
        state = json.loads(self.path.read_text())
        self.acknowledged = set(state.get("acknowledged", []))
        self.assignments = state.get("assignments", {})
        self.ratings = [RatingRecord(**r) for r in state.get("ratings", [])]

    def _flush(self):
        if not self.path:
            return
        state = {
            "acknowledged": sorted(self.acknowledged),
            "assignments": self.assignments,
            "ratings": [asdict(r) for r in self.ratings],
        }
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(state, indent=2))
        tmp.replace(self.path)

    # -- participant operations ---------------------------------------

    def check_token(self, token: str):
        if token not in self.tokens:
            raise AuthError("unknown participant token")

    def acknowledge(self, token: str):
        self.check_token(token)
        with self._lock:
            self.acknowledged.add(token)
            self._flush()

    def rated_items(self, token: str) -> set[str]:
        return {r.item_id for r in self.ratings if r.participant_id == token}

    def assign_next(self, token: str) -> dict | None:
        """Next unrated item with a free rater slot; None when exhausted.

        An open assignment (assigned but not yet rated) is returned
        again, with the same deterministic output order.
        """
        self.check_token(token)
        if token not in self.acknowledged:
            raise ValidationError("instructions must be acknowledged first")
        with self._lock:
            rated = self.rated_items(token)
            # an open assignment is sticky
            for item_id in self.item_order:
                assigned = self.assignments.get(item_id, [])
                if token in assigned and item_id not in rated:
                    return self._view(item_id, token)
            for item_id in self.item_order:
                assigned = self.assignments.get(item_id, [])
                if item_id in rated or token in assigned:
                    continue
                if len(assigned) >= RATERS_PER_ITEM:
                    continue
                self.assignments.setdefault(item_id, []).append(token)
                self._flush()
                return self._view(item_id, token)
            return None

    def _view(self, item_id: str, token: str) -> dict:
        item = self.items[item_id]
        order = shuffled_order(item_id, token, list(item.model_outputs))
        return item.participant_view(order)

    def submit_ratings(self, token: str, item_id: str, ratings: list[dict],
                       timestamp: float = 0.0):
        self.check_token(token)
        with self._lock:
            item = self.items.get(item_id)
            if item is None:
                raise ValidationError(f"unknown item: {item_id}")
            if token not in self.assignments.get(item_id, []):
                raise ValidationError("item was not assigned to this participant")
            if item_id in self.rated_items(token):
                raise ConflictError("item already rated by this participant")
            seen_keys = set()
            for r in ratings:
                key = r.get("key")
                if key not in item.model_outputs:
                    raise ValidationError(f"unknown output key: {key!r}")
                if key in seen_keys:
                    raise ValidationError(f"duplicate key in submission: {key!r}")
                seen_keys.add(key)
                for metric in ("relevance", "information", "clarity"):
                    value = r.get(metric)
                    if not isinstance(value, int) or not (SCORE_MIN <= value <= SCORE_MAX):
                        raise ValidationError(
                            f"{metric} for {key!r} must be an integer in "
                            f"[{SCORE_MIN}, {SCORE_MAX}]"
                        )
            if seen_keys != set(item.model_outputs):
                raise ValidationError("every model output must be rated")
            for r in ratings:
                self.ratings.append(RatingRecord(
                    participant_id=token,
                    item_id=item_id,
                    key=r["key"],
                    relevance=r["relevance"],
                    information=r["information"],
                    clarity=r["clarity"],
                    timestamp=timestamp,
                ))
            self._flush()

    # -- reporting -----------------------------------------------------

    def aggregate_report(self) -> dict:
        """Per-model mean scores, de-anonymized via each item's key map."""
        if not self.ratings:
            raise InsufficientDataError("no ratings stored")
        sums: dict[str, list[float]] = {}
        counts: dict[str, int] = {}
        for r in self.ratings:
            model = self.items[r.item_id].key_map[r.key]
            s = sums.setdefault(model, [0.0, 0.0, 0.0])
            s[0] += r.relevance
            s[1] += r.information
            s[2] += r.clarity
            counts[model] = counts.get(model, 0) + 1
        models = [
            {
                "model": m,
                "relevance": round(sums[m][0] / counts[m], 2),
                "information": round(sums[m][1] / counts[m], 2),
                "clarity": round(sums[m][2] / counts[m], 2),
                "count": counts[m],
            }
            for m in sorted(sums)
        ]
        return {"models": models, "rating_count": len(self.ratings)}
