from .store import (
    AuthError,
    ConflictError,
    InsufficientDataError,
    RATERS_PER_ITEM,
    SCORE_MAX,
    SCORE_MIN,
    StudyItem,
    StudyStore,
    ValidationError,
    anonymize_outputs,
    shuffled_order,
)
from .service import create_app, INSTRUCTIONS

__all__ = [
    "AuthError",
    "ConflictError",
    "InsufficientDataError",
    "RATERS_PER_ITEM",
    "SCORE_MAX",
    "SCORE_MIN",
    "StudyItem",
    "StudyStore",
    "ValidationError",
    "anonymize_outputs",
    "shuffled_order",
    "create_app",
    "INSTRUCTIONS",
]
