"""HTTP API for the rating study, per contracts/study_api.json."""

import time

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .store import (
    AuthError,
    ConflictError,
    StudyStore,
    ValidationError,
)

INSTRUCTIONS = """\
You will be shown a series of code review examples. Each example contains
a code diff, the surrounding code region, a machine-generated code summary,
the ground-truth reviewer comment, and several model-generated review
comments labeled with anonymous keys.

For every model-generated comment, rate three qualities on a scale of
0 to 5, where 5 is best:

- Relevance: how well the comment aligns with the code change.
- Information: how complete the information in the comment is.
- Explanation clarity: how clearly the comment explains itself.

Rate each comment independently. You must acknowledge these instructions
before receiving your first example.
"""


class AckRequest(BaseModel):
    token: str


class RatingEntry(BaseModel):
    key: str
    relevance: int
    information: int
    clarity: int


class SubmitRequest(BaseModel):
    token: str
    item_id: str
    ratings: list[RatingEntry]


def create_app(store: StudyStore) -> FastAPI:
    app = FastAPI(title="reviewgen study service")

    @app.get("/api/instructions")
    def instructions():
        return {"instructions": INSTRUCTIONS}

    @app.post("/api/instructions/ack")
    def acknowledge(req: AckRequest):
        try:
            store.acknowledge(req.token)
        except AuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        return {"status": "ok"}

    @app.get("/api/next-item")
    def next_item(token: str):
        try:
            view = store.assign_next(token)
        except AuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        if view is None:
            return {"done": True, "item": None}
        return {"done": False, "item": view}

    @app.post("/api/ratings")
    def submit(req: SubmitRequest):
        try:
            store.submit_ratings(
                req.token,
                req.item_id,
                [r.model_dump() for r in req.ratings],
                timestamp=time.time(),
            )
        except AuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"status": "ok"}

    @app.get("/api/report")
    def report(admin_token: str):
        if admin_token != store.admin_token:
            raise HTTPException(status_code=401, detail="bad admin token")
        try:
            return store.aggregate_report()
        except Exception as exc:
            raise HTTPException(status_code=409, detail=str(exc))
    return app
