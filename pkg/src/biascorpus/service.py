"""HTTP front of the annotation store, consumed by the labeling UI.

Annotator identity travels in the ``X-Annotator-Id`` header (or the
``annotator`` query parameter for GET /next). Errors come back as JSON
``{"error": <name>, "detail": <message>}`` with a matching status code.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from biascorpus.annotation import AnnotationStore
from biascorpus.dataset import prohibited_rule_suggest
from biascorpus.errors import (
    AlreadyLabeled,
    BiasCorpusError,
    EmptyBatch,
    InvalidLabel,
    NotAssigned,
    RowSumMismatch,
    UnknownAnnotator,
    UnknownItem,
    UnknownSession,
)

_STATUS = {
    UnknownSession: 404,
    UnknownItem: 404,
    UnknownAnnotator: 404,
    NotAssigned: 403,
    AlreadyLabeled: 409,
    InvalidLabel: 400,
    EmptyBatch: 400,
    RowSumMismatch: 409,
}


class LabelSubmission(BaseModel):
    item_id: str
    label: int
    guideline_ack: bool = False
    annotator_id: str | None = None


class SessionRequest(BaseModel):
    items: list[dict]
    annotators: list[str]
    overlap_fraction: float = 0.0
    seed: int = 0
    session_id: str | None = None


def _item_payload(item, session_id: str | None = None) -> dict:
    suggestion = prohibited_rule_suggest(item)
    payload = {
        "item_id": item.item_id,
        "text": item.sentence.text,
        "context_before": item.sentence.context_before,
        "context_after": item.sentence.context_after,
        "matches": [m.to_record() for m in item.matches],
        "suggestion": int(suggestion) if suggestion is not None else None,
    }
    if session_id is not None:
        payload["session_id"] = session_id
    return payload


def create_app(store: AnnotationStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="biascorpus annotation service")

    @app.exception_handler(BiasCorpusError)
    async def _handle(request: Request, exc: BiasCorpusError):
        status = _STATUS.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions")
    def create_session(req: SessionRequest):
        from biascorpus.dataset import CandidateItem

        batch = [CandidateItem.from_record(rec) for rec in req.items]
        session = store.open_session(
            batch, req.annotators, req.overlap_fraction, req.seed, session_id=req.session_id
        )
        return {
            "session_id": session.session_id,
            "items": len(session.items),
            "overlap_items": len(session.overlap_item_ids),
        }

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, annotator: str = Query(...)):
        item = store.next_item(session_id, annotator)
        if item is None:
            return {"done": True}
        return {"done": False, "item": _item_payload(item, session_id)}

    @app.post("/sessions/{session_id}/labels")
    def submit_label(
        session_id: str,
        body: LabelSubmission,
        x_annotator_id: str | None = Header(default=None),
    ):
        annotator = x_annotator_id or body.annotator_id
        if not annotator:
            raise UnknownAnnotator("no annotator id provided")
        record = store.submit_label(
            session_id, annotator, body.item_id, body.label, guideline_ack=body.guideline_ack
        )
        return {"ok": True, "record": record.to_record()}

    @app.get("/sessions/{session_id}/progress")
    def progress(session_id: str):
        return store.progress(session_id)

    @app.get("/sessions/{session_id}/iaa")
    def iaa(session_id: str, space: str = Query(default="four_way")):
        report = store.iaa_report(session_id, label_space=space)
        return report.to_json()

    @app.get("/items/{item_id}")
    def get_item(item_id: str):
        for session in store.sessions.values():
            for item in session.items:
                if item.item_id == item_id:
                    return _item_payload(item, session.session_id)
        raise UnknownItem(item_id)

    ui_dir = ui_dir or os.environ.get("BIASCORPUS_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def run_service(
    data_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8400,
    ui_dir: str | Path | None = None,
) -> None:
    import uvicorn

    store = AnnotationStore(data_dir)
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
