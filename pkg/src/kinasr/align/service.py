"""HTTP/JSON facade over the alignment store, consumed by the browser UI.

Routes:
    GET  /documents?annotator=
    GET  /documents/{doc_id}
    POST /marks
    GET  /marks?doc=&annotator=
    GET  /agreement?a=&b=&docs=
    POST /compile
    GET  /audio/{doc_id}.wav
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel

from ..errors import (
    IncompleteAnnotationError,
    IndexOutOfRangeError,
    NoCommonDocumentsError,
    NonMonotonicError,
    UnknownDocumentError,
)
from .store import MarkStore


class MarkIn(BaseModel):
    doc_id: str
    annotator_id: str
    silence_index: int
    word_index: int | None = None


class CompileIn(BaseModel):
    annotator_id: str
    doc_ids: list[str] | None = None


def create_app(store: MarkStore) -> FastAPI:
    app = FastAPI(title="speech-text alignment service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.get("/documents")
    def list_documents(annotator: str | None = Query(default=None)):
        return store.list_documents(annotator_id=annotator)

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        try:
            return store.get_document(doc_id).to_dict()
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/marks")
    def submit_mark(mark: MarkIn):
        try:
            stored = store.submit_mark(
                doc_id=mark.doc_id,
                annotator_id=mark.annotator_id,
                silence_index=mark.silence_index,
                word_index=mark.word_index,
            )
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except IndexOutOfRangeError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except NonMonotonicError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"status": "ok", "mark": stored.to_dict()}

    @app.get("/marks")
    def get_marks(doc: str, annotator: str):
        try:
            store.get_document(doc)
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"marks": [m.to_dict() for m in store.marks_for(doc, annotator)]}

    @app.get("/agreement")
    def agreement(a: str, b: str, docs: str | None = Query(default=None)):
        doc_ids = docs.split(",") if docs else None
        try:
            report = store.agreement(a, b, doc_ids=doc_ids)
        except NoCommonDocumentsError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "agreement": report.ratio,
            "n_agreeing": report.n_agreeing,
            "n_markers": report.n_markers,
            "doc_ids": report.doc_ids,
        }

    @app.post("/compile")
    def compile_dataset(body: CompileIn):
        try:
            kept, rejected = store.compile_dataset(body.annotator_id, doc_ids=body.doc_ids)
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except IncompleteAnnotationError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {
            "kept": [e.to_dict() for e in kept],
            "rejected": [{"id": e.id, "reason": reason} for e, reason in rejected],
        }

    @app.get("/audio/{doc_id}.wav")
    def audio(doc_id: str):
        try:
            doc = store.get_document(doc_id)
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        path = Path(doc.audio_ref)
        if not path.is_absolute():
            path = store.root / path
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"audio for {doc_id} not found")
        return FileResponse(path, media_type="audio/wav")

    return app
