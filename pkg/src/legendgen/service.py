"""HTTP service exposing the pipeline: upload charts, fetch ranked candidate
legends, apply edits that adapt the per-session model, and run interactions.

Documents are cached by content hash, so identical uploads dedupe. Each
session owns an append-only feedback log under data_dir plus an in-memory
model; restarting the service replays every log and reproduces the models
parameter for parameter.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .design import LegendSpec
from .errors import LegendgenError, VersionConflict
from .feedback import record_edit
from .interactions import fill_to_stroke, highlight, retarget, retrieve
from .model import FeedbackTuple, QualityModel, dump_model, init_model, load_model, update
from .pipeline import Document
from .search import GAParams

DEFAULT_SESSION = "default"
MODEL_SEED = 0


class SessionState:
    def __init__(self, session_id: str, log_path: Path):
        self.session_id = session_id
        self.log_path = log_path
        self.model: QualityModel = init_model(MODEL_SEED)
        self.tuples: list[FeedbackTuple] = []

    def append(self, tup: FeedbackTuple) -> None:
        self.tuples.append(tup)
        self.model = update(self.model, self.tuples)
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(tup.to_record()) + "\n")

    def replay(self) -> None:
        if not self.log_path.exists():
            return
        for line in self.log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            self.tuples.append(FeedbackTuple.from_record(json.loads(line)))
            self.model = update(self.model, self.tuples)


class ServiceState:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self.documents: dict[str, Document] = {}
        self.sessions: dict[str, SessionState] = {}
        for log in sorted((self.data_dir / "sessions").glob("*.jsonl")):
            state = SessionState(log.stem, log)
            state.replay()
            self.sessions[log.stem] = state

    def session(self, session_id: str) -> SessionState:
        if session_id not in self.sessions:
            log = self.data_dir / "sessions" / f"{session_id}.jsonl"
            self.sessions[session_id] = SessionState(session_id, log)
        return self.sessions[session_id]

    def document(self, doc_id: str) -> Document:
        doc = self.documents.get(doc_id)
        if doc is None:
            path = self.data_dir / "documents" / f"{doc_id}.svg"
            if path.exists():
                doc = Document.from_svg(path.read_text(encoding="utf-8"))
                self.documents[doc_id] = doc
            else:
                raise HTTPException(404, detail={"code": "unknown_document",
                                                 "message": doc_id})
        return doc

    def store_document(self, text: str) -> Document:
        doc = Document.from_svg(text)
        if doc.doc_id not in self.documents:
            self.documents[doc.doc_id] = doc
            docs_dir = self.data_dir / "documents"
            docs_dir.mkdir(parents=True, exist_ok=True)
            (docs_dir / f"{doc.doc_id}.svg").write_text(text, encoding="utf-8")
        return self.documents[doc.doc_id]


def _error_response(exc: LegendgenError) -> HTTPException:
    return HTTPException(status_code=422, detail={"code": exc.code, "message": str(exc)})


def create_app(data_dir: str | Path) -> FastAPI:
    app = FastAPI(title="legendgen")
    state = ServiceState(data_dir)
    app.state.service = state

    @app.exception_handler(LegendgenError)
    async def _legendgen_error(_request, exc: LegendgenError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422,
                            content={"detail": {"code": exc.code, "message": str(exc)}})

    @app.get("/health")
    def health():
        return {"status": "ok", "documents": len(state.documents),
                "sessions": sorted(state.sessions)}

    @app.post("/documents")
    def upload(svg: str = Body(..., media_type="image/svg+xml")):
        doc = state.store_document(svg)
        return {"document_id": doc.doc_id, "report": doc.extraction_report()}

    @app.get("/documents/{doc_id}/report")
    def report(doc_id: str):
        return state.document(doc_id).extraction_report()

    @app.get("/documents/{doc_id}/constraints")
    def constraints(doc_id: str):
        c = state.document(doc_id).constraints
        return {
            "symbol_types": c.symbol_types,
            "symbol_layouts": c.symbol_layouts,
            "text_layouts": c.text_layouts,
            "multi_layouts": c.multi_layouts,
            "directions": c.directions,
            "group_ids": c.group_ids,
        }

    @app.get("/documents/{doc_id}/candidates")
    def candidates(doc_id: str, top_k: int = 3, session: str = DEFAULT_SESSION,
                   seed: int = 0, population: int = 50, generations: int = 100):
        doc = state.document(doc_id)
        sess = state.session(session)
        params = GAParams(population=population, generations=generations, seed=seed)
        result = doc.candidates(sess.model, params, top_k=top_k)
        return {
            "model_version": sess.model.version,
            "candidates": [
                {
                    "spec": spec.to_record(),
                    "score": score,
                    "svg": doc.composed_svg(spec),
                }
                for spec, score in result.ranked
            ],
        }

    @app.post("/documents/{doc_id}/edit")
    def edit(doc_id: str, payload: dict = Body(...)):
        doc = state.document(doc_id)
        sess = state.session(payload.get("session", DEFAULT_SESSION))
        expected = payload.get("expected_version")
        if expected is not None and int(expected) != sess.model.version:
            raise HTTPException(409, detail={
                "code": VersionConflict.code,
                "message": f"expected {expected}, at {sess.model.version}",
            })
        prev = LegendSpec.from_record(payload["prev"])
        edited = LegendSpec.from_record(payload["edited"])
        tup = record_edit(doc, prev, edited, session_id=sess.session_id,
                          timestamp=time.time())
        sess.append(tup)
        return {"model_version": sess.model.version, "tuples": len(sess.tuples)}

    @app.post("/documents/{doc_id}/interact")
    def interact(doc_id: str, payload: dict = Body(...)):
        doc = state.document(doc_id)
        kind = payload.get("kind")
        spec = LegendSpec.from_record(payload["spec"])
        comp = doc.compose(spec)
        if kind == "highlight":
            sel = payload["selection"]
            selection = tuple(sel) if isinstance(sel, list) else int(sel)
            out = highlight(comp, payload["group_id"], selection)
        elif kind == "retrieve":
            group_id, position = retrieve(comp, payload["element_id"])
            return {"group_id": group_id, "position": position}
        elif kind == "retarget":
            palette = [tuple(c) for c in payload["palette"]]
            def render_fn(s, groups):
                from .design import render_legend
                return render_legend(s, groups, doc.scene, doc.symbols, doc.constraints)
            out = retarget(comp, payload["group_id"], palette, render_fn=render_fn)
        elif kind == "fill_to_stroke":
            out = fill_to_stroke(comp, payload["group_id"])
        else:
            raise HTTPException(422, detail={"code": "unknown_interaction",
                                             "message": str(kind)})
        from .svgdoc import scene_to_svg

        return {"svg": scene_to_svg(out.to_scene())}

    @app.get("/model/{session}", response_class=PlainTextResponse)
    def export_model(session: str):
        return dump_model(state.session(session).model)

    @app.post("/model/{session}")
    def import_model(session: str, text: str = Body(..., media_type="text/plain")):
        sess = state.session(session)
        sess.model = load_model(text)
        return {"model_version": sess.model.version}

    return app


def serve(port: int = 8000, data_dir: str = "legendgen-data", host: str = "127.0.0.1"):
    import uvicorn

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")
