"""REST service over the engine.

JSON in, JSON out; every engine error maps to one stable machine-readable
code in the body and an appropriate status. Mutating endpoints accept an
optional ``version`` field for optimistic concurrency: a stale version gets
a 409 with code VERSION_CONFLICT and the client refreshes.

Concept ids contain slashes; where they appear in a path they must be
URL-encoded (%2F).
"""

from __future__ import annotations

from typing import Any
from urllib.parse import unquote

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from .cag import CurationAction
from .engine import Engine, edge_payload
from .errors import (
    CagkitError,
    DegenerateBoxes,
    DimensionMismatch,
    EmptyEmbeddingFile,
    EmptyQuery,
    FileMissing,
    InvalidQuery,
    MismatchedStatement,
    NoPathFound,
    SelfImport,
    SelfLoop,
    StoreUnavailable,
    UnknownEdge,
    UnknownModel,
    UnknownNode,
    UnknownStatement,
    ValidationFailed,
    VersionConflict,
    WouldCreateCycle,
)
from .model import Polarity

__all__ = ["create_app", "STATUS_BY_CODE"]

STATUS_BY_CODE: dict[str, int] = {
    ValidationFailed.code: 400,
    InvalidQuery.code: 400,
    EmptyQuery.code: 400,
    SelfLoop.code: 400,
    SelfImport.code: 400,
    FileMissing.code: 400,
    DimensionMismatch.code: 400,
    EmptyEmbeddingFile.code: 400,
    MismatchedStatement.code: 400,
    DegenerateBoxes.code: 400,
    UnknownModel.code: 404,
    UnknownNode.code: 404,
    UnknownEdge.code: 404,
    UnknownStatement.code: 404,
    NoPathFound.code: 404,
    VersionConflict.code: 409,
    WouldCreateCycle.code: 409,
    StoreUnavailable.code: 503,
    "INVALID_ARGUMENT": 400,
    "UNAUTHORIZED": 401,
}


def _error_body(code: str, message: str, details: dict[str, Any] | None = None) -> dict[str, Any]:
    return {"error": {"code": code, "message": message, "details": details or {}}}


def _edge_pair_from_request(request: Request) -> tuple[str, str]:
    """Recover URL-encoded concept ids from /cags/{id}/edges/{subj}/{obj}[...].

    ASGI servers hand routing a fully decoded path, which folds the %2F
    inside concept ids into real slashes; the raw request path still has
    them encoded, so the pair is parsed from there.
    """
    raw = request.scope.get("raw_path") or request.url.path.encode("utf-8")
    segments = raw.decode("latin-1").split("?", 1)[0].split("/")
    try:
        idx = len(segments) - 1 - segments[::-1].index("edges")
    except ValueError:
        raise ValueError("not an edge-scoped path") from None
    tail = segments[idx + 1 :]
    if tail and tail[-1] == "override":
        tail = tail[:-1]
    if len(tail) != 2 or not all(tail):
        raise ValueError(
            "edge paths are /edges/{subj}/{obj} with URL-encoded (%2F) concept ids"
        )
    return unquote(tail[0]), unquote(tail[1])


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="cagkit", docs_url=None, redoc_url=None)

    @app.exception_handler(CagkitError)
    async def engine_error(request: Request, exc: CagkitError) -> JSONResponse:
        status = STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(status_code=status, content=_error_body(exc.code, exc.message, exc.details))

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content=_error_body("INVALID_ARGUMENT", str(exc)))

    @app.exception_handler(KeyError)
    async def key_error(request: Request, exc: KeyError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content=_error_body("INVALID_ARGUMENT", f"missing field: {exc}")
        )

    if engine.config.api_token:

        @app.middleware("http")
        async def check_token(request: Request, call_next):
            if request.headers.get("x-api-token") != engine.config.api_token:
                return JSONResponse(
                    status_code=401, content=_error_body("UNAUTHORIZED", "bad or missing token")
                )
            return await call_next(request)

    # ------------------------------------------------------------- corpus

    @app.get("/health")
    def health() -> dict[str, Any]:
        return {"status": "ok", **engine.health()}

    @app.post("/ingest")
    def ingest(body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        mode = body.get("mode", "append")
        if "path" in body:
            report = engine.ingest_file(body["path"], mode=mode)
        elif "records" in body:
            report = engine.ingest_records(body["records"], mode=mode)
        else:
            raise ValueError("ingest body needs 'path' or 'records'")
        return report.to_dict()

    @app.post("/search")
    def search(
        body: dict[str, Any] = Body(default={}),
        view: str | None = Query(default=None),
        edge_limit: int | None = Query(default=None),
        limit: int = Query(default=100, ge=1),
        offset: int = Query(default=0, ge=0),
    ) -> dict[str, Any]:
        result = engine.search(body)
        payload = result.to_dict()
        payload["statement_ids"] = payload["statement_ids"][offset : offset + limit]
        payload["statements"] = [
            statement_payload(engine, sid) for sid in payload["statement_ids"]
        ]
        if view == "nested":
            projection = engine.nested_projection(result, edge_limit=edge_limit)
            payload["nested"] = projection.to_dict()
            payload["nested"]["layout"] = engine.nested_view(projection).to_dict()
        return payload

    # -------------------------------------------------------- suggestions

    @app.get("/concepts/suggest")
    def concepts_suggest(q: str, k: int = Query(default=10, ge=1)) -> dict[str, Any]:
        hits = engine.concept_suggestions(q, k=k)
        return {
            "suggestions": [
                {
                    "concept": h.concept.id,
                    "display": h.concept.display_name,
                    "statement_count": h.statement_count,
                }
                for h in hits
            ]
        }

    @app.get("/concepts/{concept_id:path}/relationships/suggest")
    def relationships_suggest(concept_id: str, k: int = Query(default=5, ge=1)) -> dict[str, Any]:
        node = unquote(concept_id)
        got = engine.relationship_suggestions(node, k=k)
        return {
            direction: [
                {
                    "subj": s.subject,
                    "obj": s.object,
                    "support": s.support,
                    "polarity": s.aggregate_polarity.value,
                }
                for s in suggestions
            ]
            for direction, suggestions in got.items()
        }

    @app.get("/paths")
    def paths(
        source: str, target: str, max_hops: int = Query(default=2, ge=2), k: int = Query(default=5, ge=1)
    ) -> dict[str, Any]:
        found = engine.paths(source, target, max_hops=max_hops, k=k)
        return {
            "paths": [
                {
                    "concepts": list(p.concepts),
                    "hop_support": list(p.hop_support),
                    "affinity": p.affinity,
                }
                for p in found
            ]
        }

    # ---------------------------------------------------------------- CAGs

    @app.post("/cags", status_code=201)
    def create_cag(body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        model = engine.workspace.create_model(
            name=body["name"], acyclicity=body.get("acyclicity", "enforced")
        )
        return model.summary()

    @app.get("/cags")
    def list_cags(
        limit: int = Query(default=100, ge=1), offset: int = Query(default=0, ge=0)
    ) -> dict[str, Any]:
        models = engine.workspace.list_models()
        return {
            "total": len(models),
            "models": [m.summary() for m in models[offset : offset + limit]],
        }

    @app.get("/cags/{model_id}")
    def get_cag(model_id: str, layout: bool = Query(default=True)) -> dict[str, Any]:
        return engine.model_payload(model_id, include_layout=layout)

    @app.delete("/cags/{model_id}", status_code=204)
    def delete_cag(model_id: str) -> Response:
        engine.workspace.delete(model_id)
        return Response(status_code=204)

    @app.post("/cags/{model_id}/nodes")
    def add_node(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        engine.workspace.add_node(
            model_id,
            body["concept"],
            display=body.get("display"),
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return engine.workspace.get(model_id).summary()

    @app.post("/cags/{model_id}/edges")
    def add_edge(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        edge = engine.workspace.add_edge(
            model_id,
            body["subject"],
            body["object"],
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "edge": edge_payload(edge)}

    @app.delete("/cags/{model_id}/edges/{rest:path}")
    def delete_edge(
        model_id: str, rest: str, request: Request, version: int | None = Query(default=None)
    ) -> dict[str, Any]:
        subj, obj = _edge_pair_from_request(request)
        engine.workspace.remove_edge(model_id, subj, obj, expected_version=version)
        return engine.workspace.get(model_id).summary()

    @app.post("/cags/{model_id}/edges/{rest:path}/override")
    def set_override(
        model_id: str, rest: str, request: Request, body: dict[str, Any] = Body(...)
    ) -> dict[str, Any]:
        subj, obj = _edge_pair_from_request(request)
        raw = body.get("override")
        override = Polarity.from_wire(raw) if raw is not None else None
        edge = engine.workspace.set_edge_override(
            model_id,
            subj,
            obj,
            override,
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "edge": edge_payload(edge)}

    @app.post("/cags/{model_id}/curations")
    def curate(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        actions = [CurationAction.from_dict(a) for a in body["actions"]]
        report = engine.workspace.curate(
            model_id,
            actions,
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "report": report.to_dict()}

    @app.post("/cags/{model_id}/materialize")
    def materialize(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        selected = body.get("selected_pairs")
        pairs = [tuple(p) for p in selected] if selected is not None else None
        report = engine.workspace.materialize(
            model_id,
            body["statement_ids"],
            selected_pairs=pairs,
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "report": report.to_dict()}

    @app.post("/cags/{model_id}/import")
    def import_cags(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        report = engine.import_models(
            model_id,
            body["sources"],
            threshold=body.get("threshold"),
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "report": report.to_dict()}

    @app.get("/cags/{model_id}/duplicates")
    def duplicates(model_id: str, threshold: float | None = Query(default=None)) -> dict[str, Any]:
        matches = engine.near_duplicates(model_id, threshold=threshold)
        return {"matches": [m.to_dict() for m in matches]}

    @app.post("/cags/{model_id}/merge-nodes")
    def merge_nodes(model_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        report = engine.merge_nodes(
            model_id,
            body["survivor"],
            body["absorbed"],
            actor=body.get("actor", "analyst"),
            expected_version=body.get("version"),
        )
        return {"version": engine.workspace.get(model_id).version, "report": report.to_dict()}

    @app.get("/cags/{model_id}/export")
    def export_cag(model_id: str) -> dict[str, Any]:
        return engine.workspace.export(model_id)

    @app.post("/cags/import-file", status_code=201)
    def import_file(body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        model = engine.workspace.import_export(body["document"])
        return model.summary()

    @app.get("/statements/{statement_id}")
    def get_statement(statement_id: str) -> dict[str, Any]:
        payload = statement_payload(engine, statement_id)
        if payload is None:
            raise UnknownStatement(f"no such statement: {statement_id}")
        return payload

    return app


def statement_payload(engine: Engine, statement_id: str) -> dict[str, Any] | None:
    s = engine.store.statement(statement_id)
    if s is None:
        return None
    return {
        "id": s.id,
        "subj": {"concept": s.subject, "text": s.subject_text},
        "obj": {"concept": s.object, "text": s.object_text},
        "polarity": s.polarity.to_wire(),
        "belief": s.belief,
        "discarded": s.discarded,
        "evidence": [
            {
                "doc_id": ev.doc_id,
                "text": ev.text,
                "source": ev.source,
                "date": ev.publication_date.isoformat() if ev.publication_date else None,
            }
            for ev in s.evidence
        ],
        "context": {
            "region": s.context.region_path,
            "lat": s.context.lat_lon[0] if s.context.lat_lon else None,
            "lon": s.context.lat_lon[1] if s.context.lat_lon else None,
            "start": s.context.time_interval[0].isoformat() if s.context.time_interval else None,
            "end": s.context.time_interval[1].isoformat() if s.context.time_interval else None,
        },
    }
