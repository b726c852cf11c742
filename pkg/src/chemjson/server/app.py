"""REST endpoints under ``/api/v1``.

Reads are public. ``POST`` and ``DELETE`` need ``Authorization: Bearer <token>``
matching the configured token. Errors are returned as
``{"error": {"code", "message", "details"}}``.
"""

from __future__ import annotations

import hmac
import logging
import os
from dataclasses import dataclass

from fastapi import Depends, FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from ..cjson import CjsonDocument, serialize_cjson
from ..cjson import to_json as cjson_json
from ..errors import ChemDataError
from ..extchem import ExtChemDocument, calculation_json, serialize_extchem, validate_extchem
from ..ops import cjson_to_extchem, extchem_to_cjson
from .metadata import FORMATS, extract_metadata, load_document
from .store import FileStore

log = logging.getLogger(__name__)

API_PREFIX = "/api/v1"
DEFAULT_MAX_BODY = 32 * 1024 * 1024
WRITE_METHODS = frozenset({"POST", "PUT", "PATCH", "DELETE"})


@dataclass(frozen=True)
class ServerConfig:
    data_dir: str
    token: str
    max_body: int = DEFAULT_MAX_BODY

    @classmethod
    def from_env(cls, **overrides) -> "ServerConfig":
        values = {
            "data_dir": os.environ.get("CHEMJSON_DATA", "./data"),
            "token": os.environ.get("CHEMJSON_TOKEN", ""),
            "max_body": int(os.environ.get("CHEMJSON_MAX_BODY", DEFAULT_MAX_BODY)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=()):
        self.status, self.code, self.message, self.details = status, code, message, list(details)
        super().__init__(message)


def authenticate_request(method: str, headers, token: str) -> bool:
    """Reads are always allowed; writes need the bearer token (constant-time compare)."""
    if method.upper() not in WRITE_METHODS:
        return True
    header = headers.get("authorization") or ""
    scheme, _, supplied = header.partition(" ")
    if scheme.lower() != "bearer" or not token:
        return False
    return hmac.compare_digest(supplied.strip().encode(), token.encode())


def _parse_body(body: bytes, declared: str | None):
    try:
        fmt, doc = load_document(body, declared)
    except ChemDataError as exc:
        details = [str(v) for v in exc.violations] or [str(exc)]
        raise ApiError(400, "UnparseableDocument", str(exc), details) from None
    if isinstance(doc, ExtChemDocument):
        problems = validate_extchem(doc)
        if problems:
            raise ApiError(400, "UnparseableDocument", "document failed validation", [str(p) for p in problems])
        return fmt, doc, serialize_extchem(doc)
    return fmt, doc, serialize_cjson(doc)


def _as_format(fmt: str, doc, target: str) -> str:
    if fmt == target:
        return serialize_cjson(doc) if fmt == "cjson" else serialize_extchem(doc)
    try:
        if target == "cjson":
            return serialize_cjson(extchem_to_cjson(doc))
        return serialize_extchem(cjson_to_extchem(doc))
    except ChemDataError as exc:
        raise ApiError(422, "ConversionError", str(exc)) from None


def _int_param(request: Request, name: str, default: int, lo: int, hi: int | None = None) -> int:
    raw = request.query_params.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ApiError(400, "BadParameter", f"{name} must be an integer") from None
    if value < lo or (hi is not None and value > hi):
        bound = f"{lo}..{hi}" if hi is not None else f">= {lo}"
        raise ApiError(400, "BadParameter", f"{name} must be {bound}")
    return value


def create_app(config: ServerConfig) -> FastAPI:
    store = FileStore(config.data_dir)
    app = FastAPI(title="chemjson molecule server", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = config

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse({"error": {"code": exc.code, "message": exc.message, "details": exc.details}},
                            status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse({"error": {"code": "BadParameter", "message": "invalid request",
                                       "details": [str(e.get("msg")) for e in exc.errors()]}},
                            status_code=400)

    def require_auth(request: Request) -> None:
        if not authenticate_request(request.method, request.headers, config.token):
            raise ApiError(401, "Unauthorized", "missing or invalid bearer token")

    def load(server_id: str):
        rec = store.get(server_id)
        if rec is None:
            raise ApiError(404, "NotFound", f"no molecule {server_id}")
        _, doc = load_document(rec.document, rec.source_format)
        return rec, doc

    @app.post(API_PREFIX + "/molecules", dependencies=[Depends(require_auth)])
    async def ingest(request: Request):
        declared = request.query_params.get("format")
        if declared is not None and declared not in FORMATS:
            raise ApiError(400, "BadParameter", f"format must be one of {', '.join(FORMATS)}")
        length = request.headers.get("content-length")
        if length and length.isdigit() and int(length) > config.max_body:
            raise ApiError(413, "PayloadTooLarge", f"body exceeds {config.max_body} bytes")
        body = bytearray()
        async for chunk in request.stream():
            body.extend(chunk)
            if len(body) > config.max_body:
                raise ApiError(413, "PayloadTooLarge", f"body exceeds {config.max_body} bytes")
        fmt, doc, canonical = await run_in_threadpool(_parse_body, bytes(body), declared)
        try:
            server_id, created = await run_in_threadpool(store.put, fmt, canonical, extract_metadata(doc))
        except OSError as exc:
            log.exception("write failed")
            raise ApiError(500, "StorageFailure", str(exc)) from None
        return JSONResponse({"id": server_id}, status_code=201 if created else 200)

    @app.get(API_PREFIX + "/molecules")
    def query(request: Request):
        limit = _int_param(request, "limit", 25, 1, 100)
        offset = _int_param(request, "offset", 0, 0)
        formula = request.query_params.get("formula") or None
        element = request.query_params.get("element") or None
        hits, total = store.query(formula, element, limit, offset)
        return {"results": [e.summary() for e in hits], "count": total}

    @app.get(API_PREFIX + "/molecules/{server_id}")
    def get_molecule(server_id: str, request: Request):
        target = request.query_params.get("format", "cjson")
        if target not in FORMATS:
            raise ApiError(400, "BadParameter", f"format must be one of {', '.join(FORMATS)}")
        rec, doc = load(server_id)
        text = rec.document if target == rec.source_format else _as_format(rec.source_format, doc, target)
        return Response(text, media_type="application/json")

    @app.get(API_PREFIX + "/molecules/{server_id}/calculations")
    def calculations(server_id: str):
        _, doc = load(server_id)
        if isinstance(doc, ExtChemDocument):
            return [calculation_json(c) for c in doc.calculations]
        return []

    @app.get(API_PREFIX + "/molecules/{server_id}/vibrations")
    def vibrations(server_id: str):
        rec, doc = load(server_id)
        if not isinstance(doc, CjsonDocument):
            try:
                doc = extchem_to_cjson(doc)
            except ChemDataError as exc:
                raise ApiError(422, "ConversionError", str(exc)) from None
        if doc.vibrations is None:
            raise ApiError(404, "NotFound", f"molecule {server_id} has no vibrational data")
        return cjson_json(doc)["vibrations"]

    @app.delete(API_PREFIX + "/molecules/{server_id}", dependencies=[Depends(require_auth)])
    def delete(server_id: str):
        if not store.delete(server_id):
            raise ApiError(404, "NotFound", f"no molecule {server_id}")
        return Response(status_code=204)

    return app


def serve(config: ServerConfig, host: str = "127.0.0.1", port: int = 8080) -> None:
    import uvicorn

    if not config.token:
        log.warning("no bearer token configured; all write requests will be rejected")
    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
