"""HTTP ingestion endpoint for non-identifiable feature vectors.

The wire schema carries only the 1x7 scaled vector plus subject and device
identifiers and a timestamp; there is no audio field anywhere, and unknown
fields are rejected.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, field_validator

from .acoustics.features import FEATURE_NAMES
from .cohort import Cohort, FeatureSample, Subject
from .store import FeatureStore, StorageUnavailable

VECTOR_LENGTH = len(FEATURE_NAMES)
SCHEMA_VERSION = 1


def _parse_timestamp(value: str) -> datetime:
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


class IngestRecord(BaseModel):
    """One feature observation; extra fields (audio included) are rejected."""

    model_config = ConfigDict(extra="forbid")

    subject_id: str
    device_id: str
    recorded_at: str
    vector: list[float]
    schema_version: int = SCHEMA_VERSION

    @field_validator("subject_id", "device_id")
    @classmethod
    def _nonempty(cls, v: str) -> str:
        if not v:
            raise ValueError("must be non-empty")
        return v

    @field_validator("recorded_at")
    @classmethod
    def _parseable(cls, v: str) -> str:
        try:
            _parse_timestamp(v)
        except ValueError as exc:
            raise ValueError(f"not an ISO-8601 timestamp: {exc}") from exc
        return v

    @field_validator("vector")
    @classmethod
    def _seven_finite(cls, v: list[float]) -> list[float]:
        if len(v) != VECTOR_LENGTH:
            raise ValueError(f"must have exactly {VECTOR_LENGTH} entries")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("entries must be finite")
        return v


def create_app(store: FeatureStore, bearer_token: str | None = None) -> FastAPI:
    app = FastAPI(title="voicetriage ingestion", version="1.0")

    def auth_error(request: Request) -> JSONResponse | None:
        if bearer_token is None:
            return None
        supplied = request.headers.get("Authorization", "")
        if supplied != f"Bearer {bearer_token}":
            return JSONResponse(status_code=401, content={"error": "Unauthorized"})
        return None

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        field = None
        for err in exc.errors():
            loc = [str(p) for p in err.get("loc", ()) if p != "body"]
            if loc:
                field = loc[0]
                break
        content = {"error": "ValidationFailed"}
        if field:
            content["field"] = field
        return JSONResponse(status_code=400, content=content)

    @app.exception_handler(StorageUnavailable)
    async def _storage_error(request: Request, exc: StorageUnavailable):
        return JSONResponse(status_code=503, content={"error": "StorageUnavailable"})

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/features", status_code=201)
    async def ingest(record: IngestRecord, request: Request):
        denied = auth_error(request)
        if denied:
            return denied
        rid, created = store.append(record.model_dump())
        if not created:
            return JSONResponse(status_code=200, content={"record_id": rid})
        return {"record_id": rid}

    @app.get("/v1/subjects/{subject_id}/features")
    async def subject_features(
        subject_id: str,
        request: Request,
        start: str | None = Query(None, alias="from"),
        end: str | None = Query(None, alias="to"),
    ):
        denied = auth_error(request)
        if denied:
            return denied
        try:
            start_ts = _parse_timestamp(start) if start else None
            end_ts = _parse_timestamp(end) if end else None
        except ValueError:
            return JSONResponse(
                status_code=400, content={"error": "ValidationFailed", "field": "from/to"}
            )
        return store.records_for(subject_id, start_ts, end_ts)

    return app


def export_cohort(store: FeatureStore, subject_registry: dict) -> Cohort:
    """Join the registry (subject_id -> (gender, diagnosis)) with the store.

    Registry subjects with no stored records appear with empty sample sets;
    stored records for unregistered subjects are ignored.
    """
    subjects = [
        Subject(sid, gender, diagnosis)
        for sid, (gender, diagnosis) in sorted(subject_registry.items())
    ]
    cohort = Cohort(subjects)
    for subject in subjects:
        for rec in store.records_for(subject.subject_id):
            cohort.add_sample(
                FeatureSample(
                    subject_id=rec["subject_id"],
                    device_id=rec["device_id"],
                    recorded_at=_parse_timestamp(rec["recorded_at"]),
                    vector=np.asarray(rec["vector"], dtype=np.float64),
                )
            )
    return cohort
