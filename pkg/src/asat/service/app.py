"""HTTP API over a loaded snapshot; read-only, JSON in and out.

Errors use a structured body ``{"code": ..., "message": ...}`` with 400
for malformed input, 404 for unknown areas or uncovered coordinates, and
422 for dates that were never ingested (unless ``stale_ok=1``).
"""

from __future__ import annotations

import datetime as dt

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..perception.lexicon import awareness_score
from ..risk.assess import OutsideCoverage, RiskAssessment, UnknownArea, UnknownDate
from ..risk.pois import nearby_pois
from ..risk.weights import RiskError
from .state import RuntimeState


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def _parse_date(value: str | None, field: str) -> dt.date | None:
    if value is None:
        return None
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ApiError(400, "bad_request", f"{field} must be an ISO date, got {value!r}")


def _assessment_body(a: RiskAssessment) -> dict:
    body = {
        "date": a.date.isoformat(),
        "stale": a.stale,
        "levels": [
            {
                "level": lv.level,
                "geo_id": lv.geo_id,
                "name": lv.name,
                "index": lv.index,
                "perception": lv.perception,
                "density": lv.density,
                "mobility": lv.mobility,
                "breakdown": lv.breakdown,
            }
            for lv in a.levels
        ],
    }
    if a.location is not None:
        body["location"] = {
            "lat": a.location.lat,
            "lon": a.location.lon,
            "nearest_city": a.location.nearest_city,
            "distance_km": a.location.distance_km,
            "index": a.location.index,
            "mobility": a.location.mobility,
            "density": a.location.density,
        }
    return body


def app_from_env() -> FastAPI:
    """Factory for multi-worker serving: each worker loads the immutable
    snapshot named by the ASAT_* environment variables."""
    import os

    from .state import load_runtime

    snapshot = os.environ["ASAT_SNAPSHOT"]
    state = load_runtime(
        snapshot,
        os.environ.get("ASAT_GRAPH") or f"{snapshot}/graph",
        os.environ.get("ASAT_MODELS") or f"{snapshot}/models",
        gamma_path=os.environ.get("ASAT_GAMMA") or None,
        pois_path=os.environ.get("ASAT_POIS") or None,
    )
    return create_app(state)


def create_app(state: RuntimeState) -> FastAPI:
    app = FastAPI(title="asat", version="1")
    app.state.runtime = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "bad_request", "message": str(exc.errors())})

    def runtime() -> RuntimeState:
        return app.state.runtime

    def translate(exc: Exception) -> ApiError:
        if isinstance(exc, OutsideCoverage):
            return ApiError(404, "outside_coverage", str(exc))
        if isinstance(exc, UnknownArea):
            return ApiError(404, "unknown_area", str(exc))
        if isinstance(exc, UnknownDate):
            return ApiError(422, "unknown_date", str(exc))
        if isinstance(exc, RiskError):
            return ApiError(400, "bad_request", str(exc))
        raise exc

    @app.get("/v1/risk")
    async def risk(lat: float, lon: float, date: str | None = None,
                   stale_ok: bool = False):
        rt = runtime()
        try:
            assessment = rt.assessor.assess_point(
                lat, lon, _parse_date(date, "date"), stale_ok=stale_ok)
        except RiskError as exc:
            raise translate(exc)
        # hot path: the body is already plain primitives, skip the encoder walk
        return JSONResponse(_assessment_body(assessment))

    @app.get("/v1/areas/{geo_id}/timeseries")
    async def timeseries(geo_id: str,
                         from_: str = Query(alias="from"),
                         to: str = Query()):
        rt = runtime()
        start = _parse_date(from_, "from")
        end = _parse_date(to, "to")
        if start > end:
            raise ApiError(400, "bad_request",
                           f"from {start.isoformat()} is after to {end.isoformat()}")
        if geo_id not in rt.ahin.nodes:
            raise ApiError(404, "unknown_area", f"unknown area {geo_id!r}")
        points = []
        day = start
        while day <= end:
            points.append({"date": day.isoformat(),
                           "index": rt.assessor.index_for(geo_id, day)})
            day += dt.timedelta(days=1)
        return {"geo_id": geo_id, "from": start.isoformat(), "to": end.isoformat(),
                "points": points}

    @app.get("/v1/pois")
    async def pois(lat: float, lon: float, tag: str, radius_km: float,
                   date: str | None = None):
        rt = runtime()
        try:
            scored = nearby_pois(rt.assessor, rt.pois, lat, lon, tag, radius_km,
                                 _parse_date(date, "date"))
        except RiskError as exc:
            raise translate(exc)
        return {
            "query": {"lat": lat, "lon": lon, "tag": tag, "radius_km": radius_km},
            "pois": [
                {
                    "name": s.poi.name,
                    "tag": s.poi.tag,
                    "lat": s.poi.lat,
                    "lon": s.poi.lon,
                    "mobility": s.poi.mobility,
                    "distance_km": s.distance_km,
                    "city_geo_id": s.city_geo_id,
                    "index": s.index,
                }
                for s in scored
            ],
        }

    @app.get("/v1/areas/{geo_id}/posts")
    async def area_posts(geo_id: str, date: str | None = None):
        rt = runtime()
        if geo_id not in rt.ahin.nodes:
            raise ApiError(404, "unknown_area", f"unknown area {geo_id!r}")
        try:
            day, _ = rt.assessor.resolve_date(_parse_date(date, "date"), stale_ok=True)
        except RiskError as exc:
            raise translate(exc)
        posts = rt.posts_index.get((geo_id, day), [])
        snippets = [
            {
                "id": p.post_id,
                "subreddit": p.subreddit,
                "snippet": (p.title + " " + p.body).strip()[:200],
                "awareness": awareness_score(p.title + " " + p.body, rt.lexicon),
            }
            for p in posts
        ]
        return {
            "geo_id": geo_id,
            "date": day.isoformat(),
            "posts": snippets,
            "synthetic": rt.perception_sources.get((geo_id, day)) == "synthetic",
        }

    return app
