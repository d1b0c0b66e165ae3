"""HTTP service backing the episode explorer.

All endpoints are read-only JSON under /api/. Similarity matrices are primed
in a background thread at startup; the cache-dependent endpoints answer 503
until priming finishes. Every error body is ``{"code": int, "message": str}``.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.staticfiles import StaticFiles

from .corpus import ValidationError
from .ontology import MEASURES as ONTOLOGY_MEASURES
from .workspace import (
    LEVELS,
    MeasureSpec,
    UnknownItemError,
    Workspace,
    format_score,
    parse_measure,
    recommendation_to_dict,
)

DEFAULT_PRIME_SPECS = (
    parse_measure("cosidf", level="central"),
    parse_measure("cosidf", level="both"),
    parse_measure("cf"),
)

# Softness defaults the paper's sweeps settled on per measure.
SOFTNESS_DEFAULTS = {"path": 2.0, "wup": 2.0, "lch": 4.0, "lin": 2.0, "res": 2.0, "jcn": 2.0}
SOFTNESS_GRID = (0.5, 1.0, 2.0, 4.0, 8.0, 20.0)


def measure_catalog(n_items: int) -> list[dict]:
    """Static metadata the UI uses to build its controls."""
    out = [
        {"token": "cosidf", "family": "set", "label": "Cosine (IDF-weighted)",
         "aliases": ["cosine"], "takes_p": False, "takes_level": True,
         "levels": list(LEVELS)},
        {"token": "dice", "family": "set", "label": "Dice coefficient",
         "takes_p": False, "takes_level": True, "levels": list(LEVELS)},
        {"token": "jaccard", "family": "set", "label": "Jaccard index",
         "takes_p": False, "takes_level": True, "levels": list(LEVELS)},
    ]
    for name in ONTOLOGY_MEASURES:
        out.append(
            {"token": name, "family": "ontology", "label": name.upper() + " (soft cosine)",
             "takes_p": True, "p_default": SOFTNESS_DEFAULTS[name],
             "p_grid": list(SOFTNESS_GRID), "p_min": 0.1, "p_max": 20.0,
             "takes_level": True, "levels": list(LEVELS)}
        )
    out.append(
        {"token": "tfidf", "family": "text", "label": "Transcript TF-IDF cosine",
         "takes_p": False, "takes_level": False}
    )
    out.append(
        {"token": "lsi:40", "family": "text", "label": "Transcript LSI cosine",
         "takes_p": True, "p_default": 40, "p_min": 1, "p_max": max(1, n_items),
         "p_integer": True, "takes_level": False}
    )
    out.append(
        {"token": "cf", "family": "cf", "label": "Rating co-occurrence (Pearson)",
         "takes_p": False, "takes_level": False}
    )
    return out


def create_app(ws: Workspace, prime=True, static_dir=None) -> FastAPI:
    """Build the service over one workspace.

    ``prime`` may be True (default matrix set), an iterable of MeasureSpec,
    or False to start ready with an empty cache.
    """
    if prime is True:
        prime_specs = list(DEFAULT_PRIME_SPECS)
    elif prime:
        prime_specs = list(prime)
    else:
        prime_specs = []

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if prime_specs:
            thread = threading.Thread(target=_prime, daemon=True)
            thread.start()
        yield

    app = FastAPI(title="themetrek", lifespan=lifespan)
    app.state.ws = ws
    app.state.ready = not prime_specs

    def _prime() -> None:
        for spec in prime_specs:
            ws.similarity(spec)
        app.state.ready = True

    def ensure_ready() -> None:
        if not app.state.ready:
            raise HTTPException(status_code=503, detail="caches are still building")

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": exc.status_code, "message": str(exc.detail)},
        )

    @app.exception_handler(RequestValidationError)
    async def param_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(p) for p in first.get("loc", ()))
        message = f"malformed parameter {where}: {first.get('msg', 'invalid')}"
        return JSONResponse(status_code=400, content={"code": 400, "message": message})

    @app.get("/api/items")
    def list_items():
        return {
            "count": len(ws.catalog),
            "items": [
                {"item_id": e.item_id, "title": e.title, "series": e.series,
                 "season": e.season, "episode": e.episode}
                for e in ws.catalog.entries
            ],
        }

    @app.get("/api/items/{item_id}")
    def item_detail(item_id: str):
        if item_id not in ws.catalog:
            raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}")
        e = ws.catalog.get(item_id)
        themes = {
            level: [
                {"name": t, "domain": ws.ontology.domain_of(t)}
                for t in sorted(ws.annotations.themes_for(item_id, level))
            ]
            for level in ("central", "peripheral")
        }
        return {"item_id": e.item_id, "title": e.title, "series": e.series,
                "season": e.season, "episode": e.episode, "themes": themes}

    @app.get("/api/similar/{item_id}")
    def similar(item_id: str, measure: str = "cosidf", k: int = 10,
                p: float | None = None, level: str = "central"):
        ensure_ready()
        try:
            spec = parse_measure(measure, p=p, level=level)
            result = ws.recommend(item_id, spec, k=k, level=level)
        except UnknownItemError:
            raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}") from None
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return recommendation_to_dict(result, ws.ontology)

    @app.get("/api/measures")
    def measures():
        return {"measures": measure_catalog(len(ws.catalog))}

    @app.get("/api/themes/{name}")
    def theme_subtree(name: str, depth: int = 2):
        if depth < 0:
            raise HTTPException(status_code=400, detail="depth must be >= 0")
        if name not in ws.ontology.entities:
            raise HTTPException(status_code=404, detail=f"unknown theme {name!r}")
        return {
            "name": name,
            "domain": ws.ontology.domain_of(name),
            "depth": ws.ontology.depth[name],
            "tree_max_depth": ws.ontology.d,
            "subtree": ws.ontology.subtree(name, max_depth=depth),
        }

    @app.get("/api/predict")
    def predict(user: str, item: str, model: str = "iknn"):
        ensure_ready()
        try:
            predictor = ws.predictor_for(model)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"user": user, "item": item, "model": model,
                "prediction": format_score(predictor.predict(user, item))}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {
                "service": "themetrek",
                "endpoints": ["/api/items", "/api/items/{id}", "/api/similar/{id}",
                              "/api/measures", "/api/themes/{name}", "/api/predict"],
            }

    return app
