"""Stateless HTTP workbench API.

Every request carries its full problem (grid, market, views, risk); nothing
is stored between requests, so concurrent requests are trivially isolated.
Failures map to HTTP 400 with the engine's stable error code.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import ConfigError, EngineError
from .specs import run_design, run_implied

log = logging.getLogger(__name__)


def create_app(cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="payoffdesign service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def failure(code: str, detail: str) -> JSONResponse:
        log.info("request failed: %s (%s)", code, detail)
        return JSONResponse(status_code=400, content={"error": code, "detail": detail})

    async def body_of(request: Request) -> dict:
        try:
            return await request.json()
        except Exception as err:
            raise ConfigError(f"request body is not valid JSON: {err}") from None

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.post("/api/design")
    async def api_design(request: Request):
        try:
            return run_design(await body_of(request))
        except ConfigError as err:
            return failure(err.code, str(err))
        except EngineError as err:
            return failure(err.code, str(err.args[0] if err.args else err))

    @app.post("/api/implied")
    async def api_implied(request: Request):
        try:
            return run_implied(await body_of(request))
        except ConfigError as err:
            return failure(err.code, str(err))
        except EngineError as err:
            return failure(err.code, str(err.args[0] if err.args else err))

    return app
