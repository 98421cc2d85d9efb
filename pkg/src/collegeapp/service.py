"""HTTP facade over the solvers for the companion UI.

Endpoints: POST /api/solve, POST /api/frontier, POST /api/whatif, and
GET /api/health.  Stateless: every request carries the full market, and
annealer requests must carry an explicit seed so identical requests give
identical responses.  Errors use the envelope
``{"error": {"code", "message", "path"?}}`` with 400 for schema problems,
413 for oversized bodies, and 422 for solver refusals.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .heterogeneous import SaParams
from .homogeneous import greedy_optimal
from .instances import SchemaViolation, market_from_document
from .market import MarketError, SolverRefusal, TrivialInstance
from .solve import (
    ALGORITHMS,
    DEFAULT_EPSILON,
    WhatIfError,
    frontier_document,
    report_document,
    solve_document,
    what_if,
)

MAX_BODY_ENV = "COLLEGEAPP_MAX_BODY"
TIME_LIMIT_ENV = "COLLEGEAPP_TIME_LIMIT"
UI_ORIGIN_ENV = "COLLEGEAPP_UI_ORIGIN"
PORT_ENV = "COLLEGEAPP_PORT"


@dataclass(frozen=True)
class ServiceConfig:
    max_body_bytes: int = 1 << 20
    time_limit_s: float = 10.0
    ui_origins: tuple = ("*",)

    @staticmethod
    def from_env() -> "ServiceConfig":
        origins = tuple(
            s.strip() for s in os.environ.get(UI_ORIGIN_ENV, "*").split(",") if s.strip()
        )
        return ServiceConfig(
            max_body_bytes=int(os.environ.get(MAX_BODY_ENV, 1 << 20)),
            time_limit_s=float(os.environ.get(TIME_LIMIT_ENV, 10.0)),
            ui_origins=origins or ("*",),
        )


class RequestFault(Exception):
    def __init__(self, status: int, code: str, message: str, path: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.path = path


def _fault_response(exc: RequestFault) -> JSONResponse:
    err = {"code": exc.code, "message": exc.message}
    if exc.path:
        err["path"] = exc.path
    return JSONResponse(status_code=exc.status, content={"error": err})


async def _parse_body(request: Request, config: ServiceConfig) -> dict:
    body = await request.body()
    if len(body) > config.max_body_bytes:
        raise RequestFault(413, "body_too_large", f"body exceeds {config.max_body_bytes} bytes")
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise RequestFault(400, "malformed_json", str(exc))
    if not isinstance(doc, dict):
        raise RequestFault(400, "schema", "request body must be a JSON object")
    return doc


def _split_envelope(doc: dict):
    """Accept either a bare market document or {"market": ..., params}."""
    if "market" in doc:
        allowed = {"market", "algorithm", "h", "epsilon", "sa", "locked_in", "locked_out"}
        unknown = set(doc) - allowed
        if unknown:
            raise RequestFault(400, "schema", f"unknown fields {sorted(unknown)}")
        return doc["market"], doc
    return doc, {}


def _algorithm_of(params: dict) -> str:
    algorithm = params.get("algorithm", "auto")
    if algorithm not in ALGORITHMS:
        raise RequestFault(
            400, "schema", f"algorithm must be one of {ALGORITHMS}", "algorithm"
        )
    return algorithm


def _sa_params_of(params: dict, algorithm: str) -> SaParams | None:
    sa = params.get("sa")
    if algorithm != "sa":
        return None
    if not isinstance(sa, dict) or "seed" not in sa or not isinstance(sa["seed"], int):
        raise RequestFault(
            400, "sa_seed_required", "annealer requests must carry an integer sa.seed", "sa.seed"
        )
    try:
        return SaParams(
            temperature=float(sa.get("temperature", 0.25)),
            cooling=float(sa.get("cooling", 1 / 16)),
            iterations=int(sa.get("iterations", 500)),
            seed=int(sa["seed"]),
        )
    except MarketError as exc:
        raise RequestFault(400, "schema", str(exc), "sa")


def _epsilon_of(params: dict) -> float:
    epsilon = params.get("epsilon", DEFAULT_EPSILON)
    if not isinstance(epsilon, (int, float)) or not 0 < epsilon < 1:
        raise RequestFault(400, "schema", "epsilon must be in (0, 1)", "epsilon")
    return float(epsilon)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    app = FastAPI(title="collegeapp", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.ui_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    executor = ThreadPoolExecutor(max_workers=os.cpu_count() or 4)

    def run_limited(fn, *args, **kwargs):
        future = executor.submit(fn, *args, **kwargs)
        try:
            return future.result(timeout=config.time_limit_s)
        except FutureTimeout:
            raise RequestFault(
                422, "budget_exceeded", f"solve exceeded the {config.time_limit_s:.0f} s limit"
            )

    @app.exception_handler(RequestFault)
    async def _on_fault(request, exc):
        return _fault_response(exc)

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/solve")
    async def solve(request: Request):
        doc = await _parse_body(request, config)
        market_doc, params = _split_envelope(doc)
        algorithm = _algorithm_of(params)
        try:
            raw = market_from_document(market_doc)
            report = run_limited(
                solve_document,
                raw,
                algorithm,
                h=params.get("h"),
                epsilon=_epsilon_of(params),
                sa_params=_sa_params_of(params, algorithm),
            )
        except SchemaViolation as exc:
            raise RequestFault(400, "schema", exc.reason, exc.path)
        except SolverRefusal as exc:
            raise RequestFault(422, "solver_refused", str(exc))
        except MarketError as exc:
            raise RequestFault(400, "invalid_market", str(exc))
        return report_document(report)

    @app.post("/api/frontier")
    async def frontier_endpoint(request: Request):
        doc = await _parse_body(request, config)
        market_doc, _ = _split_envelope(doc)
        try:
            raw = market_from_document(market_doc)
            market = raw.to_market()
        except SchemaViolation as exc:
            raise RequestFault(400, "schema", exc.reason, exc.path)
        except TrivialInstance:
            return {"entries": [], "t0": market_doc.get("t0", 0.0), "budget": market_doc["budget"]}
        except MarketError as exc:
            raise RequestFault(400, "invalid_market", str(exc))
        if not market.unit_costs:
            raise RequestFault(
                422, "unit_costs_required", "the value frontier needs unit application costs"
            )
        front = run_limited(greedy_optimal, market, market.size)
        return frontier_document(front)

    @app.post("/api/whatif")
    async def whatif(request: Request):
        doc = await _parse_body(request, config)
        market_doc, params = _split_envelope(doc)
        algorithm = _algorithm_of(params)
        locked_in = params.get("locked_in", [])
        locked_out = params.get("locked_out", [])
        for name, val in (("locked_in", locked_in), ("locked_out", locked_out)):
            if not isinstance(val, list) or not all(isinstance(j, int) for j in val):
                raise RequestFault(400, "schema", "must be a list of integers", name)
        try:
            raw = market_from_document(market_doc)
            result = run_limited(
                what_if,
                raw,
                locked_in,
                locked_out,
                algorithm,
                epsilon=_epsilon_of(params),
                sa_params=_sa_params_of(params, algorithm),
            )
        except SchemaViolation as exc:
            raise RequestFault(400, "schema", exc.reason, exc.path)
        except WhatIfError as exc:
            status = 400 if exc.code in ("lock_overlap", "index_range") else 422
            raise RequestFault(status, exc.code, str(exc))
        except SolverRefusal as exc:
            raise RequestFault(422, "solver_refused", str(exc))
        except MarketError as exc:
            raise RequestFault(400, "invalid_market", str(exc))
        return result.document()

    return app


app = create_app()
