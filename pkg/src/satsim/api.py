"""HTTP surface for the operator console and for scripts.

Fixed paths:

    POST /runs                          start a run (scenario body)
    GET  /runs                          list runs
    GET  /runs/{id}                     status + progress
    GET  /runs/{id}/metrics/{kind}      records by kind, ?from=&to= range
    POST /runs/{id}/ping                interactive probe {src, dst}
    POST /runs/{id}/inject              what-if steering {fail_isls, capacity_scale}
    GET  /runs/{id}/events?cursor=N     newline-delimited record stream
    GET  /scenarios                     bundled scenario list

POST /runs accepts either a bare scenario document, or a wrapper object
{"scenario": {...}} / {"scenario_name": "bundled-name"} with optional
"realtime_factor" and "seed". The event stream replays from ``cursor``
(an index into the header+records sequence) and then follows the run
live until it finishes; every line is one canonical JSON record.

Endpoints are plain sync functions: the framework runs them on a worker
pool, so a blocked interactive ping never stalls other clients, and the
engine thread is never entered by more than the run's own command queue.
"""

from __future__ import annotations

from typing import Any, Iterator

from fastapi import Body, FastAPI, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from .errors import ValidationError
from .metrics import KINDS, canonical_line
from .runs import Run, RunManager, UnknownRunError
from .scenario import Scenario, ScenarioError, bundled_scenarios, parse_scenario

__all__ = ["create_app"]

_RUN_REQUEST_KEYS = {"scenario", "scenario_name", "realtime_factor", "seed"}


def _scenario_summary(scenario: Scenario, bundled: bool) -> dict:
    doc = scenario.doc
    return {
        "name": scenario.name,
        "description": scenario.description,
        "scenario_hash": scenario.scenario_hash,
        "relay_mode": doc["relay_mode"],
        "algorithm": doc["algorithm"],
        "slot_duration_s": doc["slot_duration_s"],
        "duration_s": doc["duration_s"],
        "seed": doc["seed"],
        "ground_stations": [
            {"gs_id": g["gs_id"], "name": g["name"], "latitude_deg": g["latitude_deg"], "longitude_deg": g["longitude_deg"]}
            for g in doc["ground_stations"]
        ],
        "workload": doc["workload"],
        "bundled": bundled,
    }


def _unpack_run_request(body: Any, extra: dict[str, Scenario]) -> tuple[Scenario, float]:
    if not isinstance(body, dict):
        raise ValidationError("request body must be a JSON object")
    if "scenario" not in body and "scenario_name" not in body:
        # Bare scenario document.
        return parse_scenario(body), 0.0

    unknown = sorted(set(body) - _RUN_REQUEST_KEYS)
    if unknown:
        raise ValidationError(f"unknown fields in run request: {unknown}")
    if ("scenario" in body) == ("scenario_name" in body):
        raise ValidationError("exactly one of scenario / scenario_name must be given")

    realtime_factor = body.get("realtime_factor", 0.0)
    if not isinstance(realtime_factor, (int, float)) or isinstance(realtime_factor, bool) or realtime_factor < 0:
        raise ValidationError(f"realtime_factor must be a number >= 0, got {realtime_factor!r}")

    if "scenario" in body:
        scenario = parse_scenario(body["scenario"])
    else:
        name = body["scenario_name"]
        if name in extra:
            scenario = extra[name]
        else:
            scenario = next((s for s in bundled_scenarios() if s.name == name), None)
            if scenario is None:
                known = sorted(set(s.name for s in bundled_scenarios()) | set(extra))
                raise ValidationError(f"unknown scenario {name!r} (known: {known})")

    seed = body.get("seed")
    if seed is not None:
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ValidationError(f"seed must be an integer, got {seed!r}")
        scenario = scenario.with_seed(seed)
    return scenario, float(realtime_factor)


def create_app(manager: RunManager | None = None, extra_scenarios: tuple[Scenario, ...] = ()) -> FastAPI:
    """Build the application. ``extra_scenarios`` are local scenario files
    offered through GET /scenarios next to the bundled ones."""
    manager = manager if manager is not None else RunManager()
    extra = {s.name: s for s in extra_scenarios}

    app = FastAPI(title="satsim gateway", docs_url=None, redoc_url=None)
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(UnknownRunError)
    def _unknown_run(_, exc: UnknownRunError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ScenarioError)
    def _bad_scenario(_, exc: ScenarioError):
        return JSONResponse(status_code=422, content={"detail": "invalid scenario", "errors": list(exc.errors)})

    @app.exception_handler(ValidationError)
    def _bad_request(_, exc: ValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/scenarios")
    def list_scenarios() -> list[dict]:
        out = [_scenario_summary(s, bundled=True) for s in bundled_scenarios()]
        out.extend(_scenario_summary(s, bundled=False) for _, s in sorted(extra.items()))
        return out

    @app.post("/runs", status_code=201)
    def create_run(body: dict = Body(...)) -> dict:
        scenario, realtime_factor = _unpack_run_request(body, extra)
        run = manager.start(scenario, realtime_factor=realtime_factor)
        return run.status()

    @app.get("/runs")
    def list_runs() -> list[dict]:
        return [run.status() for run in manager.list()]

    @app.get("/runs/{run_id}")
    def run_status(run_id: str) -> dict:
        return manager.get(run_id).status()

    @app.get("/runs/{run_id}/metrics/{kind}")
    def fetch_metrics(
        run_id: str,
        kind: str,
        from_: int = Query(0, alias="from", ge=0),
        to: int | None = Query(None, ge=0),
    ):
        run = manager.get(run_id)
        if kind not in KINDS:
            return JSONResponse(
                status_code=404,
                content={"detail": f"unknown metric kind {kind!r} (known: {list(KINDS)})"},
            )
        records = run.log.read(kind, from_, to)
        return {
            "run_id": run_id,
            "kind": kind,
            "from": from_,
            "count": len(records),
            "total": len(run.log.of_kind(kind)),
            "records": records,
        }

    @app.post("/runs/{run_id}/ping")
    def interactive_ping(run_id: str, body: dict = Body(...)) -> dict:
        run = manager.get(run_id)
        src, dst = body.get("src"), body.get("dst")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise ValidationError("body must carry string fields src and dst")
        if run.state != "running":
            return JSONResponse(status_code=409, content={"detail": f"run is {run.state}, not running"})
        try:
            return manager.ping(run_id, src, dst)
        except ValidationError as exc:
            if run.state != "running":  # lost the race with run completion
                return JSONResponse(status_code=409, content={"detail": str(exc)})
            raise

    @app.post("/runs/{run_id}/inject")
    def inject(run_id: str, body: dict = Body(...)) -> dict:
        run = manager.get(run_id)
        unknown = sorted(set(body) - {"fail_isls", "capacity_scale"})
        if unknown:
            raise ValidationError(f"unknown fields in inject request: {unknown}")
        fail_isls = body.get("fail_isls", False)
        if not isinstance(fail_isls, bool):
            raise ValidationError(f"fail_isls must be a boolean, got {fail_isls!r}")
        capacity_scale = body.get("capacity_scale", 1.0)
        if not isinstance(capacity_scale, (int, float)) or isinstance(capacity_scale, bool):
            raise ValidationError(f"capacity_scale must be a number, got {capacity_scale!r}")
        if run.state != "running":
            return JSONResponse(status_code=409, content={"detail": f"run is {run.state}, not running"})
        try:
            return manager.inject(run_id, fail_isls=fail_isls, capacity_scale=float(capacity_scale))
        except ValidationError as exc:
            if run.state != "running":
                return JSONResponse(status_code=409, content={"detail": str(exc)})
            raise

    @app.get("/runs/{run_id}/events")
    def event_stream(run_id: str, cursor: int = Query(0, ge=0)) -> StreamingResponse:
        run = manager.get(run_id)

        def lines(start: int) -> Iterator[str]:
            position = start
            while True:
                batch = run.log.wait_beyond(position, timeout_s=0.5)
                if batch:
                    yield "".join(canonical_line(r) + "\n" for r in batch)
                    position += len(batch)
                elif run.log.closed:
                    return

        return StreamingResponse(lines(cursor), media_type="application/x-ndjson")

    return app
