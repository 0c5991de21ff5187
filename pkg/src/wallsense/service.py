"""HTTP/JSON facade over the engine for the planner UI.

Stateless compute endpoints (field, sweep, optimize) operate on a scenario
carried inline in each request, so identical requests produce identical
payloads.  A small file-backed store keeps named scenarios; writes are
serialized and guarded by an optional expected revision.

Errors use one shape everywhere: {"code", "message", "field_path"?} with
400 for validation, 404 unknown name/token, 409 revision conflict, 413
oversized grid, 500 internal.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
import threading
import uuid
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .coverage import coverage_report, evaluate_field
from .placement import (
    PlacementError,
    PlacementObjective,
    classify_topology,
    optimize_placement,
    sweep_txrx_distance,
    sweep_wall_distance,
)
from .scenario import (
    Scenario,
    ScenarioError,
    ScenarioValidationError,
    scenario_from_dict,
    scenario_to_dict,
)

MAX_GRID_CELLS = 1_000_000
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field_path: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.field_path = field_path
        super().__init__(message)

    def response(self) -> JSONResponse:
        body: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.field_path is not None:
            body["field_path"] = self.field_path
        return JSONResponse(status_code=self.status, content=body)


class ScenarioStore:
    """Named scenarios on disk; one JSON file per name, monotone revisions."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, name: str) -> Path:
        if not _NAME_RE.match(name):
            raise ApiError(400, "validation_error", f"bad scenario name {name!r}", "name")
        return self.root / f"{name}.json"

    def list(self) -> list[dict]:
        out = []
        for p in sorted(self.root.glob("*.json")):
            try:
                data = json.loads(p.read_text(encoding="utf-8"))
                out.append({"name": p.stem, "revision": data["revision"]})
            except (OSError, KeyError, json.JSONDecodeError):
                continue
        return out

    def get(self, name: str) -> dict:
        path = self._path(name)
        if not path.exists():
            raise ApiError(404, "not_found", f"no scenario named {name!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, name: str, scenario: Scenario, expected_revision: int | None) -> int:
        path = self._path(name)
        with self._lock:
            current: int | None = None
            if path.exists():
                current = json.loads(path.read_text(encoding="utf-8"))["revision"]
            if expected_revision is not None and expected_revision != current:
                raise ApiError(
                    409,
                    "revision_conflict",
                    f"expected revision {expected_revision}, stored {current}",
                )
            revision = 1 if current is None else current + 1
            payload = {"name": name, "revision": revision, "scenario": scenario_to_dict(scenario)}
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
            return revision


class _Job:
    def __init__(self) -> None:
        self.status = "running"
        self.progress = 0.0
        self.result: dict | None = None
        self.message: str | None = None


def _json_safe(v: float) -> float | None:
    return float(v) if math.isfinite(v) else None


def _parse_scenario(body: dict) -> Scenario:
    if "scenario" not in body:
        raise ApiError(400, "validation_error", "missing required field", "scenario")
    try:
        scenario = scenario_from_dict(body["scenario"])
    except ScenarioValidationError as exc:
        raise ApiError(400, "validation_error", str(exc), exc.field_path) from exc
    except ScenarioError as exc:
        raise ApiError(400, "validation_error", str(exc)) from exc
    for key in ("threshold_db", "resolution_m"):
        if key in body:
            v = body[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(float(v)):
                raise ApiError(400, "validation_error", "must be a finite number", key)
    if "threshold_db" in body:
        scenario = dataclasses.replace(scenario, threshold_db=float(body["threshold_db"]))
    if "resolution_m" in body:
        try:
            scenario = dataclasses.replace(
                scenario, grid=dataclasses.replace(scenario.grid, resolution_m=float(body["resolution_m"]))
            )
        except ValueError as exc:
            raise ApiError(400, "validation_error", str(exc), "resolution_m") from exc
    if "mode" in body:
        if body["mode"] not in ("simplified", "full"):
            raise ApiError(400, "validation_error", "must be 'simplified' or 'full'", "mode")
        scenario = dataclasses.replace(scenario, model=body["mode"])
    if scenario.grid.n_cells > MAX_GRID_CELLS:
        raise ApiError(
            413,
            "grid_too_large",
            f"grid has {scenario.grid.n_cells} cells; limit is {MAX_GRID_CELLS}",
            "grid",
        )
    return scenario


def field_payload(scenario: Scenario) -> dict:
    """Grid metadata, row-major dB values, smoothed contours, and areas.

    Non-finite cells (exclusion zones, zero-power nulls) are null in JSON.
    """
    field = evaluate_field(scenario)
    report = coverage_report(scenario, field, scenario.threshold_db)
    wall = scenario.room.primary_reflective_wall
    g = field.grid
    return {
        "grid": {
            "origin_m": [g.origin_x_m, g.origin_y_m],
            "width_m": g.width_m,
            "height_m": g.height_m,
            "resolution_m": g.resolution_m,
            "rows": g.rows,
            "cols": g.cols,
        },
        "threshold_db": scenario.threshold_db,
        "values_db": [_json_safe(v) for v in field.flat_row_major().tolist()],
        "contours": [c.tolist() for c in report.contours],
        "indoor_area_m2": report.indoor_area_m2,
        "leakage_area_m2": report.leakage_area_m2,
        "covered_area_m2": report.covered_area_m2,
        "component_count": report.component_count,
        "topology": classify_topology(report),
        "tx_m": [scenario.placement.tx.x, scenario.placement.tx.y],
        "rx_m": [scenario.placement.rx.x, scenario.placement.rx.y],
        "reflective_wall": {"a_m": [wall.a.x, wall.a.y], "b_m": [wall.b.x, wall.b.y]},
        "room_corners_m": [[c.x, c.y] for c in scenario.room.corners],
    }


def sweep_payload(scenario: Scenario, kind: str, distances: list[float]) -> dict:
    runner = sweep_wall_distance if kind == "wall" else sweep_txrx_distance
    result = runner(scenario, distances)
    return {
        "kind": kind,
        "distances_m": list(result.distances_m),
        "indoor_area_m2": list(result.indoor_area_m2),
        "leakage_area_m2": [v for v in result.leakage_area_m2],
        "component_count": list(result.component_count),
        "skipped": [{"distance_m": d, "reason": r} for d, r in result.skipped],
    }


def create_app(store_dir: Path | str) -> FastAPI:
    app = FastAPI(title="wallsense", version="0.1.0")
    store = ScenarioStore(Path(store_dir))
    jobs: dict[str, _Job] = {}
    jobs_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return ApiError(400, "validation_error", str(exc)).response()

    @app.exception_handler(Exception)
    async def _internal_error(_req: Request, exc: Exception) -> JSONResponse:
        return ApiError(500, "internal_error", f"{type(exc).__name__}: {exc}").response()

    async def _body(request: Request) -> dict:
        try:
            data = await request.json()
        except Exception as exc:
            raise ApiError(400, "validation_error", f"body is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ApiError(400, "validation_error", "body must be a JSON object")
        return data

    @app.post("/api/field")
    async def post_field(request: Request) -> JSONResponse:
        body = await _body(request)
        scenario = _parse_scenario(body)
        return JSONResponse(field_payload(scenario))

    @app.post("/api/sweep")
    async def post_sweep(request: Request) -> JSONResponse:
        body = await _body(request)
        scenario = _parse_scenario(body)
        kind = body.get("kind")
        if kind not in ("wall", "txrx"):
            raise ApiError(400, "validation_error", "kind must be 'wall' or 'txrx'", "kind")
        distances = body.get("distances")
        if not isinstance(distances, list) or not distances:
            raise ApiError(400, "validation_error", "distances must be a non-empty list", "distances")
        for i, d in enumerate(distances):
            if isinstance(d, bool) or not isinstance(d, (int, float)) or not math.isfinite(float(d)):
                raise ApiError(400, "validation_error", "must be a finite number", f"distances[{i}]")
        return JSONResponse(sweep_payload(scenario, kind, [float(d) for d in distances]))

    @app.post("/api/optimize")
    async def post_optimize(request: Request) -> JSONResponse:
        body = await _body(request)
        scenario = _parse_scenario(body)
        obj = body.get("objective", {})
        if not isinstance(obj, dict):
            raise ApiError(400, "validation_error", "objective must be an object", "objective")
        unknown = set(obj) - {"leakage_penalty", "min_wall_clearance_m", "step_m"}
        if unknown:
            raise ApiError(400, "validation_error", "unknown field", f"objective.{sorted(unknown)[0]}")
        try:
            objective = PlacementObjective(
                leakage_penalty=float(obj.get("leakage_penalty", 1.0)),
                min_wall_clearance_m=float(obj.get("min_wall_clearance_m", 0.25)),
                step_m=float(obj.get("step_m", 0.25)),
            )
        except (PlacementError, TypeError, ValueError) as exc:
            raise ApiError(400, "validation_error", str(exc), "objective") from exc

        token = uuid.uuid4().hex
        job = _Job()
        with jobs_lock:
            jobs[token] = job

        def run() -> None:
            try:
                result = optimize_placement(scenario, objective, progress_cb=lambda f: setattr(job, "progress", f))
                if not result.feasible:
                    job.result = {"feasible": False}
                else:
                    assert result.placement is not None and result.report is not None
                    job.result = {
                        "feasible": True,
                        "tx_m": [result.placement.tx.x, result.placement.tx.y],
                        "rx_m": [result.placement.rx.x, result.placement.rx.y],
                        "objective": result.objective,
                        "indoor_area_m2": result.report.indoor_area_m2,
                        "leakage_area_m2": result.report.leakage_area_m2,
                        "component_count": result.report.component_count,
                        "topology": classify_topology(result.report),
                        "candidates_evaluated": result.candidates_evaluated,
                    }
                job.status = "done"
            except Exception as exc:  # surfaced via polling
                job.status = "error"
                job.message = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=run, daemon=True).start()
        return JSONResponse({"token": token})

    @app.get("/api/optimize/{token}")
    async def get_optimize(token: str) -> JSONResponse:
        with jobs_lock:
            job = jobs.get(token)
        if job is None:
            raise ApiError(404, "not_found", f"no optimization job {token!r}")
        body: dict[str, Any] = {"status": job.status, "progress": job.progress}
        if job.result is not None:
            body["result"] = job.result
        if job.message is not None:
            body["message"] = job.message
        return JSONResponse(body)

    @app.get("/api/scenarios")
    async def list_scenarios() -> JSONResponse:
        return JSONResponse({"scenarios": store.list()})

    @app.get("/api/scenarios/{name}")
    async def get_scenario(name: str) -> JSONResponse:
        return JSONResponse(store.get(name))

    @app.put("/api/scenarios/{name}")
    async def put_scenario(name: str, request: Request) -> JSONResponse:
        body = await _body(request)
        if "scenario" not in body:
            raise ApiError(400, "validation_error", "missing required field", "scenario")
        try:
            scenario = scenario_from_dict(body["scenario"])
        except ScenarioValidationError as exc:
            raise ApiError(400, "validation_error", str(exc), exc.field_path) from exc
        expected = body.get("expected_revision")
        if expected is not None and (isinstance(expected, bool) or not isinstance(expected, int)):
            raise ApiError(400, "validation_error", "must be an integer", "expected_revision")
        revision = store.put(name, scenario, expected)
        return JSONResponse({"name": name, "revision": revision})

    return app
