"""Scenario persistence: a strict JSON schema tying room, devices, RF
constants, grid, and threshold together.

Field names carry SI unit suffixes.  Validation reports the dotted path of
the offending field and rejects unknown keys, so a typo in a hand-edited
file fails loudly instead of silently falling back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from .channel import RfParameters
from .coverage import GridSpec
from .geometry import DevicePlacement, GeometryError, Point2D, RoomLayout

SCHEMA_VERSION = 1
MODEL_MODES = ("simplified", "full")


class ScenarioError(ValueError):
    """Base for scenario loading problems (exit code 2 at the CLI)."""


class ScenarioParseError(ScenarioError):
    """The file is not well-formed JSON."""


class ScenarioValidationError(ScenarioError):
    """The JSON is well-formed but violates the schema or an invariant."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class Scenario:
    """One evaluation setup; immutable once constructed."""

    room: RoomLayout
    placement: DevicePlacement
    rf: RfParameters
    grid: GridSpec
    threshold_db: float = 2.0
    model: str = "simplified"
    scale: float = 1.0
    exclusion_radius_m: float = 0.1

    def __post_init__(self) -> None:
        if self.model not in MODEL_MODES:
            raise ScenarioValidationError("model", f"must be one of {MODEL_MODES}, got {self.model!r}")
        if not (math.isfinite(self.threshold_db)):
            raise ScenarioValidationError("threshold_db", "must be finite")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ScenarioValidationError("scale", "must be a positive finite number")
        if not (math.isfinite(self.exclusion_radius_m) and self.exclusion_radius_m >= 0):
            raise ScenarioValidationError("exclusion_radius_m", "must be >= 0")
        try:
            self.placement.validate_inside(self.room)
        except GeometryError as exc:
            raise ScenarioValidationError("placement", str(exc)) from exc

    def with_placement(self, tx: Point2D, rx: Point2D) -> "Scenario":
        return replace(self, placement=DevicePlacement(tx, rx))

    def wall_tx_distance(self) -> float:
        """Perpendicular distance from the Tx to the primary reflective wall."""
        return self.room.signed_wall_distance(self.placement.tx)


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ScenarioValidationError(f"{path}.{key}" if path else key, "missing required field")
    return mapping[key]


def _check_unknown(mapping: dict, allowed: set[str], path: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise ScenarioValidationError(f"{path}.{name}" if path else name, "unknown field")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(path, f"must be a number, got {type(value).__name__}")
    if not math.isfinite(float(value)):
        raise ScenarioValidationError(path, "must be finite")
    return float(value)


def _point(value: Any, path: str) -> Point2D:
    if not (isinstance(value, list) and len(value) == 2):
        raise ScenarioValidationError(path, "must be a [x, y] pair")
    return Point2D(_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def scenario_from_dict(data: Any) -> Scenario:
    """Validate a parsed JSON object into a Scenario (strict schema)."""
    if not isinstance(data, dict):
        raise ScenarioValidationError("", "scenario must be a JSON object")
    allowed = {
        "schema_version",
        "room",
        "placement",
        "rf",
        "grid",
        "threshold_db",
        "model",
        "scale",
        "exclusion_radius_m",
    }
    _check_unknown(data, allowed, "")

    version = _require(data, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ScenarioValidationError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")

    room_obj = _require(data, "room", "")
    if not isinstance(room_obj, dict):
        raise ScenarioValidationError("room", "must be an object")
    _check_unknown(room_obj, {"corners_m", "reflective_wall_index"}, "room")
    corners_raw = _require(room_obj, "corners_m", "room")
    if not (isinstance(corners_raw, list) and len(corners_raw) >= 3):
        raise ScenarioValidationError("room.corners_m", "must be a list of at least 3 [x, y] pairs")
    corners = [_point(c, f"room.corners_m[{i}]") for i, c in enumerate(corners_raw)]
    refl = _require(room_obj, "reflective_wall_index", "room")
    if isinstance(refl, bool) or not isinstance(refl, int):
        raise ScenarioValidationError("room.reflective_wall_index", "must be an integer")
    try:
        room = RoomLayout.from_corners([(c.x, c.y) for c in corners], refl)
    except ScenarioValidationError:
        raise
    except GeometryError as exc:
        raise ScenarioValidationError("room", str(exc)) from exc

    placement_obj = _require(data, "placement", "")
    if not isinstance(placement_obj, dict):
        raise ScenarioValidationError("placement", "must be an object")
    _check_unknown(placement_obj, {"tx_m", "rx_m"}, "placement")
    tx = _point(_require(placement_obj, "tx_m", "placement"), "placement.tx_m")
    rx = _point(_require(placement_obj, "rx_m", "placement"), "placement.rx_m")
    try:
        placement = DevicePlacement(tx, rx)
    except ScenarioValidationError:
        raise
    except GeometryError as exc:
        raise ScenarioValidationError("placement", str(exc)) from exc

    rf_obj = _require(data, "rf", "")
    if not isinstance(rf_obj, dict):
        raise ScenarioValidationError("rf", "must be an object")
    rf_fields = {
        "ptx_w",
        "gain_tx",
        "gain_rx",
        "wavelength_m",
        "rcs_m2",
        "wall_reflection",
        "interference_gamma",
        "interference_floor_w",
    }
    _check_unknown(rf_obj, rf_fields, "rf")
    rf_kwargs = {k: _number(_require(rf_obj, k, "rf"), f"rf.{k}") for k in sorted(rf_fields)}
    try:
        rf = RfParameters(**rf_kwargs)
    except ScenarioValidationError:
        raise
    except ValueError as exc:
        raise ScenarioValidationError("rf", str(exc)) from exc

    grid_obj = _require(data, "grid", "")
    if not isinstance(grid_obj, dict):
        raise ScenarioValidationError("grid", "must be an object")
    _check_unknown(grid_obj, {"origin_m", "width_m", "height_m", "resolution_m"}, "grid")
    origin = _point(_require(grid_obj, "origin_m", "grid"), "grid.origin_m")
    try:
        grid = GridSpec(
            origin_x_m=origin.x,
            origin_y_m=origin.y,
            width_m=_number(_require(grid_obj, "width_m", "grid"), "grid.width_m"),
            height_m=_number(_require(grid_obj, "height_m", "grid"), "grid.height_m"),
            resolution_m=_number(_require(grid_obj, "resolution_m", "grid"), "grid.resolution_m"),
        )
    except ScenarioValidationError:
        raise
    except ValueError as exc:
        raise ScenarioValidationError("grid", str(exc)) from exc

    model = data.get("model", "simplified")
    if model not in MODEL_MODES:
        raise ScenarioValidationError("model", f"must be one of {MODEL_MODES}, got {model!r}")

    return Scenario(
        room=room,
        placement=placement,
        rf=rf,
        grid=grid,
        threshold_db=_number(data.get("threshold_db", 2.0), "threshold_db"),
        model=model,
        scale=_number(data.get("scale", 1.0), "scale"),
        exclusion_radius_m=_number(data.get("exclusion_radius_m", 0.1), "exclusion_radius_m"),
    )


def scenario_to_dict(s: Scenario) -> dict:
    """Canonical dict form: fixed key order, reflective index recovered."""
    reflective_index = next(i for i, w in enumerate(s.room.walls) if w.reflective)
    return {
        "schema_version": SCHEMA_VERSION,
        "room": {
            "corners_m": [[c.x, c.y] for c in s.room.corners],
            "reflective_wall_index": reflective_index,
        },
        "placement": {
            "tx_m": [s.placement.tx.x, s.placement.tx.y],
            "rx_m": [s.placement.rx.x, s.placement.rx.y],
        },
        "rf": {
            "ptx_w": s.rf.ptx_w,
            "gain_tx": s.rf.gain_tx,
            "gain_rx": s.rf.gain_rx,
            "wavelength_m": s.rf.wavelength_m,
            "rcs_m2": s.rf.rcs_m2,
            "wall_reflection": s.rf.wall_reflection,
            "interference_gamma": s.rf.interference_gamma,
            "interference_floor_w": s.rf.interference_floor_w,
        },
        "grid": {
            "origin_m": [s.grid.origin_x_m, s.grid.origin_y_m],
            "width_m": s.grid.width_m,
            "height_m": s.grid.height_m,
            "resolution_m": s.grid.resolution_m,
        },
        "threshold_db": s.threshold_db,
        "model": s.model,
        "scale": s.scale,
        "exclusion_radius_m": s.exclusion_radius_m,
    }


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path) -> None:
    payload = json.dumps(scenario_to_dict(scenario), indent=2) + "\n"
    Path(path).write_text(payload, encoding="utf-8")


def canonical_scenario() -> Scenario:
    """The default planning setup: 7 m x 6 m room, reflective wall at x=0,
    Tx 0.5 m from it, Rx 3 m further in, 0.05 m grid spanning 2 m beyond
    the wall so spill can be measured."""
    room = RoomLayout.from_corners([(0, 0), (7, 0), (7, 6), (0, 6)], reflective=3)
    return Scenario(
        room=room,
        placement=DevicePlacement(Point2D(0.5, 3.0), Point2D(3.5, 3.0)),
        rf=RfParameters(),
        grid=GridSpec(origin_x_m=-2.0, origin_y_m=0.0, width_m=9.0, height_m=6.0, resolution_m=0.05),
        threshold_db=2.0,
        model="simplified",
        scale=1.0,
        exclusion_radius_m=0.1,
    )
