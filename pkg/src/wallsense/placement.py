"""Deployment studies: wall-distance and Tx-Rx sweeps plus a grid-search
placement optimizer.

Sweeps rebuild the full field per distance rather than perturbing cached
values; cell evaluations are independent, so throughput can be recovered by
parallelising them.  The optimizer enumerates candidate positions on a
lattice and scores indoor area against beyond-wall leakage.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .coverage import CoverageReport, coverage_report, evaluate_field
from .geometry import DevicePlacement, GeometryError, Point2D
from .scenario import Scenario

Topology = str  # "empty" | "single-region" | "split"


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class SweepResult:
    """Coverage metrics per sweep distance, ordered by distance.

    Placements that would leave the room are skipped (with a warning) and
    recorded in ``skipped`` as (distance, reason) pairs.
    """

    distances_m: tuple[float, ...]
    indoor_area_m2: tuple[float, ...]
    leakage_area_m2: tuple[float | None, ...]
    component_count: tuple[int, ...]
    skipped: tuple[tuple[float, str], ...] = ()


@dataclass(frozen=True)
class PlacementObjective:
    """Scoring knobs for the optimizer.

    Score = indoor_area - leakage_penalty * leakage_area.  Candidates keep
    ``min_wall_clearance_m`` from every wall and sit on a lattice of pitch
    ``step_m``.
    """

    leakage_penalty: float = 1.0
    min_wall_clearance_m: float = 0.25
    step_m: float = 0.25

    def __post_init__(self) -> None:
        if not (math.isfinite(self.leakage_penalty) and self.leakage_penalty >= 0):
            raise PlacementError("leakage_penalty must be >= 0")
        if not (math.isfinite(self.min_wall_clearance_m) and self.min_wall_clearance_m >= 0):
            raise PlacementError("min_wall_clearance_m must be >= 0")
        if not (math.isfinite(self.step_m) and self.step_m > 0):
            raise PlacementError("step_m must be positive")


@dataclass(frozen=True)
class OptimizeResult:
    placement: DevicePlacement | None
    report: CoverageReport | None
    objective: float | None
    feasible: bool
    candidates_evaluated: int


def _report_for(scenario: Scenario, tx: Point2D, rx: Point2D) -> CoverageReport:
    s = scenario.with_placement(tx, rx)
    field = evaluate_field(s)
    return coverage_report(s, field, s.threshold_db)


def sweep_wall_distance(scenario: Scenario, distances: Sequence[float]) -> SweepResult:
    """Coverage vs wall-Tx distance at fixed Tx-Rx separation.

    Both devices translate together along the reflective wall's inward
    normal, so only the wall distance changes.
    """
    room = scenario.room
    wall = room.primary_reflective_wall
    nx, ny = room.inward_normal(wall)
    tx0, rx0 = scenario.placement.tx, scenario.placement.rx
    current = room.signed_wall_distance(tx0, wall)

    rows: list[tuple[float, float, float | None, int]] = []
    skipped: list[tuple[float, str]] = []
    for d in sorted(float(x) for x in distances):
        delta = d - current
        tx = Point2D(tx0.x + delta * nx, tx0.y + delta * ny)
        rx = Point2D(rx0.x + delta * nx, rx0.y + delta * ny)
        try:
            DevicePlacement(tx, rx).validate_inside(room)
        except GeometryError as exc:
            warnings.warn(f"wall distance {d} m skipped: {exc}", stacklevel=2)
            skipped.append((d, str(exc)))
            continue
        r = _report_for(scenario, tx, rx)
        rows.append((d, r.indoor_area_m2, r.leakage_area_m2, r.component_count))
    return _pack(rows, skipped)


def sweep_txrx_distance(scenario: Scenario, distances: Sequence[float]) -> SweepResult:
    """Coverage vs Tx-Rx separation at fixed wall-Tx distance.

    The Tx stays put; the Rx slides along the original Tx->Rx direction.
    """
    tx = scenario.placement.tx
    rx0 = scenario.placement.rx
    sep = scenario.placement.separation
    ux, uy = (rx0.x - tx.x) / sep, (rx0.y - tx.y) / sep

    rows: list[tuple[float, float, float | None, int]] = []
    skipped: list[tuple[float, str]] = []
    for d in sorted(float(x) for x in distances):
        if d <= 0:
            skipped.append((d, "separation must be positive"))
            continue
        rx = Point2D(tx.x + d * ux, tx.y + d * uy)
        try:
            DevicePlacement(tx, rx).validate_inside(scenario.room)
        except GeometryError as exc:
            warnings.warn(f"Tx-Rx distance {d} m skipped: {exc}", stacklevel=2)
            skipped.append((d, str(exc)))
            continue
        r = _report_for(scenario, tx, rx)
        rows.append((d, r.indoor_area_m2, r.leakage_area_m2, r.component_count))
    return _pack(rows, skipped)


def _pack(rows, skipped) -> SweepResult:
    return SweepResult(
        distances_m=tuple(r[0] for r in rows),
        indoor_area_m2=tuple(r[1] for r in rows),
        leakage_area_m2=tuple(r[2] for r in rows),
        component_count=tuple(r[3] for r in rows),
        skipped=tuple(skipped),
    )


def candidate_positions(scenario: Scenario, objective: PlacementObjective) -> list[Point2D]:
    """Lattice of admissible device positions, in (x, y) scan order."""
    room = scenario.room
    xs = [c.x for c in room.corners]
    ys = [c.y for c in room.corners]
    min_dim = min(max(xs) - min(xs), max(ys) - min(ys))
    if objective.step_m > min_dim / 4.0:
        raise PlacementError(
            f"candidate step {objective.step_m} m exceeds a quarter of the "
            f"smallest room dimension ({min_dim / 4.0:.3f} m)"
        )
    clearance = objective.min_wall_clearance_m
    out: list[Point2D] = []
    nx_steps = int(math.floor((max(xs) - min(xs)) / objective.step_m)) + 1
    ny_steps = int(math.floor((max(ys) - min(ys)) / objective.step_m)) + 1
    for ix in range(nx_steps):
        x = min(xs) + clearance + ix * objective.step_m
        if x > max(xs) - clearance:
            break
        for iy in range(ny_steps):
            y = min(ys) + clearance + iy * objective.step_m
            if y > max(ys) - clearance:
                break
            p = Point2D(x, y)
            if room.contains(p) and room.min_wall_distance(p) >= clearance:
                out.append(p)
    return out


def optimize_placement(
    scenario: Scenario,
    objective: PlacementObjective,
    progress_cb: Callable[[float], None] | None = None,
) -> OptimizeResult:
    """Exhaustive search over candidate Tx/Rx pairs.

    The field is symmetric under swapping Tx and Rx (the bounce entries swap
    sides), so unordered pairs suffice; ties resolve to the smallest
    (tx.x, tx.y, rx.x, rx.y) tuple, which the (x, y)-sorted enumeration
    yields for free.  Scores are indoor area minus weighted leakage.
    """
    candidates = candidate_positions(scenario, objective)
    pairs = [
        (candidates[i], candidates[j])
        for i in range(len(candidates))
        for j in range(i + 1, len(candidates))
    ]
    if not pairs:
        return OptimizeResult(None, None, None, False, 0)

    best: tuple[float, float, float, float, float] | None = None
    best_pair: tuple[Point2D, Point2D] | None = None
    best_report: CoverageReport | None = None
    for k, (tx, rx) in enumerate(pairs):
        report = _report_for(scenario, tx, rx)
        leak = report.leakage_area_m2
        if leak is None:
            if objective.leakage_penalty > 0:
                raise PlacementError(
                    "grid does not span beyond the reflective wall; leakage is "
                    "unknown but leakage_penalty > 0"
                )
            leak = 0.0
        score = report.indoor_area_m2 - objective.leakage_penalty * leak
        key = (-score, tx.x, tx.y, rx.x, rx.y)
        if best is None or key < best:
            best = key
            best_pair = (tx, rx)
            best_report = report
        if progress_cb is not None:
            progress_cb((k + 1) / len(pairs))
    assert best is not None and best_pair is not None
    return OptimizeResult(
        placement=DevicePlacement(*best_pair),
        report=best_report,
        objective=-best[0],
        feasible=True,
        candidates_evaluated=len(pairs),
    )


def classify_topology(report: CoverageReport) -> Topology:
    """Macro shape of the covered region: empty, one region, or split."""
    if report.component_count == 0:
        return "empty"
    return "single-region" if report.component_count == 1 else "split"


def sweep_to_csv(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("distance_m,indoor_area_m2,leakage_area_m2,component_count\n")
        for d, a, l, c in zip(
            result.distances_m, result.indoor_area_m2, result.leakage_area_m2, result.component_count
        ):
            leak = "nan" if l is None else repr(float(l))
            fh.write(f"{float(d)!r},{float(a)!r},{leak},{c}\n")
