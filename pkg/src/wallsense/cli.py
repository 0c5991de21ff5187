"""Command-line surface: field/boundary export, sweeps, optimization,
respiration estimation, scale fitting, and the HTTP service.

Exit codes: 0 success, 2 validation/input error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import __version__
from .channel import ChannelError, RfParameters
from .coverage import (
    CoverageError,
    GridSpec,
    contours_to_csv,
    coverage_report,
    evaluate_field,
    extract_boundary,
    field_to_csv,
    field_to_pgm,
    smooth_boundary,
    threshold_mask,
)
from .csiproc import (
    CsiError,
    FilterConfig,
    fit_model_scale,
    load_trace_csv,
    mean_absolute_error,
    respiration_rate,
)
from .geometry import GeometryError
from .placement import (
    PlacementError,
    PlacementObjective,
    classify_topology,
    optimize_placement,
    sweep_to_csv,
    sweep_txrx_distance,
    sweep_wall_distance,
)
from .scenario import Scenario, ScenarioError, canonical_scenario, load_scenario

WALL_SWEEP_DEFAULT = "0.1,0.5,1,1.5,2,2.5"
TXRX_SWEEP_DEFAULT = "0.1,1,2,3,4,5"

_RF_FLAGS = (
    ("ptx-w", "ptx_w"),
    ("gain-tx", "gain_tx"),
    ("gain-rx", "gain_rx"),
    ("wavelength-m", "wavelength_m"),
    ("rcs-m2", "rcs_m2"),
    ("wall-reflection", "wall_reflection"),
    ("gamma", "interference_gamma"),
    ("floor-w", "interference_floor_w"),
)


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=Path, default=None, help="scenario JSON (default: built-in canonical)")
    p.add_argument("--threshold-db", type=float, default=None, help="coverage threshold override (dB)")
    p.add_argument("--resolution", type=float, default=None, help="grid resolution override (m)")
    p.add_argument("--mode", choices=("simplified", "full"), default=None, help="SSNR model override")
    p.add_argument("--scale", type=float, default=None, help="proportional-model scale override")
    p.add_argument("--exclusion-m", type=float, default=None, help="device/wall exclusion radius override (m)")
    for flag, _ in _RF_FLAGS:
        p.add_argument(f"--{flag}", type=float, default=None, help=argparse.SUPPRESS)


def _scenario_from_args(args: argparse.Namespace) -> Scenario:
    s = load_scenario(args.scenario) if args.scenario is not None else canonical_scenario()
    if args.threshold_db is not None:
        s = dataclasses.replace(s, threshold_db=args.threshold_db)
    if args.resolution is not None:
        s = dataclasses.replace(s, grid=dataclasses.replace(s.grid, resolution_m=args.resolution))
    if args.mode is not None:
        s = dataclasses.replace(s, model=args.mode)
    if args.scale is not None:
        s = dataclasses.replace(s, scale=args.scale)
    if args.exclusion_m is not None:
        s = dataclasses.replace(s, exclusion_radius_m=args.exclusion_m)
    rf_overrides = {
        field: getattr(args, flag.replace("-", "_"))
        for flag, field in _RF_FLAGS
        if getattr(args, flag.replace("-", "_")) is not None
    }
    if rf_overrides:
        s = dataclasses.replace(s, rf=dataclasses.replace(s.rf, **rf_overrides))
    return s


def _parse_distances(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad distance list {text!r}: {exc}") from exc
    if not values:
        raise ScenarioError("distance list is empty")
    return values


def cmd_field(args: argparse.Namespace) -> int:
    scenario = _scenario_from_args(args)
    field = evaluate_field(scenario)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    field_to_csv(field, out)
    pgm = out.with_suffix(".pgm")
    lo, hi = field_to_pgm(field, pgm)
    report = coverage_report(scenario, field, scenario.threshold_db)
    leak = "unknown" if report.leakage_area_m2 is None else f"{report.leakage_area_m2:.4f}"
    print(
        f"wrote {out} and {pgm} (range {lo:.2f}..{hi:.2f} dB); "
        f"indoor={report.indoor_area_m2:.4f} m^2 leakage={leak} m^2 "
        f"components={report.component_count}"
    )
    return 0


def cmd_boundary(args: argparse.Namespace) -> int:
    scenario = _scenario_from_args(args)
    field = evaluate_field(scenario)
    mask = threshold_mask(field, scenario.threshold_db)
    contours = extract_boundary(mask, field.grid)
    if args.smooth_window != 1:
        contours = [smooth_boundary(c, args.smooth_window) if len(c) >= 3 else c for c in contours]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    contours_to_csv(contours, out)
    print(f"wrote {out}: {len(contours)} contours at {scenario.threshold_db} dB")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _scenario_from_args(args)
    default = WALL_SWEEP_DEFAULT if args.kind == "wall" else TXRX_SWEEP_DEFAULT
    distances = _parse_distances(args.distances if args.distances else default)
    sweep = sweep_wall_distance if args.kind == "wall" else sweep_txrx_distance
    result = sweep(scenario, distances)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    sweep_to_csv(result, out)
    for d, reason in result.skipped:
        print(f"skipped {d} m: {reason}", file=sys.stderr)
    print(f"wrote {out}: {len(result.distances_m)} rows ({args.kind} sweep)")
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = _scenario_from_args(args)
    objective = PlacementObjective(
        leakage_penalty=args.leakage_penalty,
        min_wall_clearance_m=args.clearance,
        step_m=args.step,
    )
    result = optimize_placement(scenario, objective)
    if not result.feasible:
        print("no feasible placement for the given step and clearance", file=sys.stderr)
        return 3
    assert result.placement is not None and result.report is not None
    payload = {
        "tx_m": [result.placement.tx.x, result.placement.tx.y],
        "rx_m": [result.placement.rx.x, result.placement.rx.y],
        "objective": result.objective,
        "indoor_area_m2": result.report.indoor_area_m2,
        "leakage_area_m2": result.report.leakage_area_m2,
        "component_count": result.report.component_count,
        "topology": classify_topology(result.report),
        "candidates_evaluated": result.candidates_evaluated,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    print(text)
    return 0


def cmd_respire(args: argparse.Namespace) -> int:
    trace = load_trace_csv(args.trace)
    config = FilterConfig(
        hampel_half_window=args.hampel_half_window,
        hampel_n_sigma=args.hampel_n_sigma,
        sg_window=args.sg_window,
        sg_polyorder=args.sg_polyorder,
        peak_min_distance_s=args.peak_min_distance_s,
        peak_prominence_factor=args.peak_prominence_factor,
    )
    window = args.window_s if args.window_s else min(60.0, trace.duration_s)
    subcarrier = None if args.subcarrier < 0 else args.subcarrier
    est = respiration_rate(trace, subcarrier=subcarrier, window_s=window, config=config)
    rate = "undefined" if est.rate_bpm is None else f"{est.rate_bpm:.3f}"
    print(f"rate_bpm={rate} peaks={len(est.peak_indices)} subcarrier={est.subcarrier} window_s={window}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("window_s,subcarrier,rate_bpm,peak_count\n")
            bpm = "nan" if est.rate_bpm is None else repr(est.rate_bpm)
            fh.write(f"{window!r},{est.subcarrier},{bpm},{len(est.peak_indices)}\n")
    if args.truth_bpm is not None:
        if est.rate_bpm is None:
            print("MAE undefined: no rate estimate", file=sys.stderr)
            return 3
        mae = mean_absolute_error([est.rate_bpm], [args.truth_bpm])
        print(f"mae_bpm={mae:.4f}")
    return 0


def cmd_ssnr_fit(args: argparse.Namespace) -> int:
    import csv as _csv

    with open(args.pairs, newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames is None or not {"measured", "simulated"} <= set(reader.fieldnames):
            raise CsiError(f"{args.pairs}: expected columns measured,simulated")
        measured, simulated = [], []
        for row in reader:
            measured.append(float(row["measured"]))
            simulated.append(float(row["simulated"]))
    scale, rms = fit_model_scale(measured, simulated)
    print(f"scale={scale!r} rms_residual={rms!r} points={len(measured)}")
    if args.out:
        Path(args.out).write_text(
            json.dumps({"scale": scale, "rms_residual": rms, "points": len(measured)}, indent=2) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.store))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wallsense",
        description="Wall-aware Wi-Fi sensing coverage planner",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="evaluate the SSNR field to CSV + 16-bit PGM")
    _add_scenario_args(p)
    p.add_argument("--out", type=Path, default=Path("field.csv"))
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("boundary", help="export threshold-boundary contours to CSV")
    _add_scenario_args(p)
    p.add_argument("--out", type=Path, default=Path("boundary.csv"))
    p.add_argument("--smooth-window", type=int, default=9, help="vertex moving-average window (1 = raw)")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("sweep", help="coverage vs wall or Tx-Rx distance, CSV output")
    p.add_argument("kind", choices=("wall", "txrx"))
    _add_scenario_args(p)
    p.add_argument("--distances", type=str, default=None, help="comma-separated metres")
    p.add_argument("--out", type=Path, default=Path("sweep.csv"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="grid-search the best Tx/Rx placement")
    _add_scenario_args(p)
    p.add_argument("--step", type=float, default=0.25, help="candidate lattice pitch (m)")
    p.add_argument("--clearance", type=float, default=0.25, help="minimum wall clearance (m)")
    p.add_argument("--leakage-penalty", type=float, default=1.0)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("respire", help="estimate breaths per minute from a trace CSV")
    p.add_argument("--trace", type=Path, required=True)
    p.add_argument("--window-s", type=float, default=None, help="analysis window (default: min(60, trace))")
    p.add_argument("--subcarrier", type=int, default=-1, help="-1 = highest variance")
    p.add_argument("--truth-bpm", type=float, default=None, help="reference rate; prints MAE")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--hampel-half-window", type=int, default=50)
    p.add_argument("--hampel-n-sigma", type=float, default=3.0)
    p.add_argument("--sg-window", type=int, default=501)
    p.add_argument("--sg-polyorder", type=int, default=3)
    p.add_argument("--peak-min-distance-s", type=float, default=1.2)
    p.add_argument("--peak-prominence-factor", type=float, default=0.3)
    p.set_defaults(func=cmd_respire)

    p = sub.add_parser("ssnr-fit", help="fit the measured = scale * simulated factor")
    p.add_argument("--pairs", type=Path, required=True, help="CSV with columns measured,simulated")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_ssnr_fit)

    p = sub.add_parser("serve", help="run the HTTP planning service")
    p.add_argument("--host", type=str, default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", type=Path, default=Path("scenario-store"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, GeometryError, ChannelError, CoverageError, PlacementError, CsiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
