#!/usr/bin/env python3
"""Reproduce the two deployment studies on the canonical room.

Writes sweep CSVs (and PNG plots when matplotlib is importable) into
--outdir.  Wall sweep: both devices slide together toward the reflective
wall at fixed 3 m separation.  Tx-Rx sweep: the Tx sits 1 m from the wall
and the Rx moves away from it.
"""

import argparse
from pathlib import Path

from wallsense.geometry import Point2D
from wallsense.placement import sweep_to_csv, sweep_txrx_distance, sweep_wall_distance
from wallsense.scenario import canonical_scenario

WALL_DISTANCES = [0.1, 0.5, 1.0, 1.5, 2.0, 2.5]
TXRX_DISTANCES = [0.1, 1.0, 2.0, 3.0, 4.0, 5.0]


def maybe_plot(result, title, xlabel, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(result.distances_m, result.indoor_area_m2, "o-", label="indoor")
    leak = [v if v is not None else float("nan") for v in result.leakage_area_m2]
    ax.plot(result.distances_m, leak, "s--", label="beyond wall")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("area (m$^2$)")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("sweep-results"))
    parser.add_argument("--resolution", type=float, default=0.05)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    import dataclasses

    base = canonical_scenario()
    base = dataclasses.replace(base, grid=dataclasses.replace(base.grid, resolution_m=args.resolution))

    wall = sweep_wall_distance(base, WALL_DISTANCES)
    sweep_to_csv(wall, args.outdir / "wall_sweep.csv")
    maybe_plot(wall, "coverage vs wall-Tx distance", "wall-Tx distance (m)",
               args.outdir / "wall_sweep.png")
    print("wall sweep:")
    for d, a, l, c in zip(wall.distances_m, wall.indoor_area_m2, wall.leakage_area_m2,
                          wall.component_count):
        print(f"  d={d:4.1f} m  indoor={a:7.3f} m^2  beyond-wall={l!s:>8}  regions={c}")

    txrx_scenario = base.with_placement(Point2D(1.0, 3.0), Point2D(4.0, 3.0))
    txrx = sweep_txrx_distance(txrx_scenario, TXRX_DISTANCES)
    sweep_to_csv(txrx, args.outdir / "txrx_sweep.csv")
    maybe_plot(txrx, "coverage vs Tx-Rx distance (wall-Tx 1 m)", "Tx-Rx distance (m)",
               args.outdir / "txrx_sweep.png")
    print("Tx-Rx sweep (wall-Tx 1 m):")
    for d, a, l, c in zip(txrx.distances_m, txrx.indoor_area_m2, txrx.leakage_area_m2,
                          txrx.component_count):
        print(f"  d={d:4.1f} m  indoor={a:7.3f} m^2  beyond-wall={l!s:>8}  regions={c}")


if __name__ == "__main__":
    main()
