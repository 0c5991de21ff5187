"""Gridded SSNR fields, threshold masks, boundary contours, and area reports.

Fields are evaluated cell by cell through the same scalar channel functions
exposed to callers, so any cell can be recomputed standalone and match the
stored value bit for bit.  Boundaries come from marching squares on the
binary mask (vertices at cell-edge midpoints, covered region on the left),
reproducing the zigzag look of phase fringes; a circular moving average
smooths contours for presentation.

Cells within the exclusion radius of a device are left out of the field
(the model diverges as either direct leg goes to zero).  The same radius is
applied as a band along a reflective wall line: the bounce term diverges as
the wall-to-target split distance goes to zero, which would otherwise paint
a spurious one-cell-wide covered strip hugging the wall.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np
from scipy import ndimage

from . import channel
from .geometry import Point2D, RoomLayout, WallSegment, path_set

if TYPE_CHECKING:
    from .scenario import Scenario

# Above this cell size the fringe pattern is badly undersampled.
COARSE_RESOLUTION_M = 0.5

# Closing radius (cells) used to bridge one-cell fringe gaps before counting
# connected regions; set to 0 to count on the raw mask.
DEFAULT_BRIDGE_CELLS = 1


class ResolutionWarning(UserWarning):
    """Grid resolution too coarse for the fringe structure."""


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid; cell centres at half-resolution offsets."""

    origin_x_m: float
    origin_y_m: float
    width_m: float
    height_m: float
    resolution_m: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.resolution_m) and self.resolution_m > 0):
            raise CoverageError(f"resolution must be positive, got {self.resolution_m!r}")
        if self.width_m < self.resolution_m or self.height_m < self.resolution_m:
            raise CoverageError("grid must be at least one cell wide and tall")
        if not (math.isfinite(self.width_m) and math.isfinite(self.height_m)):
            raise CoverageError("grid extent must be finite")

    @property
    def cols(self) -> int:
        return int(round(self.width_m / self.resolution_m))

    @property
    def rows(self) -> int:
        return int(round(self.height_m / self.resolution_m))

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @property
    def cell_area_m2(self) -> float:
        return self.resolution_m * self.resolution_m

    def x_centers(self) -> np.ndarray:
        j = np.arange(self.cols, dtype=float)
        return self.origin_x_m + (j + 0.5) * self.resolution_m

    def y_centers(self) -> np.ndarray:
        i = np.arange(self.rows, dtype=float)
        return self.origin_y_m + (i + 0.5) * self.resolution_m

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.origin_x_m + (col + 0.5) * self.resolution_m,
            self.origin_y_m + (row + 0.5) * self.resolution_m,
        )


@dataclass(frozen=True)
class ScalarField:
    """SSNR in dB per cell; NaN marks excluded cells (row 0 is the bottom)."""

    grid: GridSpec
    values_db: np.ndarray

    def __post_init__(self) -> None:
        if self.values_db.shape != (self.grid.rows, self.grid.cols):
            raise CoverageError(
                f"field shape {self.values_db.shape} does not match grid "
                f"({self.grid.rows}, {self.grid.cols})"
            )

    def flat_row_major(self) -> np.ndarray:
        return self.values_db.reshape(-1)


@dataclass(frozen=True)
class CoverageReport:
    """Mask, smoothed contours, and area accounting for one threshold."""

    mask: np.ndarray
    contours: list[np.ndarray]
    indoor_area_m2: float
    leakage_area_m2: float | None  # None = grid never crosses the wall line
    component_count: int
    covered_area_m2: float


def evaluate_field(scenario: "Scenario", grid: GridSpec | None = None) -> ScalarField:
    """SSNR in dB at every cell centre of the scenario grid.

    Every cell goes through ``geometry.path_set`` plus the configured scalar
    SSNR function; recomputing a cell standalone reproduces the stored value
    exactly.  Cells are independent, so this loop is safe to parallelise.
    """
    g = grid if grid is not None else scenario.grid
    if g.resolution_m > COARSE_RESOLUTION_M:
        warnings.warn(
            f"resolution {g.resolution_m} m is coarser than {COARSE_RESOLUTION_M} m; "
            "fringes will alias",
            ResolutionWarning,
            stacklevel=2,
        )
    scenario.placement.validate_inside(scenario.room)

    room = scenario.room
    placement = scenario.placement
    rf = scenario.rf
    excl = scenario.exclusion_radius_m
    use_full = scenario.model == "full"
    scale = scenario.scale
    alpha1 = rf.alpha1
    alpha2 = rf.alpha2
    lam = rf.wavelength_m
    tx, rx = placement.tx, placement.rx

    # The bounce divergence along the wall line only exists when the wall
    # actually reflects.
    banded_walls: tuple[WallSegment, ...] = (
        room.reflective_walls if rf.wall_reflection > 0.0 and excl > 0.0 else ()
    )

    values = np.full((g.rows, g.cols), np.nan, dtype=np.float64)
    xs = [g.cell_center(0, j)[0] for j in range(g.cols)]
    for i in range(g.rows):
        y = g.cell_center(i, 0)[1]
        row = values[i]
        for j in range(g.cols):
            x = xs[j]
            if math.hypot(x - tx.x, y - tx.y) <= excl:
                continue
            if math.hypot(x - rx.x, y - rx.y) <= excl:
                continue
            p = Point2D(x, y)
            if any(w.line_distance_to(p) <= excl for w in banded_walls):
                continue
            paths = path_set(placement, p, room)
            if paths.singular:
                continue
            if use_full:
                row[j] = channel.ssnr_full(rf, paths).db
            else:
                linear = scale * channel.ssnr_simplified(paths, alpha1, alpha2, lam)
                row[j] = 10.0 * math.log10(linear) if linear > 0.0 else -math.inf
    return ScalarField(g, values)


def threshold_mask(field: ScalarField, threshold_db: float) -> np.ndarray:
    """Boolean coverage mask: value >= threshold and not excluded."""
    if math.isnan(threshold_db):
        raise CoverageError("threshold must not be NaN")
    with np.errstate(invalid="ignore"):
        return np.where(np.isnan(field.values_db), False, field.values_db >= threshold_db)


# Marching-squares lookup: case index -> directed segments (start, end) with
# the covered region on the left.  Corner bits: 1=bottom-left, 2=bottom-right,
# 4=top-right, 8=top-left.  Endpoints are edge midpoints named S/E/N/W.
_S, _E, _N, _W = 0, 1, 2, 3
_MS_TABLE: dict[int, tuple[tuple[int, int], ...]] = {
    0: (),
    1: ((_S, _W),),
    2: ((_E, _S),),
    3: ((_E, _W),),
    4: ((_N, _E),),
    5: ((_S, _W), (_N, _E)),  # saddle: keep diagonal regions separate
    6: ((_N, _S),),
    7: ((_N, _W),),
    8: ((_W, _N),),
    9: ((_S, _N),),
    10: ((_E, _S), (_W, _N)),  # saddle
    11: ((_E, _N),),
    12: ((_W, _E),),
    13: ((_S, _E),),
    14: ((_W, _S),),
    15: (),
}


def extract_boundary(mask: np.ndarray, grid: GridSpec) -> list[np.ndarray]:
    """Closed marching-squares contours of the mask, world coordinates.

    Vertices sit at midpoints between neighbouring cell centres; outside the
    grid counts as uncovered, so a fully covered grid still yields one outer
    contour.  Orientation keeps the covered region on the left: outer
    boundaries run counterclockwise (positive signed area), holes clockwise.
    """
    if mask.shape != (grid.rows, grid.cols):
        raise CoverageError("mask shape does not match grid")
    if not mask.any():
        return []

    padded = np.zeros((grid.rows + 2, grid.cols + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask

    # Segment endpoints in half-step integer coordinates: cell centre
    # (row i, col j) of the padded array sits at (2j, 2i).
    segments: dict[tuple[int, int], tuple[int, int]] = {}
    rows_p, cols_p = padded.shape
    for i in range(rows_p - 1):
        for j in range(cols_p - 1):
            case = (
                int(padded[i, j])
                | int(padded[i, j + 1]) << 1
                | int(padded[i + 1, j + 1]) << 2
                | int(padded[i + 1, j]) << 3
            )
            if case in (0, 15):
                continue
            mids = (
                (2 * j + 1, 2 * i),  # S
                (2 * j + 2, 2 * i + 1),  # E
                (2 * j + 1, 2 * i + 2),  # N
                (2 * j, 2 * i + 1),  # W
            )
            for a, b in _MS_TABLE[case]:
                segments[mids[a]] = mids[b]

    contours: list[np.ndarray] = []
    for start in sorted(segments):
        if start not in segments:
            continue
        loop = [start]
        cur = segments.pop(start)
        while cur != start:
            loop.append(cur)
            cur = segments.pop(cur)
        pts = np.array(loop, dtype=float)
        # Half-step index (a, b) -> world; padding shifted centres by one.
        world = np.empty_like(pts)
        world[:, 0] = grid.origin_x_m + (pts[:, 0] / 2.0 - 0.5) * grid.resolution_m
        world[:, 1] = grid.origin_y_m + (pts[:, 1] / 2.0 - 0.5) * grid.resolution_m
        contours.append(world)
    return contours


def contour_signed_area(contour: np.ndarray) -> float:
    """Shoelace area; positive for counterclockwise (outer) contours."""
    x = contour[:, 0]
    y = contour[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def contour_length(contour: np.ndarray) -> float:
    d = np.diff(np.vstack([contour, contour[:1]]), axis=0)
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def smooth_boundary(contour: np.ndarray, window: int = 9) -> np.ndarray:
    """Circular moving average of contour vertices; window must be odd.

    window=1 is the identity (kept as the explicit no-smoothing setting);
    otherwise the window must be an odd count >= 3.  The polyline stays
    closed because the average wraps around the ends.
    """
    if window == 1:
        return contour.copy()
    if window < 3 or window % 2 == 0:
        raise CoverageError(f"window must be 1 or an odd count >= 3, got {window}")
    n = len(contour)
    if n < 3:
        raise CoverageError("closed contour needs at least 3 vertices")
    half = window // 2
    idx = (np.arange(n)[:, None] + np.arange(-half, half + 1)[None, :]) % n
    return contour[idx].mean(axis=1)


def fill_enclosed(mask: np.ndarray) -> np.ndarray:
    """Mask with interior holes filled: the region inside the outer boundary.

    Sensing areas are read off the outer sensing boundary, so interference
    nulls and device exclusion disks enclosed by covered cells count as
    covered.  Regions open to the grid edge are untouched.
    """
    if not mask.any():
        return mask.copy()
    return ndimage.binary_fill_holes(mask)


def connected_components(mask: np.ndarray, bridge_cells: int = DEFAULT_BRIDGE_CELLS) -> int:
    """4-connected macro-region count, after bridging sub-fringe gaps.

    Phase fringes chop the covered set into one-cell-wide stripes; hole
    filling plus a binary closing of ``bridge_cells`` iterations merges
    stripes separated by gaps up to that many cells so the count reflects
    macro regions.  Genuinely separate regions (split coverage at large
    Tx-Rx separation) sit many cells apart and survive.
    """
    if not mask.any():
        return 0
    work = fill_enclosed(mask)
    if bridge_cells > 0:
        pad = bridge_cells + 1
        padded = np.pad(work, pad)
        closed = ndimage.binary_closing(padded, structure=np.ones((3, 3), bool), iterations=bridge_cells)
        work = closed[pad:-pad, pad:-pad]
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    _, count = ndimage.label(work, structure=structure)
    return int(count)


def _inside_room_grid(grid: GridSpec, room: RoomLayout) -> np.ndarray:
    """Boolean (rows, cols): cell centre strictly inside the room polygon."""
    xs = grid.x_centers()
    ys = grid.y_centers()
    gx, gy = np.meshgrid(xs, ys)
    inside = np.zeros(gx.shape, dtype=bool)
    corners = room.corners
    n = len(corners)
    for k in range(n):
        a = corners[k]
        b = corners[(k + 1) % n]
        cond = (a.y > gy) != (b.y > gy)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = a.x + (gy - a.y) * (b.x - a.x) / (b.y - a.y)
        inside ^= cond & (gx < x_cross)
    return inside


def _beyond_wall_grid(grid: GridSpec, room: RoomLayout, wall: WallSegment) -> np.ndarray:
    """Cells strictly on the far side of the wall's infinite line."""
    xs = grid.x_centers()
    ys = grid.y_centers()
    gx, gy = np.meshgrid(xs, ys)
    nx, ny = room.inward_normal(wall)
    signed = (gx - wall.a.x) * nx + (gy - wall.a.y) * ny
    return signed < 0.0


def coverage_report(
    scenario: "Scenario",
    field: ScalarField,
    threshold_db: float,
    smooth_window: int = 9,
    bridge_cells: int = DEFAULT_BRIDGE_CELLS,
) -> CoverageReport:
    """Mask, smoothed boundary, and indoor/beyond-wall area split.

    Areas are measured on the hole-filled mask (the region enclosed by the
    outer sensing boundary), matching how areas are read off a smoothed
    boundary plot.  Leakage is the covered area strictly beyond the primary
    reflective wall's infinite line.  When the grid never crosses that line
    the leakage is unknown and reported as None rather than zero.
    """
    mask = threshold_mask(field, threshold_db)
    raw_contours = extract_boundary(mask, field.grid)
    contours = [smooth_boundary(c, smooth_window) if len(c) >= 3 else c for c in raw_contours]

    cell_area = field.grid.cell_area_m2
    filled = fill_enclosed(mask)
    inside = _inside_room_grid(field.grid, scenario.room)
    indoor_area = float(np.count_nonzero(filled & inside)) * cell_area

    beyond = _beyond_wall_grid(field.grid, scenario.room, scenario.room.primary_reflective_wall)
    if not beyond.any():
        leakage_area: float | None = None
    else:
        leakage_area = float(np.count_nonzero(filled & beyond)) * cell_area

    return CoverageReport(
        mask=mask,
        contours=contours,
        indoor_area_m2=indoor_area,
        leakage_area_m2=leakage_area,
        component_count=connected_components(mask, bridge_cells),
        covered_area_m2=float(np.count_nonzero(filled)) * cell_area,
    )


def field_to_csv(field: ScalarField, path) -> None:
    """Write x,y,ssnr_db rows; floats use shortest round-trip formatting."""
    g = field.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x_m,y_m,ssnr_db\n")
        for i in range(g.rows):
            for j in range(g.cols):
                x, y = g.cell_center(i, j)
                fh.write(f"{x!r},{y!r},{float(field.values_db[i, j])!r}\n")


def field_to_pgm(field: ScalarField, path) -> tuple[float, float]:
    """Write a 16-bit binary PGM; returns the (db_min, db_max) mapping range.

    Finite values map linearly onto 1..65535 over the field's finite range;
    0 is reserved for excluded/non-finite cells.  A sidecar text file at
    ``<path>.range.txt`` records the mapping.
    """
    vals = field.values_db
    finite = vals[np.isfinite(vals)]
    if finite.size:
        lo, hi = float(finite.min()), float(finite.max())
    else:
        lo, hi = 0.0, 0.0
    span = hi - lo
    with np.errstate(invalid="ignore"):
        if span > 0:
            scaled = 1.0 + (vals - lo) / span * 65534.0
        else:
            scaled = np.full_like(vals, 65535.0)
        pix = np.where(np.isfinite(vals), scaled, 0.0)
    pix16 = np.clip(np.rint(pix), 0, 65535).astype(">u2")
    # Image rows run top to bottom; grid rows run bottom to top.
    pix16 = pix16[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{field.grid.cols} {field.grid.rows}\n65535\n".encode("ascii"))
        fh.write(pix16.tobytes())
    with open(f"{path}.range.txt", "w", encoding="utf-8") as fh:
        fh.write(f"db_min={lo!r}\ndb_max={hi!r}\nexcluded_value=0\n")
    return lo, hi


def contours_to_csv(contours: Iterable[np.ndarray], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("contour_index,vertex_index,x_m,y_m\n")
        for ci, contour in enumerate(contours):
            for vi, (x, y) in enumerate(contour):
                fh.write(f"{ci},{vi},{float(x)!r},{float(y)!r}\n")
