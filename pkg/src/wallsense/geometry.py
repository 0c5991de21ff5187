"""Planar geometry for rooms, device placements, and wall-bounce paths.

Coordinates are metres on a 2-D floor plan.  Wall reflections are single
bounce and use the image-source construction: mirroring a device across the
wall line yields the specular reflection point, so the incidence and
reflection angles agree by construction and d1 + d2 equals the distance from
the mirrored device to the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

# Reflection points may overshoot the finite wall segment by this much and
# still count as on-segment.
ON_SEGMENT_TOL_M = 1e-9

# Targets closer than this to a device make the bounce geometry degenerate.
SINGULAR_DISTANCE_M = 1e-12

Side = Literal["tx", "rx"]


class GeometryError(ValueError):
    """Degenerate geometric input (zero-length wall, bad polygon, ...)."""


@dataclass(frozen=True)
class Point2D:
    """A point on the floor plan, metres."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"coordinates must be finite, got ({self.x!r}, {self.y!r})")

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class WallSegment:
    """A finite wall segment; only reflective walls relay bounce paths."""

    a: Point2D
    b: Point2D
    reflective: bool = False

    def __post_init__(self) -> None:
        if self.a.x == self.b.x and self.a.y == self.b.y:
            raise GeometryError("wall segment must have positive length")

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    def side_of(self, p: Point2D) -> float:
        """Signed cross product; >0 left of a->b, <0 right, 0 on the line."""
        return (self.b.x - self.a.x) * (p.y - self.a.y) - (self.b.y - self.a.y) * (p.x - self.a.x)

    def line_distance_to(self, p: Point2D) -> float:
        """Unsigned distance from p to the infinite line through the wall."""
        return abs(self.side_of(p)) / self.length

    def segment_distance_to(self, p: Point2D) -> float:
        """Distance from p to the nearest point of the finite segment."""
        ax, ay = self.a.x, self.a.y
        dx, dy = self.b.x - ax, self.b.y - ay
        t = ((p.x - ax) * dx + (p.y - ay) * dy) / (dx * dx + dy * dy)
        t = min(1.0, max(0.0, t))
        return math.hypot(p.x - (ax + t * dx), p.y - (ay + t * dy))


@dataclass(frozen=True)
class ReflectedPath:
    """One device->wall->target bounce.

    When ``valid`` the reflection point lies on the finite wall segment and
    d1 + d2 equals |mirror(device) - target|.  Off-segment or wrong-side
    geometries keep their distances (when defined) but are flagged invalid.
    """

    d1: float
    d2: float
    reflection_point: Point2D | None
    valid: bool


@dataclass(frozen=True)
class ReflectedEntry:
    """A bounce path inside a PathSet, tagged with the device it starts from."""

    d1: float
    d2: float
    side: Side
    valid: bool
    reflection_point: Point2D | None = None


@dataclass(frozen=True)
class PathSet:
    """Per-target path lengths: direct legs plus any wall bounces.

    r_d is the Tx-Rx separation and is independent of the target.  Entries in
    ``reflected`` are kept even when invalid so consumers can inspect why a
    bounce was rejected; only valid ones carry power.
    """

    r_d: float
    r_t: float
    r_r: float
    reflected: tuple[ReflectedEntry, ...] = ()
    singular: bool = False

    def valid_reflected(self) -> tuple[ReflectedEntry, ...]:
        return tuple(e for e in self.reflected if e.valid)


def mirror_point(p: Point2D, wall: WallSegment) -> Point2D:
    """Reflect p across the infinite line through the wall segment."""
    ax, ay = wall.a.x, wall.a.y
    length = wall.length  # normalized direction avoids underflow on short walls
    ux, uy = (wall.b.x - ax) / length, (wall.b.y - ay) / length
    t = (p.x - ax) * ux + (p.y - ay) * uy
    fx, fy = ax + t * ux, ay + t * uy
    return Point2D(2.0 * fx - p.x, 2.0 * fy - p.y)


def reflected_path(device: Point2D, target: Point2D, wall: WallSegment) -> ReflectedPath:
    """Single-bounce path device -> wall -> target via the image source.

    Device and target must lie strictly on the same side of the wall line for
    a physical bounce; anything else yields an invalid path.  A geometric
    crossing that misses the finite segment also yields an invalid path (the
    distances are still reported for diagnostics).
    """
    side_device = wall.side_of(device)
    side_target = wall.side_of(target)
    if side_device == 0.0 or side_target == 0.0 or (side_device > 0) != (side_target > 0):
        return ReflectedPath(math.nan, math.nan, None, False)

    m = mirror_point(device, wall)
    # Intersection of segment m->target with the wall line.  m and target are
    # on opposite sides, so the crossing parameter is strictly inside (0, 1).
    sm = wall.side_of(m)
    u = sm / (sm - side_target)
    qx = m.x + u * (target.x - m.x)
    qy = m.y + u * (target.y - m.y)
    q = Point2D(qx, qy)

    # Position of q along the wall segment, as arc length from endpoint a.
    ax, ay = wall.a.x, wall.a.y
    wall_len = wall.length
    ux, uy = (wall.b.x - ax) / wall_len, (wall.b.y - ay) / wall_len
    s = (qx - ax) * ux + (qy - ay) * uy
    on_segment = -ON_SEGMENT_TOL_M <= s <= wall_len + ON_SEGMENT_TOL_M

    d1 = device.distance_to(q)
    d2 = q.distance_to(target)
    return ReflectedPath(d1, d2, q, on_segment and d1 > 0.0 and d2 > 0.0)


@dataclass(frozen=True)
class RoomLayout:
    """A simple closed polygon of walls, at least one of them reflective."""

    walls: tuple[WallSegment, ...]

    def __post_init__(self) -> None:
        if len(self.walls) < 3:
            raise GeometryError("room needs at least 3 walls")
        n = len(self.walls)
        for i, w in enumerate(self.walls):
            nxt = self.walls[(i + 1) % n]
            if w.b.x != nxt.a.x or w.b.y != nxt.a.y:
                raise GeometryError(f"walls[{i}] does not chain into walls[{(i + 1) % n}]")
        if not any(w.reflective for w in self.walls):
            raise GeometryError("room needs at least one reflective wall")
        if abs(self._signed_area()) <= 0.0:
            raise GeometryError("room polygon has zero area")
        self._check_simple()

    @classmethod
    def from_corners(
        cls, corners: Sequence[tuple[float, float]], reflective: int | Sequence[int]
    ) -> "RoomLayout":
        """Build from an ordered corner list; wall i runs corner i -> i+1."""
        pts = [Point2D(float(x), float(y)) for x, y in corners]
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 corners")
        idx = {reflective} if isinstance(reflective, int) else set(reflective)
        for i in idx:
            if not 0 <= i < len(pts):
                raise GeometryError(f"reflective wall index {i} out of range")
        walls = tuple(
            WallSegment(pts[i], pts[(i + 1) % len(pts)], reflective=i in idx)
            for i in range(len(pts))
        )
        return cls(walls)

    @property
    def corners(self) -> tuple[Point2D, ...]:
        return tuple(w.a for w in self.walls)

    @property
    def reflective_walls(self) -> tuple[WallSegment, ...]:
        return tuple(w for w in self.walls if w.reflective)

    @property
    def primary_reflective_wall(self) -> WallSegment:
        return self.reflective_walls[0]

    def _signed_area(self) -> float:
        total = 0.0
        for w in self.walls:
            total += w.a.x * w.b.y - w.b.x * w.a.y
        return 0.5 * total

    def _check_simple(self) -> None:
        n = len(self.walls)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j == i + 1) or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(self.walls[i], self.walls[j]):
                    raise GeometryError(f"polygon self-intersects: walls {i} and {j}")

    def centroid(self) -> Point2D:
        # Area-weighted polygon centroid.
        a = self._signed_area()
        cx = cy = 0.0
        for w in self.walls:
            cross = w.a.x * w.b.y - w.b.x * w.a.y
            cx += (w.a.x + w.b.x) * cross
            cy += (w.a.y + w.b.y) * cross
        return Point2D(cx / (6.0 * a), cy / (6.0 * a))

    def contains(self, p: Point2D) -> bool:
        """True when p is strictly inside the polygon (boundary excluded)."""
        if self.min_wall_distance(p) <= 1e-12:
            return False
        inside = False
        for w in self.walls:
            ax, ay, bx, by = w.a.x, w.a.y, w.b.x, w.b.y
            if (ay > p.y) != (by > p.y):
                x_cross = ax + (p.y - ay) * (bx - ax) / (by - ay)
                if p.x < x_cross:
                    inside = not inside
        return inside

    def min_wall_distance(self, p: Point2D) -> float:
        return min(w.segment_distance_to(p) for w in self.walls)

    def inward_normal(self, wall: WallSegment) -> tuple[float, float]:
        """Unit normal of the wall line pointing into the room."""
        dx, dy = wall.b.x - wall.a.x, wall.b.y - wall.a.y
        length = math.hypot(dx, dy)
        nx, ny = -dy / length, dx / length
        c = self.centroid()
        if (c.x - wall.a.x) * nx + (c.y - wall.a.y) * ny < 0:
            nx, ny = -nx, -ny
        return nx, ny

    def signed_wall_distance(self, p: Point2D, wall: WallSegment | None = None) -> float:
        """Distance of p from the wall line; positive on the room side."""
        w = wall if wall is not None else self.primary_reflective_wall
        nx, ny = self.inward_normal(w)
        return (p.x - w.a.x) * nx + (p.y - w.a.y) * ny


@dataclass(frozen=True)
class DevicePlacement:
    """Transmitter and receiver positions; both must sit inside the room."""

    tx: Point2D
    rx: Point2D

    def __post_init__(self) -> None:
        if self.tx.x == self.rx.x and self.tx.y == self.rx.y:
            raise GeometryError("tx and rx must not coincide")

    def validate_inside(self, room: RoomLayout) -> None:
        if not room.contains(self.tx):
            raise GeometryError("tx is not strictly inside the room")
        if not room.contains(self.rx):
            raise GeometryError("rx is not strictly inside the room")

    @property
    def separation(self) -> float:
        return self.tx.distance_to(self.rx)


def path_set(placement: DevicePlacement, target: Point2D, room: RoomLayout) -> PathSet:
    """All dynamic-path lengths for one target position.

    Targets may lie outside the room (spill evaluation); bounce paths simply
    come back invalid there.  Targets coinciding with a device are flagged
    singular and must be excluded by the caller before computing power.
    """
    r_t = placement.tx.distance_to(target)
    r_r = placement.rx.distance_to(target)
    singular = r_t < SINGULAR_DISTANCE_M or r_r < SINGULAR_DISTANCE_M

    entries: list[ReflectedEntry] = []
    for wall in room.reflective_walls:
        for side, device in (("tx", placement.tx), ("rx", placement.rx)):
            rp = reflected_path(device, target, wall)
            entries.append(ReflectedEntry(rp.d1, rp.d2, side, rp.valid, rp.reflection_point))
    return PathSet(
        r_d=placement.separation,
        r_t=r_t,
        r_r=r_r,
        reflected=tuple(entries),
        singular=singular,
    )


def _segments_intersect(s1: WallSegment, s2: WallSegment) -> bool:
    d1 = s2.side_of(s1.a)
    d2 = s2.side_of(s1.b)
    d3 = s1.side_of(s2.a)
    d4 = s1.side_of(s2.b)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on(seg: WallSegment, p: Point2D) -> bool:
        return (
            seg.side_of(p) == 0
            and min(seg.a.x, seg.b.x) <= p.x <= max(seg.a.x, seg.b.x)
            and min(seg.a.y, seg.b.y) <= p.y <= max(seg.a.y, seg.b.y)
        )

    return on(s2, s1.a) or on(s2, s1.b) or on(s1, s2.a) or on(s1, s2.b)
