"""Planar geometry and continuous collision predicates for disc robots.

Points are plain ``(x, y)`` tuples of floats. Every predicate here works on
exact double-precision values with no slack; callers that want a safety
margin (the planner) inflate the radius themselves.

Contact at exactly the clearance radius counts as a collision against the
workspace (free space is open). Robot-robot tests accept contact, matching
the interference definition used by the connection generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

Point = tuple[float, float]


class LinearMotion(NamedTuple):
    """Straight-line motion of a disc center over normalized time [0, 1]."""

    start: Point
    end: Point

    def at(self, theta: float) -> Point:
        return (self.start[0] + theta * (self.end[0] - self.start[0]),
                self.start[1] + theta * (self.end[1] - self.start[1]))

    def reversed(self) -> "LinearMotion":
        return LinearMotion(self.end, self.start)

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])


def _signed_area(vertices: Sequence[Point]) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, stored counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("polygon coordinates must be finite")
        for i in range(len(verts)):
            if verts[i] == verts[(i + 1) % len(verts)]:
                raise ValueError("consecutive polygon vertices coincide")
        if _signed_area(verts) < 0:
            verts = verts[::-1]
        object.__setattr__(self, "vertices", verts)

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def is_simple(self) -> bool:
        n = len(self.vertices)
        edges = list(self.edges())
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if segments_intersect(*edges[i], *edges[j]):
                    return False
        return True


@dataclass(frozen=True)
class Workspace:
    boundary: Polygon
    obstacles: tuple[Polygon, ...] = ()
    _arrays: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def all_edges(self):
        yield from self.boundary.edges()
        for ob in self.obstacles:
            yield from ob.edges()

    def arrays(self) -> "WorkspaceArrays":
        """Flat numpy form consumed by the kernel backends (cached)."""
        wa = self._arrays.get("wa")
        if wa is None:
            wa = WorkspaceArrays.from_workspace(self)
            self._arrays["wa"] = wa
        return wa


class WorkspaceArrays(NamedTuple):
    edges: np.ndarray       # (E, 4) ax, ay, bx, by
    poly_xy: np.ndarray     # (V, 2) vertices of all polygons, boundary first
    poly_offsets: np.ndarray  # (P + 1,) int64 start index of each polygon

    @classmethod
    def from_workspace(cls, w: Workspace) -> "WorkspaceArrays":
        edges = np.array([(a[0], a[1], b[0], b[1]) for a, b in w.all_edges()],
                         dtype=np.float64).reshape(-1, 4)
        polys = [w.boundary, *w.obstacles]
        xy = np.array([v for p in polys for v in p.vertices], dtype=np.float64).reshape(-1, 2)
        offsets = np.zeros(len(polys) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(p.vertices) for p in polys])
        return cls(np.ascontiguousarray(edges), np.ascontiguousarray(xy), offsets)


# -- primitives --------------------------------------------------------------

def dist2_point_segment(px: float, py: float, ax: float, ay: float,
                        bx: float, by: float) -> float:
    dx = bx - ax
    dy = by - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / ll
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = ax + t * dx - px
    cy = ay + t * dy - py
    return cx * cx + cy * cy


def dist_point_segment(p: Point, a: Point, b: Point) -> float:
    """Euclidean distance from ``p`` to the closed segment ``ab``."""
    return math.sqrt(dist2_point_segment(p[0], p[1], a[0], a[1], b[0], b[1]))


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py) -> bool:
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def segments_intersect(a1: Point, b1: Point, a2: Point, b2: Point) -> bool:
    """True iff the closed segments share at least one point."""
    d1 = _orient(*a2, *b2, *a1)
    d2 = _orient(*a2, *b2, *b1)
    d3 = _orient(*a1, *b1, *a2)
    d4 = _orient(*a1, *b1, *b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(*a2, *b2, *a1):
        return True
    if d2 == 0 and _on_segment(*a2, *b2, *b1):
        return True
    if d3 == 0 and _on_segment(*a1, *b1, *a2):
        return True
    if d4 == 0 and _on_segment(*a1, *b1, *b2):
        return True
    return False


def dist2_segment_segment(a1x, a1y, b1x, b1y, a2x, a2y, b2x, b2y) -> float:
    if segments_intersect((a1x, a1y), (b1x, b1y), (a2x, a2y), (b2x, b2y)):
        return 0.0
    return min(dist2_point_segment(a1x, a1y, a2x, a2y, b2x, b2y),
               dist2_point_segment(b1x, b1y, a2x, a2y, b2x, b2y),
               dist2_point_segment(a2x, a2y, a1x, a1y, b1x, b1y),
               dist2_point_segment(b2x, b2y, a1x, a1y, b1x, b1y))


def dist_segment_segment(a1: Point, b1: Point, a2: Point, b2: Point) -> float:
    """Minimum distance between two closed segments (0 iff they intersect)."""
    return math.sqrt(dist2_segment_segment(*a1, *b1, *a2, *b2))


def point_in_polygon(p: Point, poly: Polygon) -> bool:
    """Even-odd ray casting.

    The half-open crossing rule treats a vertex lying on the ray as slightly
    above it, so ray-through-vertex degeneracies are counted consistently.
    """
    x, y = p
    inside = False
    verts = poly.vertices
    n = len(verts)
    j = n - 1
    for i in range(n):
        xi, yi = verts[i]
        xj, yj = verts[j]
        if (yi > y) != (yj > y):
            xcross = (xj - xi) * (y - yi) / (yj - yi) + xi
            if x < xcross:
                inside = not inside
        j = i
    return inside


def disc_free(c: Point, r: float, w: Workspace) -> bool:
    """Closed disc of radius ``r`` at ``c`` lies strictly inside free space."""
    if not point_in_polygon(c, w.boundary):
        return False
    for ob in w.obstacles:
        if point_in_polygon(c, ob):
            return False
    r2 = r * r
    for a, b in w.all_edges():
        if dist2_point_segment(c[0], c[1], a[0], a[1], b[0], b[1]) <= r2:
            return False
    return True


def sweep_free(m: LinearMotion, r: float, w: Workspace) -> bool:
    """Capsule test: the disc stays free for every theta along ``m``."""
    if not disc_free(m.start, r, w) or not disc_free(m.end, r, w):
        return False
    r2 = r * r
    (sx, sy), (ex, ey) = m
    for a, b in w.all_edges():
        if dist2_segment_segment(sx, sy, ex, ey, a[0], a[1], b[0], b[1]) <= r2:
            return False
    return True


def min_dist2_linear_motions(a0x, a0y, a1x, a1y, b0x, b0y, b1x, b1y) -> float:
    d0x = a0x - b0x
    d0y = a0y - b0y
    dvx = (a1x - a0x) - (b1x - b0x)
    dvy = (a1y - a0y) - (b1y - b0y)
    vv = dvx * dvx + dvy * dvy
    if vv == 0.0:
        t = 0.0
    else:
        t = -(d0x * dvx + d0y * dvy) / vv
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    px = d0x + t * dvx
    py = d0y + t * dvy
    return px * px + py * py


def min_dist_linear_motions(a: LinearMotion, b: LinearMotion) -> float:
    """Minimum over shared theta of the distance between two moving points.

    The relative motion is linear in theta, so the squared distance is a
    quadratic minimized in closed form and clamped to [0, 1].
    """
    return math.sqrt(min_dist2_linear_motions(*a.start, *a.end, *b.start, *b.end))


def argmin_linear_motions(a: LinearMotion, b: LinearMotion) -> float:
    """Theta at which :func:`min_dist_linear_motions` attains its minimum."""
    d0x = a.start[0] - b.start[0]
    d0y = a.start[1] - b.start[1]
    dvx = (a.end[0] - a.start[0]) - (b.end[0] - b.start[0])
    dvy = (a.end[1] - a.start[1]) - (b.end[1] - b.start[1])
    vv = dvx * dvx + dvy * dvy
    if vv == 0.0:
        return 0.0
    return min(1.0, max(0.0, -(d0x * dvx + d0y * dvy) / vv))
