"""Composite pumped configurations and their pebble graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .geom import LinearMotion, Point, Workspace, dist2_point_segment, sweep_free
from .pebble import Graph

# Clearance slack applied by the planner on every free-space test. The
# verifier uses exact predicates, so this shows up as positive clearance.
SAFETY_MARGIN = 1e-7

DEFAULT_MAX_TRIES = 100_000
_DRAW_BATCH = 512


class SamplingExhausted(Exception):
    """A color could not reach its robot count within the draw budget."""


@dataclass(frozen=True)
class ColorSpec:
    color_id: int
    radius: float
    robot_count: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.robot_count < 1:
            raise ValueError("each color needs at least one robot")


@dataclass(frozen=True)
class PumpedConfiguration:
    color_id: int
    points: tuple[Point, ...]


@dataclass(frozen=True)
class CompositePumpedConfiguration:
    colors: tuple[ColorSpec, ...]
    per_color: tuple[PumpedConfiguration, ...]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(pc.points) for pc in self.per_color)

    def points_array(self, color: int) -> np.ndarray:
        return np.array(self.per_color[color].points, dtype=np.float64).reshape(-1, 2)

    def others(self, color: int) -> tuple[np.ndarray, np.ndarray]:
        """Points and radii of every vertex not of ``color``."""
        xy = [p for c, pc in enumerate(self.per_color) if c != color for p in pc.points]
        rr = [self.colors[c].radius for c, pc in enumerate(self.per_color) if c != color
              for _ in pc.points]
        return (np.array(xy, dtype=np.float64).reshape(-1, 2),
                np.array(rr, dtype=np.float64))

    @classmethod
    def from_points(cls, colors: Sequence[ColorSpec],
                    points: Sequence[Sequence[Point]]) -> "CompositePumpedConfiguration":
        per = tuple(PumpedConfiguration(c.color_id, tuple((float(x), float(y)) for x, y in pts))
                    for c, pts in zip(colors, points))
        return cls(tuple(colors), per)


def allocate_quotas(colors: Sequence[ColorSpec], mu: int) -> list[int]:
    """Split ``mu`` across colors proportionally to robot counts.

    Largest-remainder rounding, ties broken by color order.
    """
    total = sum(c.robot_count for c in colors)
    if mu < total:
        raise ValueError(f"mu={mu} is below the robot count {total}")
    exact = [mu * c.robot_count / total for c in colors]
    quotas = [math.floor(x) for x in exact]
    rest = mu - sum(quotas)
    order = sorted(range(len(colors)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in order[:rest]:
        quotas[i] += 1
    return [max(q, c.robot_count) for q, c in zip(quotas, colors)]


def sample_pumped(colors: Sequence[ColorSpec], w: Workspace, mu: int,
                  rng: np.random.Generator,
                  max_tries: int = DEFAULT_MAX_TRIES) -> CompositePumpedConfiguration:
    """Rejection-sample a composite pumped configuration.

    Draws are uniform in the boundary's bounding box and assigned to colors
    round-robin (skipping colors whose quota is met). A draw is kept iff its
    disc is free and clears every previously kept disc of any color.
    """
    if max_tries < 1:
        raise ValueError("max_tries must be at least 1")
    quotas = np.array(allocate_quotas(colors, mu), dtype=np.int64)
    radii = np.array([c.radius for c in colors], dtype=np.float64)
    cap = int(quotas.sum())
    counts = np.zeros(len(colors), dtype=np.int64)
    kept_xy = np.zeros((cap, 2), dtype=np.float64)
    kept_color = np.zeros(cap, dtype=np.int32)
    wa = w.arrays()
    x0, y0, x1, y1 = w.boundary.bbox()
    lo = np.array([x0, y0])
    span = np.array([x1 - x0, y1 - y0])
    n_kept = 0
    cursor = 0
    tries = 0
    while tries < max_tries and n_kept < cap:
        batch = min(_DRAW_BATCH, max_tries - tries)
        cands = np.ascontiguousarray(lo + rng.random((batch, 2)) * span)
        used, n_kept, cursor = kernels.fill_pumped(
            cands, radii, SAFETY_MARGIN, quotas, counts, kept_xy, kept_color,
            n_kept, cursor, wa.edges, wa.poly_xy, wa.poly_offsets)
        tries += used
        if used < batch:
            break
    short = [c.color_id for c, n in zip(colors, counts) if n < c.robot_count]
    if short:
        raise SamplingExhausted(
            f"colors {short} below robot count after {tries} draws")
    points = [[] for _ in colors]
    for i in range(n_kept):
        points[kept_color[i]].append((float(kept_xy[i, 0]), float(kept_xy[i, 1])))
    return CompositePumpedConfiguration.from_points(colors, points)


def edge_plan(pumped: CompositePumpedConfiguration, color: int, v: int, v2: int,
              w: Workspace, margin: float = SAFETY_MARGIN) -> LinearMotion | None:
    """Straight motion between two vertices of one color, or None (failure).

    The moving disc must clear the obstacles, every other vertex disc of its
    own color, and every vertex disc of every other color, since any of those
    may be occupied while it moves.
    """
    if v == v2:
        raise ValueError("edge endpoints must differ")
    pts = pumped.per_color[color].points
    r = pumped.colors[color].radius
    a, b = pts[v], pts[v2]
    m = LinearMotion(a, b)
    if not sweep_free(m, r + margin, w):
        return None
    same = 2.0 * r + margin
    for u, p in enumerate(pts):
        if u in (v, v2):
            continue
        if dist2_point_segment(p[0], p[1], a[0], a[1], b[0], b[1]) <= same * same:
            return None
    for c, pc in enumerate(pumped.per_color):
        if c == color:
            continue
        t = r + pumped.colors[c].radius + margin
        for p in pc.points:
            if dist2_point_segment(p[0], p[1], a[0], a[1], b[0], b[1]) <= t * t:
                return None
    return m


@dataclass
class GeometricPebbleGraph:
    """Composite pebble graph: one edge-planned graph per color.

    ``motions[c]`` maps an edge ``(u, v)`` with ``u < v`` to the motion from
    ``u`` to ``v``.
    """

    pumped: CompositePumpedConfiguration
    motions: list[dict[tuple[int, int], LinearMotion]]
    graphs: list[Graph] = field(default_factory=list)

    def __post_init__(self):
        if not self.graphs:
            self.graphs = [Graph(len(pc.points), frozenset(m))
                           for pc, m in zip(self.pumped.per_color, self.motions)]
        for g in self.graphs:
            g.component_labels  # warm the component cache

    @property
    def colors(self) -> tuple[ColorSpec, ...]:
        return self.pumped.colors

    def edge_motion(self, color: int, u: int, v: int) -> LinearMotion | None:
        if u < v:
            return self.motions[color].get((u, v))
        m = self.motions[color].get((v, u))
        return None if m is None else m.reversed()

    def edge_count(self) -> int:
        return sum(len(m) for m in self.motions)


def build_pebble_graph(pumped: CompositePumpedConfiguration, w: Workspace,
                       with_edges: bool = True) -> GeometricPebbleGraph:
    """Run the edge planner on every same-color vertex pair."""
    wa = w.arrays()
    motions = []
    for c, pc in enumerate(pumped.per_color):
        edges: dict[tuple[int, int], LinearMotion] = {}
        if with_edges and len(pc.points) > 1:
            pts = pumped.points_array(c)
            oxy, orr = pumped.others(c)
            ok = kernels.edge_plan_color(pts, pumped.colors[c].radius, oxy, orr,
                                         SAFETY_MARGIN, wa.edges, wa.poly_xy, wa.poly_offsets)
            iu, ju = np.nonzero(np.triu(ok, 1))
            for i, j in zip(iu.tolist(), ju.tolist()):
                edges[(i, j)] = LinearMotion(pc.points[i], pc.points[j])
        motions.append(edges)
    return GeometricPebbleGraph(pumped, motions)
