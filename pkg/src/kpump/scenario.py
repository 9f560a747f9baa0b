"""Scenario and plan documents, and the seeded random-stream contract.

Scenario document::

    {"name": "...",
     "workspace": {"boundary": [[x, y], ...], "obstacles": [[[x, y], ...], ...]},
     "colors": [{"radius": r, "starts": [[x, y], ...], "targets": [[x, y], ...]}]}
"""
from __future__ import annotations

import itertools
import json
import math
import zlib
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, NamedTuple, Sequence, Union

import numpy as np

from .geom import LinearMotion, Point, Polygon, Workspace, disc_free, point_in_polygon, segments_intersect
from .graphgen import ColorSpec


class ScenarioError(Exception):
    def __init__(self, message: str, location: str = "", code: str = ""):
        self.location = location
        self.code = code
        prefix = f"{location}: " if location else ""
        super().__init__(prefix + message)


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


@dataclass(frozen=True)
class Scenario:
    workspace: Workspace
    colors: tuple[ColorSpec, ...]
    starts: tuple[tuple[Point, ...], ...]
    targets: tuple[tuple[Point, ...], ...]
    name: str = "scenario"

    @property
    def robot_count(self) -> int:
        return sum(c.robot_count for c in self.colors)

    def robots(self) -> list[tuple[int, int]]:
        return [(c, i) for c, spec in enumerate(self.colors) for i in range(spec.robot_count)]

    def radius(self, robot: tuple[int, int]) -> float:
        return self.colors[robot[0]].radius

    @classmethod
    def build(cls, boundary, obstacles, colors: Sequence[dict], name="scenario",
              validate=True) -> "Scenario":
        """Construct from plain coordinates; ``colors`` items hold radius/starts/targets."""
        doc = {"name": name,
               "workspace": {"boundary": boundary, "obstacles": obstacles},
               "colors": list(colors)}
        return scenario_from_dict(doc, validate=validate)


# -- random streams ----------------------------------------------------------

def stream(seed: int, label: str, *index: int) -> np.random.Generator:
    """Independent generator keyed by (seed, label, index...).

    Counter-based (Philox), so draws for one key never depend on how many
    other streams were used or in which order.
    """
    key = (zlib.crc32(label.encode()),) + tuple(int(i) for i in index)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


# -- scenario I/O --------------------------------------------------------------

def _point(obj, loc) -> Point:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)):
        raise ParseError(f"expected [x, y], got {obj!r}", loc, "bad_point")
    x, y = float(obj[0]), float(obj[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ParseError("coordinates must be finite", loc, "bad_point")
    return (x, y)


def _points(obj, loc) -> tuple[Point, ...]:
    if not isinstance(obj, list):
        raise ParseError("expected a list of points", loc, "bad_point_list")
    return tuple(_point(p, f"{loc}[{i}]") for i, p in enumerate(obj))


def _polygon(obj, loc) -> Polygon:
    pts = _points(obj, loc)
    try:
        poly = Polygon(pts)
    except ValueError as exc:
        raise ValidationError(str(exc), loc, "bad_polygon") from None
    if not poly.is_simple():
        raise ValidationError("polygon self-intersects", loc, "bad_polygon")
    return poly


def _polygons_touch(p: Polygon, q: Polygon) -> bool:
    for a1, b1 in p.edges():
        for a2, b2 in q.edges():
            if segments_intersect(a1, b1, a2, b2):
                return True
    return point_in_polygon(p.vertices[0], q) or point_in_polygon(q.vertices[0], p)


def _check_configuration(points, colors, w, loc, what):
    flat = [(c, i, p) for c, pts in enumerate(points) for i, p in enumerate(pts)]
    for c, i, p in flat:
        if not disc_free(p, colors[c].radius, w):
            raise ValidationError(f"{what} disc is not in free space",
                                  f"{loc}[{c}].{what}s[{i}]", f"{what}_not_free")
    for (c1, i1, p1), (c2, i2, p2) in itertools.combinations(flat, 2):
        if math.dist(p1, p2) < colors[c1].radius + colors[c2].radius:
            raise ValidationError(
                f"{what} discs {c1}:{i1} and {c2}:{i2} overlap",
                f"{loc}[{c2}].{what}s[{i2}]", f"{what}_collision")


def scenario_from_dict(doc: Any, validate: bool = True) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("document must be an object", "$", "bad_document")
    ws = doc.get("workspace")
    if not isinstance(ws, dict) or "boundary" not in ws:
        raise ParseError("missing workspace.boundary", "$.workspace", "missing_field")
    boundary = _polygon(ws["boundary"], "$.workspace.boundary")
    obs_doc = ws.get("obstacles", [])
    if not isinstance(obs_doc, list):
        raise ParseError("obstacles must be a list", "$.workspace.obstacles", "bad_obstacles")
    obstacles = tuple(_polygon(o, f"$.workspace.obstacles[{i}]") for i, o in enumerate(obs_doc))
    colors_doc = doc.get("colors")
    if not isinstance(colors_doc, list) or not colors_doc:
        raise ParseError("colors must be a non-empty list", "$.colors", "missing_field")
    specs, starts, targets = [], [], []
    for c, cd in enumerate(colors_doc):
        loc = f"$.colors[{c}]"
        if not isinstance(cd, dict):
            raise ParseError("color entry must be an object", loc, "bad_color")
        r = cd.get("radius")
        if not isinstance(r, (int, float)) or isinstance(r, bool):
            raise ParseError("radius must be a number", f"{loc}.radius", "bad_radius")
        if not (r > 0 and math.isfinite(r)):
            raise ValidationError("radius must be positive", f"{loc}.radius", "bad_radius")
        s = _points(cd.get("starts"), f"{loc}.starts")
        t = _points(cd.get("targets"), f"{loc}.targets")
        if len(s) == 0:
            raise ValidationError("color has no robots", f"{loc}.starts", "count_mismatch")
        if len(s) != len(t):
            raise ValidationError(f"{len(s)} starts but {len(t)} targets",
                                  f"{loc}.targets", "count_mismatch")
        specs.append(ColorSpec(c, float(r), len(s)))
        starts.append(s)
        targets.append(t)
    w = Workspace(boundary, obstacles)
    if validate:
        for i, ob in enumerate(obstacles):
            loc = f"$.workspace.obstacles[{i}]"
            if any(not point_in_polygon(v, boundary) for v in ob.vertices) or \
                    _polygons_touch_edges(ob, boundary):
                raise ValidationError("obstacle leaves the boundary", loc, "obstacle_outside")
        for (i, a), (j, b) in itertools.combinations(enumerate(obstacles), 2):
            if _polygons_touch(a, b):
                raise ValidationError(f"obstacles {i} and {j} overlap",
                                      f"$.workspace.obstacles[{j}]", "obstacles_overlap")
        _check_configuration(starts, specs, w, "$.colors", "start")
        _check_configuration(targets, specs, w, "$.colors", "target")
    name = doc.get("name", "scenario")
    if not isinstance(name, str):
        raise ParseError("name must be a string", "$.name", "bad_name")
    return Scenario(w, tuple(specs), tuple(starts), tuple(targets), name)


def _polygons_touch_edges(p: Polygon, q: Polygon) -> bool:
    return any(segments_intersect(a1, b1, a2, b2)
               for a1, b1 in p.edges() for a2, b2 in q.edges())


def load_scenario(data: Union[bytes, str]) -> Scenario:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}", "bad_json") from None
    return scenario_from_dict(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "name": sc.name,
        "workspace": {
            "boundary": [list(v) for v in sc.workspace.boundary.vertices],
            "obstacles": [[list(v) for v in ob.vertices] for ob in sc.workspace.obstacles],
        },
        "colors": [{"radius": spec.radius,
                    "starts": [list(p) for p in sc.starts[c]],
                    "targets": [list(p) for p in sc.targets[c]]}
                   for c, spec in enumerate(sc.colors)],
    }


def save_scenario(sc: Scenario) -> bytes:
    return (json.dumps(scenario_to_dict(sc), indent=1) + "\n").encode()


def bundled_scenarios() -> list[str]:
    files = resources.files("kpump") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str) -> Scenario:
    path = resources.files("kpump") / "data" / f"{name}.json"
    return load_scenario(path.read_bytes())


# -- plans -------------------------------------------------------------------

RobotId = tuple[int, int]  # (color, index within color)


class SingleMove(NamedTuple):
    robot: RobotId
    motion: LinearMotion


class SimultaneousMove(NamedTuple):
    motions: tuple[tuple[RobotId, LinearMotion], ...]


Step = Union[SingleMove, SimultaneousMove]


@dataclass
class Plan:
    steps: list[Step] = field(default_factory=list)
    scenario: str = ""
    params: dict = field(default_factory=dict)

    def motions(self):
        for k, st in enumerate(self.steps):
            if isinstance(st, SingleMove):
                yield k, st.robot, st.motion
            else:
                for rid, m in st.motions:
                    yield k, rid, m


def _motion_json(m: LinearMotion):
    return [list(m.start), list(m.end)]


def plan_to_dict(plan: Plan) -> dict:
    from .verify import plan_stats

    steps = []
    for st in plan.steps:
        if isinstance(st, SingleMove):
            steps.append({"kind": "single", "robot": list(st.robot),
                          "motion": _motion_json(st.motion)})
        else:
            steps.append({"kind": "simultaneous",
                          "motions": [{"robot": list(rid), "motion": _motion_json(m)}
                                      for rid, m in st.motions]})
    stats = plan_stats(plan)
    return {
        "scenario": plan.scenario,
        "params": plan.params,
        "step_count": stats["step_count"],
        "total_length": stats["total_length"],
        "per_robot_length": {f"{c}:{i}": v for (c, i), v in stats["per_robot_length"].items()},
        "steps": steps,
    }


def save_plan(plan: Plan) -> bytes:
    return (json.dumps(plan_to_dict(plan), separators=(",", ":")) + "\n").encode()


def _rid(obj, loc) -> RobotId:
    if not (isinstance(obj, list) and len(obj) == 2 and all(isinstance(v, int) for v in obj)):
        raise ParseError(f"robot id must be [color, index], got {obj!r}", loc, "bad_robot")
    return (obj[0], obj[1])


def _motion(obj, loc) -> LinearMotion:
    if not (isinstance(obj, list) and len(obj) == 2):
        raise ParseError("motion must be [[x, y], [x, y]]", loc, "bad_motion")
    return LinearMotion(_point(obj[0], loc + "[0]"), _point(obj[1], loc + "[1]"))


def load_plan(data: Union[bytes, str]) -> Plan:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}", "bad_json") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("steps"), list):
        raise ParseError("plan must be an object with a steps list", "$", "bad_document")
    steps: list[Step] = []
    for k, sd in enumerate(doc["steps"]):
        loc = f"$.steps[{k}]"
        kind = sd.get("kind") if isinstance(sd, dict) else None
        if kind == "single":
            steps.append(SingleMove(_rid(sd.get("robot"), loc + ".robot"),
                                    _motion(sd.get("motion"), loc + ".motion")))
        elif kind == "simultaneous":
            ms = sd.get("motions")
            if not isinstance(ms, list):
                raise ParseError("motions must be a list", loc + ".motions", "bad_step")
            steps.append(SimultaneousMove(tuple(
                (_rid(m.get("robot"), f"{loc}.motions[{j}].robot"),
                 _motion(m.get("motion"), f"{loc}.motions[{j}].motion"))
                for j, m in enumerate(ms))))
        else:
            raise ParseError(f"unknown step kind {kind!r}", loc, "bad_step")
    params = doc.get("params", {})
    return Plan(steps, str(doc.get("scenario", "")), params if isinstance(params, dict) else {})
