"""Independent plan verification and brute-force reference oracles.

Uses only the exact scalar predicates of :mod:`kpump.geom`; nothing here
touches the planner's kernels or safety margin.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field

from .geom import LinearMotion, dist_point_segment, min_dist_linear_motions, sweep_free
from .pebble import Graph
from .scenario import Plan, Scenario, SimultaneousMove, SingleMove

DEFAULT_EPS = 1e-6


class StateSpaceTooLarge(Exception):
    pass


@dataclass
class Violation:
    code: str
    step: int
    detail: str

    def as_dict(self):
        return {"code": self.code, "step": self.step, "detail": self.detail}


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)
    min_clearance: float = math.inf

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_json(self) -> bytes:
        doc = {"ok": self.ok,
               "min_clearance": None if math.isinf(self.min_clearance) else self.min_clearance,
               "violations": [v.as_dict() for v in self.violations]}
        return (json.dumps(doc, indent=1) + "\n").encode()


def _near(p, q, eps):
    return math.dist(p, q) <= eps


def verify_plan(scenario: Scenario, plan: Plan, eps: float = DEFAULT_EPS) -> VerificationReport:
    """Check a plan against the scenario with exact collision predicates.

    Codes: START_MISMATCH, UNKNOWN_ROBOT, MALFORMED_STEP, DISCONTINUITY,
    OBSTACLE_COLLISION, ROBOT_COLLISION, TARGET_MISMATCH.
    """
    rep = VerificationReport()
    w = scenario.workspace
    pos = {rid: scenario.starts[rid[0]][rid[1]] for rid in scenario.robots()}
    radius = {rid: scenario.radius(rid) for rid in pos}
    moved: set = set()

    def note_clear(d):
        rep.min_clearance = min(rep.min_clearance, d)

    for k, st in enumerate(plan.steps):
        if isinstance(st, SingleMove):
            moves = [(st.robot, st.motion)]
        elif isinstance(st, SimultaneousMove):
            moves = list(st.motions)
        else:
            rep.violations.append(Violation("MALFORMED_STEP", k, f"unknown step {st!r}"))
            continue
        ids = [rid for rid, _ in moves]
        if len(set(ids)) != len(ids):
            rep.violations.append(Violation("MALFORMED_STEP", k, "robot listed twice"))
            continue
        if any(rid not in pos for rid in ids):
            rep.violations.append(Violation("UNKNOWN_ROBOT", k, f"robots {ids}"))
            continue
        for rid, m in moves:
            if not _near(m.start, pos[rid], eps):
                code = "DISCONTINUITY" if rid in moved else "START_MISMATCH"
                rep.violations.append(Violation(
                    code, k, f"robot {rid} starts at {m.start}, was at {pos[rid]}"))
            moved.add(rid)
            if not sweep_free(m, radius[rid], w):
                rep.violations.append(Violation(
                    "OBSTACLE_COLLISION", k, f"robot {rid} sweep leaves free space"))
        movers = dict(moves)
        stationary = [rid for rid in pos if rid not in movers]
        if isinstance(st, SingleMove):
            rid, m = moves[0]
            for other in stationary:
                d = dist_point_segment(pos[other], m.start, m.end)
                need = radius[rid] + radius[other]
                note_clear(d - need)
                if d < need:
                    rep.violations.append(Violation(
                        "ROBOT_COLLISION", k, f"{rid} passes within {d:.3g} of {other}"))
        else:
            full = {rid: movers.get(rid, LinearMotion(pos[rid], pos[rid])) for rid in pos}
            for a, b in itertools.combinations(sorted(full), 2):
                if a not in movers and b not in movers:
                    continue
                d = min_dist_linear_motions(full[a], full[b])
                need = radius[a] + radius[b]
                note_clear(d - need)
                if d < need:
                    rep.violations.append(Violation(
                        "ROBOT_COLLISION", k, f"{a} and {b} come within {d:.3g}"))
        for rid, m in moves:
            pos[rid] = m.end

    # target coverage per color, greedy nearest assignment within eps
    for c, targets in enumerate(scenario.targets):
        remaining = list(targets)
        finals = [pos[(c, i)] for i in range(scenario.colors[c].robot_count)]
        for p in finals:
            best = min(range(len(remaining)), key=lambda j: math.dist(p, remaining[j]),
                       default=None)
            if best is None or not _near(p, remaining[best], eps):
                rep.violations.append(Violation(
                    "TARGET_MISMATCH", len(plan.steps), f"color {c} robot ends at {p}"))
                continue
            remaining.pop(best)
    return rep


def brute_force_pebble_oracle(g: Graph, s, t, max_states: int = 10**6):
    """Breadth-first search over occupied-vertex sets under the separation rule.

    Returns ``(reachable, min_moves)``; ``min_moves`` is None when unreachable.
    """
    s = frozenset(s)
    t = frozenset(t)
    if len(s) != len(t):
        return False, None
    if math.comb(g.vertex_count, len(s)) > max_states:
        raise StateSpaceTooLarge(f"C({g.vertex_count}, {len(s)}) placements")
    adj = g.adjacency
    dist = {s: 0}
    q = deque([s])
    while q:
        cur = q.popleft()
        if cur == t:
            return True, dist[cur]
        for v in cur:
            for w in adj[v]:
                if w in cur:
                    continue
                nxt = (cur - {v}) | {w}
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    q.append(nxt)
    return False, None


def plan_stats(plan: Plan) -> dict:
    per_robot: dict = {}
    total = 0.0
    simultaneous = 0
    for st in plan.steps:
        if isinstance(st, SimultaneousMove):
            simultaneous += 1
    for _, rid, m in plan.motions():
        per_robot[rid] = per_robot.get(rid, 0.0) + m.length
        total += m.length
    n = len(plan.steps)
    return {"step_count": n,
            "total_length": total,
            "per_robot_length": dict(sorted(per_robot.items())),
            "simultaneous_fraction": simultaneous / n if n else 0.0}
