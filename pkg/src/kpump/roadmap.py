"""The roadmap planner: sample composite pebble graphs, bridge them with the
connection generator, and answer queries by graph search plus lazy pebble
solving inside each graph."""
from __future__ import annotations

import itertools
import logging
import math
import time
import zlib
from array import array
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .congen import ATTEMPT_FACTOR, Connection, congen
from .geom import LinearMotion, Point, disc_free
from .graphgen import (DEFAULT_MAX_TRIES, CompositePumpedConfiguration, GeometricPebbleGraph,
                       SamplingExhausted, build_pebble_graph, sample_pumped)
from .pebble import PebblePath, pebble_solve, signature
from .scenario import Plan, RobotId, Scenario, SimultaneousMove, SingleMove, stream

log = logging.getLogger(__name__)


class PlannerError(Exception):
    pass


class QueryInfeasible(PlannerError):
    """Start and target are not connected in the roadmap."""


class InvalidQuery(PlannerError):
    pass


class MissingEdgeMotion(PlannerError):
    pass


@dataclass(frozen=True)
class PlannerParams:
    g: int = 10
    q: int = 10
    mu: int | None = None
    seed: int = 0
    baseline: str | None = None  # None or "kbasic"
    max_tries: int = DEFAULT_MAX_TRIES
    attempt_factor: int = ATTEMPT_FACTOR
    time_limit: float | None = None
    threads: int = 1

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be non-negative")
        if self.q < 1:
            raise ValueError("q must be at least 1")
        if self.baseline not in (None, "kbasic"):
            raise ValueError(f"unknown baseline {self.baseline!r}")

    def effective_mu(self, scenario: Scenario) -> int:
        m = scenario.robot_count
        if self.baseline == "kbasic":
            return m
        mu = self.mu if self.mu is not None else 2 * m
        if mu < m:
            raise ValueError(f"mu={mu} is below the robot count {m}")
        return mu

    def echo(self, scenario: Scenario) -> dict:
        return {"g": self.g, "q": self.q, "mu": self.effective_mu(scenario), "seed": self.seed,
                "baseline": self.baseline or "kpump"}


# -- roadmap storage -----------------------------------------------------------

Selection = tuple[tuple[int, ...], ...]


class ConnectionEdge(NamedTuple):
    a: int
    b: int
    edge_id: int


class EquivalenceEdge(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class RoadmapNode:
    graph_id: int
    selection: Selection
    signature: tuple


def _encode(flat: Sequence[int]) -> bytes:
    return array("H", flat).tobytes()


def _decode(data: bytes) -> list[int]:
    a = array("H")
    a.frombytes(data)
    return a.tolist()


class Roadmap:
    """Graph over composite configurations.

    Nodes are keyed by (graph id, per-color sorted selection). Connection
    edges are stored explicitly with their vertex pairing. Equivalence edges
    join every two nodes of one graph with equal signatures; they form
    cliques, so they are kept implicitly as classes keyed by (graph id,
    signature).

    Storage is flat (typed arrays, one bytes key per node) because
    preprocessing can produce millions of nodes and edges.
    """

    def __init__(self, robot_counts: Sequence[int]):
        self.robot_counts = tuple(robot_counts)
        self._stride = 2 * sum(self.robot_counts)
        self.node_graph = array("i")
        self.node_class = array("i")
        self.node_key: list[bytes] = []
        self.index: dict[bytes, int] = {}
        self.edge_a = array("i")
        self.edge_b = array("i")
        self.edge_pairs = array("H")
        self.class_index: dict[tuple, int] = {}
        self.class_members: list[list[int]] = []
        self._owned: set[int] | None = None

    def fork(self) -> "Roadmap":
        """Independent copy for query-time insertions; the parent is left as is.

        Class member lists are shared until the child appends to one.
        """
        child = Roadmap.__new__(Roadmap)
        child.robot_counts = self.robot_counts
        child._stride = self._stride
        child.node_graph = array("i", self.node_graph)
        child.node_class = array("i", self.node_class)
        child.node_key = self.node_key.copy()
        child.index = self.index.copy()
        child.edge_a = array("i", self.edge_a)
        child.edge_b = array("i", self.edge_b)
        child.edge_pairs = array("H", self.edge_pairs)
        child.class_index = self.class_index.copy()
        child.class_members = self.class_members.copy()
        child._owned = set()
        return child

    def __len__(self):
        return len(self.node_graph)

    @property
    def connection_edge_count(self) -> int:
        return len(self.edge_a)

    @property
    def equivalence_edge_count(self) -> int:
        return sum(math.comb(len(m), 2) for m in self.class_members)

    def _key(self, graph_id: int, sel: Selection) -> bytes:
        return _encode([graph_id] + [v for s in sel for v in sorted(s)])

    def selection(self, node: int) -> Selection:
        flat = _decode(self.node_key[node])[1:]
        out, i = [], 0
        for m in self.robot_counts:
            out.append(tuple(flat[i:i + m]))
            i += m
        return tuple(out)

    def signature(self, node: int) -> tuple:
        return self._class_keys()[self.node_class[node]][1]

    def _class_keys(self) -> list[tuple]:
        keys = [None] * len(self.class_members)
        for k, cid in self.class_index.items():
            keys[cid] = k
        return keys

    def node(self, nid: int) -> RoadmapNode:
        return RoadmapNode(self.node_graph[nid], self.selection(nid), self.signature(nid))

    def find(self, graph_id: int, sel: Selection) -> int | None:
        return self.index.get(self._key(graph_id, sel))

    def add_node(self, graph_id: int, sel: Selection, G: GeometricPebbleGraph) -> int:
        key = self._key(graph_id, sel)
        nid = self.index.get(key)
        if nid is not None:
            return nid
        nid = len(self.node_graph)
        sig = tuple(signature(g, s) for g, s in zip(G.graphs, sel))
        cls = (graph_id, sig)
        cid = self.class_index.get(cls)
        if cid is None:
            cid = self.class_index[cls] = len(self.class_members)
            self.class_members.append([nid])
            if self._owned is not None:
                self._owned.add(cid)
        else:
            members = self.class_members[cid]
            if self._owned is not None and cid not in self._owned:
                members = self.class_members[cid] = members.copy()
                self._owned.add(cid)
            members.append(nid)
        self.node_graph.append(graph_id)
        self.node_class.append(cid)
        self.node_key.append(key)
        self.index[key] = nid
        return nid

    def add_connection(self, a: int, b: int, conn: Connection) -> int:
        eid = len(self.edge_a)
        self.edge_a.append(a)
        self.edge_b.append(b)
        self.edge_pairs.extend(v for pc in conn.pairs for p in pc for v in p)
        return eid

    def pairs(self, eid: int) -> list[list[tuple[int, int]]]:
        flat = self.edge_pairs[eid * self._stride:(eid + 1) * self._stride]
        out, i = [], 0
        for m in self.robot_counts:
            out.append([(flat[i + 2 * j], flat[i + 2 * j + 1]) for j in range(m)])
            i += 2 * m
        return out

    def connection_edges(self) -> Iterator[ConnectionEdge]:
        for eid, (a, b) in enumerate(zip(self.edge_a, self.edge_b)):
            yield ConnectionEdge(a, b, eid)

    def equivalence_edges(self) -> Iterator[EquivalenceEdge]:
        for members in self.class_members:
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    yield EquivalenceEdge(a, b)

    def _incidence(self) -> tuple[list[int], list[int]]:
        """CSR incidence lists, edges of each node in id order."""
        n, e = len(self), len(self.edge_a)
        ends = np.concatenate([np.frombuffer(self.edge_a, dtype=np.int32),
                               np.frombuffer(self.edge_b, dtype=np.int32)])
        eids = np.concatenate([np.arange(e, dtype=np.int32)] * 2)
        order = np.argsort(ends, kind="stable")
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ends, minlength=n), out=offsets[1:])
        return offsets.tolist(), eids[order].tolist()

    def search(self, s: int, t: int) -> list[tuple[int, int]] | None:
        """Hop-count shortest path; returns [(node, via_edge)], via -1 = equivalence."""
        offsets, inc = self._incidence()
        ea, eb = self.edge_a, self.edge_b
        parent: dict[int, tuple[int, int]] = {s: (-1, -1)}
        done_cls = set()
        q = deque([s])
        while q:
            u = q.popleft()
            if u == t:
                break
            for k in range(offsets[u], offsets[u + 1]):
                eid = inc[k]
                v = eb[eid] if ea[eid] == u else ea[eid]
                if v not in parent:
                    parent[v] = (u, eid)
                    q.append(v)
            cid = self.node_class[u]
            if cid not in done_cls:
                done_cls.add(cid)
                for v in self.class_members[cid]:
                    if v not in parent:
                        parent[v] = (u, -1)
                        q.append(v)
        if t not in parent:
            return None
        path = []
        v = t
        while v != -1:
            u, via = parent[v]
            path.append((v, via))
            v = u
        return path[::-1]


# -- planner state ---------------------------------------------------------------

@dataclass
class PlannerState:
    scenario: Scenario
    params: PlannerParams
    graphs: list[GeometricPebbleGraph] = field(default_factory=list)
    roadmap: Roadmap | None = None
    warnings: list[str] = field(default_factory=list)
    deadline: float | None = None
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.roadmap is None:
            self.roadmap = Roadmap([c.robot_count for c in self.scenario.colors])

    def out_of_time(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def stats(self) -> dict:
        rm = self.roadmap
        return {"graphs": len(self.graphs), "nodes": len(rm),
                "connection_edges": rm.connection_edge_count,
                "equivalence_edges": rm.equivalence_edge_count,
                "warnings": len(self.warnings)}


def _run_jobs(fn: Callable, jobs: list, threads: int, state: PlannerState) -> Iterator:
    """Yield ``fn(job)`` in job order; None for jobs reached after the deadline.

    Results are consumed as they are produced, and at most ``2 * threads``
    jobs are in flight, so memory does not grow with the job count.
    """
    def guarded(job):
        if state.out_of_time():
            return None
        return fn(job)

    if threads <= 1 or len(jobs) <= 1:
        for j in jobs:
            yield guarded(j)
        return
    with ThreadPoolExecutor(max_workers=threads) as ex:
        it = iter(jobs)
        pending = deque(ex.submit(guarded, j) for j in itertools.islice(it, 2 * threads))
        while pending:
            res = pending.popleft().result()
            for j in itertools.islice(it, 1):
                pending.append(ex.submit(guarded, j))
            yield res


def _connect_job(state: PlannerState, A: GeometricPebbleGraph, B: GeometricPebbleGraph,
                 rng: np.random.Generator, q: int) -> list[Connection]:
    return congen(A.pumped, B.pumped, q, state.scenario.workspace, rng,
                  attempt_factor=state.params.attempt_factor)


def connect(state: PlannerState, a_id: int, b_id: int, conns: Sequence[Connection],
            graphs: Sequence[GeometricPebbleGraph] | None = None,
            roadmap: Roadmap | None = None) -> int:
    """Insert the connections between graphs ``a_id`` and ``b_id``.

    Endpoint nodes are deduplicated by (graph, selection); each new node joins
    its graph's equivalence class immediately. Returns the number of
    connection edges added.
    """
    graphs = state.graphs if graphs is None else graphs
    rm = state.roadmap if roadmap is None else roadmap
    for conn in conns:
        a = rm.add_node(a_id, conn.from_selection, graphs[a_id])
        b = rm.add_node(b_id, conn.to_selection, graphs[b_id])
        rm.add_connection(a, b, conn)
    return len(conns)


def preprocess(scenario: Scenario, params: PlannerParams) -> PlannerState:
    """Sample ``g`` composite pebble graphs and connect every pair."""
    t0 = time.monotonic()
    state = PlannerState(scenario, params)
    if params.time_limit is not None:
        state.deadline = t0 + params.time_limit
    mu = params.effective_mu(scenario)
    w = scenario.workspace
    failures = 0
    for i in range(params.g):
        if state.out_of_time():
            state.warnings.append(f"time limit reached after {i} samples")
            break
        try:
            pumped = sample_pumped(scenario.colors, w, mu, stream(params.seed, "sample", i),
                                   params.max_tries)
        except SamplingExhausted as exc:
            failures += 1
            state.warnings.append(f"sample {i}: {exc}")
            log.warning("sample %d skipped: %s", i, exc)
            continue
        state.graphs.append(build_pebble_graph(pumped, w))
    if params.g > 0 and failures == params.g:
        raise SamplingExhausted(f"all {params.g} samples failed")
    state.timings["sample"] = time.monotonic() - t0

    t1 = time.monotonic()
    n = len(state.graphs)
    jobs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    results = _run_jobs(
        lambda ij: _connect_job(state, state.graphs[ij[0]], state.graphs[ij[1]],
                                stream(params.seed, "congen", ij[0], ij[1]), params.q),
        jobs, params.threads, state)
    for (i, j), conns in zip(jobs, results):
        if conns is None:
            state.warnings.append(f"time limit reached before connecting {i}-{j}")
            break
        connect(state, i, j, conns)
    state.timings["connect"] = time.monotonic() - t1
    return state


def _points_key(points: Sequence[Sequence[Point]]) -> int:
    return zlib.crc32(np.array([p for pts in points for p in pts], dtype=np.float64).tobytes())


def _pseudo_graph(scenario: Scenario, points) -> GeometricPebbleGraph:
    pumped = CompositePumpedConfiguration.from_points(scenario.colors, points)
    return build_pebble_graph(pumped, scenario.workspace, with_edges=False)


def _check_configuration(scenario: Scenario, points, what: str) -> None:
    flat = []
    for c, pts in enumerate(points):
        if len(pts) != scenario.colors[c].robot_count:
            raise InvalidQuery(f"{what}: color {c} needs {scenario.colors[c].robot_count} points")
        for p in pts:
            if not disc_free(p, scenario.colors[c].radius, scenario.workspace):
                raise InvalidQuery(f"{what}: disc at {p} is not free")
            flat.append((p, scenario.colors[c].radius))
    for i, (p, r) in enumerate(flat):
        for p2, r2 in flat[i + 1:]:
            if math.dist(p, p2) < r + r2:
                raise InvalidQuery(f"{what}: discs at {p} and {p2} overlap")


def query(state: PlannerState, S=None, T=None, q: int | None = None) -> Plan:
    """Connect start and target to the roadmap and extract a plan.

    Start and target become edgeless pseudo-graphs connected to every sampled
    graph and to each other. The preprocessed roadmap is left untouched.
    """
    sc = state.scenario
    S = sc.starts if S is None else S
    T = sc.targets if T is None else T
    q = state.params.q if q is None else q
    _check_configuration(sc, S, "start")
    _check_configuration(sc, T, "target")

    rm = state.roadmap.fork()
    graphs = list(state.graphs)
    GS, GT = _pseudo_graph(sc, S), _pseudo_graph(sc, T)
    sid, tid = len(graphs), len(graphs) + 1
    graphs += [GS, GT]
    full = tuple(tuple(range(c.robot_count)) for c in sc.colors)
    s_node = rm.add_node(sid, full, GS)
    t_node = rm.add_node(tid, full, GT)
    seed = state.params.seed
    skey, tkey = _points_key(S), _points_key(T)

    jobs = []
    for i in range(len(state.graphs)):
        jobs.append((i, sid, stream(seed, "query", i, skey)))
        jobs.append((i, tid, stream(seed, "query", i, tkey)))
    # canonical orientation keeps query(S, T) and query(T, S) symmetric
    lo, hi = (sid, tid) if (skey, 0) <= (tkey, 1) else (tid, sid)
    jobs.append((lo, hi, stream(seed, "query-direct", min(skey, tkey), max(skey, tkey))))
    results = _run_jobs(lambda j: _connect_job(state, graphs[j[0]], graphs[j[1]], j[2], q),
                        jobs, state.params.threads, state)
    for (a, b, _), conns in zip(jobs, results):
        if conns is not None:
            connect(state, a, b, conns, graphs=graphs, roadmap=rm)

    path = rm.search(s_node, t_node)
    if path is None:
        raise QueryInfeasible("start and target are not connected in the roadmap")
    plan = retrieve_path(state, rm, graphs, path)
    plan.scenario = sc.name
    plan.params = state.params.echo(sc)
    return plan


def transform_pebble_path(G: GeometricPebbleGraph, color: int, pp: PebblePath,
                          robot_binding: Sequence[RobotId]) -> list[SingleMove]:
    """Each pebble move becomes one robot moving along the stored edge motion."""
    out = []
    for mv in pp.moves:
        m = G.edge_motion(color, mv.src, mv.dst)
        if m is None:
            raise MissingEdgeMotion(f"color {color} has no edge ({mv.src}, {mv.dst})")
        out.append(SingleMove(robot_binding[mv.pebble], m))
    return out


def retrieve_path(state: PlannerState, rm: Roadmap, graphs: Sequence[GeometricPebbleGraph],
                  path: list[tuple[int, int]]) -> Plan:
    """Turn a roadmap node path into robot motions.

    Equivalence hops are solved now with the pebble solver; connection hops
    replay the stored bridge as one simultaneous step.
    """
    colors = state.scenario.colors
    first = path[0][0]
    # cur[c][i]: vertex of robot (c, i) in the current graph
    cur = [list(s) for s in rm.selection(first)]
    steps: list = []
    prev = first
    for node, via in path[1:]:
        if via == -1:
            gid = rm.node_graph[node]
            G = graphs[gid]
            target = rm.selection(node)
            for c in range(len(colors)):
                if sorted(cur[c]) == list(target[c]):
                    continue
                try:
                    pp = pebble_solve(G.graphs[c], cur[c], target[c])
                except Exception as exc:  # defect, not a user error
                    raise PlannerError(f"pebble solver failed on an equivalence edge: {exc}")
                binding = [(c, i) for i in range(len(cur[c]))]
                steps += transform_pebble_path(G, c, pp, binding)
                cur[c] = list(pp.final())
        else:
            forward = rm.edge_a[via] == prev
            Ga = graphs[rm.node_graph[prev]]
            Gb = graphs[rm.node_graph[node]]
            motions = []
            nxt = []
            for c, pc in enumerate(rm.pairs(via)):
                mapping = dict(pc) if forward else {b: a for a, b in pc}
                pa = Ga.pumped.per_color[c].points
                pb = Gb.pumped.per_color[c].points
                row = []
                for i, v in enumerate(cur[c]):
                    to = mapping[v]
                    motions.append(((c, i), LinearMotion(pa[v], pb[to])))
                    row.append(to)
                nxt.append(row)
            steps.append(SimultaneousMove(tuple(motions)))
            cur = nxt
        prev = node
    return Plan(steps)


def plan(scenario: Scenario, params: PlannerParams) -> tuple[Plan, PlannerState]:
    state = preprocess(scenario, params)
    return query(state), state
