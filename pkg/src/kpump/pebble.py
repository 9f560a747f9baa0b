"""Unlabeled pebble motion under the separation rule.

Pebbles are identical: a problem asks to move pebbles from the vertex set
``s`` to the vertex set ``t`` (any pebble may end on any target) with exactly
one pebble crossing one edge per step. Such a path exists iff both
placements put the same number of pebbles in every connected component.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence


class PebbleError(Exception):
    pass


class InvalidPlacement(PebbleError):
    pass


class SizeMismatch(PebbleError):
    pass


class NotEquivalent(PebbleError):
    pass


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset = frozenset()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def adjacency(self) -> list[list[int]]:
        adj = self._cache.get("adj")
        if adj is None:
            adj = [[] for _ in range(self.vertex_count)]
            for u, v in sorted(self.edges):
                adj[u].append(v)
                adj[v].append(u)
            self._cache["adj"] = adj
        return adj

    @property
    def component_labels(self) -> list[int]:
        """Component index per vertex, components ordered by smallest vertex id."""
        labels = self._cache.get("labels")
        if labels is None:
            labels = [-1] * self.vertex_count
            adj = self.adjacency
            nxt = 0
            for root in range(self.vertex_count):
                if labels[root] >= 0:
                    continue
                labels[root] = nxt
                stack = [root]
                while stack:
                    u = stack.pop()
                    for w in adj[u]:
                        if labels[w] < 0:
                            labels[w] = nxt
                            stack.append(w)
                nxt += 1
            self._cache["labels"] = labels
            self._cache["ncomp"] = nxt
        return labels

    @property
    def component_count(self) -> int:
        self.component_labels
        return self._cache["ncomp"]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges


Placement = tuple[int, ...]


class Move(NamedTuple):
    pebble: int
    src: int
    dst: int


@dataclass(frozen=True)
class PebblePath:
    start: Placement
    moves: tuple[Move, ...] = ()

    def final(self) -> Placement:
        pos = list(self.start)
        for mv in self.moves:
            pos[mv.pebble] = mv.dst
        return tuple(pos)


def _check_placement(g: Graph, p: Sequence[int]) -> None:
    if len(set(p)) != len(p):
        raise InvalidPlacement(f"placement {tuple(p)} repeats a vertex")
    for v in p:
        if not 0 <= v < g.vertex_count:
            raise InvalidPlacement(f"vertex {v} outside graph of {g.vertex_count} vertices")


def signature(g: Graph, p: Sequence[int]) -> tuple[int, ...]:
    """Number of placement vertices in each connected component of ``g``."""
    _check_placement(g, p)
    labels = g.component_labels
    counts = [0] * g.component_count
    for v in p:
        counts[labels[v]] += 1
    return tuple(counts)


def equivalent(g: Graph, p1: Sequence[int], p2: Sequence[int]) -> bool:
    if len(p1) != len(p2):
        raise SizeMismatch(f"placements of size {len(p1)} and {len(p2)}")
    return signature(g, p1) == signature(g, p2)


def _bfs_tree(g: Graph, root: int, allowed: set[int]):
    parent = {root: -1}
    depth = {root: 0}
    order = [root]
    q = deque([root])
    while q:
        u = q.popleft()
        for w in g.adjacency[u]:
            if w in allowed and w not in parent:
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
                q.append(w)
    return parent, depth


def _tree_path(tree_adj, alive, src, pred):
    """Shortest tree path from ``src`` to the nearest alive vertex satisfying ``pred``."""
    prev = {src: -1}
    q = deque([src])
    while q:
        u = q.popleft()
        if u != src and pred(u):
            path = [u]
            while prev[path[-1]] != -1:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in tree_adj[u]:
            if w in alive and w not in prev:
                prev[w] = u
                q.append(w)
    return None


def pebble_solve(g: Graph, s: Sequence[int], t: Sequence[int]) -> PebblePath:
    """Move pebbles from vertex set ``s`` onto vertex set ``t``.

    Works per connected component on a breadth-first spanning tree rooted at
    the smallest vertex. Leaves are treated deepest first: a target leaf pulls
    in the nearest pebble not yet parked on a treated leaf, a non-target leaf
    pushes its pebble along the tree towards the nearest empty vertex. Treated
    leaves are removed until the tree is exhausted.
    """
    s = tuple(int(v) for v in s)
    t = tuple(int(v) for v in t)
    if len(s) != len(t):
        raise SizeMismatch(f"placements of size {len(s)} and {len(t)}")
    if signature(g, s) != signature(g, t):
        raise NotEquivalent("start and target signatures differ")

    occ: dict[int, int] = {v: i for i, v in enumerate(s)}
    targets = set(t)
    moves: list[Move] = []

    def move(src: int, dst: int) -> None:
        peb = occ.pop(src)
        occ[dst] = peb
        moves.append(Move(peb, src, dst))

    labels = g.component_labels
    members: dict[int, list[int]] = {}
    for v in range(g.vertex_count):
        members.setdefault(labels[v], []).append(v)

    for comp in sorted(members):
        verts = members[comp]
        if not any(v in occ for v in verts):
            continue
        if all((v in occ) == (v in targets) for v in verts):
            continue
        alive = set(verts)
        parent, depth = _bfs_tree(g, verts[0], alive)
        tree_adj: dict[int, list[int]] = {v: [] for v in verts}
        for v, p in parent.items():
            if p >= 0:
                tree_adj[v].append(p)
                tree_adj[p].append(v)
        for v in verts:
            tree_adj[v].sort()
        degree = {v: len(tree_adj[v]) for v in verts}

        while alive:
            if len(alive) == 1:
                leaf = next(iter(alive))
            else:
                leaf = max((v for v in alive if degree[v] <= 1),
                           key=lambda v: (depth[v], -v))
            if leaf in targets:
                if leaf not in occ:
                    path = _tree_path(tree_adj, alive, leaf, lambda u: u in occ)
                    if path is None:
                        raise AssertionError("no pebble left for a target leaf")
                    for a, b in zip(path[::-1][:-1], path[::-1][1:]):
                        move(a, b)
            elif leaf in occ:
                path = _tree_path(tree_adj, alive, leaf, lambda u: u not in occ)
                if path is None:
                    raise AssertionError("no empty vertex to evacuate into")
                for i in range(len(path) - 2, -1, -1):
                    move(path[i], path[i + 1])
            alive.discard(leaf)
            for w in tree_adj[leaf]:
                if w in alive:
                    degree[w] -= 1
    return PebblePath(start=s, moves=tuple(moves))


def validate_pebble_path(g: Graph, pp: PebblePath, t: Sequence[int]) -> bool:
    """Independent check of the separation rule and the target vertex set."""
    pos = list(pp.start)
    if len(set(pos)) != len(pos):
        return False
    if any(not 0 <= v < g.vertex_count for v in pos):
        return False
    occupied = set(pos)
    for mv in pp.moves:
        if not 0 <= mv.pebble < len(pos):
            return False
        if pos[mv.pebble] != mv.src:
            return False
        if not g.has_edge(mv.src, mv.dst):
            return False
        if mv.dst in occupied:
            return False
        occupied.discard(mv.src)
        occupied.add(mv.dst)
        pos[mv.pebble] = mv.dst
    return occupied == set(t) and len(t) == len(pos)


def parse_pebble_text(text: str) -> tuple[Graph, Placement, Placement]:
    """Parse ``n m`` / ``u v`` edge lines / ``S: ...`` / ``T: ...``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty pebble instance")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError(f"line 1: expected 'n m', got {lines[0]!r}") from None
    edges = []
    s = t = None
    for i, ln in enumerate(lines[1:], start=2):
        if ln.startswith("S:"):
            s = tuple(int(x) for x in ln[2:].split())
        elif ln.startswith("T:"):
            t = tuple(int(x) for x in ln[2:].split())
        else:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"line {i}: expected edge 'u v', got {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    if s is None or t is None:
        raise ValueError("missing 'S:' or 'T:' line")
    return Graph(n, frozenset(edges)), s, t


def format_pebble_path(pp: PebblePath) -> str:
    out = [f"moves: {len(pp.moves)}"]
    out += [f"{mv.pebble} {mv.src} {mv.dst}" for mv in pp.moves]
    return "\n".join(out) + "\n"


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    return Graph(n, frozenset(edges))
