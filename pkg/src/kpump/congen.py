"""Connection generator: simultaneous straight-line bridges between two
composite pumped configurations, found as independent sets of the
interference graph."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .geom import LinearMotion, Workspace, min_dist2_linear_motions
from .graphgen import SAFETY_MARGIN, CompositePumpedConfiguration, GeometricPebbleGraph
from .pebble import signature

ATTEMPT_FACTOR = 20
# Above this many candidates the conflict relation is evaluated lazily
# instead of materializing an N x N matrix.
MATRIX_LIMIT = 3000
LAZY_ATTEMPTS = 32


@dataclass(frozen=True)
class CandidatePair:
    color_id: int
    from_vertex: int
    to_vertex: int
    motion: LinearMotion
    radius: float


@dataclass(frozen=True)
class InterferenceGraph:
    nodes: tuple[CandidatePair, ...]
    conflicts: frozenset  # of (i, j) with i < j

    def conflicting(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.conflicts


Selection = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Connection:
    """Simultaneous bridge: robot at ``pairs[c][i][0]`` in A moves to
    ``pairs[c][i][1]`` in B along ``motions[c][i]``, all on one clock."""

    pairs: tuple[tuple[tuple[int, int], ...], ...]
    motions: tuple[tuple[LinearMotion, ...], ...]

    @property
    def from_selection(self) -> Selection:
        return tuple(tuple(sorted(a for a, _ in pc)) for pc in self.pairs)

    @property
    def to_selection(self) -> Selection:
        return tuple(tuple(sorted(b for _, b in pc)) for pc in self.pairs)

    def reversed(self) -> "Connection":
        pairs, motions = [], []
        for pc, mc in zip(self.pairs, self.motions):
            flipped = sorted(((b, a), m.reversed()) for (a, b), m in zip(pc, mc))
            pairs.append(tuple(p for p, _ in flipped))
            motions.append(tuple(m for _, m in flipped))
        return Connection(tuple(pairs), tuple(motions))


def interferes(a: CandidatePair, b: CandidatePair, margin: float = 0.0) -> bool:
    """Two bridges collide at some shared theta, or share an endpoint."""
    if a.color_id == b.color_id and (a.from_vertex == b.from_vertex
                                     or a.to_vertex == b.to_vertex):
        return True
    d2 = min_dist2_linear_motions(*a.motion.start, *a.motion.end,
                                  *b.motion.start, *b.motion.end)
    t = a.radius + b.radius + margin
    return d2 < t * t


class _Candidates:
    """Columnar candidate set shared by the kernels."""

    def __init__(self, A: CompositePumpedConfiguration, B: CompositePumpedConfiguration,
                 w: Workspace, margin: float):
        wa = w.arrays()
        motions, rad, color, frm, to = [], [], [], [], []
        for c, spec in enumerate(A.colors):
            pa = A.points_array(c)
            pb = B.points_array(c)
            na, nb = len(pa), len(pb)
            if na == 0 or nb == 0:
                continue
            segs = np.empty((na * nb, 4), dtype=np.float64)
            segs[:, 0:2] = np.repeat(pa, nb, axis=0)
            segs[:, 2:4] = np.tile(pb, (na, 1))
            ok = kernels.capsule_free_many(segs, spec.radius + margin,
                                           wa.edges, wa.poly_xy, wa.poly_offsets)
            idx = np.nonzero(ok)[0]
            motions.append(segs[idx])
            rad.append(np.full(len(idx), spec.radius))
            color.append(np.full(len(idx), c, dtype=np.int32))
            frm.append((idx // nb).astype(np.int32))
            to.append((idx % nb).astype(np.int32))
        cat = lambda xs, dt, shape=(0,): (np.ascontiguousarray(np.concatenate(xs)).astype(dt)
                                         if xs else np.zeros(shape, dtype=dt))
        self.motions = cat(motions, np.float64, (0, 4)).reshape(-1, 4)
        self.rad = cat(rad, np.float64)
        self.color = cat(color, np.int32)
        self.frm = cat(frm, np.int32)
        self.to = cat(to, np.int32)
        self.colors = A.colors

    def __len__(self):
        return len(self.motions)

    def pair(self, i: int) -> CandidatePair:
        m = self.motions[i]
        return CandidatePair(int(self.color[i]), int(self.frm[i]), int(self.to[i]),
                             LinearMotion((float(m[0]), float(m[1])), (float(m[2]), float(m[3]))),
                             float(self.rad[i]))


def build_interference_graph(A: CompositePumpedConfiguration, B: CompositePumpedConfiguration,
                             w: Workspace, margin: float = SAFETY_MARGIN) -> InterferenceGraph:
    """Candidates are all same-color pairs whose straight motion is obstacle
    free; conflicts are all interfering candidate pairs of any colors."""
    if A.colors != B.colors:
        raise ValueError("configurations were sampled for different color specs")
    cands = _Candidates(A, B, w, margin)
    mat = kernels.conflict_matrix(cands.motions, cands.rad, cands.color, cands.frm,
                                  cands.to, margin)
    iu, ju = np.nonzero(np.triu(mat, 1))
    return InterferenceGraph(tuple(cands.pair(i) for i in range(len(cands))),
                             frozenset(zip(iu.tolist(), ju.tolist())))


def _max_distinct(cands: _Candidates, quotas: Sequence[int]) -> int:
    total = 1
    for c, m in enumerate(quotas):
        sel = cands.color == c
        total *= math.comb(len(np.unique(cands.frm[sel])), m)
        total *= math.comb(len(np.unique(cands.to[sel])), m)
    return total


def congen(A: CompositePumpedConfiguration, B: CompositePumpedConfiguration, q: int,
           w: Workspace, rng: np.random.Generator, attempt_factor: int = ATTEMPT_FACTOR,
           margin: float = SAFETY_MARGIN) -> list[Connection]:
    """Up to ``q`` distinct connections from a selection of A to one of B.

    Runs up to ``q * attempt_factor`` greedy attempts; an attempt succeeds when
    every color reaches exactly its robot count. Connections are deduplicated
    by their (from, to) selections. An empty list means the two
    configurations were not connectable within the budget.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if A.colors != B.colors:
        raise ValueError("configurations were sampled for different color specs")
    quotas = [c.robot_count for c in A.colors]
    seed = int(rng.integers(0, 2**63, dtype=np.int64))
    cands = _Candidates(A, B, w, margin)
    for c, m in enumerate(quotas):
        sel = cands.color == c
        if len(np.unique(cands.frm[sel])) < m or len(np.unique(cands.to[sel])) < m:
            return []
    n = len(cands)
    limit = _max_distinct(cands, quotas)
    conflict = np.zeros((0, 0), dtype=np.uint8)
    perm = np.arange(n, dtype=np.int32)
    state = np.array([seed], dtype=np.uint64)
    qarr = np.array(quotas, dtype=np.int64)

    budget = q * attempt_factor
    seen: set = set()
    out: list[Connection] = []
    lazy_attempts = LAZY_ATTEMPTS
    while budget > 0 and len(out) < q and len(seen) < limit:
        if lazy_attempts <= 0 and not conflict.size and n <= MATRIX_LIMIT \
                and kernels.BACKEND == "compiled":
            # same relation, precomputed once many attempts are needed
            conflict = kernels.conflict_matrix(cands.motions, cands.rad, cands.color,
                                               cands.frm, cands.to, margin)
        chunk = min(budget, lazy_attempts) if lazy_attempts > 0 else budget
        sets, used = kernels.greedy_sets(cands.motions, cands.rad, cands.color, cands.frm,
                                         cands.to, qarr, margin, conflict, perm, state,
                                         chunk, q - len(out))
        budget -= used
        lazy_attempts -= used
        for row in sets.tolist():
            by_color = [[] for _ in quotas]
            for i in row:
                by_color[cands.color[i]].append(i)
            pairs = []
            motions = []
            for c in range(len(quotas)):
                chosen = sorted(by_color[c], key=lambda i: cands.frm[i])
                pairs.append(tuple((int(cands.frm[i]), int(cands.to[i])) for i in chosen))
                motions.append(tuple(cands.pair(i).motion for i in chosen))
            conn = Connection(tuple(pairs), tuple(motions))
            key = (conn.from_selection, conn.to_selection)
            if key in seen:
                continue
            seen.add(key)
            out.append(conn)
            if len(out) >= q:
                break
    return out


def signature_of_selection(G: GeometricPebbleGraph, sel: Sequence[Sequence[int]]):
    """Per-color signature of a composite selection on G's graphs."""
    return tuple(signature(g, s) for g, s in zip(G.graphs, sel))
