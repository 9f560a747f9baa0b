"""Both kernel backends must agree bit for bit, and agree with the scalar geometry."""
import numpy as np
import pytest

from kpump import kernels
from kpump.geom import LinearMotion, Polygon, Workspace, disc_free, sweep_free
from kpump.graphgen import (SAFETY_MARGIN, ColorSpec, CompositePumpedConfiguration,
                            build_pebble_graph, edge_plan, sample_pumped)
from kpump.scenario import stream

needs_compiled = pytest.mark.skipif("compiled" not in kernels.available_backends(),
                                    reason="compiled kernels not built")

W = Workspace(Polygon(((0, 0), (6, 0), (6, 5), (3, 6), (0, 5))),
              (Polygon(((2, 2), (3, 2), (3, 3), (2, 3))),
               Polygon(((4, 1), (5, 1.5), (4.2, 2.4)))))
WA = W.arrays()


def _both(fn_name, *args):
    out = []
    for b in ("python", "compiled"):
        with kernels.use_backend(b):
            res = getattr(kernels, fn_name)(*[a.copy() if isinstance(a, np.ndarray) else a
                                               for a in args])
        out.append(res)
    return out


def test_backend_switching():
    assert "python" in kernels.available_backends()
    with kernels.use_backend("python"):
        assert kernels.BACKEND == "python"
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_python_kernels_match_scalar_geometry():
    rng = np.random.default_rng(5)
    pts = rng.random((400, 2)) * [6, 6]
    with kernels.use_backend("python"):
        ok = kernels.disc_free_many(pts, 0.3, WA.edges, WA.poly_xy, WA.poly_offsets)
    assert [bool(v) for v in ok] == [disc_free(tuple(p), 0.3, W) for p in pts]
    segs = rng.random((400, 4)) * 6
    with kernels.use_backend("python"):
        ok = kernels.capsule_free_many(segs, 0.2, WA.edges, WA.poly_xy, WA.poly_offsets)
    assert [bool(v) for v in ok] == [
        sweep_free(LinearMotion(tuple(s[:2]), tuple(s[2:])), 0.2, W) for s in segs]


@needs_compiled
def test_disc_and_capsule_agree():
    rng = np.random.default_rng(1)
    pts = rng.random((2000, 2)) * 6
    a, b = _both("disc_free_many", pts, 0.25, WA.edges, WA.poly_xy, WA.poly_offsets)
    assert np.array_equal(a, b)
    segs = rng.random((2000, 4)) * 6
    a, b = _both("capsule_free_many", segs, 0.25, WA.edges, WA.poly_xy, WA.poly_offsets)
    assert np.array_equal(a, b)


@needs_compiled
def test_splitmix_agrees():
    for s in (0, 1, 2**63 + 5, 2**64 - 1):
        a, b = _both("splitmix64", s)
        assert a == b


@needs_compiled
@pytest.mark.parametrize("seed", range(4))
def test_sampling_agrees(seed):
    colors = (ColorSpec(0, 0.3, 2), ColorSpec(1, 0.2, 3))
    res = []
    for b in ("python", "compiled"):
        with kernels.use_backend(b):
            res.append(sample_pumped(colors, W, 14, stream(seed, "t")))
    assert res[0] == res[1]


@needs_compiled
def test_edge_planner_agrees_and_matches_scalar():
    colors = (ColorSpec(0, 0.3, 2), ColorSpec(1, 0.2, 3))
    pumped = sample_pumped(colors, W, 16, stream(3, "t"))
    graphs = []
    for b in ("python", "compiled"):
        with kernels.use_backend(b):
            graphs.append(build_pebble_graph(pumped, W))
    assert graphs[0].motions == graphs[1].motions
    for c, pc in enumerate(pumped.per_color):
        n = len(pc.points)
        for u in range(n):
            for v in range(u + 1, n):
                scalar = edge_plan(pumped, c, u, v, W) is not None
                assert scalar == ((u, v) in graphs[0].motions[c])


@needs_compiled
def test_conflicts_and_greedy_agree():
    rng = np.random.default_rng(7)
    n = 300
    motions = np.ascontiguousarray(rng.random((n, 4)) * 5)
    rad = np.where(rng.random(n) < 0.5, 0.2, 0.3)
    color = (rng.random(n) < 0.5).astype(np.int32)
    frm = rng.integers(0, 12, n).astype(np.int32)
    to = rng.integers(0, 12, n).astype(np.int32)
    a, b = _both("conflict_matrix", motions, rad, color, frm, to, SAFETY_MARGIN)
    assert np.array_equal(a, b)
    quotas = np.array([2, 2], dtype=np.int64)
    for conflict in (np.zeros((0, 0), dtype=np.uint8), a):
        outs = []
        for be in ("python", "compiled"):
            perm = np.arange(n, dtype=np.int32)
            state = np.array([12345], dtype=np.uint64)
            with kernels.use_backend(be):
                sets, used = kernels.greedy_sets(motions, rad, color, frm, to, quotas,
                                                 SAFETY_MARGIN, conflict, perm, state, 50, 50)
            outs.append((sets.tolist(), used, perm.tolist(), int(state[0])))
        assert outs[0] == outs[1]
        assert outs[0][0], "expected at least one independent set"


def test_greedy_sets_are_independent():
    rng = np.random.default_rng(2)
    n = 120
    motions = np.ascontiguousarray(rng.random((n, 4)) * 4)
    rad = np.full(n, 0.25)
    color = np.zeros(n, dtype=np.int32)
    frm = rng.integers(0, 8, n).astype(np.int32)
    to = rng.integers(0, 8, n).astype(np.int32)
    with kernels.use_backend("python"):
        mat = kernels.conflict_matrix(motions, rad, color, frm, to, 0.0)
        sets, _ = kernels.greedy_sets(motions, rad, color, frm, to, np.array([3]), 0.0,
                                      np.zeros((0, 0), dtype=np.uint8),
                                      np.arange(n, dtype=np.int32),
                                      np.array([9], dtype=np.uint64), 40, 40)
    for row in sets.tolist():
        assert len(row) == 3
        for i in row:
            for j in row:
                if i != j:
                    assert not mat[i, j]


def test_fill_pumped_respects_quotas():
    colors = (ColorSpec(0, 0.3, 1), ColorSpec(1, 0.3, 1))
    pumped = sample_pumped(colors, W, 9, stream(0, "q"))
    assert sorted(pumped.sizes()) == [4, 5]
    assert isinstance(pumped, CompositePumpedConfiguration)
