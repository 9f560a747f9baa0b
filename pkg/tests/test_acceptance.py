"""End-to-end acceptance checks. Each test prints one PASS/FAIL line."""

import itertools
import resource
import time

import numpy as np
import pytest

from kpump.cli import main
from kpump.congen import CandidatePair, interferes
from kpump.geom import LinearMotion, Polygon, Workspace, min_dist_linear_motions
from kpump.graphgen import ColorSpec, SamplingExhausted, build_pebble_graph, sample_pumped
from kpump.pebble import Graph, NotEquivalent, pebble_solve, signature, validate_pebble_path
from kpump.roadmap import transform_pebble_path
from kpump.scenario import Plan, Scenario, load_bundled, load_plan, stream
from kpump.verify import brute_force_pebble_oracle, verify_plan

# per-scenario planner flags used by the corpus checks
CORPUS = {
    "a_unlabeled": ["--g", 10, "--q", 20, "--mu", 30],
    "b_two_color_swap": ["--g", 20, "--q", 30, "--mu", 24],
    "c_cluttered": ["--g", 30, "--q", 30, "--mu", 16],
    "d_coupled": ["--g", 30, "--q", 30, "--mu", 15],
    "e_four_rooms": ["--g", 20, "--q", 30, "--mu", 20],
}
SEEDS = range(5)


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def random_graph(rng: np.random.Generator, n: int) -> Graph:
    p = rng.uniform(0.1, 0.6)
    edges = frozenset((u, v) for u, v in itertools.combinations(range(n), 2)
                      if rng.random() < p)
    return Graph(n, edges)


def test_pebble_solver_matches_oracle(criterion):
    log = criterion("pebble solver agrees with brute-force oracle on 200 graphs")
    rng = stream(0, "accept-pebble")
    t0 = time.perf_counter()
    bad = []
    solvable = 0
    for trial in range(200):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, min(4, n) + 1))
        g = random_graph(rng, n)
        s = [int(v) for v in rng.permutation(n)[:k]]
        t = [int(v) for v in rng.permutation(n)[:k]]
        reachable, _ = brute_force_pebble_oracle(g, s, t)
        try:
            pp = pebble_solve(g, s, t)
            solved = validate_pebble_path(g, pp, t)
        except NotEquivalent:
            solved = False
        solvable += reachable
        if solved != reachable:
            bad.append(trial)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    log.finish(ok, f"{solvable} reachable, mismatches {bad}, {elapsed:.1f}s")
    assert ok


ROOM = Workspace(Polygon(((0, 0), (6, 0), (6, 4), (0, 4))),
                 (Polygon(((2.6, 1.2), (3.4, 1.2), (3.4, 2.8), (2.6, 2.8))),))


def _equivalent_target(rng, g: Graph, s):
    labels = g.component_labels
    t = []
    for comp, count in enumerate(signature(g, s)):
        members = [v for v in range(g.vertex_count) if labels[v] == comp]
        t.extend(int(v) for v in rng.choice(members, size=count, replace=False))
    # random binding of pebbles to targets inside each component
    by_comp: dict[int, list[int]] = {}
    for v in t:
        by_comp.setdefault(labels[v], []).append(v)
    return [by_comp[labels[v]].pop() for v in s]


def test_transformed_pebble_paths_verify(criterion):
    log = criterion("transformed pebble paths pass the verifier on 100 composite graphs")
    rng = stream(0, "accept-realize")
    boundary = [list(p) for p in ROOM.boundary.vertices]
    obstacles = [[list(p) for p in o.vertices] for o in ROOM.obstacles]
    t0 = time.perf_counter()
    failures, done, moves = [], 0, 0
    while done < 100:
        k = int(rng.integers(1, 4))
        colors = tuple(ColorSpec(c, float(rng.uniform(0.2, 0.45)), int(rng.integers(1, 3)))
                       for c in range(k))
        m = sum(c.robot_count for c in colors)
        mu = int(rng.integers(m, 13))
        try:
            pumped = sample_pumped(colors, ROOM, mu, rng)
        except SamplingExhausted:
            continue
        if sum(pumped.sizes()) > 12:
            continue
        G = build_pebble_graph(pumped, ROOM)
        docs, steps = [], []
        for c, spec in enumerate(colors):
            g = G.graphs[c]
            s = [int(v) for v in rng.permutation(g.vertex_count)[:spec.robot_count]]
            t = _equivalent_target(rng, g, s)
            pp = pebble_solve(g, s, t)
            steps += transform_pebble_path(G, c, pp, [(c, i) for i in range(len(s))])
            pts = pumped.per_color[c].points
            docs.append({"radius": spec.radius, "starts": [list(pts[v]) for v in s],
                         "targets": [list(pts[v]) for v in t]})
        sc = Scenario.build(boundary, obstacles, docs)
        rep = verify_plan(sc, Plan(steps))
        if not rep.ok:
            failures.append((done, sorted(rep.codes())))
        moves += len(steps)
        done += 1
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    log.finish(ok, f"{moves} moves checked, failures {failures[:5]}, {elapsed:.1f}s")
    assert ok


def _sampled_min_dist(a, b, steps=10_000):
    """Minimum distance over a uniform theta grid, for many pairs at once."""
    th = np.linspace(0.0, 1.0, steps)
    d0 = a[:, :2] - b[:, :2]
    dv = (a[:, 2:] - a[:, :2]) - (b[:, 2:] - b[:, :2])
    x = d0[:, :1] + dv[:, :1] * th
    y = d0[:, 1:] + dv[:, 1:] * th
    return np.sqrt((x * x + y * y).min(axis=1))


def test_interference_matches_sampling_oracle(criterion):
    log = criterion("interference predicate agrees with 1e4-step sampling on 1e5 pairs")
    rng = stream(0, "accept-interfere")
    n, chunk, band = 100_000, 200, 1e-6
    t0 = time.perf_counter()
    disagreements = skipped = hits = 0
    for lo in range(0, n, chunk):
        a = rng.random((chunk, 4))
        b = rng.random((chunk, 4))
        ra = rng.uniform(0.02, 0.2, chunk)
        rb = rng.uniform(0.02, 0.2, chunk)
        sampled = _sampled_min_dist(a, b)
        for i in range(chunk):
            ma = LinearMotion((a[i, 0], a[i, 1]), (a[i, 2], a[i, 3]))
            mb = LinearMotion((b[i, 0], b[i, 1]), (b[i, 2], b[i, 3]))
            reach = ra[i] + rb[i]
            if abs(min_dist_linear_motions(ma, mb) - reach) <= band:
                skipped += 1
                continue
            got = interferes(CandidatePair(0, 0, 0, ma, ra[i]), CandidatePair(1, 0, 0, mb, rb[i]))
            hits += got
            if got != bool(sampled[i] < reach):
                disagreements += 1
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and elapsed < 30
    log.finish(ok, f"{disagreements} disagreements, {hits} interfering, "
                   f"{skipped} in band, {elapsed:.1f}s")
    assert ok


@pytest.mark.slow
def test_corpus_end_to_end(criterion, tmp_path, capsys):
    log = criterion("corpus scenarios solved and verified on >= 4 of 5 seeds within 120 s")
    all_ok = True
    for name, flags in CORPUS.items():
        wins, worst = 0, 0.0
        for seed in SEEDS:
            out = tmp_path / f"{name}-{seed}.json"
            t0 = time.perf_counter()
            code = run_cli("plan", "--scenario", name, *flags, "--seed", seed, "--out", out)
            elapsed = time.perf_counter() - t0
            worst = max(worst, elapsed)
            if code == 0 and elapsed < 120:
                wins += run_cli("verify", "--scenario", name, "--plan", out) == 0
            capsys.readouterr()
        all_ok &= wins >= 4
        log.note(f"{name}: {wins}/5 verified, slowest {worst:.1f}s")
    log.finish(all_ok)
    assert all_ok


@pytest.mark.slow
def test_kpump_beats_kbasic_on_swap(criterion, tmp_path, capsys):
    log = criterion("KPUMP >= 4/5 and KBASIC <= 1/5 on the two-color swap")
    flags = CORPUS["b_two_color_swap"]
    wins = {"plan": 0, "kbasic": 0}
    log.note("seed  kpump          kbasic")
    for seed in SEEDS:
        row = []
        for cmd in wins:
            out = tmp_path / f"{cmd}-{seed}.json"
            t0 = time.perf_counter()
            code = run_cli(cmd, "--scenario", "b_two_color_swap", *flags, "--seed", seed,
                           "--time-limit", 60, "--out", out)
            elapsed = time.perf_counter() - t0
            solved = code == 0 and run_cli("verify", "--scenario", "b_two_color_swap",
                                           "--plan", out) == 0
            wins[cmd] += solved
            row.append(f"{'ok' if solved else 'fail'} {elapsed:5.1f}s")
            capsys.readouterr()
        log.note(f"{seed:>4}  {row[0]:<14} {row[1]}")
    ok = wins["plan"] >= 4 and wins["kbasic"] <= 1
    log.finish(ok, f"kpump {wins['plan']}/5, kbasic {wins['kbasic']}/5")
    assert ok


@pytest.mark.slow
def test_plans_are_byte_identical_across_runs(criterion, tmp_path, capsys):
    log = criterion("repeated plan runs give byte-identical files on every corpus scenario")
    differing = []
    for name, flags in CORPUS.items():
        blobs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}.json"
            code = run_cli("plan", "--scenario", name, *flags, "--seed", 1, "--out", out)
            blobs.append(out.read_bytes() if code == 0 else None)
            capsys.readouterr()
        if blobs[0] is None or blobs[0] != blobs[1]:
            differing.append(name)
    ok = not differing
    log.finish(ok, f"differing or unsolved: {differing}")
    assert ok


# (scenario, g, q, mu): large-parameter regimes on the corpus scenarios
REGIMES = {
    "a": ("a_unlabeled", 2, 5000, 150),
    "b": ("b_two_color_swap", 50, 1000, 40),
    "c": ("c_cluttered", 100, 150, 32),
    "d": ("d_coupled", 50, 100, 25),
    "e": ("e_four_rooms", 40, 250, 28),
}


@pytest.mark.slow
@pytest.mark.parametrize("row", sorted(REGIMES))
def test_large_parameter_regimes(row, criterion, tmp_path, capsys):
    name, g, q, mu = REGIMES[row]
    log = criterion(f"regime {row}: {name} g={g} q={q} mu={mu} completes in < 10 min")
    out = tmp_path / "p.json"
    t0 = time.perf_counter()
    code = run_cli("plan", "--scenario", name, "--g", g, "--q", q, "--mu", mu,
                   "--seed", 0, "--time-limit", 600, "--out", out)
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    verified = code == 0 and verify_plan(load_bundled(name), load_plan(out.read_bytes())).ok
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss // 1024
    outcome = "solved" if verified else ("infeasible" if code == 2 else f"exit {code}")
    ok = elapsed < 600 and (verified or code == 2)
    log.finish(ok, f"{outcome}, {elapsed:.1f}s, process peak rss so far {rss} MB")
    assert ok
