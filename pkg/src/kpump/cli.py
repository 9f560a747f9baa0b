"""Command-line frontend.

Subcommands: plan, kbasic, verify, pebble, svg, bench. Run ``kpump -h``.
"""
from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time
from pathlib import Path

from .graphgen import SamplingExhausted
from .pebble import PebbleError, format_pebble_path, parse_pebble_text, pebble_solve
from .roadmap import InvalidQuery, PlannerParams, QueryInfeasible, preprocess, query
from .scenario import (Plan, Scenario, ScenarioError, bundled_scenarios, load_bundled,
                       load_plan, load_scenario, save_plan)
from .svg import render_svg
from .verify import plan_stats, verify_plan

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2


class InputError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"kpump: {msg}", file=sys.stderr)


def read_scenario(spec: str) -> Scenario:
    """A file path, or the name of a bundled scenario."""
    p = Path(spec)
    if p.exists():
        try:
            return load_scenario(p.read_bytes())
        except ScenarioError as exc:
            raise InputError(f"{spec}: {exc}") from None
    if spec in bundled_scenarios():
        return load_bundled(spec)
    raise InputError(f"{spec}: no such file or bundled scenario")


def _read_plan(path: str) -> Plan:
    try:
        return load_plan(Path(path).read_bytes())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ScenarioError as exc:
        raise InputError(f"{path}: {exc}") from None


def _params(args, baseline) -> PlannerParams:
    try:
        return PlannerParams(g=args.g, q=args.q, mu=args.mu, seed=args.seed, baseline=baseline,
                             time_limit=args.time_limit, threads=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def run_planner(scenario: Scenario, params: PlannerParams):
    """Preprocess plus query; returns (plan or None, state or None, message)."""
    try:
        params.effective_mu(scenario)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        state = preprocess(scenario, params)
    except SamplingExhausted as exc:
        return None, None, f"no pebble graph could be sampled: {exc}"
    try:
        return query(state), state, ""
    except InvalidQuery as exc:
        raise InputError(str(exc)) from None
    except QueryInfeasible as exc:
        return None, state, str(exc)


def cmd_plan(args, baseline=None) -> int:
    scenario = read_scenario(args.scenario)
    params = _params(args, baseline)
    t0 = time.monotonic()
    plan, state, msg = run_planner(scenario, params)
    elapsed = time.monotonic() - t0
    if plan is None:
        _err(f"no plan found: {msg}")
        if state is not None and state.warnings:
            _err("; ".join(state.warnings[:5]))
        return EXIT_INFEASIBLE
    try:
        Path(args.out).write_bytes(save_plan(plan))
    except OSError as exc:
        raise InputError(f"{args.out}: {exc.strerror}") from None
    stats = plan_stats(plan)
    rm = state.stats()
    print(f"steps={stats['step_count']} total_length={stats['total_length']:.6g} "
          f"graphs={rm['graphs']} nodes={rm['nodes']} "
          f"connection_edges={rm['connection_edges']} time={elapsed:.3f}s")
    return EXIT_OK


def cmd_verify(args) -> int:
    scenario = read_scenario(args.scenario)
    plan = _read_plan(args.plan)
    rep = verify_plan(scenario, plan, eps=args.eps)
    sys.stdout.write(rep.to_json().decode())
    return EXIT_OK if rep.ok else EXIT_INPUT


def cmd_pebble(args) -> int:
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
    except OSError as exc:
        raise InputError(f"{args.file}: {exc.strerror}") from None
    try:
        g, s, t = parse_pebble_text(text)
        pp = pebble_solve(g, s, t)
    except (PebbleError, ValueError) as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(format_pebble_path(pp))
    return EXIT_OK


def cmd_svg(args) -> int:
    scenario = read_scenario(args.scenario)
    plan = _read_plan(args.plan) if args.plan else None
    doc = render_svg(scenario, plan, step_seconds=args.step_seconds)
    try:
        Path(args.out).write_text(doc)
    except OSError as exc:
        raise InputError(f"{args.out}: {exc.strerror}") from None
    return EXIT_OK


def incremental_scenario(scenario: Scenario, count: int) -> Scenario:
    """The first ``count`` robots, taken round-robin over the colors.

    Colors keep their radius; colors with no robot yet are dropped.
    """
    order = []
    longest = max(c.robot_count for c in scenario.colors)
    for i in range(longest):
        for c, spec in enumerate(scenario.colors):
            if i < spec.robot_count:
                order.append((c, i))
    chosen = order[:count]
    colors = []
    for c, spec in enumerate(scenario.colors):
        idx = sorted(i for cc, i in chosen if cc == c)
        if idx:
            colors.append({"radius": spec.radius,
                           "starts": [list(scenario.starts[c][i]) for i in idx],
                           "targets": [list(scenario.targets[c][i]) for i in idx]})
    w = scenario.workspace
    return Scenario.build([list(v) for v in w.boundary.vertices],
                          [[list(v) for v in ob.vertices] for ob in w.obstacles],
                          colors, name=f"{scenario.name}-{count}")


def regroup(scenario: Scenario, groups: int) -> Scenario:
    """Recolor so that robot number i (in file order) joins group i mod ``groups``."""
    radii = {c.radius for c in scenario.colors}
    if len(radii) != 1:
        raise InputError("regrouping needs all robots to share one radius")
    robots = [(scenario.starts[c][i], scenario.targets[c][i]) for c, i in scenario.robots()]
    if not 1 <= groups <= len(robots):
        raise InputError(f"groups must lie in 1..{len(robots)}")
    radius = radii.pop()
    colors = [{"radius": radius, "starts": [], "targets": []} for _ in range(groups)]
    for i, (s, t) in enumerate(robots):
        colors[i % groups]["starts"].append(list(s))
        colors[i % groups]["targets"].append(list(t))
    w = scenario.workspace
    return Scenario.build([list(v) for v in w.boundary.vertices],
                          [[list(v) for v in ob.vertices] for ob in w.obstacles],
                          colors, name=f"{scenario.name}-k{groups}")


def bench_table(scenario: Scenario, counts, seeds, g, q, mu_factor, time_limit,
                planners=("kpump", "kbasic")) -> list[dict]:
    rows = []
    for n in counts:
        sub = incremental_scenario(scenario, n)
        for name in planners:
            ok, times = 0, []
            for seed in seeds:
                params = PlannerParams(g=g, q=q, mu=mu_factor * n, seed=seed,
                                       baseline="kbasic" if name == "kbasic" else None,
                                       time_limit=time_limit)
                t0 = time.monotonic()
                plan, _, _ = run_planner(sub, params)
                times.append(time.monotonic() - t0)
                ok += plan is not None
            rows.append({"robots": n, "planner": name, "success": ok, "runs": len(seeds),
                         "median_s": statistics.median(times), "max_s": max(times)})
    return rows


def cmd_bench(args) -> int:
    scenario = read_scenario(args.scenario)
    if args.groups is not None:
        scenario = regroup(scenario, args.groups)
    total = scenario.robot_count
    counts = args.counts or list(range(1, total + 1))
    if any(not 1 <= n <= total for n in counts):
        raise InputError(f"robot counts must lie in 1..{total}")
    seeds = list(range(args.seed, args.seed + args.seeds))
    rows = bench_table(scenario, counts, seeds, args.g, args.q, args.mu_factor,
                       args.time_limit)
    if args.json:
        print(json.dumps(rows, indent=1))
        return EXIT_OK
    print(f"{'robots':>6} {'planner':>8} {'success':>8} {'median_s':>9} {'max_s':>8}")
    for r in rows:
        print(f"{r['robots']:>6} {r['planner']:>8} {r['success']:>4}/{r['runs']:<3} "
              f"{r['median_s']:>9.3f} {r['max_s']:>8.3f}")
    return EXIT_OK


def _planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p.add_argument("--g", type=int, default=10, help="number of sampled pebble graphs")
    p.add_argument("--q", type=int, default=10, help="connections per graph pair")
    p.add_argument("--mu", type=int, default=None,
                   help="total pumped size (default: twice the robot count)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="plan file to write")
    p.add_argument("--time-limit", type=float, default=None, metavar="SECS")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpump", description="Multi-color disc robot planner.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a scenario")
    _planner_flags(p)
    p.add_argument("--baseline", choices=["kbasic"], default=None)

    p = sub.add_parser("kbasic", help="plan with unpumped configurations")
    _planner_flags(p)

    p = sub.add_parser("verify", help="check a plan file against a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--eps", type=float, default=1e-6, help="position matching tolerance")

    p = sub.add_parser("pebble", help="solve a text-format pebble instance")
    p.add_argument("file", help="instance file, or - for stdin")

    p = sub.add_parser("svg", help="render a scenario and optional plan")
    p.add_argument("--scenario", required=True)
    p.add_argument("--plan", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--step-seconds", type=float, default=1.0)

    p = sub.add_parser("bench", help="success/runtime table while adding robots one by one")
    p.add_argument("--scenario", required=True)
    p.add_argument("--counts", type=int, nargs="*", default=None)
    p.add_argument("--groups", type=int, default=None,
                   help="recolor robot i into group i mod GROUPS first")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--g", type=int, default=10)
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--mu-factor", type=int, default=2, help="pumped size per robot")
    p.add_argument("--time-limit", type=float, default=60.0, metavar="SECS")
    p.add_argument("--json", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "plan": lambda a: cmd_plan(a, a.baseline),
        "kbasic": lambda a: cmd_plan(a, "kbasic"),
        "verify": cmd_verify,
        "pebble": cmd_pebble,
        "svg": cmd_svg,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except InputError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
